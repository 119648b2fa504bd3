#include <doctest.h>

#include "defba/model.hpp"
#include "defba/model_io.hpp"
#include "test_util.hpp"

using namespace defba;
using testutil::Rng;

namespace {

// small random model built class-first so the block rules hold by
// construction: nutrient -> metabolites -> {storage, macromolecules}
MetabolicModel random_model(Rng& rng, int extra_species = 3, int extra_reactions = 4) {
  std::vector<Species> sp = {
      Species{.id = "nut", .cls = SpeciesClass::external},
      Species{.id = "met0", .cls = SpeciesClass::metabolite},
      Species{.id = "enz", .cls = SpeciesClass::macromolecule, .mol_weight = rng.frac(2, 2, 20)},
  };
  for (int i = 0; i < extra_species; ++i) {
    const int kind = rng.range(0, 2);
    const std::string id = "s" + std::to_string(i);
    if (kind == 0)
      sp.push_back(Species{.id = id, .cls = SpeciesClass::metabolite});
    else if (kind == 1)
      sp.push_back(Species{.id = id, .cls = SpeciesClass::storage, .mol_weight = rng.frac(2, 2, 20)});
    else
      sp.push_back(
          Species{.id = id, .cls = SpeciesClass::macromolecule, .mol_weight = rng.frac(2, 2, 20)});
  }

  std::vector<std::string> mets = {"met0"}, stores, macros = {"enz"};
  for (const Species& s : sp) {
    if (s.id == "met0" || s.id == "enz") continue;
    if (s.cls == SpeciesClass::metabolite) mets.push_back(s.id);
    if (s.cls == SpeciesClass::storage) stores.push_back(s.id);
    if (s.cls == SpeciesClass::macromolecule) macros.push_back(s.id);
  }

  std::vector<Reaction> rx = {
      Reaction{.id = "uptake",
               .cls = ReactionClass::exchange,
               .stoich = {{"nut", -1.0}, {"met0", 1.0}},
               .kcat_fwd = rng.frac(2, 1, 8),
               .enzyme = "enz"},
      Reaction{.id = "make_enz",
               .cls = ReactionClass::biomass,
               .stoich = {{"met0", -rng.frac(2, 1, 4)}, {"enz", 1.0}},
               .kcat_fwd = rng.frac(2, 1, 8),
               .enzyme = "enz"},
  };
  for (int i = 0; i < extra_reactions; ++i) {
    const std::string id = "r" + std::to_string(i);
    const int kind = rng.range(0, 2);
    Reaction r;
    r.id = id;
    if (kind == 0 && mets.size() >= 2) {
      r.cls = ReactionClass::metabolic;
      r.stoich = {{mets[0], -1.0}, {mets[rng.range(1, (int)mets.size() - 1)], rng.frac(2, 1, 6)}};
    } else if (kind == 1 && !stores.empty()) {
      r.cls = ReactionClass::storage;
      r.stoich = {{mets[0], -1.0}, {stores[rng.range(0, (int)stores.size() - 1)], 1.0}};
    } else {
      r.cls = ReactionClass::biomass;
      r.stoich = {{mets[0], -rng.frac(2, 1, 4)},
                  {macros[rng.range(0, (int)macros.size() - 1)], 1.0}};
    }
    r.reversible = rng.range(0, 3) == 0;
    if (rng.range(0, 1) == 0) {
      r.enzyme = macros[rng.range(0, (int)macros.size() - 1)];
      r.kcat_fwd = rng.frac(2, 1, 8);
      if (r.reversible) r.kcat_bwd = rng.frac(2, 1, 8);
    }
    rx.push_back(std::move(r));
  }
  return MetabolicModel::create(sp, rx);
}

} // namespace

TEST_CASE("toy model assembly matches the hand-built matrices") {
  const ParsedModel pm = toy_model();
  const MetabolicModel& model = pm.model;
  REQUIRE(model.n_y() == 1);
  REQUIRE(model.n_x() == 1);
  REQUIRE(model.n_c() == 1);
  REQUIRE(model.n_p() == 1);
  REQUIRE(model.m() == 3);

  const ConstraintMatrices cm = assemble_matrices(model);
  const int jA = model.reaction_index("v_A");
  const int jE = model.reaction_index("v_E");
  const int jM = model.reaction_index("v_M");

  // metabolite row: produced by uptake, consumed by both syntheses
  CHECK(cm.S_X(0, jA) == 1.0);
  CHECK(cm.S_X(0, jE) == -1.0);
  CHECK(cm.S_X(0, jM) == -1.0);

  // single capacity row for the enzyme, entries 1/kcat per catalyzed flux
  REQUIRE(cm.H_c.rows() == 1);
  CHECK(cm.H_c(0, jA) == doctest::Approx(1.0 / 1.5));
  CHECK(cm.H_c(0, jE) == doctest::Approx(1.0 / 1.0));
  CHECK(cm.H_c(0, jM) == doctest::Approx(1.0 / 2.0));
  CHECK(cm.H_c.row(0).tail(3).isZero());  // irreversible: no backward entries
  CHECK(cm.H_e(0, 0) == 1.0);

  // no composition rules, no maintenance
  CHECK(cm.H_b.rows() == 0);
  CHECK(cm.H_m.rows() == 0);

  // zero blocks: storage/macromolecule rows live only in their own classes
  CHECK(cm.S_C(0, jA) == 0.0);
  CHECK(cm.S_C(0, jE) == 0.0);
  CHECK(cm.S_C(0, jM) == 1.0);
  CHECK(cm.S_P(0, jE) == 1.0);
  CHECK(cm.S_P(0, jM) == 0.0);
  // nutrient consumption is recorded for all three reactions
  CHECK(cm.S_Y(0, jA) == -1.0);
  CHECK(cm.S_Y(0, jE) == -1.0);
  CHECK(cm.S_Y(0, jM) == -1.0);
}

TEST_CASE("toy fixture carries the published parameters") {
  const ParsedModel pm = toy_model();
  const MetabolicModel& m = pm.model;
  CHECK(m.b_c()[0] == 15.0);  // storage M
  CHECK(m.b_p()[0] == 10.0);  // enzyme E
  CHECK(*m.reactions()[m.reaction_index("v_A")].kcat_fwd == 1.5);
  CHECK(*m.reactions()[m.reaction_index("v_M")].kcat_fwd == 2.0);
  CHECK(*m.reactions()[m.reaction_index("v_E")].kcat_fwd == 1.0);
  CHECK(objective_biomass(m, pm.initial_state) == doctest::Approx(2.5));
}

TEST_CASE("biomass accounting") {
  const ParsedModel pm = toy_model();
  SystemState st = pm.initial_state;
  CHECK(total_biomass(pm.model, st) == doctest::Approx(2.5));  // 10*0.1 + 15*0.1

  st.C.setZero();
  st.P.setZero();
  CHECK(total_biomass(pm.model, st) == 0.0);
  CHECK(objective_biomass(pm.model, st) == 0.0);

  SystemState bad = st;
  bad.P.resize(2);
  CHECK_THROWS_AS(total_biomass(pm.model, bad), DimensionMismatch);
}

TEST_CASE("objective weights may be zeroed per species") {
  std::vector<Species> sp = {
      Species{.id = "n", .cls = SpeciesClass::external},
      Species{.id = "x", .cls = SpeciesClass::metabolite},
      Species{.id = "p", .cls = SpeciesClass::macromolecule, .mol_weight = 7.0, .obj_weight = 0.0},
      Species{.id = "q", .cls = SpeciesClass::macromolecule, .mol_weight = 3.0},
  };
  std::vector<Reaction> rx = {
      Reaction{.id = "mk",
               .cls = ReactionClass::biomass,
               .stoich = {{"x", -1.0}, {"p", 1.0}, {"q", 1.0}}},
      Reaction{.id = "up", .cls = ReactionClass::exchange, .stoich = {{"n", -1.0}, {"x", 1.0}}},
  };
  const MetabolicModel m = MetabolicModel::create(sp, rx);
  const SystemState st = state_from_amounts(m, {{"p", 2.0}, {"q", 5.0}});
  CHECK(total_biomass(m, st) == doctest::Approx(7.0 * 2 + 3.0 * 5));
  CHECK(objective_biomass(m, st) == doctest::Approx(3.0 * 5));  // p contributes nothing
}

TEST_CASE("random models: assembled columns equal per-reaction stoichiometry") {
  Rng rng(911);
  for (int trial = 0; trial < 25; ++trial) {
    const MetabolicModel m = random_model(rng);
    const ConstraintMatrices cm = assemble_matrices(m);
    for (int j = 0; j < m.m(); ++j) {
      Eigen::VectorXd col = Eigen::VectorXd::Zero(m.n());
      for (const auto& [id, coeff] : m.reactions()[j].stoich) col[m.species_index(id)] = coeff;
      for (int i = 0; i < m.n(); ++i) {
        const int l = m.local_index(i);
        double got = 0.0;
        switch (m.species()[i].cls) {
          case SpeciesClass::external: got = cm.S_Y(l, j); break;
          case SpeciesClass::metabolite: got = cm.S_X(l, j); break;
          case SpeciesClass::storage: got = cm.S_C(l, j); break;
          case SpeciesClass::macromolecule: got = cm.S_P(l, j); break;
        }
        CHECK(got == col[i]);
      }
    }

    // one capacity row per macromolecule with a nonempty catalysis set
    int expected_rows = 0;
    for (int p = 0; p < m.n_p(); ++p)
      if (!m.catalyzed_reactions(p).empty()) ++expected_rows;
    CHECK(cm.H_c.rows() == expected_rows);
    for (double v : cm.H_c.reshaped()) CHECK(v >= 0.0);
  }
}

TEST_CASE("assembly is deterministic") {
  Rng a(5), b(5);
  const MetabolicModel m1 = random_model(a), m2 = random_model(b);
  const ConstraintMatrices c1 = assemble_matrices(m1), c2 = assemble_matrices(m2);
  CHECK(c1.S_Y == c2.S_Y);
  CHECK(c1.S_X == c2.S_X);
  CHECK(c1.S_C == c2.S_C);
  CHECK(c1.S_P == c2.S_P);
  CHECK(c1.H_c == c2.H_c);
  CHECK(c1.H_e == c2.H_e);
  CHECK(c1.H_b == c2.H_b);
  CHECK(c1.H_m == c2.H_m);
}

TEST_CASE("composition rows satisfy the defining inequality exactly") {
  std::vector<Species> sp = {
      Species{.id = "n", .cls = SpeciesClass::external},
      Species{.id = "x", .cls = SpeciesClass::metabolite},
      Species{.id = "wall", .cls = SpeciesClass::macromolecule, .mol_weight = 4.0},
      Species{.id = "enz", .cls = SpeciesClass::macromolecule, .mol_weight = 10.0},
      Species{.id = "gly", .cls = SpeciesClass::storage, .mol_weight = 2.0},
  };
  std::vector<Reaction> rx = {
      Reaction{.id = "up", .cls = ReactionClass::exchange, .stoich = {{"n", -1.0}, {"x", 1.0}}},
      Reaction{.id = "mw", .cls = ReactionClass::biomass, .stoich = {{"x", -1.0}, {"wall", 1.0}}},
      Reaction{.id = "mg", .cls = ReactionClass::storage, .stoich = {{"x", -1.0}, {"gly", 1.0}}},
  };
  const double psi = 0.3;
  const MetabolicModel m = MetabolicModel::create(sp, rx, {CompositionRule{"wall", psi}});
  const ConstraintMatrices cm = assemble_matrices(m);
  REQUIRE(cm.H_b.rows() == 1);

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemState st = state_from_amounts(
        m, {{"wall", rng.uniform(0, 5)}, {"enz", rng.uniform(0, 5)}, {"gly", rng.uniform(0, 5)}});
    Eigen::VectorXd cp(m.n_c() + m.n_p());
    cp << st.C, st.P;
    const double row_value = cm.H_b.row(0).dot(cp);
    const double wall = st.P[m.local_index(m.species_index("wall"))];
    CHECK(row_value == doctest::Approx(psi * total_biomass(m, st) - wall).epsilon(1e-12));
  }
}

TEST_CASE("maintenance rows exist only for declared maintenance reactions") {
  std::vector<Species> sp = {
      Species{.id = "n", .cls = SpeciesClass::external},
      Species{.id = "x", .cls = SpeciesClass::metabolite},
      Species{.id = "p", .cls = SpeciesClass::macromolecule, .mol_weight = 5.0},
  };
  std::vector<Reaction> rx = {
      Reaction{.id = "up", .cls = ReactionClass::exchange, .stoich = {{"n", -1.0}, {"x", 1.0}}},
      Reaction{.id = "mk",
               .cls = ReactionClass::biomass,
               .stoich = {{"x", -1.0}, {"p", 1.0}},
               .maintenance_phi = 0.25},
  };
  const MetabolicModel m = MetabolicModel::create(sp, rx);
  const ConstraintMatrices cm = assemble_matrices(m);
  REQUIRE(cm.H_m.rows() == 1);
  CHECK(cm.maintenance_reaction[0] == m.reaction_index("mk"));
  CHECK(cm.H_m(0, 0) == doctest::Approx(0.25 * 5.0));
}

TEST_CASE("validation errors") {
  std::vector<Species> base_sp = {
      Species{.id = "n", .cls = SpeciesClass::external},
      Species{.id = "x", .cls = SpeciesClass::metabolite},
      Species{.id = "p", .cls = SpeciesClass::macromolecule, .mol_weight = 1.0},
  };
  Reaction up{.id = "up", .cls = ReactionClass::exchange, .stoich = {{"n", -1.0}, {"x", 1.0}}};
  Reaction mk{.id = "mk", .cls = ReactionClass::biomass, .stoich = {{"x", -1.0}, {"p", 1.0}}};

  SUBCASE("unknown species in stoichiometry") {
    Reaction bad = mk;
    bad.stoich["ghost"] = 1.0;
    CHECK_THROWS_AS(MetabolicModel::create(base_sp, {up, bad}), UnknownSpeciesRef);
  }
  SUBCASE("unknown enzyme") {
    Reaction bad = mk;
    bad.enzyme = "ghost";
    bad.kcat_fwd = 1.0;
    CHECK_THROWS_AS(MetabolicModel::create(base_sp, {up, bad}), UnknownSpeciesRef);
  }
  SUBCASE("catalyzed without forward kcat") {
    Reaction bad = mk;
    bad.enzyme = "p";
    CHECK_THROWS_AS(MetabolicModel::create(base_sp, {up, bad}), MissingKcat);
  }
  SUBCASE("reversible catalyzed without backward kcat") {
    Reaction bad = mk;
    bad.enzyme = "p";
    bad.kcat_fwd = 1.0;
    bad.reversible = true;
    CHECK_THROWS_AS(MetabolicModel::create(base_sp, {up, bad}), MissingKcat);
  }
  SUBCASE("exchange reaction touching a macromolecule") {
    Reaction bad{.id = "b", .cls = ReactionClass::exchange, .stoich = {{"n", -1.0}, {"p", 1.0}}};
    CHECK_THROWS_AS(MetabolicModel::create(base_sp, {up, mk, bad}), BlockViolation);
  }
  SUBCASE("one reaction touching both storage and macromolecules") {
    auto sp = base_sp;
    sp.push_back(Species{.id = "c", .cls = SpeciesClass::storage, .mol_weight = 1.0});
    Reaction bad{.id = "b",
                 .cls = ReactionClass::biomass,
                 .stoich = {{"x", -1.0}, {"p", 1.0}, {"c", 1.0}}};
    CHECK_THROWS_AS(MetabolicModel::create(sp, {up, mk, bad}), BlockViolation);
  }
  SUBCASE("metabolic reaction touching an external species") {
    Reaction bad{.id = "b", .cls = ReactionClass::metabolic, .stoich = {{"n", -1.0}, {"x", 1.0}}};
    CHECK_THROWS_AS(MetabolicModel::create(base_sp, {up, mk, bad}), BlockViolation);
  }
  SUBCASE("duplicate ids") {
    CHECK_THROWS_AS(MetabolicModel::create(base_sp, {up, up, mk}), ValidationError);
  }
  SUBCASE("missing weight") {
    auto sp = base_sp;
    sp[2].mol_weight.reset();
    CHECK_THROWS_AS(MetabolicModel::create(sp, {up, mk}), ValidationError);
  }
  SUBCASE("composition fraction out of range") {
    CHECK_THROWS_AS(MetabolicModel::create(base_sp, {up, mk}, {CompositionRule{"p", 1.0}}),
                    ValidationError);
  }
  SUBCASE("model without macromolecules") {
    std::vector<Species> sp = {Species{.id = "n", .cls = SpeciesClass::external},
                               Species{.id = "x", .cls = SpeciesClass::metabolite}};
    CHECK_THROWS_AS(
        MetabolicModel::create(
            sp, {Reaction{.id = "up",
                          .cls = ReactionClass::exchange,
                          .stoich = {{"n", -1.0}, {"x", 1.0}}}}),
        ValidationError);
  }
}
