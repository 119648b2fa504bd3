#include "defba/model.hpp"

#include <algorithm>
#include <set>

namespace defba {

const char* to_string(SpeciesClass c) {
  switch (c) {
    case SpeciesClass::external: return "external";
    case SpeciesClass::metabolite: return "metabolite";
    case SpeciesClass::storage: return "storage";
    case SpeciesClass::macromolecule: return "macromolecule";
  }
  return "?";
}

const char* to_string(ReactionClass c) {
  switch (c) {
    case ReactionClass::exchange: return "exchange";
    case ReactionClass::metabolic: return "metabolic";
    case ReactionClass::storage: return "storage";
    case ReactionClass::biomass: return "biomass";
  }
  return "?";
}

namespace {

int class_rank(SpeciesClass c) { return static_cast<int>(c); }
int class_rank(ReactionClass c) { return static_cast<int>(c); }

// Species classes a reaction of the given class may touch. Exchange and
// metabolic reactions keep the zero blocks of the stoichiometric matrix
// exactly; storage and biomass reactions may consume external species
// (nutrient-consuming synthesis steps need this).
void check_reaction_classes(const Reaction& r,
                            const std::map<std::string, SpeciesClass>& cls_of) {
  bool touches_y = false, touches_x = false, touches_c = false, touches_p = false;
  for (const auto& [id, coeff] : r.stoich) {
    if (coeff == 0.0) continue;
    switch (cls_of.at(id)) {
      case SpeciesClass::external: touches_y = true; break;
      case SpeciesClass::metabolite: touches_x = true; break;
      case SpeciesClass::storage: touches_c = true; break;
      case SpeciesClass::macromolecule: touches_p = true; break;
    }
  }
  auto fail = [&](const std::string& why) {
    throw BlockViolation("reaction '" + r.id + "': " + why);
  };
  switch (r.cls) {
    case ReactionClass::exchange:
      if (!touches_y) fail("exchange reaction touches no external species");
      if (touches_c || touches_p)
        fail("exchange reaction touches storage/macromolecule species");
      break;
    case ReactionClass::metabolic:
      if (!touches_x) fail("metabolic reaction touches no metabolite");
      if (touches_y || touches_c || touches_p)
        fail("metabolic reaction touches non-metabolite species");
      break;
    case ReactionClass::storage:
      if (!touches_c) fail("storage reaction touches no storage species");
      if (touches_p) fail("storage reaction touches a macromolecule");
      break;
    case ReactionClass::biomass:
      if (!touches_p) fail("biomass reaction touches no macromolecule");
      if (touches_c) fail("biomass reaction touches a storage species");
      break;
  }
}

} // namespace

MetabolicModel MetabolicModel::create(std::vector<Species> species,
                                      std::vector<Reaction> reactions,
                                      std::vector<CompositionRule> rules) {
  MetabolicModel mm;

  // canonical partition order, stable within each class
  std::stable_sort(species.begin(), species.end(), [](const Species& a, const Species& b) {
    return class_rank(a.cls) < class_rank(b.cls);
  });
  std::stable_sort(reactions.begin(), reactions.end(), [](const Reaction& a, const Reaction& b) {
    return class_rank(a.cls) < class_rank(b.cls);
  });

  std::map<std::string, SpeciesClass> cls_of;
  for (int i = 0; i < static_cast<int>(species.size()); ++i) {
    const Species& s = species[i];
    if (s.id.empty()) throw ValidationError("species with empty id");
    if (!mm.species_by_id_.emplace(s.id, i).second)
      throw ValidationError("duplicate species id '" + s.id + "'");
    cls_of[s.id] = s.cls;
    bool weighted = s.cls == SpeciesClass::storage || s.cls == SpeciesClass::macromolecule;
    if (weighted) {
      if (!s.mol_weight || *s.mol_weight <= 0.0)
        throw ValidationError("species '" + s.id + "' needs mol_weight > 0");
      if (s.obj_weight && *s.obj_weight < 0.0)
        throw ValidationError("species '" + s.id + "' has obj_weight < 0");
    }
    switch (s.cls) {
      case SpeciesClass::external: ++mm.n_y_; break;
      case SpeciesClass::metabolite: ++mm.n_x_; break;
      case SpeciesClass::storage: ++mm.n_c_; break;
      case SpeciesClass::macromolecule: ++mm.n_p_; break;
    }
  }

  for (int j = 0; j < static_cast<int>(reactions.size()); ++j) {
    const Reaction& r = reactions[j];
    if (r.id.empty()) throw ValidationError("reaction with empty id");
    if (!mm.reactions_by_id_.emplace(r.id, j).second)
      throw ValidationError("duplicate reaction id '" + r.id + "'");
    if (r.stoich.empty())
      throw ValidationError("reaction '" + r.id + "' has empty stoichiometry");
    for (const auto& [id, coeff] : r.stoich) {
      (void)coeff;
      if (!cls_of.count(id))
        throw UnknownSpeciesRef("reaction '" + r.id + "' references unknown species '" + id + "'");
    }
    if (r.kcat_fwd && *r.kcat_fwd <= 0.0)
      throw ValidationError("reaction '" + r.id + "' has kcat_fwd <= 0");
    if (r.kcat_bwd && *r.kcat_bwd <= 0.0)
      throw ValidationError("reaction '" + r.id + "' has kcat_bwd <= 0");
    if (r.maintenance_phi && (*r.maintenance_phi < 0.0 || *r.maintenance_phi >= 1.0))
      throw ValidationError("reaction '" + r.id + "' has maintenance_phi outside [0,1)");
    if (r.enzyme) {
      auto it = cls_of.find(*r.enzyme);
      if (it == cls_of.end())
        throw UnknownSpeciesRef("reaction '" + r.id + "' references unknown enzyme '" + *r.enzyme + "'");
      if (it->second != SpeciesClass::macromolecule)
        throw ValidationError("enzyme '" + *r.enzyme + "' of reaction '" + r.id +
                              "' is not a macromolecule");
      if (!r.kcat_fwd)
        throw MissingKcat("catalyzed reaction '" + r.id + "' has no kcat_fwd");
      if (r.reversible && !r.kcat_bwd)
        throw MissingKcat("reversible catalyzed reaction '" + r.id + "' has no kcat_bwd");
    }
    check_reaction_classes(r, cls_of);
    switch (r.cls) {
      case ReactionClass::exchange: ++mm.m_y_; break;
      case ReactionClass::metabolic: ++mm.m_x_; break;
      case ReactionClass::storage: ++mm.m_c_; break;
      case ReactionClass::biomass: ++mm.m_p_; break;
    }
  }

  if (mm.n_p_ == 0) throw ValidationError("model must contain at least one macromolecule");

  mm.species_ = std::move(species);
  mm.reactions_ = std::move(reactions);

  for (const CompositionRule& rule : rules) {
    auto it = mm.species_by_id_.find(rule.species);
    if (it == mm.species_by_id_.end())
      throw UnknownSpeciesRef("composition rule references unknown species '" + rule.species + "'");
    SpeciesClass c = mm.species_[it->second].cls;
    if (c != SpeciesClass::storage && c != SpeciesClass::macromolecule)
      throw ValidationError("composition rule species '" + rule.species +
                            "' is not storage or macromolecule");
    if (rule.fraction < 0.0 || rule.fraction >= 1.0)
      throw ValidationError("composition fraction for '" + rule.species + "' outside [0,1)");
  }
  mm.rules_ = std::move(rules);

  // weight vectors over the C and P blocks
  mm.w_c_.resize(mm.n_c_); mm.b_c_.resize(mm.n_c_);
  mm.w_p_.resize(mm.n_p_); mm.b_p_.resize(mm.n_p_);
  for (int i = 0; i < mm.n(); ++i) {
    const Species& s = mm.species_[i];
    if (s.cls == SpeciesClass::storage) {
      int l = i - mm.c_offset();
      mm.w_c_[l] = *s.mol_weight;
      mm.b_c_[l] = s.obj_weight ? *s.obj_weight : *s.mol_weight;
    } else if (s.cls == SpeciesClass::macromolecule) {
      int l = i - mm.p_offset();
      mm.w_p_[l] = *s.mol_weight;
      mm.b_p_[l] = s.obj_weight ? *s.obj_weight : *s.mol_weight;
    }
  }

  // catalysis sets cat(P_i)
  mm.cat_.assign(mm.n_p_, {});
  for (int j = 0; j < mm.m(); ++j) {
    const Reaction& r = mm.reactions_[j];
    if (!r.enzyme) continue;
    int p_local = mm.species_by_id_.at(*r.enzyme) - mm.p_offset();
    mm.cat_[p_local].push_back(j);
  }

  return mm;
}

int MetabolicModel::species_index(const std::string& id) const {
  auto it = species_by_id_.find(id);
  if (it == species_by_id_.end()) throw UnknownSpeciesRef("unknown species '" + id + "'");
  return it->second;
}

int MetabolicModel::reaction_index(const std::string& id) const {
  auto it = reactions_by_id_.find(id);
  if (it == reactions_by_id_.end()) throw UnknownSpeciesRef("unknown reaction '" + id + "'");
  return it->second;
}

int MetabolicModel::local_index(int species_idx) const {
  switch (species_[species_idx].cls) {
    case SpeciesClass::external: return species_idx - y_offset();
    case SpeciesClass::metabolite: return species_idx - x_offset();
    case SpeciesClass::storage: return species_idx - c_offset();
    case SpeciesClass::macromolecule: return species_idx - p_offset();
  }
  return -1;
}

ConstraintMatrices assemble_matrices(const MetabolicModel& model) {
  ConstraintMatrices cm;
  const int m = model.m();

  cm.S_Y = Eigen::MatrixXd::Zero(model.n_y(), m);
  cm.S_X = Eigen::MatrixXd::Zero(model.n_x(), m);
  cm.S_C = Eigen::MatrixXd::Zero(model.n_c(), m);
  cm.S_P = Eigen::MatrixXd::Zero(model.n_p(), m);
  for (int j = 0; j < m; ++j) {
    for (const auto& [id, coeff] : model.reactions()[j].stoich) {
      int i = model.species_index(id);
      int l = model.local_index(i);
      switch (model.species()[i].cls) {
        case SpeciesClass::external: cm.S_Y(l, j) = coeff; break;
        case SpeciesClass::metabolite: cm.S_X(l, j) = coeff; break;
        case SpeciesClass::storage: cm.S_C(l, j) = coeff; break;
        case SpeciesClass::macromolecule: cm.S_P(l, j) = coeff; break;
      }
    }
  }

  // capacity rows: one per macromolecule with a nonempty catalysis set;
  // split fluxes enter with 1/kcat_fwd and 1/kcat_bwd
  for (int p = 0; p < model.n_p(); ++p)
    if (!model.catalyzed_reactions(p).empty()) cm.capacity_enzyme.push_back(p);
  const int n_cap = static_cast<int>(cm.capacity_enzyme.size());
  cm.H_c = Eigen::MatrixXd::Zero(n_cap, 2 * m);
  cm.H_e = Eigen::MatrixXd::Zero(n_cap, model.n_p());
  for (int r = 0; r < n_cap; ++r) {
    int p = cm.capacity_enzyme[r];
    cm.H_e(r, p) = 1.0;
    for (int j : model.catalyzed_reactions(p)) {
      const Reaction& rx = model.reactions()[j];
      cm.H_c(r, j) = 1.0 / *rx.kcat_fwd;
      if (rx.reversible) cm.H_c(r, m + j) = 1.0 / *rx.kcat_bwd;
    }
  }

  // composition rows: psi * (w_C, w_P) with -1 at the rule species
  const int ncp = model.n_c() + model.n_p();
  cm.H_b = Eigen::MatrixXd::Zero(static_cast<int>(model.composition_rules().size()), ncp);
  for (int r = 0; r < cm.H_b.rows(); ++r) {
    const CompositionRule& rule = model.composition_rules()[r];
    cm.H_b.row(r).head(model.n_c()) = rule.fraction * model.w_c().transpose();
    cm.H_b.row(r).tail(model.n_p()) = rule.fraction * model.w_p().transpose();
    int i = model.species_index(rule.species);
    int col = model.species()[i].cls == SpeciesClass::storage
                  ? model.local_index(i)
                  : model.n_c() + model.local_index(i);
    cm.H_b(r, col) -= 1.0;
  }

  // maintenance rows: phi * (w_C, w_P), one per declared maintenance reaction
  for (int j = 0; j < m; ++j)
    if (model.reactions()[j].maintenance_phi) cm.maintenance_reaction.push_back(j);
  cm.H_m = Eigen::MatrixXd::Zero(static_cast<int>(cm.maintenance_reaction.size()), ncp);
  for (int r = 0; r < cm.H_m.rows(); ++r) {
    double phi = *model.reactions()[cm.maintenance_reaction[r]].maintenance_phi;
    cm.H_m.row(r).head(model.n_c()) = phi * model.w_c().transpose();
    cm.H_m.row(r).tail(model.n_p()) = phi * model.w_p().transpose();
  }

  return cm;
}

namespace {
void check_state_dims(const MetabolicModel& model, const SystemState& state) {
  if (state.Y.size() != model.n_y() || state.C.size() != model.n_c() ||
      state.P.size() != model.n_p())
    throw DimensionMismatch("state dimensions do not match model partitions");
}
} // namespace

double total_biomass(const MetabolicModel& model, const SystemState& state) {
  check_state_dims(model, state);
  return model.w_c().dot(state.C) + model.w_p().dot(state.P);
}

double objective_biomass(const MetabolicModel& model, const SystemState& state) {
  check_state_dims(model, state);
  return model.b_c().dot(state.C) + model.b_p().dot(state.P);
}

SystemState state_from_amounts(const MetabolicModel& model,
                               const std::map<std::string, double>& amounts,
                               double time) {
  SystemState st;
  st.time = time;
  st.Y = Eigen::VectorXd::Zero(model.n_y());
  st.C = Eigen::VectorXd::Zero(model.n_c());
  st.P = Eigen::VectorXd::Zero(model.n_p());
  for (const auto& [id, mol] : amounts) {
    int i = model.species_index(id);
    int l = model.local_index(i);
    switch (model.species()[i].cls) {
      case SpeciesClass::external: st.Y[l] = mol; break;
      case SpeciesClass::storage: st.C[l] = mol; break;
      case SpeciesClass::macromolecule: st.P[l] = mol; break;
      case SpeciesClass::metabolite:
        throw ValidationError("metabolite '" + id + "' cannot carry an amount");
    }
  }
  return st;
}

} // namespace defba
