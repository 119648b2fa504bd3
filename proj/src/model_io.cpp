#include "defba/model_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace defba {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_fields(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) { known = true; break; }
    if (!known) throw SchemaError("unknown field '" + it.key() + "' in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + " must be a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where + " must be a string");
  return v.get<std::string>();
}

SpeciesClass species_class_from(const std::string& s, const std::string& where) {
  if (s == "external") return SpeciesClass::external;
  if (s == "metabolite") return SpeciesClass::metabolite;
  if (s == "storage") return SpeciesClass::storage;
  if (s == "macromolecule") return SpeciesClass::macromolecule;
  throw SchemaError("unknown species class '" + s + "' in " + where);
}

ReactionClass reaction_class_from(const std::string& s, const std::string& where) {
  if (s == "exchange") return ReactionClass::exchange;
  if (s == "metabolic") return ReactionClass::metabolic;
  if (s == "storage") return ReactionClass::storage;
  if (s == "biomass") return ReactionClass::biomass;
  throw SchemaError("unknown reaction class '" + s + "' in " + where);
}

} // namespace

ParsedModel parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("model document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("model document must be a JSON object");
  check_fields(doc, {"format_version", "species", "reactions", "composition_rules",
                     "initial_state", "defaults"},
               "model document");

  const std::string version = as_string(require(doc, "format_version", "model document"),
                                        "format_version");
  if (version != "1") throw SchemaError("unsupported format_version '" + version + "'");

  const json& jspecies = require(doc, "species", "model document");
  if (!jspecies.is_array()) throw SchemaError("'species' must be an array");
  std::vector<Species> species;
  for (const json& js : jspecies) {
    if (!js.is_object()) throw SchemaError("species entries must be objects");
    const std::string id = as_string(require(js, "id", "species entry"), "species id");
    const std::string where = "species '" + id + "'";
    check_fields(js, {"id", "class", "mol_weight", "obj_weight"}, where);
    Species s;
    s.id = id;
    s.cls = species_class_from(as_string(require(js, "class", where), where + " class"), where);
    if (js.contains("mol_weight")) s.mol_weight = as_number(js["mol_weight"], where + " mol_weight");
    if (js.contains("obj_weight")) s.obj_weight = as_number(js["obj_weight"], where + " obj_weight");
    species.push_back(std::move(s));
  }

  const json& jreactions = require(doc, "reactions", "model document");
  if (!jreactions.is_array()) throw SchemaError("'reactions' must be an array");
  std::vector<Reaction> reactions;
  for (const json& jr : jreactions) {
    if (!jr.is_object()) throw SchemaError("reaction entries must be objects");
    const std::string id = as_string(require(jr, "id", "reaction entry"), "reaction id");
    const std::string where = "reaction '" + id + "'";
    check_fields(jr, {"id", "class", "stoich", "reversible", "kcat_fwd", "kcat_bwd", "enzyme",
                      "maintenance_phi"},
                 where);
    Reaction r;
    r.id = id;
    r.cls = reaction_class_from(as_string(require(jr, "class", where), where + " class"), where);
    const json& jst = require(jr, "stoich", where);
    if (!jst.is_object()) throw SchemaError(where + ": 'stoich' must be an object");
    for (auto it = jst.begin(); it != jst.end(); ++it)
      r.stoich[it.key()] = as_number(it.value(), where + " stoich of '" + it.key() + "'");
    if (jr.contains("reversible")) {
      if (!jr["reversible"].is_boolean()) throw SchemaError(where + ": 'reversible' must be a boolean");
      r.reversible = jr["reversible"].get<bool>();
    }
    if (jr.contains("kcat_fwd")) r.kcat_fwd = as_number(jr["kcat_fwd"], where + " kcat_fwd");
    if (jr.contains("kcat_bwd")) r.kcat_bwd = as_number(jr["kcat_bwd"], where + " kcat_bwd");
    if (jr.contains("enzyme")) r.enzyme = as_string(jr["enzyme"], where + " enzyme");
    if (jr.contains("maintenance_phi"))
      r.maintenance_phi = as_number(jr["maintenance_phi"], where + " maintenance_phi");
    reactions.push_back(std::move(r));
  }

  std::vector<CompositionRule> rules;
  if (doc.contains("composition_rules")) {
    const json& jrules = doc["composition_rules"];
    if (!jrules.is_array()) throw SchemaError("'composition_rules' must be an array");
    for (const json& jr : jrules) {
      if (!jr.is_object()) throw SchemaError("composition rule entries must be objects");
      check_fields(jr, {"species", "fraction"}, "composition rule");
      CompositionRule rule;
      rule.species = as_string(require(jr, "species", "composition rule"), "composition species");
      rule.fraction = as_number(require(jr, "fraction", "composition rule"), "composition fraction");
      rules.push_back(std::move(rule));
    }
  }

  ParsedModel out{MetabolicModel::create(std::move(species), std::move(reactions),
                                         std::move(rules)),
                  {}, {}};

  std::map<std::string, double> amounts;
  if (doc.contains("initial_state")) {
    const json& jinit = doc["initial_state"];
    if (!jinit.is_object()) throw SchemaError("'initial_state' must be an object");
    for (auto it = jinit.begin(); it != jinit.end(); ++it)
      amounts[it.key()] = as_number(it.value(), "initial_state of '" + it.key() + "'");
  }
  out.initial_state = state_from_amounts(out.model, amounts);

  if (doc.contains("defaults")) {
    const json& jd = doc["defaults"];
    if (!jd.is_object()) throw SchemaError("'defaults' must be an object");
    check_fields(jd, {"dt"}, "defaults");
    if (jd.contains("dt")) out.default_dt = as_number(jd["dt"], "defaults dt");
  }
  return out;
}

std::string serialize_model(const MetabolicModel& model, const SystemState& initial_state,
                            std::optional<double> default_dt) {
  json doc;
  doc["format_version"] = "1";

  json jspecies = json::array();
  for (const Species& s : model.species()) {
    json js;
    js["id"] = s.id;
    js["class"] = to_string(s.cls);
    if (s.mol_weight) js["mol_weight"] = *s.mol_weight;
    if (s.obj_weight) js["obj_weight"] = *s.obj_weight;
    jspecies.push_back(std::move(js));
  }
  doc["species"] = std::move(jspecies);

  json jreactions = json::array();
  for (const Reaction& r : model.reactions()) {
    json jr;
    jr["id"] = r.id;
    jr["class"] = to_string(r.cls);
    json jst;
    for (const auto& [id, coeff] : r.stoich) jst[id] = coeff;
    jr["stoich"] = std::move(jst);
    jr["reversible"] = r.reversible;
    if (r.kcat_fwd) jr["kcat_fwd"] = *r.kcat_fwd;
    if (r.kcat_bwd) jr["kcat_bwd"] = *r.kcat_bwd;
    if (r.enzyme) jr["enzyme"] = *r.enzyme;
    if (r.maintenance_phi) jr["maintenance_phi"] = *r.maintenance_phi;
    jreactions.push_back(std::move(jr));
  }
  doc["reactions"] = std::move(jreactions);

  if (!model.composition_rules().empty()) {
    json jrules = json::array();
    for (const CompositionRule& rule : model.composition_rules())
      jrules.push_back(json{{"species", rule.species}, {"fraction", rule.fraction}});
    doc["composition_rules"] = std::move(jrules);
  }

  json jinit;
  for (int i = 0; i < model.n_y(); ++i)
    jinit[model.species()[model.y_offset() + i].id] = initial_state.Y[i];
  for (int i = 0; i < model.n_c(); ++i)
    jinit[model.species()[model.c_offset() + i].id] = initial_state.C[i];
  for (int i = 0; i < model.n_p(); ++i)
    jinit[model.species()[model.p_offset() + i].id] = initial_state.P[i];
  doc["initial_state"] = std::move(jinit);

  if (default_dt) doc["defaults"] = json{{"dt", *default_dt}};
  return doc.dump(2) + "\n";
}

ParsedModel toy_model(double nutrient_mol) {
  std::vector<Species> species = {
      Species{.id = "N", .cls = SpeciesClass::external},
      Species{.id = "A", .cls = SpeciesClass::metabolite},
      Species{.id = "E", .cls = SpeciesClass::macromolecule, .mol_weight = 10.0},
      Species{.id = "M", .cls = SpeciesClass::storage, .mol_weight = 15.0},
  };
  std::vector<Reaction> reactions = {
      Reaction{.id = "v_A",
               .cls = ReactionClass::exchange,
               .stoich = {{"N", -1.0}, {"A", 1.0}},
               .kcat_fwd = 1.5,
               .enzyme = "E"},
      Reaction{.id = "v_E",
               .cls = ReactionClass::biomass,
               .stoich = {{"N", -1.0}, {"A", -1.0}, {"E", 1.0}},
               .kcat_fwd = 1.0,
               .enzyme = "E"},
      Reaction{.id = "v_M",
               .cls = ReactionClass::storage,
               .stoich = {{"N", -1.0}, {"A", -1.0}, {"M", 1.0}},
               .kcat_fwd = 2.0,
               .enzyme = "E"},
  };
  ParsedModel pm{MetabolicModel::create(std::move(species), std::move(reactions)), {}, 0.1};
  pm.initial_state = state_from_amounts(
      pm.model, {{"N", nutrient_mol}, {"E", 0.1}, {"M", 0.1}});
  return pm;
}

std::string write_trajectory_csv(const MetabolicModel& model, const Trajectory& traj) {
  std::ostringstream os;
  os << "time";
  for (int i = 0; i < model.n_y(); ++i) os << "," << model.species()[model.y_offset() + i].id;
  for (int i = 0; i < model.n_c(); ++i) os << "," << model.species()[model.c_offset() + i].id;
  for (int i = 0; i < model.n_p(); ++i) os << "," << model.species()[model.p_offset() + i].id;
  for (int j = 0; j < model.m(); ++j) os << "," << model.reactions()[j].id;
  os << ",B,B_o\n";
  const int N = traj.num_intervals();
  for (int k = 0; k <= N; ++k) {
    const int fk = std::min(k, N - 1);  // final row repeats the last interval
    os << fmt17(traj.times[k]);
    for (int i = 0; i < model.n_y(); ++i) os << "," << fmt17(traj.Y(k, i));
    for (int i = 0; i < model.n_c(); ++i) os << "," << fmt17(traj.C(k, i));
    for (int i = 0; i < model.n_p(); ++i) os << "," << fmt17(traj.P(k, i));
    for (int j = 0; j < model.m(); ++j) os << "," << fmt17(N > 0 ? traj.fluxes(fk, j) : 0.0);
    os << "," << fmt17(traj.B[k]) << "," << fmt17(traj.B_o[k]) << "\n";
  }
  return os.str();
}

namespace {
json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}
json column_to_json(const Eigen::MatrixXd& m, int col) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(m(i, col));
  return a;
}
} // namespace

std::string write_trajectory_json(const MetabolicModel& model, const Trajectory& traj) {
  json doc;
  doc["times"] = json(traj.times);
  json jsp;
  for (int i = 0; i < model.n_y(); ++i)
    jsp[model.species()[model.y_offset() + i].id] = column_to_json(traj.Y, i);
  for (int i = 0; i < model.n_c(); ++i)
    jsp[model.species()[model.c_offset() + i].id] = column_to_json(traj.C, i);
  for (int i = 0; i < model.n_p(); ++i)
    jsp[model.species()[model.p_offset() + i].id] = column_to_json(traj.P, i);
  doc["species"] = std::move(jsp);
  json jfl;
  for (int j = 0; j < model.m(); ++j)
    jfl[model.reactions()[j].id] = column_to_json(traj.fluxes, j);
  doc["fluxes"] = std::move(jfl);
  doc["B"] = vector_to_json(traj.B);
  doc["B_o"] = vector_to_json(traj.B_o);
  doc["objective_value"] = traj.objective_value;
  return doc.dump(2) + "\n";
}

Trajectory parse_trajectory_json(const MetabolicModel& model, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("trajectory document is not valid JSON: ") + e.what());
  }
  Trajectory traj;
  const json& jt = require(doc, "times", "trajectory");
  traj.times = jt.get<std::vector<double>>();
  const int np = static_cast<int>(traj.times.size());
  if (np < 1) throw SchemaError("trajectory has no grid points");

  const auto read_array = [&](const json& a, int expect, const std::string& where) {
    if (!a.is_array() || static_cast<int>(a.size()) != expect)
      throw SchemaError(where + " must be an array of length " + std::to_string(expect));
    Eigen::VectorXd v(expect);
    for (int i = 0; i < expect; ++i) v[i] = as_number(a[i], where);
    return v;
  };

  const json& jsp = require(doc, "species", "trajectory");
  traj.Y.resize(np, model.n_y());
  traj.C.resize(np, model.n_c());
  traj.P.resize(np, model.n_p());
  for (int i = 0; i < model.n_y(); ++i) {
    const std::string& id = model.species()[model.y_offset() + i].id;
    traj.Y.col(i) = read_array(require(jsp, id.c_str(), "species"), np, "species '" + id + "'");
  }
  for (int i = 0; i < model.n_c(); ++i) {
    const std::string& id = model.species()[model.c_offset() + i].id;
    traj.C.col(i) = read_array(require(jsp, id.c_str(), "species"), np, "species '" + id + "'");
  }
  for (int i = 0; i < model.n_p(); ++i) {
    const std::string& id = model.species()[model.p_offset() + i].id;
    traj.P.col(i) = read_array(require(jsp, id.c_str(), "species"), np, "species '" + id + "'");
  }

  const json& jfl = require(doc, "fluxes", "trajectory");
  traj.fluxes.resize(np - 1, model.m());
  for (int j = 0; j < model.m(); ++j) {
    const std::string& id = model.reactions()[j].id;
    traj.fluxes.col(j) =
        read_array(require(jfl, id.c_str(), "fluxes"), np - 1, "flux '" + id + "'");
  }

  traj.B = read_array(require(doc, "B", "trajectory"), np, "B");
  traj.B_o = read_array(require(doc, "B_o", "trajectory"), np, "B_o");
  traj.objective_value = as_number(require(doc, "objective_value", "trajectory"),
                                   "objective_value");
  return traj;
}

} // namespace defba
