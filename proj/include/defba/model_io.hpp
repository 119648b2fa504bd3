#pragma once

#include <optional>
#include <string>

#include "defba/model.hpp"
#include "defba/trajectory.hpp"

namespace defba {

/// A model document materialized: the validated network, the declared
/// initial amounts, and optional solver defaults.
struct ParsedModel {
  MetabolicModel model;
  SystemState initial_state;
  std::optional<double> default_dt;
};

/// Parses the JSON model document. Unknown fields are rejected by name;
/// structural problems raise SchemaError, semantic ones ValidationError
/// (or the more specific model errors).
ParsedModel parse_model(const std::string& text);

/// Serializes to the same JSON schema, canonically ordered; parse of the
/// output reproduces the model exactly.
std::string serialize_model(const MetabolicModel& model, const SystemState& initial_state,
                            std::optional<double> default_dt = {});

/// Built-in minimal fixture: nutrient N, intermediate A, enzyme E (10 g/mol)
/// catalyzing everything, storage M (15 g/mol); three irreversible reactions
/// N->A (kcat 1.5), N+A->E (kcat 1), N+A->M (kcat 2); starts at
/// E = M = 0.1 mol. nutrient_mol sets N(0); the default is a sentinel large
/// enough to act as unlimited.
ParsedModel toy_model(double nutrient_mol = 1e9);

/// CSV with columns: time, dynamic species amounts, net fluxes, B, B_o.
/// Fluxes are per-interval; the final row repeats the last interval so all
/// columns stay numeric. 17 significant digits throughout.
std::string write_trajectory_csv(const MetabolicModel& model, const Trajectory& traj);

std::string write_trajectory_json(const MetabolicModel& model, const Trajectory& traj);

/// Inverse of write_trajectory_json, bit-exact for finite values.
Trajectory parse_trajectory_json(const MetabolicModel& model, const std::string& text);

} // namespace defba
