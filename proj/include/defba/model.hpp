#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "defba/errors.hpp"

namespace defba {

enum class SpeciesClass { external, metabolite, storage, macromolecule };
enum class ReactionClass { exchange, metabolic, storage, biomass };

const char* to_string(SpeciesClass c);
const char* to_string(ReactionClass c);

/// One biochemical species. Amounts are molar; weights are g/mol.
struct Species {
  std::string id;
  SpeciesClass cls = SpeciesClass::metabolite;
  std::optional<double> mol_weight;  // w_i, required for storage and macromolecules
  std::optional<double> obj_weight;  // b_i, defaults to mol_weight; may be zero
};

/// One reaction. Irreversible means flux >= 0; reversible means free sign.
/// kcat values are turnover numbers in 1/h; a reaction with an enzyme needs
/// kcat_fwd (and kcat_bwd when reversible). No enzyme means no capacity row.
struct Reaction {
  std::string id;
  ReactionClass cls = ReactionClass::metabolic;
  std::map<std::string, double> stoich;  // species id -> signed coefficient
  bool reversible = false;
  std::optional<double> kcat_fwd;
  std::optional<double> kcat_bwd;
  std::optional<std::string> enzyme;           // id of catalyzing macromolecule
  std::optional<double> maintenance_phi;       // phi_m in [0,1)
};

/// Requires a storage/macromolecule species to make up at least `fraction`
/// of the total biomass at all times.
struct CompositionRule {
  std::string species;
  double fraction = 0.0;  // psi in [0,1)
};

/// Amounts of the dynamic species at one time instant.
struct SystemState {
  double time = 0.0;  // h
  Eigen::VectorXd Y;  // external, mol
  Eigen::VectorXd C;  // storage, mol
  Eigen::VectorXd P;  // macromolecules, mol
};

/// Validated metabolic network. Species and reactions are held in canonical
/// partition order (external, metabolite, storage, macromolecule) and
/// (exchange, metabolic, storage, biomass); order within a class follows
/// declaration order. Immutable after create(), safe to share across threads.
class MetabolicModel {
public:
  static MetabolicModel create(std::vector<Species> species,
                               std::vector<Reaction> reactions,
                               std::vector<CompositionRule> rules = {});

  const std::vector<Species>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const std::vector<CompositionRule>& composition_rules() const { return rules_; }

  // species partition sizes and offsets (canonical order Y | X | C | P)
  int n() const { return static_cast<int>(species_.size()); }
  int n_y() const { return n_y_; }
  int n_x() const { return n_x_; }
  int n_c() const { return n_c_; }
  int n_p() const { return n_p_; }
  int y_offset() const { return 0; }
  int x_offset() const { return n_y_; }
  int c_offset() const { return n_y_ + n_x_; }
  int p_offset() const { return n_y_ + n_x_ + n_c_; }

  // reaction partition sizes (canonical order v_Y | v_X | v_C | v_P)
  int m() const { return static_cast<int>(reactions_.size()); }
  int m_y() const { return m_y_; }
  int m_x() const { return m_x_; }
  int m_c() const { return m_c_; }
  int m_p() const { return m_p_; }

  int species_index(const std::string& id) const;   // throws UnknownSpeciesRef
  int reaction_index(const std::string& id) const;  // throws UnknownSpeciesRef

  /// Index of a species within its class block (e.g. position in P for a
  /// macromolecule).
  int local_index(int species_idx) const;

  // weight vectors over the C and P blocks
  const Eigen::VectorXd& w_c() const { return w_c_; }
  const Eigen::VectorXd& w_p() const { return w_p_; }
  const Eigen::VectorXd& b_c() const { return b_c_; }
  const Eigen::VectorXd& b_p() const { return b_p_; }

  /// Reactions catalyzed by the i-th macromolecule (local index), i.e. the
  /// catalysis set cat(P_i); reaction indices are canonical.
  const std::vector<int>& catalyzed_reactions(int p_local) const { return cat_[p_local]; }

private:
  MetabolicModel() = default;

  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::vector<CompositionRule> rules_;
  std::map<std::string, int> species_by_id_;
  std::map<std::string, int> reactions_by_id_;
  std::vector<std::vector<int>> cat_;
  Eigen::VectorXd w_c_, w_p_, b_c_, b_p_;
  int n_y_ = 0, n_x_ = 0, n_c_ = 0, n_p_ = 0;
  int m_y_ = 0, m_x_ = 0, m_c_ = 0, m_p_ = 0;
};

/// All constraint matrices derived from a model. Flux-coupled matrices use
/// split flux columns: column j is the forward part of reaction j, column
/// m+j the backward part, both nonnegative with net flux v_j = v+_j - v-_j.
struct ConstraintMatrices {
  Eigen::MatrixXd S_Y;  // n_y x m, row block of S
  Eigen::MatrixXd S_X;  // n_x x m
  Eigen::MatrixXd S_C;  // n_c x m
  Eigen::MatrixXd S_P;  // n_p x m
  Eigen::MatrixXd H_c;  // capacity rows x 2m, entries 1/kcat or 0
  Eigen::MatrixXd H_e;  // capacity rows x n_p, selects the enzyme per row
  Eigen::MatrixXd H_b;  // composition rows x (n_c + n_p)
  Eigen::MatrixXd H_m;  // maintenance rows x (n_c + n_p)
  std::vector<int> capacity_enzyme;       // capacity row -> P-block local index
  std::vector<int> maintenance_reaction;  // maintenance row -> reaction index
};

ConstraintMatrices assemble_matrices(const MetabolicModel& model);

/// w-weighted biomass of a state, in grams.
double total_biomass(const MetabolicModel& model, const SystemState& state);
/// b-weighted biomass of a state, in grams.
double objective_biomass(const MetabolicModel& model, const SystemState& state);

/// Builds a state from per-id amounts; ids not listed default to 0 mol.
/// Metabolite ids are rejected (they carry no amounts).
SystemState state_from_amounts(const MetabolicModel& model,
                               const std::map<std::string, double>& amounts,
                               double time = 0.0);

} // namespace defba
