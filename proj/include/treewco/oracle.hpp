#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "treewco/weighted_comp_op.hpp"

// Brute-force counterparts of the closed forms in weighted_comp_op.hpp. Nothing
// here calls the formula code for a norm: sup norms, Lipschitz norms and the
// operator action are evaluated by local routines.

namespace treewco {

enum class OracleQuantity { OpNormLinf, OpNormLip, PointEvalNormLip, JLinfUpper, SurjInfeasibility };
enum class OracleMethod { ExhaustiveSigns, GridRefine, PathExtremal, IncrementBound };

std::string_view quantity_name(OracleQuantity q);
std::string_view method_name(OracleMethod m);

struct OracleResult {
  OracleQuantity quantity = OracleQuantity::OpNormLinf;
  double value = 0.0;
  /// Extremal function found by the search, inside the relevant unit ball.
  std::optional<VertexFunction> extremizer;
  std::string witness;
  std::size_t search_size = 0;
  OracleMethod method = OracleMethod::ExhaustiveSigns;
};

inline constexpr std::size_t kMaxExhaustiveMaxVertices = 16;
inline constexpr std::size_t kMaxExhaustiveMinVertices = 12;

/// max of ||psi C_phi f||_inf over grid-valued f with ||f||_inf = 1. The grid
/// must contain a value of magnitude 1 and none larger. Refuses trees with
/// more than 16 vertices; use norm_oracle_linf_sampled there.
OracleResult norm_oracle_linf(const WeightedCompOp& op,
                              std::span<const double> grid = std::span<const double>());

/// Seeded random sign patterns; for trees beyond the exhaustive cap.
OracleResult norm_oracle_linf_sampled(const WeightedCompOp& op, std::uint64_t seed,
                                      std::size_t samples = 256);

struct PointEvalOptions {
  std::uint64_t seed = 0;
  std::size_t starts = 6;
  /// Grid over the root value a in [0,1] for the path family.
  std::size_t path_grid = 11;
};

/// sup{|f(w)| : ||f||_Lip <= 1}.
///  - PathExtremal: the family a + (1-a)|meet(v, w)| over a grid of a.
///  - GridRefine: seeded multi-start local search on f(w)/||f||_Lip over all
///    vertex values, moving single vertices and whole sectors, step halving.
OracleResult point_eval_lip_norm(const TreePtr& tree, VertexId w, OracleMethod method,
                                 const PointEvalOptions& opts = {});

/// max_v |psi(v)| * point-evaluation norm at phi(v) (path extremal). The
/// exchange of the two suprema is exact, so this is the operator norm.
OracleResult norm_oracle_lip(const WeightedCompOp& op);

struct JBracket {
  /// min over grid f with ||f||_inf = 1 of ||psi C_phi f||_inf: an upper bound
  /// on the injectivity modulus.
  double upper = 0.0;
  /// Closed-form value being checked.
  double lower = 0.0;
  double gap = 0.0;
  VertexFunction minimizer;
  std::size_t search_size = 0;
};

/// Exhaustive over functions on the codomain ball (at most 12 vertices), grid
/// of `grid_levels` equally spaced values in [-1, 1], plus every indicator.
JBracket j_oracle_linf_bracket(const WeightedCompOp& op, std::size_t grid_levels = 3);

enum class Feasibility { Infeasible, Feasible, Undecided };
std::string_view feasibility_name(Feasibility f);

struct InfeasibilityReport {
  Feasibility verdict = Feasibility::Undecided;
  /// Lower bound on ||f||_Lip over every f with psi C_phi f = g.
  double lower_bound = 0.0;
  /// Pair of forced vertices with the largest difference quotient.
  std::optional<std::pair<VertexId, VertexId>> pair;
  double pair_quotient = 0.0;
  std::string reason;
  std::size_t forced_count = 0;
  /// Forced values extended to the whole tree (explicit preimage when feasible).
  std::optional<VertexFunction> interpolant;
  OracleMethod method = OracleMethod::IncrementBound;
};

/// Can g be reached from the Lipschitz unit ball? g forces f on the image of
/// phi; the pairwise difference quotients of the forced values bound ||Df||
/// from below. Sound but incomplete: Infeasible is a proof, Feasible comes
/// with an explicit preimage, Undecided otherwise. A `hint` that is a valid
/// preimage in the unit ball settles Feasible.
InfeasibilityReport surjectivity_infeasibility(const WeightedCompOp& op, const VertexFunction& g,
                                               const VertexFunction* hint = nullptr,
                                               double tol = 1e-9);

}  // namespace treewco
