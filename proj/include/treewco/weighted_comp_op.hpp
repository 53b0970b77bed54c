#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treewco/tree.hpp"
#include "treewco/vertex_function.hpp"

namespace treewco {

/// Self-map of a truncated tree.
///
/// The map is defined on the domain ball {|v| <= domain_depth} and takes
/// values anywhere in the truncation. Surjectivity and every preimage-based
/// quantity are evaluated over targets in the codomain ball
/// {|w| <= codomain_depth}; both depths default to the truncation depth.
/// A map such as n -> 2n on the line only fits a half-depth domain, and a map
/// whose preimages sit twice as deep as their targets only has complete
/// preimages over a half-depth codomain.
class SelfMap {
 public:
  /// `images[v]` for every v in the domain ball; entries outside it must be
  /// kNoVertex.
  SelfMap(TreePtr tree, std::vector<VertexId> images,
          std::optional<std::size_t> domain_depth = std::nullopt,
          std::optional<std::size_t> codomain_depth = std::nullopt);

  const RootedTree& tree() const noexcept { return *tree_; }
  const TreePtr& tree_ptr() const noexcept { return tree_; }

  std::size_t domain_depth() const noexcept { return domain_depth_; }
  std::size_t codomain_depth() const noexcept { return codomain_depth_; }
  bool in_domain(VertexId v) const;
  bool in_codomain(VertexId w) const;
  const VertexSet& domain() const noexcept { return domain_; }
  const VertexSet& codomain() const noexcept { return codomain_; }

  VertexId operator()(VertexId v) const;
  std::size_t image_depth(VertexId v) const { return tree_->depth((*this)(v)); }

  /// Domain vertices mapped to w.
  const VertexSet& preimage(VertexId w) const;
  VertexSet range() const;

  bool injective() const noexcept { return !collision_.has_value(); }
  /// Two distinct domain vertices with the same image, when not injective.
  std::optional<std::pair<VertexId, VertexId>> collision() const { return collision_; }
  /// Every codomain-ball vertex has a preimage.
  bool surjective() const noexcept { return !first_miss_.has_value(); }
  /// Smallest-id codomain-ball vertex without preimage.
  std::optional<VertexId> first_miss() const { return first_miss_; }

  /// (d, max_{|v| <= d} |phi(v)|) for d = 0..domain_depth.
  const std::vector<std::pair<std::size_t, std::size_t>>& range_profile() const noexcept {
    return range_profile_;
  }
  std::size_t max_image_depth() const noexcept {
    return range_profile_.empty() ? 0 : range_profile_.back().second;
  }
  /// Whole image lies within depth `depth`; the finite-data stand-in for a
  /// finite range.
  bool range_confined(std::size_t depth) const noexcept { return max_image_depth() <= depth; }

  bool same_tree(const VertexFunction& f) const noexcept { return f.tree_ptr() == tree_; }

 private:
  TreePtr tree_;
  std::vector<VertexId> images_;
  std::size_t domain_depth_;
  std::size_t codomain_depth_;
  VertexSet domain_;
  VertexSet codomain_;
  std::vector<VertexSet> preimages_;
  std::optional<std::pair<VertexId, VertexId>> collision_;
  std::optional<VertexId> first_miss_;
  std::vector<std::pair<std::size_t, std::size_t>> range_profile_;
};

SelfMap identity_map(const TreePtr& tree);
SelfMap constant_map(const TreePtr& tree, VertexId target);
/// v -> parent(v), root fixed.
SelfMap parent_map(const TreePtr& tree);
/// n -> 2n on the integer line, defined on |n| <= N/2.
SelfMap doubling_map(const TreePtr& tree);
/// On the integer line: n -> n (n >= 0), n -> -n (n odd negative),
/// n -> n/2 (n even negative). Onto, with preimages at most twice as deep as
/// their target, so the codomain ball is |w| <= N/2.
SelfMap line_fold_map(const TreePtr& tree);

/// Weight 0 on odd negative integers and 1 elsewhere; with line_fold_map this
/// is an isometry of the bounded functions.
VertexFunction line_fold_weight(const TreePtr& tree);

/// The operator f -> psi * (f o phi) on the domain of phi.
class WeightedCompOp {
 public:
  WeightedCompOp(VertexFunction psi, SelfMap phi);

  const VertexFunction& psi() const noexcept { return psi_; }
  const SelfMap& phi() const noexcept { return phi_; }
  const RootedTree& tree() const noexcept { return phi_.tree(); }

  /// psi(v) f(phi(v)) on the domain, 0 outside it.
  VertexFunction apply(const VertexFunction& f) const;

  /// |psi(v)| per domain vertex, in domain order.
  const std::vector<double>& abs_weight() const noexcept { return abs_weight_; }
  /// |psi(v)| |phi(v)| per domain vertex, in domain order.
  const std::vector<double>& weighted_depth() const noexcept { return weighted_depth_; }

  /// sup of |psi| over the preimage of w, 0 when it is empty.
  double preimage_sup(VertexId w) const;

 private:
  VertexFunction psi_;
  SelfMap phi_;
  std::vector<double> abs_weight_;
  std::vector<double> weighted_depth_;
};

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Norm on the bounded functions: sup |psi| over the domain.
double linf_op_norm(const WeightedCompOp& op);

/// sup over {v : |phi(v)| > n} of |psi(v)|, 0 on an empty index set.
double linf_ess_norm_tail(const WeightedCompOp& op, std::size_t n);

/// max{sup|psi|, sup|psi||phi|} <= norm from Lipschitz to bounded <= sup |psi|(1+|phi|).
Bounds lip_bounds(const WeightedCompOp& op);

/// sup_v |psi(v)| max(1, |phi(v)|): the norm from Lipschitz to bounded, using
/// max(1, |w|) for the norm of evaluation at w.
double lip_exact_norm(const WeightedCompOp& op);

/// sup over {v : |phi(v)| > n} of |psi(v)||phi(v)|, 0 on an empty index set.
double lip_ess_norm_tail(const WeightedCompOp& op, std::size_t n);

struct PreimageInf {
  /// inf over codomain vertices w of sup_{phi(v) = w} |psi(v)|; 0 if phi is
  /// not onto the codomain ball.
  double value = 0.0;
  /// Codomain vertex attaining the infimum (or the first missed vertex).
  VertexId argmin = kNoVertex;
};

PreimageInf min_preimage_sup(const WeightedCompOp& op);

/// Injectivity modulus on the bounded functions.
double j_linf(const WeightedCompOp& op);
/// Surjectivity modulus on the bounded functions.
double k_linf(const WeightedCompOp& op);

/// [M/3, M] for the injectivity modulus from Lipschitz to bounded functions.
Bounds j_lip_bracket(const WeightedCompOp& op);

struct SurjectivityBracket {
  Bounds bounds;
  /// Domain vertex attaining inf |psi|(1+|phi|); kNoVertex when forced to 0.
  VertexId upper_argmin = kNoVertex;
  /// inf |psi| over the domain.
  double inf_weight = 0.0;
  std::string forced_zero_reason;
};

/// [inf|psi|/3, inf |psi|(1+|phi|)] for the surjectivity modulus from Lipschitz
/// to bounded functions; (0,0) when psi vanishes or phi is not injective.
SurjectivityBracket k_lip_bracket(const WeightedCompOp& op);

struct IsometryVerdict {
  bool isometry = false;
  /// Vertex refuting the isometry, when there is one.
  std::optional<VertexId> witness;
  std::string reason;
  /// Quantity observed at the witness (preimage sup, or the norm lower bound).
  double observed = 0.0;
};

/// Isometry of the bounded functions, on the truncation: phi onto the
/// codomain ball, every preimage sup equal to 1 within `tol`, and |psi| <= 1.
IsometryVerdict isometry_check_linf(const WeightedCompOp& op, double tol = 1e-9);

/// Never an isometry from Lipschitz to bounded functions; returns the refuting
/// vertex. Needs a truncation depth of at least 2.
IsometryVerdict isometry_check_lip(const WeightedCompOp& op, double tol = 1e-9);

}  // namespace treewco
