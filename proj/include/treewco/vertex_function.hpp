#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "treewco/tree.hpp"

namespace treewco {

/// Real-valued function on every vertex of a truncated tree.
///
/// Values are finite. Two functions are compatible only when they share the
/// same tree object.
class VertexFunction {
 public:
  VertexFunction(TreePtr tree, std::vector<double> values);

  static VertexFunction zero(TreePtr tree);
  static VertexFunction constant(TreePtr tree, double c);

  template <class F>
  static VertexFunction from(TreePtr tree, F&& f) {
    std::vector<double> vals(tree->size());
    for (VertexId v = 0; v < vals.size(); ++v) vals[v] = f(v);
    return VertexFunction(std::move(tree), std::move(vals));
  }

  const RootedTree& tree() const noexcept { return *tree_; }
  const TreePtr& tree_ptr() const noexcept { return tree_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  double operator()(VertexId v) const;

  bool same_tree(const VertexFunction& other) const noexcept { return tree_ == other.tree_; }

  VertexFunction operator+(const VertexFunction& other) const;
  VertexFunction operator-(const VertexFunction& other) const;
  friend VertexFunction operator*(double c, const VertexFunction& f);

 private:
  TreePtr tree_;
  std::vector<double> values_;
};

void require_same_tree(const VertexFunction& a, const VertexFunction& b);

struct NormReport {
  double sup_norm = 0.0;
  double lip_norm = 0.0;
  double value_at_root = 0.0;
  /// sup |Df|
  double d_sup = 0.0;
  /// (n, sup_{|v| > n} |Df(v)|) for n = 0..N-1.
  std::vector<std::pair<std::size_t, double>> tail_profile;
};

/// (Df)(o) = 0, (Df)(v) = f(v) - f(parent(v)).
VertexFunction discrete_derivative(const VertexFunction& f);

NormReport norms(const VertexFunction& f);

/// A finite tree cannot exhibit Df -> 0; this only says the derivative on the
/// outermost layer is below `tol`.
bool consistent_with_little_lipschitz(const NormReport& r, double tol = 1e-6);

struct GrowthCheck {
  bool holds = true;
  VertexId worst_vertex = 0;
  /// min over v of |f(o)| + |v| sup|Df| - |f(v)|
  double min_slack = 0.0;
};

/// Checks |f(v)| <= |f(o)| + |v| sup|Df| everywhere. This is a theorem, so a
/// failure means a bug upstream.
GrowthCheck growth_check(const VertexFunction& f);

/// Characteristic function of {w}.
VertexFunction indicator(const TreePtr& tree, VertexId w);
/// Characteristic function of the sector of v.
VertexFunction sector_indicator(const TreePtr& tree, VertexId v);

/// min(|v|, cap). Unit Lipschitz norm, constant beyond depth `cap`.
VertexFunction depth_cap(const TreePtr& tree, std::size_t cap);

/// Zero below depth sqrt(n), a (r+1)-power ramp up to depth n, then the
/// plateau value n. Needs n >= 4, 0 < r < 1 and truncation depth >= n.
VertexFunction power_ramp(const TreePtr& tree, std::size_t n, double r);

/// f on depths <= depth, 0 beyond.
VertexFunction truncate_beyond(const VertexFunction& f, std::size_t depth);
/// f on depths <= depth, beyond that the value at the depth-`depth` ancestor.
VertexFunction freeze_beyond(const VertexFunction& f, std::size_t depth);

}  // namespace treewco
