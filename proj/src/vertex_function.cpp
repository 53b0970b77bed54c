#include "treewco/vertex_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "treewco/errors.hpp"

namespace treewco {

VertexFunction::VertexFunction(TreePtr tree, std::vector<double> values)
    : tree_(std::move(tree)), values_(std::move(values)) {
  if (!tree_) throw TreeMismatchError("vertex function without a tree");
  if (values_.size() != tree_->size()) {
    throw RangeError("vertex function has " + std::to_string(values_.size()) +
                     " values for a tree with " + std::to_string(tree_->size()) + " vertices");
  }
  for (std::size_t v = 0; v < values_.size(); ++v) {
    if (!std::isfinite(values_[v])) {
      throw RangeError("non-finite value at vertex " + std::to_string(v));
    }
  }
}

VertexFunction VertexFunction::zero(TreePtr tree) { return constant(std::move(tree), 0.0); }

VertexFunction VertexFunction::constant(TreePtr tree, double c) {
  const std::size_t n = tree->size();
  return VertexFunction(std::move(tree), std::vector<double>(n, c));
}

double VertexFunction::operator()(VertexId v) const {
  if (v >= values_.size()) throw LookupError("vertex " + std::to_string(v) + " is not in the tree");
  return values_[v];
}

void require_same_tree(const VertexFunction& a, const VertexFunction& b) {
  if (!a.same_tree(b)) throw TreeMismatchError("functions live on different trees");
}

VertexFunction VertexFunction::operator+(const VertexFunction& other) const {
  require_same_tree(*this, other);
  std::vector<double> out(values_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += other.values_[i];
  return {tree_, std::move(out)};
}

VertexFunction VertexFunction::operator-(const VertexFunction& other) const {
  require_same_tree(*this, other);
  std::vector<double> out(values_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= other.values_[i];
  return {tree_, std::move(out)};
}

VertexFunction operator*(double c, const VertexFunction& f) {
  std::vector<double> out(f.values_);
  for (double& x : out) x *= c;
  return {f.tree_, std::move(out)};
}

VertexFunction discrete_derivative(const VertexFunction& f) {
  const RootedTree& t = f.tree();
  std::vector<double> d(f.size(), 0.0);
  for (VertexId v = 0; v < d.size(); ++v) {
    if (v != t.root()) d[v] = f.values()[v] - f.values()[t.parent(v)];
  }
  return {f.tree_ptr(), std::move(d)};
}

NormReport norms(const VertexFunction& f) {
  const RootedTree& t = f.tree();
  const VertexFunction df = discrete_derivative(f);
  NormReport r;
  r.value_at_root = f(t.root());
  for (double x : f.values()) r.sup_norm = std::max(r.sup_norm, std::abs(x));

  // layer maxima of |Df|, then suffix maxima give the tails
  const std::size_t depth = t.truncation_depth();
  std::vector<double> layer_max(depth + 1, 0.0);
  for (VertexId v = 0; v < f.size(); ++v) {
    layer_max[t.depth(v)] = std::max(layer_max[t.depth(v)], std::abs(df.values()[v]));
  }
  for (double m : layer_max) r.d_sup = std::max(r.d_sup, m);
  r.lip_norm = std::abs(r.value_at_root) + r.d_sup;

  r.tail_profile.resize(depth);
  double running = 0.0;
  for (std::size_t n = depth; n-- > 0;) {
    running = std::max(running, layer_max[n + 1]);
    r.tail_profile[n] = {n, running};
  }
  return r;
}

bool consistent_with_little_lipschitz(const NormReport& r, double tol) {
  return r.tail_profile.empty() || r.tail_profile.back().second < tol;
}

GrowthCheck growth_check(const VertexFunction& f) {
  const RootedTree& t = f.tree();
  const NormReport r = norms(f);
  GrowthCheck g;
  g.min_slack = std::numeric_limits<double>::infinity();
  for (VertexId v = 0; v < f.size(); ++v) {
    const double bound = std::abs(r.value_at_root) + static_cast<double>(t.depth(v)) * r.d_sup;
    const double slack = bound - std::abs(f.values()[v]);
    if (slack < g.min_slack) {
      g.min_slack = slack;
      g.worst_vertex = v;
    }
    // rounding in the bound is relative to its size
    if (slack < -1e-9 * std::max(1.0, bound)) g.holds = false;
  }
  return g;
}

VertexFunction indicator(const TreePtr& tree, VertexId w) {
  if (!tree->contains(w)) throw LookupError("vertex " + std::to_string(w) + " is not in the tree");
  return VertexFunction::from(tree, [w](VertexId v) { return v == w ? 1.0 : 0.0; });
}

VertexFunction sector_indicator(const TreePtr& tree, VertexId v) {
  if (!tree->contains(v)) throw LookupError("vertex " + std::to_string(v) + " is not in the tree");
  return VertexFunction::from(tree, [&](VertexId u) { return tree->in_sector(v, u) ? 1.0 : 0.0; });
}

VertexFunction depth_cap(const TreePtr& tree, std::size_t cap) {
  if (cap < 1) throw RangeError("depth cap must be positive");
  return VertexFunction::from(tree, [&](VertexId v) {
    return static_cast<double>(std::min(tree->depth(v), cap));
  });
}

VertexFunction power_ramp(const TreePtr& tree, std::size_t n, double r) {
  if (n < 4) throw RangeError("power ramp needs n >= 4, got " + std::to_string(n));
  if (!(r > 0.0 && r < 1.0)) throw RangeError("power ramp exponent must lie in (0,1)");
  if (tree->truncation_depth() < n) {
    throw RangeError("power ramp with n=" + std::to_string(n) + " needs truncation depth >= n, got " +
                     std::to_string(tree->truncation_depth()));
  }
  const double nn = static_cast<double>(n);
  const double root_n = std::sqrt(nn);
  const double span = nn - root_n;
  const double scale = nn / span;
  return VertexFunction::from(tree, [&](VertexId v) {
    const double d = static_cast<double>(tree->depth(v));
    if (d < root_n) return 0.0;
    if (d < nn) return scale * std::pow(d - root_n, r + 1.0) / std::pow(span, r);
    return nn;
  });
}

VertexFunction truncate_beyond(const VertexFunction& f, std::size_t depth) {
  const RootedTree& t = f.tree();
  if (depth > t.truncation_depth()) {
    throw RangeError("truncation depth " + std::to_string(depth) + " beyond tree depth " +
                     std::to_string(t.truncation_depth()));
  }
  return VertexFunction::from(f.tree_ptr(), [&](VertexId v) {
    return t.depth(v) <= depth ? f.values()[v] : 0.0;
  });
}

VertexFunction freeze_beyond(const VertexFunction& f, std::size_t depth) {
  const RootedTree& t = f.tree();
  if (depth > t.truncation_depth()) {
    throw RangeError("freeze depth " + std::to_string(depth) + " beyond tree depth " +
                     std::to_string(t.truncation_depth()));
  }
  return VertexFunction::from(f.tree_ptr(), [&](VertexId v) {
    return t.depth(v) <= depth ? f.values()[v] : f.values()[t.ancestor_at_depth(v, depth)];
  });
}

}  // namespace treewco
