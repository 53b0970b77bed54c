#include "treewco/weighted_comp_op.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "treewco/errors.hpp"
#include "treewco/format.hpp"

namespace treewco {

namespace {

void require_line(const TreePtr& tree, const char* map_name) {
  if (tree->family() != Family::ZLine) {
    throw RangeError(std::string(map_name) + " is only defined on the integer line");
  }
}

std::string vname(const RootedTree& t, VertexId v) {
  return std::to_string(t.label(v));
}

}  // namespace

SelfMap::SelfMap(TreePtr tree, std::vector<VertexId> images, std::optional<std::size_t> domain_depth,
                 std::optional<std::size_t> codomain_depth)
    : tree_(std::move(tree)), images_(std::move(images)) {
  const RootedTree& t = *tree_;
  const std::size_t n_depth = t.truncation_depth();
  domain_depth_ = domain_depth.value_or(n_depth);
  codomain_depth_ = codomain_depth.value_or(n_depth);
  if (domain_depth_ > n_depth) {
    throw RangeError("map domain depth " + std::to_string(domain_depth_) +
                     " beyond truncation depth " + std::to_string(n_depth));
  }
  if (codomain_depth_ > n_depth) {
    throw RangeError("map codomain depth " + std::to_string(codomain_depth_) +
                     " beyond truncation depth " + std::to_string(n_depth));
  }
  if (images_.size() != t.size()) {
    throw RangeError("map table has " + std::to_string(images_.size()) + " entries for " +
                     std::to_string(t.size()) + " vertices");
  }

  preimages_.assign(t.size(), {});
  for (VertexId v = 0; v < t.size(); ++v) {
    const bool inside = t.depth(v) <= domain_depth_;
    if (!inside) {
      if (images_[v] != kNoVertex) {
        throw RangeError("map assigns vertex " + std::to_string(v) + " outside its domain depth " +
                         std::to_string(domain_depth_));
      }
      continue;
    }
    if (images_[v] == kNoVertex) {
      throw RangeError("map is undefined at domain vertex " + std::to_string(v));
    }
    if (!t.contains(images_[v])) {
      throw RangeError("map sends vertex " + std::to_string(v) + " to " +
                       std::to_string(images_[v]) + ", outside the truncation");
    }
    domain_.push_back(v);
    auto& pre = preimages_[images_[v]];
    if (!pre.empty() && !collision_) collision_ = std::make_pair(pre.front(), v);
    pre.push_back(v);
  }
  for (VertexId w = 0; w < t.size(); ++w) {
    if (t.depth(w) > codomain_depth_) continue;
    codomain_.push_back(w);
    if (preimages_[w].empty() && !first_miss_) first_miss_ = w;
  }

  std::vector<std::size_t> layer_max(domain_depth_ + 1, 0);
  for (VertexId v : domain_) {
    auto& m = layer_max[t.depth(v)];
    m = std::max(m, t.depth(images_[v]));
  }
  std::size_t running = 0;
  for (std::size_t d = 0; d <= domain_depth_; ++d) {
    running = std::max(running, layer_max[d]);
    range_profile_.emplace_back(d, running);
  }
}

bool SelfMap::in_domain(VertexId v) const { return tree_->depth(v) <= domain_depth_; }

bool SelfMap::in_codomain(VertexId w) const { return tree_->depth(w) <= codomain_depth_; }

VertexId SelfMap::operator()(VertexId v) const {
  if (!in_domain(v)) {
    throw RangeError("vertex " + std::to_string(v) + " lies outside the map domain (depth <= " +
                     std::to_string(domain_depth_) + ")");
  }
  return images_[v];
}

const VertexSet& SelfMap::preimage(VertexId w) const {
  if (!tree_->contains(w)) throw LookupError("vertex " + std::to_string(w) + " is not in the tree");
  return preimages_[w];
}

VertexSet SelfMap::range() const {
  VertexSet out;
  for (VertexId w = 0; w < preimages_.size(); ++w) {
    if (!preimages_[w].empty()) out.push_back(w);
  }
  return out;
}

SelfMap identity_map(const TreePtr& tree) {
  std::vector<VertexId> img(tree->size());
  for (VertexId v = 0; v < img.size(); ++v) img[v] = v;
  return SelfMap(tree, std::move(img));
}

SelfMap constant_map(const TreePtr& tree, VertexId target) {
  if (!tree->contains(target)) {
    throw LookupError("constant map target " + std::to_string(target) + " is not in the tree");
  }
  return SelfMap(tree, std::vector<VertexId>(tree->size(), target));
}

SelfMap parent_map(const TreePtr& tree) {
  std::vector<VertexId> img(tree->size());
  for (VertexId v = 0; v < img.size(); ++v) {
    img[v] = (v == tree->root()) ? v : tree->parent(v);
  }
  return SelfMap(tree, std::move(img));
}

SelfMap doubling_map(const TreePtr& tree) {
  require_line(tree, "doubling map");
  const std::size_t half = tree->truncation_depth() / 2;
  std::vector<VertexId> img(tree->size(), kNoVertex);
  for (VertexId v = 0; v < img.size(); ++v) {
    if (tree->depth(v) <= half) img[v] = tree->vertex_with_label(2 * tree->label(v));
  }
  return SelfMap(tree, std::move(img), half);
}

SelfMap line_fold_map(const TreePtr& tree) {
  require_line(tree, "fold map");
  std::vector<VertexId> img(tree->size());
  for (VertexId v = 0; v < img.size(); ++v) {
    const std::int64_t n = tree->label(v);
    std::int64_t m = n;
    if (n < 0) m = (n % 2 != 0) ? -n : n / 2;
    img[v] = tree->vertex_with_label(m);
  }
  return SelfMap(tree, std::move(img), std::nullopt, tree->truncation_depth() / 2);
}

VertexFunction line_fold_weight(const TreePtr& tree) {
  require_line(tree, "fold weight");
  return VertexFunction::from(tree, [&](VertexId v) {
    const std::int64_t n = tree->label(v);
    return (n < 0 && n % 2 != 0) ? 0.0 : 1.0;
  });
}

WeightedCompOp::WeightedCompOp(VertexFunction psi, SelfMap phi)
    : psi_(std::move(psi)), phi_(std::move(phi)) {
  if (!phi_.same_tree(psi_)) throw TreeMismatchError("weight and map live on different trees");
  const RootedTree& t = phi_.tree();
  abs_weight_.reserve(phi_.domain().size());
  weighted_depth_.reserve(phi_.domain().size());
  for (VertexId v : phi_.domain()) {
    const double a = std::abs(psi_.values()[v]);
    abs_weight_.push_back(a);
    weighted_depth_.push_back(a * static_cast<double>(t.depth(phi_(v))));
  }
}

VertexFunction WeightedCompOp::apply(const VertexFunction& f) const {
  if (!phi_.same_tree(f)) throw TreeMismatchError("function and operator live on different trees");
  std::vector<double> out(f.size(), 0.0);
  for (VertexId v : phi_.domain()) out[v] = psi_.values()[v] * f.values()[phi_(v)];
  return {f.tree_ptr(), std::move(out)};
}

double WeightedCompOp::preimage_sup(VertexId w) const {
  double s = 0.0;
  for (VertexId v : phi_.preimage(w)) s = std::max(s, std::abs(psi_.values()[v]));
  return s;
}

double linf_op_norm(const WeightedCompOp& op) {
  double s = 0.0;
  for (double a : op.abs_weight()) s = std::max(s, a);
  return s;
}

double linf_ess_norm_tail(const WeightedCompOp& op, std::size_t n) {
  const RootedTree& t = op.tree();
  if (n >= t.truncation_depth()) {
    throw RangeError("tail depth " + std::to_string(n) + " must be below truncation depth " +
                     std::to_string(t.truncation_depth()));
  }
  double s = 0.0;
  const auto& dom = op.phi().domain();
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (op.phi().image_depth(dom[i]) > n) s = std::max(s, op.abs_weight()[i]);
  }
  return s;
}

Bounds lip_bounds(const WeightedCompOp& op) {
  Bounds b;
  const auto& a = op.abs_weight();
  const auto& h = op.weighted_depth();
  for (std::size_t i = 0; i < a.size(); ++i) {
    b.lower = std::max({b.lower, a[i], h[i]});
    b.upper = std::max(b.upper, a[i] + h[i]);
  }
  return b;
}

double lip_exact_norm(const WeightedCompOp& op) {
  double s = 0.0;
  const auto& dom = op.phi().domain();
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double eval_norm = std::max<double>(1.0, static_cast<double>(op.phi().image_depth(dom[i])));
    s = std::max(s, op.abs_weight()[i] * eval_norm);
  }
  return s;
}

double lip_ess_norm_tail(const WeightedCompOp& op, std::size_t n) {
  const RootedTree& t = op.tree();
  if (n >= t.truncation_depth()) {
    throw RangeError("tail depth " + std::to_string(n) + " must be below truncation depth " +
                     std::to_string(t.truncation_depth()));
  }
  double s = 0.0;
  const auto& dom = op.phi().domain();
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (op.phi().image_depth(dom[i]) > n) s = std::max(s, op.weighted_depth()[i]);
  }
  return s;
}

PreimageInf min_preimage_sup(const WeightedCompOp& op) {
  if (auto miss = op.phi().first_miss()) return {0.0, *miss};
  PreimageInf r{std::numeric_limits<double>::infinity(), kNoVertex};
  for (VertexId w : op.phi().codomain()) {
    const double s = op.preimage_sup(w);
    if (s < r.value) r = {s, w};
  }
  return r;
}

double j_linf(const WeightedCompOp& op) { return min_preimage_sup(op).value; }

double k_linf(const WeightedCompOp& op) {
  if (!op.phi().injective()) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (double a : op.abs_weight()) m = std::min(m, a);
  return op.abs_weight().empty() ? 0.0 : m;
}

Bounds j_lip_bracket(const WeightedCompOp& op) {
  const double m = min_preimage_sup(op).value;
  return {m / 3.0, m};
}

SurjectivityBracket k_lip_bracket(const WeightedCompOp& op) {
  SurjectivityBracket r;
  const auto& dom = op.phi().domain();
  const auto& a = op.abs_weight();
  const RootedTree& t = op.tree();
  if (dom.empty()) {
    r.forced_zero_reason = "empty domain";
    return r;
  }
  r.inf_weight = *std::min_element(a.begin(), a.end());
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (a[i] == 0.0) {
      r.forced_zero_reason = "weight vanishes at vertex " + vname(t, dom[i]);
      return r;
    }
  }
  if (auto c = op.phi().collision()) {
    r.forced_zero_reason = "map not injective: " + vname(t, c->first) + " and " +
                           vname(t, c->second) + " share an image";
    return r;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double u = a[i] + op.weighted_depth()[i];
    if (u < best) {
      best = u;
      r.upper_argmin = dom[i];
    }
  }
  r.bounds = {r.inf_weight / 3.0, best};
  return r;
}

IsometryVerdict isometry_check_linf(const WeightedCompOp& op, double tol) {
  const RootedTree& t = op.tree();
  IsometryVerdict r;
  if (auto miss = op.phi().first_miss()) {
    r.witness = *miss;
    r.reason = "vertex " + vname(t, *miss) + " has no preimage";
    return r;
  }
  for (VertexId w : op.phi().codomain()) {
    const double s = op.preimage_sup(w);
    if (std::abs(s - 1.0) > tol) {
      r.witness = w;
      r.observed = s;
      r.reason = "sup of |psi| over the preimage of " + vname(t, w) + " is not 1";
      return r;
    }
  }
  const auto& dom = op.phi().domain();
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (op.abs_weight()[i] > 1.0 + tol) {
      r.witness = dom[i];
      r.observed = op.abs_weight()[i];
      r.reason = "|psi| exceeds 1 at " + vname(t, dom[i]);
      return r;
    }
  }
  r.isometry = true;
  r.reason = "map onto the codomain ball with unit preimage sups";
  return r;
}

IsometryVerdict isometry_check_lip(const WeightedCompOp& op, double tol) {
  const RootedTree& t = op.tree();
  if (t.truncation_depth() < 2) {
    throw RangeError("refuting an isometry needs a vertex deeper than 1; truncation depth is " +
                     std::to_string(t.truncation_depth()));
  }
  IsometryVerdict r;
  // An isometry would send every indicator of a non-root vertex (unit
  // Lipschitz norm) to a unit sup-norm function.
  if (auto miss = op.phi().first_miss()) {
    r.witness = *miss;
    r.observed = 0.0;
    r.reason = "indicator of " + vname(t, *miss) + " is annihilated: no preimage";
    return r;
  }
  for (VertexId w : op.phi().codomain()) {
    if (w == t.root()) continue;
    const double s = op.preimage_sup(w);
    if (std::abs(s - 1.0) > tol) {
      r.witness = w;
      r.observed = s;
      r.reason = "indicator of " + vname(t, w) + " has unit norm but image norm " + format_real(s);
      return r;
    }
  }
  // Unit preimage sups force the norm up to |w| > 1 at any deep target; take
  // the shallowest one (layers are id-sorted, so the choice is canonical).
  for (std::size_t d = 2; d <= t.truncation_depth(); ++d) {
    for (VertexId w : t.layer(d)) {
      const double bound = static_cast<double>(d) * op.preimage_sup(w);
      if (bound > 1.0 + tol) {
        r.witness = w;
        r.observed = bound;
        r.reason = "norm is at least |w| sup|psi| = " + format_real(bound) +
                   " > 1 at target " + vname(t, w);
        return r;
      }
    }
  }
  r.reason = "no refuting vertex inside the truncation";
  return r;
}

}  // namespace treewco
