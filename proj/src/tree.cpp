#include "treewco/tree.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <string>

#include "treewco/errors.hpp"

namespace treewco {

namespace {

constexpr std::size_t kMaxVertices = 5'000'000;

void check_budget(std::size_t n) {
  if (n > kMaxVertices) {
    throw RangeError("truncation would exceed " + std::to_string(kMaxVertices) + " vertices");
  }
}

std::size_t required_depth(const TreeSpec& spec) {
  if (!spec.depth) {
    throw RangeError(std::string(family_name(spec.family)) + " tree needs a truncation depth");
  }
  return *spec.depth;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Explicit: return "explicit";
    case Family::Homogeneous: return "homogeneous";
    case Family::ZLine: return "zline";
    case Family::RandomBoundedDegree: return "random";
  }
  return "unknown";
}

TreeSpec TreeSpec::zline(std::size_t depth) {
  TreeSpec s;
  s.family = Family::ZLine;
  s.depth = depth;
  return s;
}

TreeSpec TreeSpec::homogeneous(std::size_t q, std::size_t depth) {
  TreeSpec s;
  s.family = Family::Homogeneous;
  s.q = q;
  s.depth = depth;
  return s;
}

TreeSpec TreeSpec::random(std::size_t depth, std::uint64_t seed, std::size_t min_children,
                          std::size_t max_children) {
  TreeSpec s;
  s.family = Family::RandomBoundedDegree;
  s.depth = depth;
  s.seed = seed;
  s.min_children = min_children;
  s.max_children = max_children;
  return s;
}

TreeSpec TreeSpec::explicit_edges(std::vector<std::pair<VertexId, VertexId>> edges, VertexId root,
                                  std::optional<std::size_t> depth) {
  TreeSpec s;
  s.family = Family::Explicit;
  s.edges = std::move(edges);
  s.root = root;
  s.depth = depth;
  return s;
}

void RootedTree::check(VertexId v) const {
  if (!contains(v)) {
    throw LookupError("vertex " + std::to_string(v) + " is not in the tree (size " +
                      std::to_string(size()) + ")");
  }
}

VertexId RootedTree::parent(VertexId v) const {
  check(v);
  return parent_[v];
}

std::span<const VertexId> RootedTree::children(VertexId v) const {
  check(v);
  return children_[v];
}

std::size_t RootedTree::depth(VertexId v) const {
  check(v);
  return depth_[v];
}

std::size_t RootedTree::degree(VertexId v) const {
  check(v);
  return children_[v].size() + (v == root_ ? 0 : 1);
}

bool RootedTree::is_frontier(VertexId v) const {
  check(v);
  return depth_[v] == depth_limit_;
}

std::int64_t RootedTree::label(VertexId v) const {
  check(v);
  if (spec_.family != Family::ZLine) return static_cast<std::int64_t>(v);
  if (v == 0) return 0;
  const auto n = static_cast<std::int64_t>((v + 1) / 2);
  return (v % 2 == 1) ? n : -n;
}

VertexId RootedTree::vertex_with_label(std::int64_t label) const {
  VertexId v = 0;
  if (spec_.family == Family::ZLine) {
    if (label > 0) v = static_cast<VertexId>(2 * label - 1);
    else if (label < 0) v = static_cast<VertexId>(-2 * label);
  } else {
    if (label < 0) throw LookupError("negative label " + std::to_string(label));
    v = static_cast<VertexId>(label);
  }
  if (!contains(v)) throw LookupError("no vertex with label " + std::to_string(label));
  return v;
}

const VertexSet& RootedTree::layer(std::size_t n) const {
  if (n > depth_limit_) {
    throw RangeError("layer " + std::to_string(n) + " beyond truncation depth " +
                     std::to_string(depth_limit_));
  }
  return layers_[n];
}

VertexId RootedTree::ancestor_at_depth(VertexId v, std::size_t n) const {
  check(v);
  if (n > depth_[v]) {
    throw RangeError("depth " + std::to_string(n) + " exceeds depth " +
                     std::to_string(depth_[v]) + " of vertex " + std::to_string(v));
  }
  while (depth_[v] > n) v = parent_[v];
  return v;
}

VertexSet RootedTree::sector(VertexId v) const {
  check(v);
  VertexSet out;
  std::vector<VertexId> stack{v};
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (VertexId c : children_[u]) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool RootedTree::in_sector(VertexId v, VertexId u) const {
  check(v);
  check(u);
  return enter_[v] <= enter_[u] && exit_[u] <= exit_[v];
}

VertexId RootedTree::meet(VertexId v, VertexId w) const {
  check(v);
  check(w);
  while (depth_[v] > depth_[w]) v = parent_[v];
  while (depth_[w] > depth_[v]) w = parent_[w];
  while (v != w) {
    v = parent_[v];
    w = parent_[w];
  }
  return v;
}

std::size_t RootedTree::distance(VertexId v, VertexId w) const {
  const VertexId m = meet(v, w);
  return depth_[v] + depth_[w] - 2 * depth_[m];
}

std::vector<std::pair<VertexId, VertexId>> RootedTree::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(size() > 0 ? size() - 1 : 0);
  for (VertexId v = 0; v < size(); ++v) {
    if (v != root_) out.emplace_back(parent_[v], v);
  }
  return out;
}

// Fills depths, layers and the Euler-tour intervals from parent/children and
// enforces the structural invariants.
void RootedTree::finalize() {
  const std::size_t n = parent_.size();
  for (auto& c : children_) std::sort(c.begin(), c.end());

  depth_.assign(n, 0);
  enter_.assign(n, 0);
  exit_.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::size_t clock = 0;
  std::size_t max_depth = 0;
  // (vertex, next child index)
  std::vector<std::pair<VertexId, std::size_t>> stack{{root_, 0}};
  seen[root_] = true;
  enter_[root_] = clock++;
  while (!stack.empty()) {
    auto& [u, next] = stack.back();
    if (next < children_[u].size()) {
      const VertexId c = children_[u][next++];
      if (seen[c]) throw StructuralError("vertex " + std::to_string(c) + " is reachable twice");
      seen[c] = true;
      depth_[c] = depth_[u] + 1;
      max_depth = std::max(max_depth, depth_[c]);
      enter_[c] = clock++;
      stack.emplace_back(c, 0);
    } else {
      exit_[u] = clock++;
      stack.pop_back();
    }
  }
  for (VertexId v = 0; v < n; ++v) {
    if (!seen[v]) {
      throw StructuralError("vertex " + std::to_string(v) + " is not connected to root " +
                            std::to_string(root_));
    }
  }

  if (!spec_.depth) depth_limit_ = max_depth;
  if (max_depth > depth_limit_) {
    throw StructuralError("tree reaches depth " + std::to_string(max_depth) +
                          " beyond declared truncation depth " + std::to_string(depth_limit_));
  }
  for (VertexId v = 0; v < n; ++v) {
    if (depth_[v] < depth_limit_ && children_[v].empty()) {
      throw StructuralError("vertex " + std::to_string(v) + " at depth " +
                            std::to_string(depth_[v]) + " is terminal inside truncation depth " +
                            std::to_string(depth_limit_));
    }
  }

  layers_.assign(depth_limit_ + 1, {});
  for (VertexId v = 0; v < n; ++v) layers_[depth_[v]].push_back(v);
}

TreePtr build_tree(const TreeSpec& spec) {
  auto t = std::shared_ptr<RootedTree>(new RootedTree());
  t->spec_ = spec;

  auto add_child = [&](VertexId p) {
    const VertexId c = t->parent_.size();
    t->parent_.push_back(p);
    t->children_.emplace_back();
    t->children_[p].push_back(c);
    return c;
  };
  auto add_root = [&] {
    t->parent_.assign(1, kNoVertex);
    t->children_.assign(1, {});
    t->root_ = 0;
  };

  switch (spec.family) {
    case Family::ZLine: {
      const std::size_t depth = required_depth(spec);
      check_budget(2 * depth + 1);
      t->depth_limit_ = depth;
      add_root();
      // ids alternate +n, -n, so children are appended in id order
      VertexId pos = 0;
      VertexId neg = 0;
      for (std::size_t k = 1; k <= depth; ++k) {
        pos = add_child(pos);
        neg = add_child(neg);
      }
      break;
    }
    case Family::Homogeneous: {
      const std::size_t depth = required_depth(spec);
      if (spec.q < 2) throw RangeError("homogeneous tree needs q >= 2");
      t->depth_limit_ = depth;
      add_root();
      std::size_t total = 1;
      std::size_t width = 1;
      for (std::size_t k = 1; k <= depth; ++k) {
        width *= (k == 1 ? spec.q + 1 : spec.q);
        total += width;
        check_budget(total);
      }
      // root has q+1 children, every other interior vertex q: all degrees q+1
      std::vector<VertexId> level{0};
      for (std::size_t d = 0; d < depth; ++d) {
        const std::size_t k = (d == 0) ? spec.q + 1 : spec.q;
        std::vector<VertexId> next;
        next.reserve(level.size() * k);
        for (VertexId u : level) {
          for (std::size_t i = 0; i < k; ++i) next.push_back(add_child(u));
        }
        level = std::move(next);
      }
      break;
    }
    case Family::RandomBoundedDegree: {
      const std::size_t depth = required_depth(spec);
      if (spec.min_children < 1 || spec.max_children < spec.min_children) {
        throw RangeError("random tree needs 1 <= min_children <= max_children");
      }
      t->depth_limit_ = depth;
      add_root();
      std::mt19937_64 rng(spec.seed);
      const std::uint64_t span = spec.max_children - spec.min_children + 1;
      std::vector<VertexId> level{0};
      for (std::size_t d = 0; d < depth; ++d) {
        std::vector<VertexId> next;
        for (VertexId u : level) {
          const std::size_t k = spec.min_children + static_cast<std::size_t>(rng() % span);
          for (std::size_t i = 0; i < k; ++i) next.push_back(add_child(u));
          check_budget(t->parent_.size());
        }
        level = std::move(next);
      }
      break;
    }
    case Family::Explicit: {
      const std::size_t n = spec.edges.size() + 1;
      check_budget(n);
      if (spec.root >= n) {
        throw StructuralError("root " + std::to_string(spec.root) + " outside ids 0.." +
                              std::to_string(n - 1));
      }
      std::vector<std::vector<VertexId>> adj(n);
      for (const auto& [u, v] : spec.edges) {
        if (u >= n || v >= n) {
          throw StructuralError("edge [" + std::to_string(u) + "," + std::to_string(v) +
                                "] uses an id outside 0.." + std::to_string(n - 1) +
                                " (ids must be dense and the edge count n-1)");
        }
        if (u == v) throw StructuralError("self-loop at vertex " + std::to_string(u));
        adj[u].push_back(v);
        adj[v].push_back(u);
      }
      t->parent_.assign(n, kNoVertex);
      t->children_.assign(n, {});
      t->root_ = spec.root;
      std::vector<bool> seen(n, false);
      std::queue<VertexId> q;
      q.push(spec.root);
      seen[spec.root] = true;
      while (!q.empty()) {
        const VertexId u = q.front();
        q.pop();
        for (VertexId v : adj[u]) {
          if (v == t->parent_[u]) continue;
          if (seen[v]) {
            throw StructuralError("cycle or repeated edge through vertex " + std::to_string(v));
          }
          seen[v] = true;
          t->parent_[v] = u;
          t->children_[u].push_back(v);
          q.push(v);
        }
      }
      t->depth_limit_ = spec.depth.value_or(0);
      break;
    }
  }

  t->finalize();
  return t;
}

}  // namespace treewco
