#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace treewco {

using VertexId = std::size_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

/// Strictly increasing list of vertex ids.
using VertexSet = std::vector<VertexId>;

enum class Family { Explicit, Homogeneous, ZLine, RandomBoundedDegree };

std::string_view family_name(Family f);

/// Recipe for a depth-N truncation of a rooted, terminal-free tree.
struct TreeSpec {
  Family family = Family::ZLine;
  /// Truncation depth. Optional only for explicit trees, where it defaults to
  /// the deepest vertex.
  std::optional<std::size_t> depth;
  std::size_t q = 2;
  std::uint64_t seed = 0;
  std::size_t min_children = 1;
  std::size_t max_children = 3;
  std::vector<std::pair<VertexId, VertexId>> edges;
  VertexId root = 0;

  static TreeSpec zline(std::size_t depth);
  static TreeSpec homogeneous(std::size_t q, std::size_t depth);
  static TreeSpec random(std::size_t depth, std::uint64_t seed, std::size_t min_children = 1,
                         std::size_t max_children = 3);
  static TreeSpec explicit_edges(std::vector<std::pair<VertexId, VertexId>> edges, VertexId root,
                                 std::optional<std::size_t> depth = std::nullopt);
};

/// Immutable depth-N truncation of a rooted tree.
///
/// Vertex ids are dense, `0..size()-1`. Generated families number vertices in
/// breadth-first order; the integer line uses 0 -> 0, n -> 2n-1 (n > 0),
/// n -> -2n (n < 0), so `label()` recovers the integer. Explicit trees keep
/// the ids they were given. Vertices at depth N are the frontier: they are
/// truncation artifacts and are exempt from the no-terminal rule.
class RootedTree {
 public:
  std::size_t size() const noexcept { return parent_.size(); }
  VertexId root() const noexcept { return root_; }
  std::size_t truncation_depth() const noexcept { return depth_limit_; }
  Family family() const noexcept { return spec_.family; }
  const TreeSpec& spec() const noexcept { return spec_; }

  bool contains(VertexId v) const noexcept { return v < size(); }

  /// kNoVertex at the root.
  VertexId parent(VertexId v) const;
  std::span<const VertexId> children(VertexId v) const;
  std::size_t depth(VertexId v) const;
  std::size_t degree(VertexId v) const;
  bool is_frontier(VertexId v) const;

  /// Signed integer for the line family, the id itself otherwise.
  std::int64_t label(VertexId v) const;
  VertexId vertex_with_label(std::int64_t label) const;

  const VertexSet& layer(std::size_t n) const;
  VertexId ancestor_at_depth(VertexId v, std::size_t n) const;

  /// v together with all its descendants inside the truncation.
  VertexSet sector(VertexId v) const;
  /// True when u lies in the sector of v.
  bool in_sector(VertexId v, VertexId u) const;

  /// Deepest common ancestor.
  VertexId meet(VertexId v, VertexId w) const;
  std::size_t distance(VertexId v, VertexId w) const;

  /// Parent-child pairs ordered by child id.
  std::vector<std::pair<VertexId, VertexId>> edges() const;

 private:
  friend std::shared_ptr<const RootedTree> build_tree(const TreeSpec& spec);

  void check(VertexId v) const;
  void finalize();

  TreeSpec spec_;
  VertexId root_ = 0;
  std::size_t depth_limit_ = 0;
  std::vector<VertexId> parent_;
  std::vector<std::vector<VertexId>> children_;
  std::vector<std::size_t> depth_;
  std::vector<VertexSet> layers_;
  std::vector<std::size_t> enter_;
  std::vector<std::size_t> exit_;
};

using TreePtr = std::shared_ptr<const RootedTree>;

/// Deterministic in `spec` (including the seed).
TreePtr build_tree(const TreeSpec& spec);

inline std::size_t tree_distance(const RootedTree& t, VertexId v, VertexId w) {
  return t.distance(v, w);
}

}  // namespace treewco
