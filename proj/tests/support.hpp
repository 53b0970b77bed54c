#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "treewco/tree.hpp"
#include "treewco/vertex_function.hpp"
#include "treewco/weighted_comp_op.hpp"

// Random instances and reference evaluations written directly from the
// definitions, without going through the library's norm code.

namespace testsupport {

using namespace treewco;

inline TreePtr random_small_tree(std::mt19937_64& rng, std::size_t max_vertices) {
  for (;;) {
    const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
    TreeSpec spec;
    if (kind == 0) {
      spec = TreeSpec::zline(std::uniform_int_distribution<std::size_t>(1, 7)(rng));
    } else if (kind == 1) {
      spec = TreeSpec::homogeneous(std::uniform_int_distribution<std::size_t>(2, 3)(rng),
                                   std::uniform_int_distribution<std::size_t>(1, 2)(rng));
    } else {
      spec = TreeSpec::random(std::uniform_int_distribution<std::size_t>(1, 4)(rng), rng(), 1, 2);
    }
    auto t = build_tree(spec);
    if (t->size() <= max_vertices) return t;
  }
}

inline std::vector<VertexId> random_images(const TreePtr& t, std::mt19937_64& rng) {
  std::vector<VertexId> img(t->size());
  std::uniform_int_distribution<std::size_t> pick(0, t->size() - 1);
  for (auto& w : img) w = pick(rng);
  return img;
}

inline SelfMap random_map(const TreePtr& t, std::mt19937_64& rng) {
  return SelfMap(t, random_images(t, rng));
}

/// Random permutation of the vertices: injective and onto.
inline SelfMap random_bijection(const TreePtr& t, std::mt19937_64& rng) {
  std::vector<VertexId> img(t->size());
  for (VertexId v = 0; v < img.size(); ++v) img[v] = v;
  std::shuffle(img.begin(), img.end(), rng);
  return SelfMap(t, img);
}

inline VertexFunction random_function(const TreePtr& t, std::mt19937_64& rng, double lo = -3.0,
                                      double hi = 3.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  return VertexFunction::from(t, [&](VertexId) { return d(rng); });
}

inline double ref_sup(const VertexFunction& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

inline double ref_lip(const VertexFunction& f) {
  const RootedTree& t = f.tree();
  double d = 0.0;
  for (VertexId v = 0; v < t.size(); ++v) {
    if (v == t.root()) continue;
    d = std::max(d, std::abs(f(v) - f(t.parent(v))));
  }
  return std::abs(f(t.root())) + d;
}

inline double ref_depth(const RootedTree& t, VertexId v) {
  std::size_t d = 0;
  for (VertexId u = v; u != t.root(); u = t.parent(u)) ++d;
  return static_cast<double>(d);
}

}  // namespace testsupport
