#include "treewco/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "treewco/errors.hpp"
#include "treewco/format.hpp"

namespace treewco {

namespace {

// Local norm and action routines; kept apart from vertex_function.cpp and
// weighted_comp_op.cpp on purpose.

double sup_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

double lipschitz_norm(const RootedTree& t, std::span<const double> f) {
  double d = 0.0;
  for (VertexId v = 0; v < f.size(); ++v) {
    if (v != t.root()) d = std::max(d, std::abs(f[v] - f[t.parent(v)]));
  }
  return std::abs(f[t.root()]) + d;
}

// ||psi C_phi f||_inf, with f read as 0 wherever `readable` says so.
double image_sup(const WeightedCompOp& op, std::span<const double> f,
                 const std::vector<bool>* readable = nullptr) {
  const auto psi = op.psi().values();
  double m = 0.0;
  for (VertexId v : op.phi().domain()) {
    const VertexId w = op.phi()(v);
    if (readable && !(*readable)[w]) continue;
    m = std::max(m, std::abs(psi[v] * f[w]));
  }
  return m;
}

constexpr int kMaxSweeps = 200;

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string label_of(const RootedTree& t, VertexId v) { return std::to_string(t.label(v)); }

}  // namespace

std::string_view quantity_name(OracleQuantity q) {
  switch (q) {
    case OracleQuantity::OpNormLinf: return "OpNormLinf";
    case OracleQuantity::OpNormLip: return "OpNormLip";
    case OracleQuantity::PointEvalNormLip: return "PointEvalNormLip";
    case OracleQuantity::JLinfUpper: return "JLinfUpper";
    case OracleQuantity::SurjInfeasibility: return "SurjInfeasibility";
  }
  return "?";
}

std::string_view method_name(OracleMethod m) {
  switch (m) {
    case OracleMethod::ExhaustiveSigns: return "ExhaustiveSigns";
    case OracleMethod::GridRefine: return "GridRefine";
    case OracleMethod::PathExtremal: return "PathExtremal";
    case OracleMethod::IncrementBound: return "IncrementBound";
  }
  return "?";
}

std::string_view feasibility_name(Feasibility f) {
  switch (f) {
    case Feasibility::Infeasible: return "infeasible";
    case Feasibility::Feasible: return "feasible";
    case Feasibility::Undecided: return "undecided";
  }
  return "?";
}

OracleResult norm_oracle_linf(const WeightedCompOp& op, std::span<const double> grid) {
  static constexpr double kDefaultGrid[] = {-1.0, 0.0, 1.0};
  if (grid.empty()) grid = kDefaultGrid;
  const RootedTree& t = op.tree();
  if (t.size() > kMaxExhaustiveMaxVertices) {
    throw RangeError("exhaustive L-infinity search is capped at " +
                     std::to_string(kMaxExhaustiveMaxVertices) + " vertices (tree has " +
                     std::to_string(t.size()) + "); use the sampled oracle");
  }
  const double top = sup_abs(grid);
  if (std::abs(top - 1.0) > 1e-15) throw RangeError("value grid must have max magnitude 1");
  double unit = 1.0;
  for (double g : grid) {
    if (std::abs(std::abs(g) - 1.0) <= 1e-15) unit = g;
  }

  // Only coordinates on the range are read; the rest sit at a unit value so
  // every pattern has sup norm 1.
  const VertexSet active = op.phi().range();
  std::vector<double> f(t.size(), unit);
  std::vector<std::size_t> digit(active.size(), 0);
  for (std::size_t i = 0; i < active.size(); ++i) f[active[i]] = grid[0];
  const bool all_active = active.size() == t.size();

  OracleResult r;
  r.quantity = OracleQuantity::OpNormLinf;
  r.method = OracleMethod::ExhaustiveSigns;
  r.value = -1.0;
  std::vector<double> best;
  while (true) {
    if (!all_active || std::abs(sup_abs(f) - 1.0) <= 1e-15) {
      ++r.search_size;
      const double val = image_sup(op, f);
      if (val > r.value) {
        r.value = val;
        best = f;
      }
    }
    std::size_t i = 0;
    for (; i < active.size(); ++i) {
      if (++digit[i] < grid.size()) {
        f[active[i]] = grid[digit[i]];
        break;
      }
      digit[i] = 0;
      f[active[i]] = grid[0];
    }
    if (i == active.size()) break;
  }
  r.extremizer = VertexFunction(op.psi().tree_ptr(), best);
  r.witness = "grid of " + std::to_string(grid.size()) + " values over " +
              std::to_string(active.size()) + " range coordinates";
  return r;
}

OracleResult norm_oracle_linf_sampled(const WeightedCompOp& op, std::uint64_t seed,
                                      std::size_t samples) {
  const RootedTree& t = op.tree();
  std::mt19937_64 rng(seed);
  OracleResult r;
  r.quantity = OracleQuantity::OpNormLinf;
  r.method = OracleMethod::GridRefine;
  r.value = -1.0;
  std::vector<double> f(t.size());
  std::vector<double> best;
  for (std::size_t s = 0; s < std::max<std::size_t>(samples, 1); ++s) {
    for (double& x : f) x = (rng() & 1U) ? 1.0 : -1.0;
    const double val = image_sup(op, f);
    ++r.search_size;
    if (val > r.value) {
      r.value = val;
      best = f;
    }
  }
  r.extremizer = VertexFunction(op.psi().tree_ptr(), best);
  r.witness = "random sign patterns, seed " + std::to_string(seed);
  return r;
}

OracleResult point_eval_lip_norm(const TreePtr& tree, VertexId w, OracleMethod method,
                                 const PointEvalOptions& opts) {
  const RootedTree& t = *tree;
  if (!t.contains(w)) throw LookupError("vertex " + std::to_string(w) + " is not in the tree");
  OracleResult r;
  r.quantity = OracleQuantity::PointEvalNormLip;
  r.method = method;
  r.value = 0.0;
  const std::size_t n = t.size();
  std::vector<double> best;

  if (method == OracleMethod::PathExtremal) {
    const std::size_t steps = std::max<std::size_t>(opts.path_grid, 2);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < steps; ++i) {
      const double a = static_cast<double>(i) / static_cast<double>(steps - 1);
      for (VertexId v = 0; v < n; ++v) {
        f[v] = a + (1.0 - a) * static_cast<double>(t.depth(t.meet(v, w)));
      }
      ++r.search_size;
      const double norm = lipschitz_norm(t, f);
      if (norm <= 0.0) continue;
      const double val = std::abs(f[w]) / norm;
      if (val > r.value) {
        r.value = val;
        best = f;
        for (double& x : best) x /= norm;
        r.witness = "root value a = " + format_real(a);
      }
    }
  } else if (method == OracleMethod::GridRefine) {
    std::vector<VertexSet> sectors(n), singletons(n);
    for (VertexId v = 0; v < n; ++v) {
      sectors[v] = t.sector(v);
      singletons[v] = {v};
    }
    auto ratio = [&](const std::vector<double>& f) {
      const double norm = lipschitz_norm(t, f);
      return norm > 0.0 ? std::abs(f[w]) / norm : 0.0;
    };
    std::mt19937_64 rng(opts.seed);
    for (std::size_t s = 0; s < std::max<std::size_t>(opts.starts, 1); ++s) {
      std::vector<double> f(n);
      for (double& x : f) x = 2.0 * unit_draw(rng) - 1.0;
      double cur = ratio(f);
      auto normalize = [&] {
        // the ratio is scale invariant; keep f on the unit sphere so steps stay meaningful
        const double norm = lipschitz_norm(t, f);
        if (norm > 0.0) {
          for (double& x : f) x /= norm;
        }
      };
      normalize();
      auto try_move = [&](const VertexSet& where, double delta) {
        for (VertexId x : where) f[x] += delta;
        ++r.search_size;
        if (const double c = ratio(f); c > cur * (1.0 + 1e-15)) {
          cur = c;
          return true;
        }
        for (VertexId x : where) f[x] -= delta;
        return false;
      };
      for (double step = 0.5; step > 1e-11; step *= 0.5) {
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
          bool improved = false;
          for (VertexId u = 0; u < n; ++u) {
            for (double delta : {step, -step}) {
              improved |= try_move(singletons[u], delta);
              improved |= try_move(sectors[u], delta);
            }
          }
          normalize();
          if (!improved) break;
        }
      }
      if (cur > r.value) {
        r.value = cur;
        best = f;
        const double norm = lipschitz_norm(t, best);
        for (double& x : best) x /= norm;
        r.witness = "start " + std::to_string(s) + " of seed " + std::to_string(opts.seed);
      }
    }
  } else {
    throw RangeError("point evaluation supports PathExtremal and GridRefine only");
  }
  if (!best.empty()) r.extremizer = VertexFunction(tree, std::move(best));
  return r;
}

OracleResult norm_oracle_lip(const WeightedCompOp& op) {
  const RootedTree& t = op.tree();
  const auto psi = op.psi().values();
  std::map<VertexId, double> eval_norm;
  OracleResult r;
  r.quantity = OracleQuantity::OpNormLip;
  r.method = OracleMethod::PathExtremal;
  VertexId arg = kNoVertex;
  for (VertexId v : op.phi().domain()) {
    const VertexId w = op.phi()(v);
    auto it = eval_norm.find(w);
    if (it == eval_norm.end()) {
      const OracleResult pe = point_eval_lip_norm(op.psi().tree_ptr(), w, OracleMethod::PathExtremal);
      r.search_size += pe.search_size;
      it = eval_norm.emplace(w, pe.value).first;
    }
    const double val = std::abs(psi[v]) * it->second;
    if (arg == kNoVertex || val > r.value) {
      r.value = val;
      arg = v;
    }
  }
  r.search_size = std::max<std::size_t>(r.search_size, 1);
  if (arg != kNoVertex) {
    const VertexId w = op.phi()(arg);
    // extremal f for evaluation at phi(arg) from the path family
    std::vector<double> f(t.size());
    const double a = t.depth(w) >= 1 ? 0.0 : 1.0;
    for (VertexId v = 0; v < t.size(); ++v) {
      f[v] = a + (1.0 - a) * static_cast<double>(t.depth(t.meet(v, w)));
    }
    const double norm = lipschitz_norm(t, f);
    for (double& x : f) x /= norm;
    r.extremizer = VertexFunction(op.psi().tree_ptr(), std::move(f));
    r.witness = "sup attained at v = " + label_of(t, arg) + " via phi(v) = " + label_of(t, w) +
                " (sup over f and v exchanged)";
  }
  return r;
}

JBracket j_oracle_linf_bracket(const WeightedCompOp& op, std::size_t grid_levels) {
  const RootedTree& t = op.tree();
  const VertexSet& ball = op.phi().codomain();
  if (ball.size() > kMaxExhaustiveMinVertices) {
    throw RangeError("exhaustive injectivity-modulus search is capped at " +
                     std::to_string(kMaxExhaustiveMinVertices) + " codomain vertices (have " +
                     std::to_string(ball.size()) + ")");
  }
  if (grid_levels < 2) throw RangeError("grid needs at least 2 levels");
  std::vector<double> grid(grid_levels);
  for (std::size_t i = 0; i < grid_levels; ++i) {
    grid[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid_levels - 1);
  }
  std::vector<bool> readable(t.size(), false);
  for (VertexId w : ball) readable[w] = true;

  JBracket r{std::numeric_limits<double>::infinity(), 0.0, 0.0, VertexFunction::zero(op.psi().tree_ptr()), 0};
  std::vector<double> best;
  auto consider = [&](const std::vector<double>& f) {
    ++r.search_size;
    const double val = image_sup(op, f, &readable);
    if (val < r.upper) {
      r.upper = val;
      best = f;
    }
  };

  std::vector<double> f(t.size(), 0.0);
  for (VertexId w : ball) {
    f[w] = 1.0;
    consider(f);
    f[w] = 0.0;
  }
  std::vector<std::size_t> digit(ball.size(), 0);
  for (VertexId w : ball) f[w] = grid[0];
  while (true) {
    double m = 0.0;
    for (VertexId w : ball) m = std::max(m, std::abs(f[w]));
    if (std::abs(m - 1.0) <= 1e-12) consider(f);
    std::size_t i = 0;
    for (; i < ball.size(); ++i) {
      if (++digit[i] < grid.size()) {
        f[ball[i]] = grid[digit[i]];
        break;
      }
      digit[i] = 0;
      f[ball[i]] = grid[0];
    }
    if (i == ball.size()) break;
  }
  r.minimizer = VertexFunction(op.psi().tree_ptr(), std::move(best));
  r.lower = j_linf(op);
  r.gap = r.upper - r.lower;
  return r;
}

InfeasibilityReport surjectivity_infeasibility(const WeightedCompOp& op, const VertexFunction& g,
                                               const VertexFunction* hint, double tol) {
  const RootedTree& t = op.tree();
  if (!op.phi().same_tree(g)) throw TreeMismatchError("target function lives on another tree");
  InfeasibilityReport r;
  const auto psi = op.psi().values();
  const auto gv = g.values();

  // f(phi(v)) = g(v) / psi(v) on the domain
  std::vector<double> forced(t.size(), 0.0);
  std::vector<bool> is_forced(t.size(), false);
  for (VertexId v : op.phi().domain()) {
    const VertexId w = op.phi()(v);
    if (psi[v] == 0.0) {
      if (std::abs(gv[v]) > tol) {
        r.verdict = Feasibility::Infeasible;
        r.reason = "psi vanishes at " + label_of(t, v) + " while g(" + label_of(t, v) + ") = " +
                   format_real(gv[v]);
        return r;
      }
      continue;
    }
    const double x = gv[v] / psi[v];
    if (is_forced[w] && std::abs(forced[w] - x) > tol * std::max(1.0, std::abs(x))) {
      r.verdict = Feasibility::Infeasible;
      r.reason = "conflicting forced values at " + label_of(t, w);
      return r;
    }
    forced[w] = x;
    is_forced[w] = true;
  }
  VertexSet pts;
  for (VertexId w = 0; w < t.size(); ++w) {
    if (is_forced[w]) pts.push_back(w);
  }
  r.forced_count = pts.size();

  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double q = std::abs(forced[pts[i]] - forced[pts[j]]) /
                       static_cast<double>(t.distance(pts[i], pts[j]));
      if (q > r.pair_quotient) {
        r.pair_quotient = q;
        r.pair = std::make_pair(pts[i], pts[j]);
      }
    }
  }
  const bool root_forced = is_forced[t.root()];
  double bound = r.pair_quotient + (root_forced ? std::abs(forced[t.root()]) : 0.0);
  std::string why = root_forced ? "|f(o)| + max pair quotient" : "max pair quotient";
  for (VertexId u : pts) {
    const double pe = std::abs(forced[u]) / std::max<double>(1.0, static_cast<double>(t.depth(u)));
    if (pe > bound) {
      bound = pe;
      why = "growth bound at " + label_of(t, u);
    }
  }
  r.lower_bound = bound;
  if (bound > 1.0 + tol) {
    r.verdict = Feasibility::Infeasible;
    r.reason = "every preimage has Lipschitz norm >= " + format_real(bound) + " (" + why + ")";
    if (r.pair) {
      r.reason += "; forced pair " + label_of(t, r.pair->first) + ", " +
                  label_of(t, r.pair->second) + " has difference quotient " +
                  format_real(r.pair_quotient);
    }
    return r;
  }

  auto accepts = [&](std::span<const double> f) {
    for (VertexId v : op.phi().domain()) {
      if (std::abs(psi[v] * f[op.phi()(v)] - gv[v]) > tol * std::max(1.0, std::abs(gv[v]))) {
        return false;
      }
    }
    return lipschitz_norm(t, f) <= 1.0 + tol;
  };
  if (hint) {
    if (!op.phi().same_tree(*hint)) throw TreeMismatchError("hint lives on another tree");
    if (accepts(hint->values())) {
      r.verdict = Feasibility::Feasible;
      r.interpolant = *hint;
      r.reason = "supplied preimage lies in the unit ball";
      return r;
    }
  }

  // extend forced values downwards: unforced vertices copy their parent
  std::vector<double> f(t.size(), 0.0);
  for (std::size_t d = 0; d <= t.truncation_depth(); ++d) {
    for (VertexId v : t.layer(d)) {
      if (is_forced[v]) f[v] = forced[v];
      else if (v != t.root()) f[v] = f[t.parent(v)];
    }
  }
  r.interpolant = VertexFunction(op.psi().tree_ptr(), f);
  if (accepts(f)) {
    r.verdict = Feasibility::Feasible;
    r.reason = "explicit preimage with Lipschitz norm " + format_real(lipschitz_norm(t, f));
  } else {
    r.verdict = Feasibility::Undecided;
    r.reason = "lower bound does not exceed 1 and the simple extension leaves the unit ball";
  }
  return r;
}

}  // namespace treewco
