#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "treewco/errors.hpp"
#include "treewco/oracle.hpp"

using namespace treewco;
using testsupport::random_function;
using testsupport::random_map;
using testsupport::random_small_tree;

namespace {

VertexId z(const RootedTree& t, std::int64_t n) { return t.vertex_with_label(n); }

VertexFunction recip_label(const TreePtr& t) {
  return VertexFunction::from(t, [&](VertexId v) {
    const auto n = t->label(v);
    return n == 0 ? 1.0 : 1.0 / std::abs(static_cast<double>(n));
  });
}

VertexFunction alternating(const TreePtr& t, double m) {
  return VertexFunction::from(t, [&](VertexId v) { return t->label(v) % 2 ? -m : m; });
}

}  // namespace

TEST(LinfOracle, SmallLineMatchesSup) {
  std::mt19937_64 rng(31);
  auto t = build_tree(TreeSpec::zline(2));
  for (int trial = 0; trial < 20; ++trial) {
    WeightedCompOp op(random_function(t, rng), random_map(t, rng));
    auto r = norm_oracle_linf(op);
    EXPECT_NEAR(r.value, testsupport::ref_sup(op.psi()), 1e-12);
    EXPECT_GT(r.search_size, 0u);
    ASSERT_TRUE(r.extremizer);
    EXPECT_NEAR(testsupport::ref_sup(*r.extremizer), 1.0, 1e-12);
  }
}

TEST(LinfOracle, TrivialCases) {
  auto t = build_tree(TreeSpec::zline(2));
  EXPECT_EQ(norm_oracle_linf(WeightedCompOp(VertexFunction::zero(t), identity_map(t))).value, 0.0);
  const VertexId target = z(*t, -1);
  auto r = norm_oracle_linf(WeightedCompOp(VertexFunction::constant(t, 1.0), constant_map(t, target)));
  EXPECT_EQ(r.value, 1.0);
  EXPECT_EQ(std::abs((*r.extremizer)(target)), 1.0);
}

TEST(LinfOracle, CapAndGrid) {
  auto big = build_tree(TreeSpec::zline(8));
  WeightedCompOp op(VertexFunction::constant(big, 1.0), identity_map(big));
  EXPECT_THROW(norm_oracle_linf(op), RangeError);
  auto sampled = norm_oracle_linf_sampled(op, 1);
  EXPECT_EQ(sampled.value, 1.0);
  auto t = build_tree(TreeSpec::zline(1));
  WeightedCompOp small(VertexFunction::constant(t, 2.0), identity_map(t));
  const double bad[] = {-0.5, 0.5};
  EXPECT_THROW(norm_oracle_linf(small, bad), RangeError);
  const double fine[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  EXPECT_EQ(norm_oracle_linf(small, fine).value, 2.0);
}

TEST(PointEval, Examples) {
  auto t = build_tree(TreeSpec::zline(4));
  for (auto method : {OracleMethod::PathExtremal, OracleMethod::GridRefine}) {
    EXPECT_NEAR(point_eval_lip_norm(t, t->root(), method).value, 1.0, 1e-6);
    EXPECT_NEAR(point_eval_lip_norm(t, z(*t, 1), method).value, 1.0, 1e-6);
    EXPECT_NEAR(point_eval_lip_norm(t, z(*t, -3), method).value, 3.0, 1e-6);
  }
  EXPECT_THROW(point_eval_lip_norm(t, 99, OracleMethod::PathExtremal), LookupError);
  EXPECT_THROW(point_eval_lip_norm(t, 0, OracleMethod::ExhaustiveSigns), RangeError);
}

TEST(PointEval, ExtremizerInUnitBall) {
  auto t = build_tree(TreeSpec::homogeneous(2, 3));
  for (VertexId w : {VertexId{0}, VertexId{5}, VertexId{17}}) {
    for (auto method : {OracleMethod::PathExtremal, OracleMethod::GridRefine}) {
      auto r = point_eval_lip_norm(t, w, method);
      ASSERT_TRUE(r.extremizer);
      EXPECT_LE(testsupport::ref_lip(*r.extremizer), 1.0 + 1e-9);
      EXPECT_NEAR(std::abs((*r.extremizer)(w)), r.value, 1e-9);
    }
  }
}

TEST(PointEval, GateOnTestTrees) {
  for (auto spec : {TreeSpec::zline(6), TreeSpec::homogeneous(2, 4), TreeSpec::random(4, 9, 1, 2)}) {
    auto t = build_tree(spec);
    for (VertexId w = 0; w < t->size(); ++w) {
      const double want = std::max(1.0, static_cast<double>(t->depth(w)));
      const double a = point_eval_lip_norm(t, w, OracleMethod::PathExtremal).value;
      const double b = point_eval_lip_norm(t, w, OracleMethod::GridRefine).value;
      EXPECT_NEAR(a, want, 1e-9);
      EXPECT_NEAR(a, b, 1e-6) << "vertex " << w;
    }
  }
}

TEST(LipOracle, Examples) {
  auto t = build_tree(TreeSpec::zline(4));
  EXPECT_EQ(norm_oracle_lip(WeightedCompOp(VertexFunction::constant(t, 1.0), identity_map(t))).value, 4.0);
  EXPECT_EQ(norm_oracle_lip(WeightedCompOp(VertexFunction::zero(t), identity_map(t))).value, 0.0);
}

TEST(LipOracle, SandwichOnRandomInstances) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    auto t = random_small_tree(rng, 30);
    WeightedCompOp op(random_function(t, rng), random_map(t, rng));
    const double v = norm_oracle_lip(op).value;
    auto b = lip_bounds(op);
    EXPECT_LE(b.lower, v + 1e-9);
    EXPECT_LE(v, b.upper + 1e-9);
    EXPECT_NEAR(v, lip_exact_norm(op), 1e-9);
  }
}

TEST(JOracle, IdentityHasZeroGap) {
  std::mt19937_64 rng(33);
  auto t = build_tree(TreeSpec::zline(2));
  for (int trial = 0; trial < 10; ++trial) {
    auto psi = random_function(t, rng);
    auto r = j_oracle_linf_bracket(WeightedCompOp(psi, identity_map(t)));
    double inf = 1e300;
    for (double x : psi.values()) inf = std::min(inf, std::abs(x));
    EXPECT_NEAR(r.lower, inf, 1e-12);
    EXPECT_NEAR(r.upper, inf, 1e-12);
    EXPECT_LE(r.gap, 1e-9);
  }
}

TEST(JOracle, FoldAndNonSurjective) {
  auto t = build_tree(TreeSpec::zline(8));
  auto fold = j_oracle_linf_bracket(WeightedCompOp(line_fold_weight(t), line_fold_map(t)));
  EXPECT_EQ(fold.lower, 1.0);
  EXPECT_EQ(fold.upper, 1.0);

  auto s = build_tree(TreeSpec::zline(3));
  auto par = j_oracle_linf_bracket(WeightedCompOp(VertexFunction::constant(s, 1.0), parent_map(s)));
  EXPECT_EQ(par.lower, 0.0);
  EXPECT_EQ(par.upper, 0.0);
  double mass = 0.0;
  for (double x : par.minimizer.values()) mass += std::abs(x);
  EXPECT_EQ(mass, 1.0);

  EXPECT_THROW(j_oracle_linf_bracket(WeightedCompOp(VertexFunction::constant(t, 1.0), identity_map(t))),
               RangeError);
}

TEST(JOracle, UpperNeverBelowFormula) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 60; ++trial) {
    auto t = random_small_tree(rng, 12);
    WeightedCompOp op(random_function(t, rng), random_map(t, rng));
    auto r = j_oracle_linf_bracket(op);
    EXPECT_GE(r.upper, r.lower - 1e-9);
  }
}

TEST(Infeasibility, DoublingAlternating) {
  auto t = build_tree(TreeSpec::zline(8));
  WeightedCompOp op(recip_label(t), doubling_map(t));
  auto r = surjectivity_infeasibility(op, alternating(t, 1.0));
  EXPECT_EQ(r.verdict, Feasibility::Infeasible);
  ASSERT_TRUE(r.pair);
  EXPECT_EQ(t->distance(r.pair->first, r.pair->second), 2u);
  EXPECT_GT(r.pair_quotient, 1.0);
  EXPECT_DOUBLE_EQ(r.pair_quotient, 3.5);
  EXPECT_GE(r.lower_bound, r.pair_quotient);
  EXPECT_FALSE(r.reason.empty());

  auto zero = surjectivity_infeasibility(op, alternating(t, 0.0));
  EXPECT_EQ(zero.verdict, Feasibility::Feasible);
  ASSERT_TRUE(zero.interpolant);
  EXPECT_EQ(testsupport::ref_lip(*zero.interpolant), 0.0);
}

TEST(Infeasibility, ForcedPairsAtUnitSpacing) {
  // Forced values at labels 2n and 2n+2 differ by M(2n+1); a quotient above 1
  // appears as soon as n = 1 with the pair (2, 4).
  auto t = build_tree(TreeSpec::zline(4));
  WeightedCompOp op(recip_label(t), doubling_map(t));
  auto r = surjectivity_infeasibility(op, alternating(t, 1.0));
  EXPECT_EQ(r.verdict, Feasibility::Infeasible);
  EXPECT_DOUBLE_EQ(r.pair_quotient, 1.5);
}

TEST(Infeasibility, IdentityIndicatorFeasible) {
  auto t = build_tree(TreeSpec::zline(3));
  WeightedCompOp op(VertexFunction::constant(t, 1.0), identity_map(t));
  auto g = indicator(t, z(*t, 2));
  auto r = surjectivity_infeasibility(op, g);
  EXPECT_EQ(r.verdict, Feasibility::Feasible);
  ASSERT_TRUE(r.interpolant);
  EXPECT_NEAR(testsupport::ref_lip(*r.interpolant), 1.0, 1e-12);
}

TEST(Infeasibility, ZeroWeightWithNonzeroTarget) {
  auto t = build_tree(TreeSpec::zline(3));
  auto psi = VertexFunction::from(t, [&](VertexId v) { return v == z(*t, 1) ? 0.0 : 1.0; });
  WeightedCompOp op(psi, identity_map(t));
  auto r = surjectivity_infeasibility(op, VertexFunction::constant(t, 0.1));
  EXPECT_EQ(r.verdict, Feasibility::Infeasible);
}

TEST(InfeasibilityProperty, HintNeverInfeasible) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = random_small_tree(rng, 30);
    WeightedCompOp op(random_function(t, rng), random_map(t, rng));
    auto f = random_function(t, rng);
    f = (1.0 / testsupport::ref_lip(f)) * f;
    auto g = op.apply(f);
    auto r = surjectivity_infeasibility(op, g, &f);
    EXPECT_NE(r.verdict, Feasibility::Infeasible) << r.reason;
    EXPECT_EQ(r.verdict, Feasibility::Feasible);
    EXPECT_LE(r.lower_bound, 1.0 + 1e-9);
  }
}

TEST(InfeasibilityProperty, BoundIsSound) {
  // Any actual preimage has Lipschitz norm at least the reported bound.
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = random_small_tree(rng, 30);
    WeightedCompOp op(random_function(t, rng), random_map(t, rng));
    auto f = random_function(t, rng);
    auto r = surjectivity_infeasibility(op, op.apply(f));
    EXPECT_LE(r.lower_bound, testsupport::ref_lip(f) + 1e-9);
  }
}
