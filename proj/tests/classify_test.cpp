#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "treewco/classify.hpp"
#include "treewco/errors.hpp"

using namespace treewco;
using testsupport::random_function;
using testsupport::random_map;
using testsupport::random_small_tree;

namespace {

VertexId z(const RootedTree& t, std::int64_t n) { return t.vertex_with_label(n); }

double dep(const RootedTree& t, VertexId v) { return static_cast<double>(t.depth(v)); }

Verdict verdict_of(const std::vector<Certificate>& cs, Statement s) { return find_certificate(cs, s).verdict; }

const Series& series_of(const Certificate& c, const std::string& name) {
  for (const auto& s : c.depth_profile) {
    if (s.name == name) return s;
  }
  throw std::runtime_error("no series " + name);
}

// Images drawn from the ball of the given radius.
SelfMap map_into_ball(const TreePtr& t, std::size_t radius, std::mt19937_64& rng) {
  VertexSet ball;
  for (VertexId v = 0; v < t->size(); ++v) {
    if (t->depth(v) <= radius) ball.push_back(v);
  }
  std::vector<VertexId> img(t->size());
  std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
  for (auto& w : img) w = ball[pick(rng)];
  return SelfMap(t, img);
}

}  // namespace

TEST(Schedule, DefaultAndNormalize) {
  EXPECT_EQ(default_schedule(16), (std::vector<std::size_t>{1, 2, 4, 8, 16}));
  EXPECT_EQ(default_schedule(6), (std::vector<std::size_t>{1, 2, 4, 6}));
  EXPECT_EQ(normalize_schedule({8, 2, 2, 5}, 8), (std::vector<std::size_t>{2, 5, 8}));
  EXPECT_THROW(normalize_schedule({0, 2}, 8), RangeError);
  EXPECT_THROW(normalize_schedule({9}, 8), RangeError);
  EXPECT_THROW(normalize_schedule({}, 8), RangeError);
}

TEST(Names, RoundTrip) {
  for (int i = 0; i <= static_cast<int>(Statement::FiniteRangeEquivalences); ++i) {
    const auto s = static_cast<Statement>(i);
    EXPECT_EQ(parse_statement(statement_name(s)), s);
  }
  for (int i = 0; i <= static_cast<int>(Verdict::TrendInconsistent); ++i) {
    const auto v = static_cast<Verdict>(i);
    EXPECT_EQ(parse_verdict(verdict_name(v)), v);
  }
  EXPECT_EQ(statement_name(Statement::LinfIsometry), "Linf.Isometry");
  EXPECT_THROW(parse_statement("Linf.Nope"), LookupError);
}

TEST(Trend, SlopeOfPowerLaw) {
  Series s{"x", {1, 2, 4, 8}, {1.0, 0.5, 0.25, 0.125}};
  EXPECT_NEAR(*trend_slope(s), -1.0, 1e-12);
  s.values[2] = 0.0;
  EXPECT_FALSE(trend_slope(s));
}

TEST(ClassifyLinf, FoldIsometry) {
  auto t = build_tree(TreeSpec::zline(8));
  WeightedCompOp op(line_fold_weight(t), line_fold_map(t));
  auto cs = classify_linf(op, default_schedule(8));
  EXPECT_EQ(verdict_of(cs, Statement::LinfIsometry), Verdict::Holds);
  EXPECT_EQ(verdict_of(cs, Statement::LinfBoundedBelow), Verdict::Holds);
  EXPECT_EQ(verdict_of(cs, Statement::LinfBounded), Verdict::TrendConsistent);
}

TEST(ClassifyLinf, DecayingWeightIsCompact) {
  auto t = build_tree(TreeSpec::zline(16));
  auto psi = VertexFunction::from(t, [&](VertexId v) { return 1.0 / (1.0 + dep(*t, v)); });
  auto cs = classify_linf(WeightedCompOp(psi, identity_map(t)), default_schedule(16));
  EXPECT_EQ(verdict_of(cs, Statement::LinfCompact), Verdict::TrendConsistent);
  EXPECT_EQ(verdict_of(cs, Statement::LinfIsometry), Verdict::Fails);
  EXPECT_EQ(verdict_of(cs, Statement::LinfBoundedBelow), Verdict::TrendInconsistent);
  const auto& c = find_certificate(cs, Statement::LinfCompact);
  ASSERT_TRUE(c.trend_slope);
  EXPECT_LT(*c.trend_slope, 0.0);
}

TEST(ClassifyLinf, UnitWeightIdentityIsNotCompact) {
  auto t = build_tree(TreeSpec::zline(16));
  auto cs = classify_linf(WeightedCompOp(VertexFunction::constant(t, 1.0), identity_map(t)), default_schedule(16));
  EXPECT_EQ(verdict_of(cs, Statement::LinfCompact), Verdict::TrendInconsistent);
  EXPECT_EQ(verdict_of(cs, Statement::LinfIsometry), Verdict::Holds);
}

TEST(ClassifyLinf, FiniteRangeIsCompact) {
  auto t = build_tree(TreeSpec::zline(8));
  std::vector<VertexId> img(t->size());
  for (VertexId v = 0; v < t->size(); ++v) img[v] = t->ancestor_at_depth(v, std::min<std::size_t>(t->depth(v), 3));
  auto cs = classify_all(WeightedCompOp(VertexFunction::constant(t, 1.0), SelfMap(t, img)), default_schedule(8));
  EXPECT_EQ(verdict_of(cs, Statement::LinfCompact), Verdict::Holds);
  EXPECT_EQ(verdict_of(cs, Statement::LipCompact), Verdict::Holds);
}

TEST(ClassifyLinf, NonSurjectiveBoundedBelowFails) {
  auto t = build_tree(TreeSpec::zline(8));
  auto psi = VertexFunction::from(t, [&](VertexId v) {
    const auto n = t->label(v);
    return n == 0 ? 1.0 : 1.0 / std::abs(static_cast<double>(n));
  });
  auto cs = classify_all(WeightedCompOp(psi, doubling_map(t)), default_schedule(8));
  const auto& bb = find_certificate(cs, Statement::LinfBoundedBelow);
  EXPECT_EQ(bb.verdict, Verdict::Fails);
  ASSERT_FALSE(bb.witnesses.empty());
  EXPECT_EQ(t->label(bb.witnesses.front().vertices.front()), 1);
  EXPECT_EQ(verdict_of(cs, Statement::LipBoundedBelow), Verdict::Fails);
}

TEST(ClassifyLip, RecipWeightAndSquare) {
  auto t = build_tree(TreeSpec::zline(16));
  auto phi = identity_map(t);
  auto psi = VertexFunction::from(t, [&](VertexId v) { return 1.0 / (1.0 + dep(*t, phi(v))); });
  auto psi2 = VertexFunction::from(t, [&](VertexId v) { return psi(v) * psi(v); });
  auto cs = classify_lip(WeightedCompOp(psi, phi), default_schedule(16));
  EXPECT_EQ(verdict_of(cs, Statement::LipBounded), Verdict::TrendConsistent);
  EXPECT_EQ(verdict_of(cs, Statement::LipCompact), Verdict::TrendInconsistent);
  for (double x : series_of(find_certificate(cs, Statement::LipBounded), "lip_upper").values) EXPECT_LE(x, 1.0);
  auto cs2 = classify_lip(WeightedCompOp(psi2, phi), default_schedule(16));
  EXPECT_EQ(verdict_of(cs2, Statement::LipCompact), Verdict::TrendConsistent);
}

TEST(ClassifyLip, UnitWeightIdentityIsUnbounded) {
  auto t = build_tree(TreeSpec::zline(16));
  auto cs = classify_lip(WeightedCompOp(VertexFunction::constant(t, 1.0), identity_map(t)), default_schedule(16));
  EXPECT_EQ(verdict_of(cs, Statement::LipBounded), Verdict::TrendInconsistent);
}

TEST(ClassifyLip, NoIsometryAlwaysWitnessed) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_small_tree(rng, 40);
    if (t->truncation_depth() < 2) continue;
    auto cs = classify_lip(WeightedCompOp(random_function(t, rng), random_map(t, rng)),
                           default_schedule(t->truncation_depth()));
    const auto& c = find_certificate(cs, Statement::LipNoIsometry);
    EXPECT_EQ(c.verdict, Verdict::Holds);
    EXPECT_FALSE(c.witnesses.empty());
  }
}

TEST(ClassifyProperty, CoherentOnRandomOperators) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 150; ++trial) {
    auto t = random_small_tree(rng, 60);
    WeightedCompOp op(random_function(t, rng), random_map(t, rng));
    std::vector<Certificate> cs;
    ASSERT_NO_THROW(cs = classify_all(op, default_schedule(t->truncation_depth())));
    EXPECT_TRUE(cross_implication_violations(cs).empty());
    for (const auto& c : cs) {
      if (c.verdict == Verdict::Fails) {
        EXPECT_FALSE(c.witnesses.empty()) << statement_name(c.statement);
      }
      for (const auto& s : c.depth_profile) {
        const bool tail = s.name.find("tail") != std::string::npos;
        const bool ball = s.name == "sup_psi" || s.name == "lip_lower" || s.name == "lip_upper" ||
                          s.name == "max_image_depth";
        for (std::size_t i = 1; i < s.values.size(); ++i) {
          if (tail) {
            EXPECT_LE(s.values[i], s.values[i - 1] + 1e-15) << s.name;
          }
          if (ball) {
            EXPECT_GE(s.values[i], s.values[i - 1] - 1e-15) << s.name;
          }
        }
      }
    }
    if (verdict_of(cs, Statement::LinfIsometry) == Verdict::Holds) {
      EXPECT_EQ(verdict_of(cs, Statement::LinfBoundedBelow), Verdict::Holds);
    }
  }
}

TEST(SevenEquivalences, Examples) {
  auto t = build_tree(TreeSpec::zline(8));
  auto constant = seven_equivalences(constant_map(t, z(*t, 1)), default_schedule(8));
  EXPECT_EQ(constant.verdict, Verdict::Holds);
  for (const auto& item : constant.items) {
    if (item.verdict) {
      EXPECT_TRUE(positive(*item.verdict)) << item.item;
    }
  }
  auto id = seven_equivalences(identity_map(t), default_schedule(8));
  EXPECT_EQ(id.verdict, Verdict::Fails);
  ASSERT_FALSE(id.witnesses.empty());
  for (const auto& item : id.items) {
    if (item.verdict) {
      EXPECT_FALSE(positive(*item.verdict)) << item.item;
    }
  }
  EXPECT_EQ(id.items.size(), 7u);
  EXPECT_FALSE(id.items[5].verdict);

  std::vector<VertexId> img(t->size());
  for (VertexId v = 0; v < t->size(); ++v) img[v] = t->ancestor_at_depth(v, std::min<std::size_t>(t->depth(v), 3));
  EXPECT_EQ(seven_equivalences(SelfMap(t, img), default_schedule(8)).verdict, Verdict::Holds);
}

TEST(SevenEquivalences, CoherentOnSeededMaps) {
  std::mt19937_64 rng(43);
  int holds = 0, fails = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto t = build_tree(trial % 2 ? TreeSpec::zline(8) : TreeSpec::homogeneous(2, 4));
    const std::size_t radius = std::uniform_int_distribution<std::size_t>(0, t->truncation_depth())(rng);
    auto phi = map_into_ball(t, radius, rng);
    Certificate c;
    ASSERT_NO_THROW(c = seven_equivalences(phi, default_schedule(t->truncation_depth())));
    EXPECT_EQ(c.verdict == Verdict::Holds, range_confined(phi));
    (c.verdict == Verdict::Holds ? holds : fails)++;
  }
  EXPECT_GT(holds, 0);
  EXPECT_GT(fails, 0);
}
