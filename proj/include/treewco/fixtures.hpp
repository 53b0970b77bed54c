#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "treewco/classify.hpp"
#include "treewco/oracle.hpp"

namespace treewco {

struct FixtureCase {
  std::string label;
  nlohmann::json psi;
  std::vector<std::pair<Statement, Verdict>> expected;
};

/// Target g whose reachability from the Lipschitz unit ball is tested.
struct SurjectivityProbe {
  nlohmann::json g;
  Feasibility expected = Feasibility::Infeasible;
};

/// Worked examples in spec form, with the verdicts they must produce.
struct Fixture {
  std::string name;
  std::string summary;
  nlohmann::json tree;
  nlohmann::json phi;
  std::vector<FixtureCase> cases;
  /// Extra truncation depths the fixture is re-evaluated at.
  std::vector<std::size_t> sweep_depths;
  std::optional<SurjectivityProbe> probe;
  /// Reference value of inf |psi|(1+|phi|), reported next to the computed one.
  std::optional<double> reference_inf_weighted_depth;
};

/// "z-isometry", "bounded-not-compact", "not-surjective-2n".
const std::vector<Fixture>& reference_fixtures();
const Fixture& find_fixture(const std::string& name);

}  // namespace treewco
