#include "treewco/fixtures.hpp"

#include "treewco/errors.hpp"

namespace treewco {

namespace {

using nlohmann::json;

std::vector<Fixture> make_fixtures() {
  std::vector<Fixture> out;

  Fixture iso;
  iso.name = "z-isometry";
  iso.summary =
      "folding map of the integer line (n -> n, odd -n -> n, even -n -> n/2) with weight 0 on "
      "odd negatives: an isometry of the bounded functions";
  iso.tree = {{"family", "zline"}, {"depth", 8}};
  iso.phi = {{"kind", "builtin"}, {"name", "zfold"}};
  iso.cases.push_back({"zfold_weight",
                       {{"kind", "builtin"}, {"name", "zfold_weight"}},
                       {{Statement::LinfIsometry, Verdict::Holds},
                        {Statement::LinfBoundedBelow, Verdict::Holds},
                        {Statement::LipNoIsometry, Verdict::Holds}}});
  iso.sweep_depths = {4, 6, 8};
  out.push_back(std::move(iso));

  Fixture bnc;
  bnc.name = "bounded-not-compact";
  bnc.summary =
      "identity on the integer line with psi = 1/(|phi|+1): bounded but not compact from "
      "Lipschitz to bounded functions; squaring psi makes it compact";
  bnc.tree = {{"family", "zline"}, {"depth", 16}};
  bnc.phi = {{"kind", "builtin"}, {"name", "identity"}};
  bnc.cases.push_back({"psi",
                       {{"kind", "builtin"}, {"name", "recip_phi_depth"}, {"params", {{"power", 1}}}},
                       {{Statement::LipBounded, Verdict::TrendConsistent},
                        {Statement::LipCompact, Verdict::TrendInconsistent}}});
  bnc.cases.push_back({"psi_squared",
                       {{"kind", "builtin"}, {"name", "recip_phi_depth"}, {"params", {{"power", 2}}}},
                       {{Statement::LipBounded, Verdict::TrendConsistent},
                        {Statement::LipCompact, Verdict::TrendConsistent}}});
  bnc.sweep_depths = {4, 8, 16};
  out.push_back(std::move(bnc));

  Fixture ns;
  ns.name = "not-surjective-2n";
  ns.summary =
      "phi(n) = 2n, psi(n) = 1/|n| (psi(0) = 1): positive inf |psi|(1+|phi|) yet the alternating "
      "target has no preimage in the Lipschitz unit ball";
  ns.tree = {{"family", "zline"}, {"depth", 8}};
  ns.phi = {{"kind", "builtin"}, {"name", "double"}};
  ns.cases.push_back({"recip_label",
                      {{"kind", "builtin"}, {"name", "recip_label"}},
                      {{Statement::LinfBoundedBelow, Verdict::Fails},
                       {Statement::LipNoIsometry, Verdict::Holds}}});
  ns.probe = SurjectivityProbe{{{"kind", "builtin"}, {"name", "alternating"}, {"params", {{"M", 1}}}},
                               Feasibility::Infeasible};
  ns.reference_inf_weighted_depth = 2.0;
  out.push_back(std::move(ns));
  return out;
}

}  // namespace

const std::vector<Fixture>& reference_fixtures() {
  static const std::vector<Fixture> fixtures = make_fixtures();
  return fixtures;
}

const Fixture& find_fixture(const std::string& name) {
  for (const auto& f : reference_fixtures()) {
    if (f.name == name) return f;
  }
  throw LookupError("unknown fixture '" + name + "'");
}

}  // namespace treewco
