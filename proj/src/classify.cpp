#include "treewco/classify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "treewco/errors.hpp"

namespace treewco {

namespace {

std::string vname(const RootedTree& t, VertexId v) { return std::to_string(t.label(v)); }

// sup of value(i) over domain entries i with |dom[i]| <= d, for each d in the schedule.
Series ball_sup(const WeightedCompOp& op, const std::vector<std::size_t>& schedule,
                std::string name, const std::function<double(std::size_t)>& value) {
  const auto& dom = op.phi().domain();
  const RootedTree& t = op.tree();
  Series s{std::move(name), schedule, {}};
  for (std::size_t d : schedule) {
    double m = 0.0;
    for (std::size_t i = 0; i < dom.size(); ++i) {
      if (t.depth(dom[i]) <= d) m = std::max(m, value(i));
    }
    s.values.push_back(m);
  }
  return s;
}

Series tail_series(const std::vector<std::size_t>& schedule, std::string name,
                   const std::function<double(std::size_t)>& tail) {
  Series s{std::move(name), schedule, {}};
  for (std::size_t d : schedule) s.values.push_back(tail(probe_depth(d)));
  return s;
}

bool looks_bounded(const std::vector<double>& v, const ClassifyConfig& cfg) {
  if (v.size() < 2) return true;
  const double last = v.back();
  return last < cfg.abs_tol || last <= cfg.growth_factor * v[v.size() - 2];
}

bool looks_decaying(const std::vector<double>& v, const ClassifyConfig& cfg) {
  if (v.empty()) return true;
  const double last = v.back();
  if (last < cfg.abs_tol) return true;
  if (v.size() < 2) return false;
  const double first = v[v.size() - std::min<std::size_t>(3, v.size())];
  return first >= cfg.decay_factor * last;
}

Verdict trend(bool ok) { return ok ? Verdict::TrendConsistent : Verdict::TrendInconsistent; }

// Domain vertex with largest value(i) among those whose image is deeper than n.
std::optional<VertexId> tail_argmax(const WeightedCompOp& op, std::size_t n,
                                    const std::vector<double>& value) {
  const auto& dom = op.phi().domain();
  std::optional<VertexId> best;
  double m = -1.0;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (op.phi().image_depth(dom[i]) > n && value[i] > m) {
      m = value[i];
      best = dom[i];
    }
  }
  return best;
}

Witness vertex_witness(std::string kind, VertexId v, double value, std::string detail) {
  return {std::move(kind), {v}, {value}, std::move(detail)};
}

Witness range_witness(const SelfMap& phi) {
  Witness w;
  w.kind = "range";
  w.vertices = phi.range();
  w.values = {static_cast<double>(phi.max_image_depth())};
  w.detail = "image has " + std::to_string(w.vertices.size()) + " vertices, all within depth " +
             std::to_string(phi.max_image_depth());
  return w;
}

Series image_depth_series(const SelfMap& phi, const std::vector<std::size_t>& schedule) {
  Series s{"max_image_depth", schedule, {}};
  const RootedTree& t = phi.tree();
  for (std::size_t d : schedule) {
    std::size_t m = 0;
    for (VertexId v : phi.domain()) {
      if (t.depth(v) <= d) m = std::max(m, phi.image_depth(v));
    }
    s.values.push_back(static_cast<double>(m));
  }
  return s;
}

// min over codomain targets of depth <= d of the preimage sup of |psi|.
Series preimage_inf_series(const WeightedCompOp& op, const std::vector<std::size_t>& schedule) {
  Series s{"min_preimage_sup", schedule, {}};
  const RootedTree& t = op.tree();
  for (std::size_t d : schedule) {
    double m = std::numeric_limits<double>::infinity();
    for (VertexId w : op.phi().codomain()) {
      if (t.depth(w) <= d) m = std::min(m, op.preimage_sup(w));
    }
    s.values.push_back(std::isfinite(m) ? m : 0.0);
  }
  return s;
}

void set_slope(Certificate& c, const Series& s) { c.trend_slope = trend_slope(s); }

Certificate bounded_below(const WeightedCompOp& op, const std::vector<std::size_t>& schedule,
                          const ClassifyConfig& cfg, Statement st) {
  const RootedTree& t = op.tree();
  Certificate c;
  c.statement = st;
  const PreimageInf m = min_preimage_sup(op);
  Series inf_series = preimage_inf_series(op, schedule);
  if (st == Statement::LinfBoundedBelow) {
    c.theorem_ref =
        "bounded below on bounded functions iff phi is onto and inf over w of sup |psi| on the "
        "preimage of w is positive; that infimum is the injectivity modulus";
    c.depth_profile.push_back(inf_series);
  } else {
    c.theorem_ref =
        "bounded below from Lipschitz to bounded functions iff phi is onto and inf over w of sup "
        "|psi| on the preimage of w is positive; the injectivity modulus lies in [M/3, M]";
    Series lo{"j_lower", schedule, {}};
    for (double x : inf_series.values) lo.values.push_back(x / 3.0);
    inf_series.name = "j_upper";
    c.depth_profile.push_back(lo);
    c.depth_profile.push_back(inf_series);
    c.notes.push_back("only the bracket [M/3, M] is certified; no point value is claimed");
  }
  const std::vector<double>& j_values = inf_series.values;
  if (m.value > cfg.exact_tol && !looks_decaying(j_values, cfg)) {
    c.verdict = Verdict::Holds;
    c.witnesses.push_back(vertex_witness("argmin", m.argmin, m.value,
                                         "infimum attained at target " + vname(t, m.argmin)));
  } else if (m.value > cfg.exact_tol) {
    // positive on the truncation but shrinking with depth
    c.verdict = Verdict::TrendInconsistent;
    c.witnesses.push_back(vertex_witness("argmin", m.argmin, m.value,
                                         "infimum at target " + vname(t, m.argmin) +
                                             " decays along the schedule"));
  } else {
    c.verdict = Verdict::Fails;
    const bool missed = op.phi().preimage(m.argmin).empty();
    c.witnesses.push_back(vertex_witness(
        missed ? "missed-vertex" : "vanishing-weight", m.argmin, m.value,
        missed ? "target " + vname(t, m.argmin) + " has no preimage"
               : "psi vanishes on the whole preimage of " + vname(t, m.argmin)));
  }
  c.notes.push_back("decided over targets of depth <= " +
                    std::to_string(op.phi().codomain_depth()));
  return c;
}

}  // namespace

std::string_view statement_name(Statement s) {
  switch (s) {
    case Statement::LinfBounded: return "Linf.Bounded";
    case Statement::LinfCompact: return "Linf.Compact";
    case Statement::LinfIsometry: return "Linf.Isometry";
    case Statement::LinfBoundedBelow: return "Linf.BoundedBelow";
    case Statement::LipBounded: return "Lip.Bounded";
    case Statement::LipCompact: return "Lip.Compact";
    case Statement::LipNoIsometry: return "Lip.NoIsometry";
    case Statement::LipBoundedBelow: return "Lip.BoundedBelow";
    case Statement::FiniteRangeEquivalences: return "Equiv.FiniteRange";
  }
  return "?";
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    case Verdict::TrendConsistent: return "TrendConsistent";
    case Verdict::TrendInconsistent: return "TrendInconsistent";
  }
  return "?";
}

Statement parse_statement(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Statement::FiniteRangeEquivalences); ++i) {
    const auto s = static_cast<Statement>(i);
    if (statement_name(s) == name) return s;
  }
  throw LookupError("unknown statement '" + std::string(name) + "'");
}

Verdict parse_verdict(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Verdict::TrendInconsistent); ++i) {
    const auto v = static_cast<Verdict>(i);
    if (verdict_name(v) == name) return v;
  }
  throw LookupError("unknown verdict '" + std::string(name) + "'");
}

std::vector<std::size_t> default_schedule(std::size_t truncation_depth) {
  std::vector<std::size_t> s;
  for (std::size_t d = 1; d <= truncation_depth; d *= 2) s.push_back(d);
  if (truncation_depth > 0 && s.back() != truncation_depth) s.push_back(truncation_depth);
  return s;
}

std::vector<std::size_t> normalize_schedule(std::vector<std::size_t> schedule,
                                            std::size_t truncation_depth) {
  if (schedule.empty()) throw RangeError("depth schedule is empty");
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  if (schedule.front() < 1 || schedule.back() > truncation_depth) {
    throw RangeError("depth schedule must lie in 1.." + std::to_string(truncation_depth));
  }
  return schedule;
}

bool range_confined(const SelfMap& phi) {
  return phi.range_confined(probe_depth(phi.tree().truncation_depth()));
}

std::optional<double> trend_slope(const Series& s) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (s.values[i] <= 0.0 || s.depths[i] == 0) return std::nullopt;
    const double x = std::log(static_cast<double>(s.depths[i]));
    const double y = std::log(s.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  const double den = static_cast<double>(k) * sxx - sx * sx;
  if (k < 2 || den <= 0.0) return std::nullopt;
  return (static_cast<double>(k) * sxy - sx * sy) / den;
}

std::vector<Certificate> classify_linf(const WeightedCompOp& op,
                                       const std::vector<std::size_t>& schedule_in,
                                       const ClassifyConfig& cfg) {
  const RootedTree& t = op.tree();
  const auto schedule = normalize_schedule(schedule_in, t.truncation_depth());
  const auto& a = op.abs_weight();
  const auto& dom = op.phi().domain();
  std::vector<Certificate> out;

  {
    Certificate c;
    c.statement = Statement::LinfBounded;
    c.theorem_ref = "bounded on bounded functions iff sup |psi| < infinity; the norm is sup |psi|";
    Series s = ball_sup(op, schedule, "sup_psi", [&](std::size_t i) { return a[i]; });
    c.verdict = trend(looks_bounded(s.values, cfg));
    set_slope(c, s);
    if (!dom.empty()) {
      const auto it = std::max_element(a.begin(), a.end());
      const VertexId v = dom[static_cast<std::size_t>(it - a.begin())];
      c.witnesses.push_back(vertex_witness("argmax", v, *it, "sup |psi| attained at " + vname(t, v)));
    }
    c.depth_profile.push_back(std::move(s));
    out.push_back(std::move(c));
  }
  {
    Certificate c;
    c.statement = Statement::LinfCompact;
    c.theorem_ref =
        "compact on bounded functions iff phi has finite range or sup of |psi| over "
        "|phi(v)| > n tends to 0; that limit is the essential norm";
    Series tails = tail_series(schedule, "linf_tail", [&](std::size_t n) { return linf_ess_norm_tail(op, n); });
    const std::size_t n_last = probe_depth(schedule.back());
    if (range_confined(op.phi())) {
      c.verdict = Verdict::Holds;
      c.witnesses.push_back(range_witness(op.phi()));
      c.notes.push_back("image confined to depth " + std::to_string(probe_depth(t.truncation_depth())));
    } else {
      c.verdict = trend(looks_decaying(tails.values, cfg));
      if (auto v = tail_argmax(op, n_last, a)) {
        c.witnesses.push_back(vertex_witness("tail-argmax", *v, tails.values.back(),
                                             "largest |psi| with |phi(v)| > " + std::to_string(n_last)));
      }
    }
    set_slope(c, tails);
    c.depth_profile.push_back(std::move(tails));
    c.depth_profile.push_back(image_depth_series(op.phi(), schedule));
    out.push_back(std::move(c));
  }
  {
    Certificate c;
    c.statement = Statement::LinfIsometry;
    c.theorem_ref =
        "isometry on bounded functions iff phi is onto, |psi| <= 1 and sup |psi| over every "
        "preimage equals 1";
    const IsometryVerdict iv = isometry_check_linf(op, cfg.exact_tol);
    c.verdict = iv.isometry ? Verdict::Holds : Verdict::Fails;
    if (iv.witness) {
      c.witnesses.push_back(vertex_witness("refuting-vertex", *iv.witness, iv.observed, iv.reason));
    } else {
      c.notes.push_back(iv.reason);
    }
    c.depth_profile.push_back(preimage_inf_series(op, schedule));
    out.push_back(std::move(c));
  }
  out.push_back(bounded_below(op, schedule, cfg, Statement::LinfBoundedBelow));
  return out;
}

std::vector<Certificate> classify_lip(const WeightedCompOp& op,
                                      const std::vector<std::size_t>& schedule_in,
                                      const ClassifyConfig& cfg) {
  const RootedTree& t = op.tree();
  const auto schedule = normalize_schedule(schedule_in, t.truncation_depth());
  const auto& a = op.abs_weight();
  const auto& h = op.weighted_depth();
  const auto& dom = op.phi().domain();
  std::vector<Certificate> out;

  {
    Certificate c;
    c.statement = Statement::LipBounded;
    c.theorem_ref =
        "bounded from Lipschitz to bounded functions iff sup |psi||phi| < infinity; "
        "max(sup|psi|, sup|psi||phi|) <= norm <= sup |psi|(1+|phi|)";
    Series lo = ball_sup(op, schedule, "lip_lower", [&](std::size_t i) { return std::max(a[i], h[i]); });
    Series hi = ball_sup(op, schedule, "lip_upper", [&](std::size_t i) { return a[i] + h[i]; });
    c.verdict = trend(looks_bounded(lo.values, cfg) || looks_bounded(hi.values, cfg));
    set_slope(c, hi);
    if (!dom.empty()) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < dom.size(); ++i) {
        if (a[i] + h[i] > a[best] + h[best]) best = i;
      }
      c.witnesses.push_back(vertex_witness("argmax", dom[best], a[best] + h[best],
                                           "sup |psi|(1+|phi|) attained at " + vname(t, dom[best])));
    }
    c.depth_profile.push_back(std::move(lo));
    c.depth_profile.push_back(std::move(hi));
    out.push_back(std::move(c));
  }
  {
    Certificate c;
    c.statement = Statement::LipCompact;
    c.theorem_ref =
        "compact from Lipschitz to bounded functions iff phi has finite range or |psi(v)||phi(v)| "
        "tends to 0 as |phi(v)| grows; that limit is the essential norm";
    Series tails = tail_series(schedule, "lip_tail", [&](std::size_t n) { return lip_ess_norm_tail(op, n); });
    const std::size_t n_last = probe_depth(schedule.back());
    if (range_confined(op.phi())) {
      c.verdict = Verdict::Holds;
      c.witnesses.push_back(range_witness(op.phi()));
      c.notes.push_back("image confined to depth " + std::to_string(probe_depth(t.truncation_depth())));
    } else {
      c.verdict = trend(looks_decaying(tails.values, cfg));
      if (auto v = tail_argmax(op, n_last, h)) {
        c.witnesses.push_back(vertex_witness("tail-argmax", *v, tails.values.back(),
                                             "largest |psi||phi| with |phi(v)| > " + std::to_string(n_last)));
      }
    }
    set_slope(c, tails);
    c.depth_profile.push_back(std::move(tails));
    c.depth_profile.push_back(image_depth_series(op.phi(), schedule));
    out.push_back(std::move(c));
  }
  {
    Certificate c;
    c.statement = Statement::LipNoIsometry;
    c.theorem_ref = "no weighted composition operator is an isometry from Lipschitz to bounded functions";
    c.verdict = Verdict::Holds;
    if (t.truncation_depth() < 2) {
      c.notes.push_back("truncation too shallow to exhibit a refuting vertex");
    } else {
      const IsometryVerdict iv = isometry_check_lip(op, cfg.exact_tol);
      if (iv.witness) {
        c.witnesses.push_back(vertex_witness("refuting-vertex", *iv.witness, iv.observed, iv.reason));
      } else {
        c.notes.push_back(iv.reason);
      }
    }
    out.push_back(std::move(c));
  }
  out.push_back(bounded_below(op, schedule, cfg, Statement::LipBoundedBelow));
  return out;
}

const Certificate& find_certificate(const std::vector<Certificate>& certs, Statement s) {
  for (const auto& c : certs) {
    if (c.statement == s) return c;
  }
  throw LookupError("no certificate for " + std::string(statement_name(s)));
}

std::vector<std::string> cross_implication_violations(const std::vector<Certificate>& certs,
                                                      const ClassifyConfig& cfg) {
  std::vector<std::string> bad;
  auto has = [&](Statement s) {
    return std::any_of(certs.begin(), certs.end(), [&](const Certificate& c) { return c.statement == s; });
  };
  auto series = [](const Certificate& c, std::string_view name) -> const Series* {
    for (const auto& s : c.depth_profile) {
      if (s.name == name) return &s;
    }
    return nullptr;
  };
  if (has(Statement::LinfIsometry) && has(Statement::LinfBoundedBelow) &&
      find_certificate(certs, Statement::LinfIsometry).verdict == Verdict::Holds &&
      find_certificate(certs, Statement::LinfBoundedBelow).verdict != Verdict::Holds) {
    bad.push_back("Linf.Isometry holds but Linf.BoundedBelow does not");
  }
  if (has(Statement::LinfBounded) && has(Statement::LipBounded)) {
    const Certificate& lip = find_certificate(certs, Statement::LipBounded);
    const Series* hi = series(lip, "lip_upper");
    if (positive(find_certificate(certs, Statement::LinfBounded).verdict) && hi &&
        looks_bounded(hi->values, cfg) && !positive(lip.verdict)) {
      bad.push_back("sup |psi|(1+|phi|) looks bounded but Lip.Bounded is not consistent");
    }
  }
  if (has(Statement::LinfCompact) && has(Statement::LipCompact) &&
      (find_certificate(certs, Statement::LinfCompact).verdict == Verdict::Holds) !=
          (find_certificate(certs, Statement::LipCompact).verdict == Verdict::Holds)) {
    bad.push_back("finite-range compactness decided differently for the two spaces");
  }
  if (has(Statement::LipNoIsometry) && find_certificate(certs, Statement::LipNoIsometry).verdict != Verdict::Holds) {
    bad.push_back("Lip.NoIsometry does not hold");
  }
  for (const auto& c : certs) {
    if (c.verdict == Verdict::Fails && c.witnesses.empty()) {
      bad.push_back(std::string(statement_name(c.statement)) + " fails without a witness");
    }
  }
  return bad;
}

std::vector<Certificate> classify_all(const WeightedCompOp& op, const std::vector<std::size_t>& schedule,
                                      const ClassifyConfig& cfg) {
  std::vector<Certificate> out = classify_linf(op, schedule, cfg);
  for (auto& c : classify_lip(op, schedule, cfg)) out.push_back(std::move(c));
  const auto bad = cross_implication_violations(out, cfg);
  if (!bad.empty()) throw std::logic_error("certificate cross-check failed: " + bad.front());
  return out;
}

Certificate seven_equivalences(const SelfMap& phi, const std::vector<std::size_t>& schedule_in,
                               const ClassifyConfig& cfg) {
  const RootedTree& t = phi.tree();
  const auto schedule = normalize_schedule(schedule_in, t.truncation_depth());
  const WeightedCompOp op(VertexFunction::constant(phi.tree_ptr(), 1.0), phi);
  const std::size_t n = probe_depth(schedule.back());

  Certificate c;
  c.statement = Statement::FiniteRangeEquivalences;
  c.theorem_ref =
      "for C_phi: bounded Lipschitz->bounded, bounded little Lipschitz->bounded, compact on "
      "bounded functions, compact Lipschitz->bounded, compact little Lipschitz->bounded, compact "
      "Lipschitz->Lipschitz, and phi of finite range are equivalent";
  Series linf = tail_series(schedule, "linf_tail", [&](std::size_t k) { return linf_ess_norm_tail(op, k); });
  Series lip = tail_series(schedule, "lip_tail", [&](std::size_t k) { return lip_ess_norm_tail(op, k); });
  const bool linf_zero = linf.values.back() < cfg.abs_tol;
  const bool lip_zero = lip.values.back() < cfg.abs_tol;
  const bool confined = phi.range_confined(n);
  const std::string at = " beyond depth " + std::to_string(n);

  c.items = {
      {"i", "bounded from Lipschitz to bounded functions", trend(lip_zero),
       "Lipschitz tail" + at + " (with unit weight any nonzero tail exceeds the probe depth)"},
      {"ii", "bounded from little Lipschitz to bounded functions", trend(lip_zero), "Lipschitz tail" + at},
      {"iii", "compact on bounded functions", trend(linf_zero), "bounded-function tail" + at},
      {"iv", "compact from Lipschitz to bounded functions", trend(lip_zero), "Lipschitz tail" + at},
      {"v", "compact from little Lipschitz to bounded functions", trend(lip_zero), "Lipschitz tail" + at},
      {"vi", "compact from Lipschitz to Lipschitz", std::nullopt, "cited equivalence; not computed"},
      {"vii", "phi has finite range", confined ? Verdict::Holds : Verdict::Fails,
       "image depth " + std::to_string(phi.max_image_depth()) + " against probe depth " + std::to_string(n)},
  };
  const bool first = positive(*c.items.front().verdict);
  for (const auto& item : c.items) {
    if (item.verdict && positive(*item.verdict) != first) {
      throw std::logic_error("finite-range equivalences disagree at item " + item.item);
    }
  }
  if (first) {
    c.verdict = Verdict::Holds;
    c.witnesses.push_back(range_witness(phi));
  } else {
    c.verdict = Verdict::Fails;
    VertexId deep = kNoVertex;
    for (VertexId v : phi.domain()) {
      if (deep == kNoVertex || phi.image_depth(v) > phi.image_depth(deep)) deep = v;
    }
    c.witnesses.push_back({"deep-image", {deep, phi(deep)}, {static_cast<double>(phi.image_depth(deep))},
                           "phi(" + vname(t, deep) + ") = " + vname(t, phi(deep)) + " lies" + at});
  }
  c.depth_profile = {std::move(linf), std::move(lip), image_depth_series(phi, schedule)};
  return c;
}

}  // namespace treewco
