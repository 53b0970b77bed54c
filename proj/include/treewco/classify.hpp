#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treewco/weighted_comp_op.hpp"

namespace treewco {

enum class Statement {
  LinfBounded,
  LinfCompact,
  LinfIsometry,
  LinfBoundedBelow,
  LipBounded,
  LipCompact,
  LipNoIsometry,
  LipBoundedBelow,
  FiniteRangeEquivalences,
};

enum class Verdict { Holds, Fails, TrendConsistent, TrendInconsistent };

std::string_view statement_name(Statement s);
std::string_view verdict_name(Verdict v);
Statement parse_statement(std::string_view name);
Verdict parse_verdict(std::string_view name);

/// Truncation-decidable verdict (Holds/Fails) rather than a trend.
inline bool decided(Verdict v) { return v == Verdict::Holds || v == Verdict::Fails; }
/// Holds or TrendConsistent.
inline bool positive(Verdict v) { return v == Verdict::Holds || v == Verdict::TrendConsistent; }

struct Witness {
  std::string kind;
  std::vector<VertexId> vertices;
  std::vector<double> values;
  std::string detail;
};

/// A named criterion value per schedule depth.
struct Series {
  std::string name;
  std::vector<std::size_t> depths;
  std::vector<double> values;
};

struct EquivalenceItem {
  std::string item;
  std::string criterion;
  /// Empty for items that are not computed on a truncation.
  std::optional<Verdict> verdict;
  std::string basis;
};

struct Certificate {
  Statement statement = Statement::LinfBounded;
  Verdict verdict = Verdict::Holds;
  std::vector<Witness> witnesses;
  std::vector<Series> depth_profile;
  /// The criterion the verdict is based on.
  std::string theorem_ref;
  /// Least-squares slope of log(value) against log(depth) for the deciding
  /// series, when every value is positive.
  std::optional<double> trend_slope;
  std::vector<EquivalenceItem> items;
  std::vector<std::string> notes;
};

struct ClassifyConfig {
  /// Tail values below this count as zero.
  double abs_tol = 1e-6;
  /// Compact trend: first of the last three tails at least this multiple of the last.
  double decay_factor = 1.5;
  /// Bounded trend: last profile value at most this multiple of the one before.
  double growth_factor = 1.5;
  double exact_tol = 1e-9;
};

/// Powers of two up to N, plus N itself.
std::vector<std::size_t> default_schedule(std::size_t truncation_depth);

/// Sorted, deduplicated, every depth in 1..N. Throws RangeError otherwise.
std::vector<std::size_t> normalize_schedule(std::vector<std::size_t> schedule,
                                            std::size_t truncation_depth);

/// Tail probe at schedule depth d: n = floor(d/2).
inline std::size_t probe_depth(std::size_t d) { return d / 2; }

/// The map's image stays within the last probe depth floor(N/2): the
/// truncation's stand-in for a finite range.
bool range_confined(const SelfMap& phi);

std::optional<double> trend_slope(const Series& s);

/// Linf.Bounded, Linf.Compact, Linf.Isometry, Linf.BoundedBelow.
std::vector<Certificate> classify_linf(const WeightedCompOp& op,
                                       const std::vector<std::size_t>& schedule,
                                       const ClassifyConfig& cfg = {});
/// Lip.Bounded, Lip.Compact, Lip.NoIsometry, Lip.BoundedBelow.
std::vector<Certificate> classify_lip(const WeightedCompOp& op,
                                      const std::vector<std::size_t>& schedule,
                                      const ClassifyConfig& cfg = {});

/// Consistency conditions between certificates of one operator; each entry
/// describes a violation.
std::vector<std::string> cross_implication_violations(const std::vector<Certificate>& certs,
                                                      const ClassifyConfig& cfg = {});

/// Both families, followed by the cross-implication checks; a violation
/// throws std::logic_error.
std::vector<Certificate> classify_all(const WeightedCompOp& op,
                                      const std::vector<std::size_t>& schedule,
                                      const ClassifyConfig& cfg = {});

/// The finite-range equivalences for the unweighted operator C_phi, each item
/// read at the probe depth of the last schedule entry. Throws
/// std::logic_error when the computed items disagree.
Certificate seven_equivalences(const SelfMap& phi, const std::vector<std::size_t>& schedule,
                               const ClassifyConfig& cfg = {});

const Certificate& find_certificate(const std::vector<Certificate>& certs, Statement s);

}  // namespace treewco
