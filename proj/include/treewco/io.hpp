#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "treewco/classify.hpp"
#include "treewco/errors.hpp"
#include "treewco/fixtures.hpp"
#include "treewco/oracle.hpp"
#include "treewco/weighted_comp_op.hpp"

namespace treewco {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Parses JSON text; syntax errors become LoadError with line and column.
Json parse_json_text(const std::string& text, const std::string& source = "<input>");
Json read_json_file(const std::filesystem::path& path);

/// A spec file as read from disk, kept for error reporting.
struct SpecDocument {
  std::string source;
  std::string text;
  Json json;
};

SpecDocument read_spec_document(const std::filesystem::path& path);

/// 1-based line where the node at `pointer` starts in `text`; falls back to
/// the nearest existing ancestor.
std::optional<std::size_t> pointer_line(const std::string& text, std::string pointer);

/// "source:line: pointer: message" for a load error raised on `doc`.
std::string describe_load_error(const LoadError& e, const SpecDocument& doc);

/// Deterministic text: sorted keys, two-space indent, numbers as %.12g.
std::string dump_stable(const Json& j);

// Loading. Every LoadError carries the JSON pointer of the offending node,
// prefixed by `where`.

TreeSpec tree_spec_from_json(const Json& j, const std::string& where = "");
TreePtr load_tree(const Json& j, const std::string& where = "");

/// Map spec: {"kind":"table","map":{id:id}} (optional "key":"label",
/// "domain_depth", "codomain_depth") or {"kind":"builtin","name":...}
/// with names identity, double, zfold, constant, parent, random.
SelfMap load_map(const Json& j, const TreePtr& tree, const std::string& where = "");

/// Function spec: {"kind":"table","values":{id:value}} (optional "key":"label",
/// "default") or {"kind":"builtin","name":...} with names F_N, g, chi, eta,
/// const, alternating, random, and the weights zfold_weight, recip_label,
/// recip_phi_depth. recip_phi_depth needs `phi`.
VertexFunction load_function(const Json& j, const TreePtr& tree, const SelfMap* phi = nullptr,
                             const std::string& where = "");

struct LoadedSpecs {
  TreePtr tree;
  SelfMap phi;
  VertexFunction psi;
};

LoadedSpecs load_specs(const Json& tree, const Json& psi, const Json& phi);

// Serialization.

Json tree_to_json(const RootedTree& t);
/// Explicit-family spec that rebuilds `t` id for id.
Json tree_to_spec_json(const RootedTree& t);
Json function_to_json(const VertexFunction& f);
Json map_to_json(const SelfMap& phi);
Json to_json(const NormReport& r);
Json to_json(const Certificate& c, const RootedTree& t);
Json to_json(const OracleResult& r);
Json to_json(const JBracket& r);
Json to_json(const InfeasibilityReport& r, const RootedTree& t);
Json to_json(const SurjectivityBracket& r, const RootedTree& t);

/// Tree with depth-coloured nodes; with `phi`, dashed edges v -> phi(v).
std::string to_dot(const RootedTree& t, const SelfMap* phi = nullptr);

// Reports behind the CLI modes.

Json analyze_report(const WeightedCompOp& op, const std::vector<std::size_t>& schedule,
                    const ClassifyConfig& cfg = {});
Json norms_report(const WeightedCompOp& op);
Json oracle_report(const WeightedCompOp& op, std::uint64_t seed);

struct FixtureOutcome {
  Json report;
  /// Expectation mismatches, empty when the fixture behaves as specified.
  std::vector<std::string> failures;
};

FixtureOutcome run_fixture(const Fixture& f, const ClassifyConfig& cfg = {});

/// TREEWCO_GOLDEN_DIR when set, otherwise the source tree's golden/.
std::filesystem::path golden_dir();

}  // namespace treewco
