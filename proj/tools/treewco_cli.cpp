#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treewco/io.hpp"

namespace fs = std::filesystem;
using namespace treewco;

namespace {

struct Options {
  std::string tree, psi, phi, request, fixture, out;
  std::string depths;
  std::string format = "dot";
  double tol = ClassifyConfig{}.abs_tol;
  std::uint64_t seed = 0;
  bool bless = false;
};

// Spec error already formatted for the user.
struct SpecFailure {
  std::string message;
};

SpecDocument read_doc(const std::string& path) {
  try {
    return read_spec_document(path);
  } catch (const LoadError& e) {
    throw SpecFailure{e.what()};
  }
}

template <class F>
auto with_doc(const SpecDocument& doc, F&& f) {
  try {
    return f();
  } catch (const LoadError& e) {
    throw SpecFailure{describe_load_error(e, doc)};
  }
}

struct Inputs {
  TreePtr tree;
  std::optional<SelfMap> phi;
  std::optional<VertexFunction> psi;
  std::vector<std::size_t> depths;
  double tol;
  std::uint64_t seed;
};

std::vector<std::size_t> parse_depths(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw SpecFailure{"--depths: '" + item + "' is not a positive integer"};
    }
  }
  return out;
}

Inputs gather(const Options& o, bool need_op) {
  Inputs in{nullptr, std::nullopt, std::nullopt, {}, o.tol, o.seed};
  Json tree_j, psi_j, phi_j;
  std::optional<SpecDocument> tree_doc, psi_doc, phi_doc;

  if (!o.fixture.empty()) {
    const Fixture* f = nullptr;
    try {
      f = &find_fixture(o.fixture);
    } catch (const Error& e) {
      throw SpecFailure{e.what()};
    }
    in.tree = load_tree(f->tree, "/tree");
    in.phi = load_map(f->phi, in.tree, "/phi");
    in.psi = load_function(f->cases.front().psi, in.tree, &*in.phi, "/psi");
  } else if (!o.request.empty()) {
    const SpecDocument doc = read_doc(o.request);
    with_doc(doc, [&] {
      const Json& j = doc.json;
      if (!j.is_object()) throw LoadError("", "request must be an object");
      for (const char* k : {"tree", "psi", "phi"}) {
        if (!j.contains(k) && (need_op || std::string(k) == "tree")) throw LoadError(std::string("/") + k, "missing");
      }
      in.tree = load_tree(j["tree"], "/tree");
      if (j.contains("phi")) in.phi = load_map(j["phi"], in.tree, "/phi");
      if (j.contains("psi")) in.psi = load_function(j["psi"], in.tree, in.phi ? &*in.phi : nullptr, "/psi");
      if (j.contains("depths")) {
        if (!j["depths"].is_array()) throw LoadError("/depths", "expected an array");
        for (std::size_t i = 0; i < j["depths"].size(); ++i) {
          const Json& d = j["depths"][i];
          if (!d.is_number_unsigned()) throw LoadError("/depths/" + std::to_string(i), "expected a positive integer");
          in.depths.push_back(d.get<std::size_t>());
        }
      }
      if (j.contains("tol")) {
        if (!j["tol"].is_number()) throw LoadError("/tol", "expected a number");
        in.tol = j["tol"].get<double>();
      }
      if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw LoadError("/seed", "expected a non-negative integer");
        in.seed = j["seed"].get<std::uint64_t>();
      }
      return 0;
    });
  } else {
    if (o.tree.empty()) throw SpecFailure{"--tree is required (or --request / --fixture)"};
    const SpecDocument td = read_doc(o.tree);
    in.tree = with_doc(td, [&] { return load_tree(td.json); });
    if (!o.phi.empty()) {
      const SpecDocument pd = read_doc(o.phi);
      in.phi = with_doc(pd, [&] { return load_map(pd.json, in.tree); });
    }
    if (!o.psi.empty()) {
      const SpecDocument sd = read_doc(o.psi);
      in.psi = with_doc(sd, [&] { return load_function(sd.json, in.tree, in.phi ? &*in.phi : nullptr); });
    }
  }
  if (need_op && (!in.phi || !in.psi)) throw SpecFailure{"this mode needs --psi and --phi"};
  if (!o.depths.empty()) in.depths = parse_depths(o.depths);
  if (in.depths.empty()) in.depths = default_schedule(in.tree->truncation_depth());
  try {
    in.depths = normalize_schedule(in.depths, in.tree->truncation_depth());
  } catch (const Error& e) {
    throw SpecFailure{e.what()};
  }
  return in;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw SpecFailure{"cannot write " + out};
  f << text;
}

std::optional<std::size_t> first_difference(const std::string& a, const std::string& b) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  for (std::size_t line = 1;; ++line) {
    const bool ga = static_cast<bool>(std::getline(sa, la));
    const bool gb = static_cast<bool>(std::getline(sb, lb));
    if (!ga && !gb) return std::nullopt;
    if (ga != gb || la != lb) return line;
  }
}

int run_examples(const Options& o) {
  const fs::path dir = golden_dir();
  ClassifyConfig cfg;
  cfg.abs_tol = o.tol;
  int status = 0;
  for (const auto& f : reference_fixtures()) {
    if (!o.fixture.empty() && f.name != o.fixture) continue;
    const FixtureOutcome r = run_fixture(f, cfg);
    const std::string text = dump_stable(r.report);
    const fs::path golden = dir / (f.name + ".json");
    if (!o.out.empty()) {
      fs::create_directories(o.out);
      std::ofstream(fs::path(o.out) / (f.name + ".json"), std::ios::binary) << text;
    }
    for (const auto& msg : r.failures) {
      std::cout << "FAIL " << msg << "\n";
      status = 2;
    }
    if (o.bless) {
      fs::create_directories(dir);
      std::ofstream(golden, std::ios::binary) << text;
      std::cout << "blessed " << golden.string() << "\n";
      continue;
    }
    std::ifstream in(golden, std::ios::binary);
    if (!in) {
      std::cout << "DRIFT " << f.name << ": no golden file at " << golden.string() << "\n";
      status = 2;
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (auto line = first_difference(ss.str(), text)) {
      std::cout << "DRIFT " << f.name << ": differs from " << golden.string() << " at line " << *line << "\n";
      status = 2;
    } else if (r.failures.empty()) {
      std::cout << "ok " << f.name << "\n";
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted composition operators on truncated trees"};
  app.require_subcommand(1);
  Options o;

  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--tree", o.tree, "tree spec JSON file");
    sub->add_option("--psi", o.psi, "weight spec JSON file");
    sub->add_option("--phi", o.phi, "map spec JSON file");
    sub->add_option("--request", o.request, "request JSON with tree, psi, phi and optional depths/tol/seed");
    sub->add_option("--fixture", o.fixture, "use a built-in fixture as input");
    sub->add_option("--out", o.out, "output file (stdout when omitted)");
  };

  auto* analyze = app.add_subcommand("analyze", "certificates for bounded/compact/isometry/bounded below");
  add_inputs(analyze);
  analyze->add_option("--depths", o.depths, "comma-separated depth schedule");
  analyze->add_option("--tol", o.tol, "tail values below this count as zero");

  auto* norm_cmd = app.add_subcommand("norms", "function norms and closed-form operator quantities");
  add_inputs(norm_cmd);

  auto* oracle = app.add_subcommand("oracle", "brute-force checks of the closed forms");
  add_inputs(oracle);
  oracle->add_option("--seed", o.seed, "seed for randomized searches");

  auto* examples = app.add_subcommand("examples", "run the fixtures and diff against golden files");
  examples->add_option("--fixture", o.fixture, "run only this fixture");
  examples->add_option("--out", o.out, "directory for the fresh reports");
  examples->add_option("--tol", o.tol, "tail values below this count as zero");
  examples->add_flag("--bless", o.bless, "overwrite the golden files");

  auto* exp = app.add_subcommand("export", "DOT or JSON export of the tree and the map");
  add_inputs(exp);
  exp->add_option("--format", o.format, "dot or json")->check(CLI::IsMember({"dot", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (examples->parsed()) return run_examples(o);

    ClassifyConfig cfg;
    cfg.abs_tol = o.tol;
    if (exp->parsed()) {
      const Inputs in = gather(o, false);
      if (o.format == "dot") {
        emit(to_dot(*in.tree, in.phi ? &*in.phi : nullptr), o.out);
      } else {
        Json j = tree_to_spec_json(*in.tree);
        if (in.phi) j = {{"schema", kSchemaVersion}, {"tree", j}, {"phi", map_to_json(*in.phi)}};
        emit(dump_stable(j), o.out);
      }
      return 0;
    }
    const Inputs in = gather(o, true);
    cfg.abs_tol = in.tol;
    const WeightedCompOp op(*in.psi, *in.phi);
    Json report;
    if (analyze->parsed()) report = analyze_report(op, in.depths, cfg);
    else if (norm_cmd->parsed()) report = norms_report(op);
    else report = oracle_report(op, in.seed);
    emit(dump_stable(report), o.out);
    return 0;
  } catch (const SpecFailure& e) {
    std::cerr << "error: " << e.message << "\n";
    return 1;
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
