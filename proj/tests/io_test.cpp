#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"
#include "treewco/io.hpp"

using namespace treewco;

namespace {

Json j(const char* text) { return Json::parse(text); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string load_error_pointer(const std::function<void()>& f) {
  try {
    f();
  } catch (const LoadError& e) {
    return e.pointer();
  }
  return "<no error>";
}

}  // namespace

TEST(LoadTree, Families) {
  EXPECT_EQ(load_tree(j(R"({"family":"zline","depth":3})"))->size(), 7u);
  EXPECT_EQ(load_tree(j(R"({"family":"homogeneous","depth":3,"q":2})"))->size(), 22u);
  auto r = load_tree(j(R"({"family":"random","depth":4,"seed":5,"min_children":1,"max_children":2})"));
  EXPECT_EQ(r->truncation_depth(), 4u);
  auto e = load_tree(j(R"({"family":"explicit","root":0,"edges":[[0,1],[0,2],[1,3],[2,4]]})"));
  EXPECT_EQ(e->truncation_depth(), 2u);
}

TEST(LoadTree, Errors) {
  EXPECT_EQ(load_error_pointer([] { load_tree(j(R"({"family":"zline"})")); }), "/depth");
  EXPECT_EQ(load_error_pointer([] { load_tree(j(R"({"family":"line","depth":2})")); }), "/family");
  EXPECT_EQ(load_error_pointer([] { load_tree(j(R"({"family":"zline","depth":2,"colour":1})")); }), "/colour");
  EXPECT_EQ(load_error_pointer([] { load_tree(j(R"({"schema":2,"family":"zline","depth":2})")); }), "/schema");
  EXPECT_THROW(load_tree(j(R"({"family":"explicit","root":0,"edges":[[0,1],[0,2],[1,3]],"depth":2})")),
               LoadError);
}

TEST(LoadMap, FoldBuiltinMatchesTable) {
  auto t = load_tree(j(R"({"family":"zline","depth":6})"));
  auto phi = load_map(j(R"({"kind":"builtin","name":"zfold"})"), t);
  auto ref = load_map(j(R"({"kind":"table","key":"label","codomain_depth":3,"map":{
      "0":0,"1":1,"2":2,"3":3,"4":4,"5":5,"6":6,
      "-1":1,"-2":-1,"-3":3,"-4":-2,"-5":5,"-6":-3}})"),
                      t);
  for (VertexId v = 0; v < t->size(); ++v) EXPECT_EQ(phi(v), ref(v));
  EXPECT_EQ(phi.codomain_depth(), ref.codomain_depth());
}

TEST(LoadMap, Errors) {
  auto t = load_tree(j(R"({"family":"zline","depth":2})"));
  EXPECT_EQ(load_error_pointer([&] {
              load_map(j(R"({"kind":"table","map":{"0":0,"1":1,"2":9,"3":3,"4":4}})"), t);
            }),
            "/map/2");
  EXPECT_EQ(load_error_pointer([&] { load_map(j(R"({"kind":"builtin","name":"shift"})"), t); }), "/name");
  EXPECT_EQ(load_error_pointer([&] { load_map(j(R"({"kind":"table","map":{"0":0}})"), t); }), "/map");
  auto h = load_tree(j(R"({"family":"homogeneous","depth":2})"));
  EXPECT_THROW(load_map(j(R"({"kind":"builtin","name":"double"})"), h), LoadError);
}

TEST(LoadFunction, Builtins) {
  auto t = load_tree(j(R"({"family":"zline","depth":16})"));
  auto g = load_function(j(R"({"kind":"builtin","name":"g","params":{"n":16,"r":0.5}})"), t);
  auto ref = power_ramp(t, 16, 0.5);
  for (VertexId v = 0; v < t->size(); ++v) EXPECT_EQ(g(v), ref(v));
  auto fn = load_function(j(R"({"kind":"builtin","name":"F_N","params":{"N":3}})"), t);
  EXPECT_EQ(fn(t->vertex_with_label(-9)), 3.0);
  auto chi = load_function(j(R"({"kind":"builtin","name":"chi","params":{"label":-2}})"), t);
  EXPECT_EQ(chi(t->vertex_with_label(-2)), 1.0);
  EXPECT_EQ(norms(chi).lip_norm, 1.0);
  auto eta = load_function(j(R"({"kind":"builtin","name":"eta","params":{"label":3}})"), t);
  EXPECT_EQ(eta(t->vertex_with_label(10)), 1.0);
  EXPECT_EQ(eta(t->vertex_with_label(2)), 0.0);
  auto tab = load_function(j(R"({"kind":"table","key":"label","default":0.5,"values":{"-1":2}})"), t);
  EXPECT_EQ(tab(t->vertex_with_label(-1)), 2.0);
  EXPECT_EQ(tab(t->root()), 0.5);
}

TEST(LoadFunction, Errors) {
  auto t = load_tree(j(R"({"family":"zline","depth":4})"));
  EXPECT_EQ(load_error_pointer([&] { load_function(j(R"({"kind":"builtin","name":"g","params":{"n":16,"r":0.5}})"), t); }),
            "");
  EXPECT_EQ(load_error_pointer([&] { load_function(j(R"({"kind":"builtin","name":"sinc"})"), t); }), "/name");
  EXPECT_EQ(load_error_pointer([&] { load_function(j(R"({"kind":"table","values":{"0":"x"}})"), t); }),
            "/values/0");
  EXPECT_EQ(load_error_pointer([&] {
              load_function(j(R"({"kind":"builtin","name":"recip_phi_depth","params":{"power":1}})"), t);
            }),
            "/name");
}

TEST(ParseErrors, LineAndColumn) {
  try {
    parse_json_text("{\n  \"family\": zline\n}", "spec.json");
    FAIL() << "no error";
  } catch (const LoadError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("spec.json:2:", 0), 0u) << e.what();
  }
}

TEST(ParseErrors, PointerLines) {
  const std::string text = "{\n  \"kind\": \"table\",\n  \"map\": {\n    \"0\": 0,\n    \"2\": 9\n  }\n}\n";
  EXPECT_EQ(pointer_line(text, "/map/2"), 5u);
  EXPECT_EQ(pointer_line(text, "/map"), 3u);
  EXPECT_EQ(pointer_line(text, "/map/7"), 3u);
  EXPECT_EQ(pointer_line(text, ""), 1u);
}

TEST(Serialization, StableFormat) {
  Json doc = {{"b", 1.0 / 3.0}, {"a", {1, 2, 3}}, {"c", {{"z", -0.0}, {"y", 1e-20}}}};
  EXPECT_EQ(dump_stable(doc),
            "{\n  \"a\": [1, 2, 3],\n  \"b\": 0.333333333333,\n  \"c\": {\n    \"y\": 1e-20,\n    \"z\": 0\n  }\n}\n");
}

TEST(Serialization, ExplicitRoundTrip) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    auto t = testsupport::random_small_tree(rng, 80);
    const Json spec = tree_to_spec_json(*t);
    auto back = load_tree(parse_json_text(dump_stable(spec)));
    EXPECT_EQ(back->size(), t->size());
    EXPECT_EQ(back->root(), t->root());
    EXPECT_EQ(back->truncation_depth(), t->truncation_depth());
    EXPECT_EQ(back->edges(), t->edges());
    EXPECT_EQ(dump_stable(tree_to_spec_json(*back)), dump_stable(spec));
  }
}

TEST(Serialization, MapAndFunctionRoundTrip) {
  std::mt19937_64 rng(52);
  auto t = build_tree(TreeSpec::homogeneous(2, 2));
  auto phi = testsupport::random_map(t, rng);
  auto f = testsupport::random_function(t, rng);
  auto phi2 = load_map(map_to_json(phi), t);
  auto f2 = load_function(function_to_json(f), t);
  for (VertexId v = 0; v < t->size(); ++v) {
    EXPECT_EQ(phi2(v), phi(v));
    EXPECT_EQ(f2(v), f(v));
  }
}

TEST(Reports, ByteStable) {
  auto t = load_tree(j(R"({"family":"zline","depth":3})"));
  const Json psi = j(R"({"kind":"builtin","name":"random","params":{"seed":3,"lo":-1,"hi":1}})");
  const Json phi = j(R"({"kind":"builtin","name":"random","params":{"seed":4}})");
  auto once = [&] {
    auto s = load_specs(j(R"({"family":"zline","depth":3})"), psi, phi);
    WeightedCompOp op(s.psi, s.phi);
    return dump_stable(analyze_report(op, default_schedule(3))) + dump_stable(norms_report(op)) +
           dump_stable(oracle_report(op, 7));
  };
  EXPECT_EQ(once(), once());
}

TEST(Reports, OracleAgreesOnSmallLine) {
  auto s = load_specs(j(R"({"family":"zline","depth":2})"),
                      j(R"({"kind":"builtin","name":"random","params":{"seed":1}})"),
                      j(R"({"kind":"builtin","name":"random","params":{"seed":2}})"));
  const Json r = oracle_report(WeightedCompOp(s.psi, s.phi), 0);
  EXPECT_TRUE(r["all_agree"].get<bool>());
  EXPECT_GE(r["records"].size(), 4u);
}

TEST(Reports, CertificateJsonFields) {
  auto t = build_tree(TreeSpec::zline(8));
  WeightedCompOp op(line_fold_weight(t), line_fold_map(t));
  const Json r = analyze_report(op, default_schedule(8));
  EXPECT_EQ(r["schema"], kSchemaVersion);
  bool seen = false;
  for (const auto& c : r["certificates"]) {
    for (const char* k : {"statement", "verdict", "witnesses", "depth_profile", "theorem_ref"}) {
      EXPECT_TRUE(c.contains(k)) << k;
    }
    if (c["statement"] == "Linf.Isometry") {
      EXPECT_EQ(c["verdict"], "Holds");
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Export, DotNodeCount) {
  auto t = build_tree(TreeSpec::homogeneous(2, 3));
  const std::string dot = to_dot(*t, nullptr);
  std::size_t nodes = 0, edges = 0;
  std::istringstream in(dot);
  for (std::string line; std::getline(in, line);) {
    if (line.find("fillcolor") != std::string::npos) ++nodes;
    if (line.find("->") != std::string::npos) ++edges;
  }
  EXPECT_EQ(nodes, 22u);
  EXPECT_EQ(edges, 21u);
  auto line = build_tree(TreeSpec::zline(2));
  auto phi = parent_map(line);
  EXPECT_NE(to_dot(*line, &phi).find("dashed"), std::string::npos);
}

TEST(Fixtures, MeetExpectationsAndGoldens) {
  const auto dir = golden_dir();
  for (const auto& f : reference_fixtures()) {
    const FixtureOutcome r = run_fixture(f);
    EXPECT_TRUE(r.failures.empty()) << f.name << ": " << (r.failures.empty() ? "" : r.failures.front());
    EXPECT_TRUE(r.report["expectations_met"].get<bool>());
    EXPECT_EQ(slurp(dir / (f.name + ".json")), dump_stable(r.report)) << f.name;
  }
  EXPECT_THROW(find_fixture("nope"), LookupError);
}

TEST(Fixtures, GoldenDirFromEnvironment) {
  ::setenv("TREEWCO_GOLDEN_DIR", "/tmp/treewco-golden-elsewhere", 1);
  EXPECT_EQ(golden_dir(), std::filesystem::path("/tmp/treewco-golden-elsewhere"));
  ::unsetenv("TREEWCO_GOLDEN_DIR");
  EXPECT_NE(golden_dir(), std::filesystem::path("/tmp/treewco-golden-elsewhere"));
}
