#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "treewco/io.hpp"

namespace py = pybind11;
using namespace treewco;

// Specs and reports cross the boundary as JSON text; the Python package wraps
// them in dicts.

namespace {

struct Operator {
  LoadedSpecs specs;
  WeightedCompOp op;

  Operator(const std::string& tree, const std::string& psi, const std::string& phi)
      : specs(load_specs(parse_json_text(tree, "tree"), parse_json_text(psi, "psi"), parse_json_text(phi, "phi"))),
        op(specs.psi, specs.phi) {}

  std::vector<std::size_t> schedule(const std::optional<std::vector<std::size_t>>& depths) const {
    const std::size_t n = op.tree().truncation_depth();
    return normalize_schedule(depths ? *depths : default_schedule(n), n);
  }
};

std::string analyze(const Operator& o, const std::optional<std::vector<std::size_t>>& depths, double tol) {
  ClassifyConfig cfg;
  cfg.abs_tol = tol;
  return dump_stable(analyze_report(o.op, o.schedule(depths), cfg));
}

}  // namespace

PYBIND11_MODULE(_treewco, m) {
  m.doc() = "Weighted composition operators on truncated trees";

  static py::exception<Error> spec_error(m, "SpecError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(spec_error, e.what());
    }
  });

  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  py::class_<Operator>(m, "Operator")
      .def(py::init<const std::string&, const std::string&, const std::string&>(), py::arg("tree"),
           py::arg("psi"), py::arg("phi"))
      .def_property_readonly("size", [](const Operator& o) { return o.op.tree().size(); })
      .def_property_readonly("depth", [](const Operator& o) { return o.op.tree().truncation_depth(); })
      .def("labels", [](const Operator& o) {
        std::vector<std::int64_t> out;
        for (VertexId v = 0; v < o.op.tree().size(); ++v) out.push_back(o.op.tree().label(v));
        return out;
      })
      .def("psi_values", [](const Operator& o) {
        const auto v = o.op.psi().values();
        return std::vector<double>(v.begin(), v.end());
      })
      .def("linf_op_norm", [](const Operator& o) { return linf_op_norm(o.op); })
      .def("linf_ess_norm_tail", [](const Operator& o, std::size_t n) { return linf_ess_norm_tail(o.op, n); })
      .def("lip_bounds", [](const Operator& o) {
        const Bounds b = lip_bounds(o.op);
        return std::pair(b.lower, b.upper);
      })
      .def("lip_exact_norm", [](const Operator& o) { return lip_exact_norm(o.op); })
      .def("lip_ess_norm_tail", [](const Operator& o, std::size_t n) { return lip_ess_norm_tail(o.op, n); })
      .def("j_linf", [](const Operator& o) { return j_linf(o.op); })
      .def("k_linf", [](const Operator& o) { return k_linf(o.op); })
      .def("j_lip_bracket", [](const Operator& o) {
        const Bounds b = j_lip_bracket(o.op);
        return std::pair(b.lower, b.upper);
      })
      .def("k_lip_bracket", [](const Operator& o) {
        const Bounds b = k_lip_bracket(o.op).bounds;
        return std::pair(b.lower, b.upper);
      })
      .def("apply", [](const Operator& o, const std::vector<double>& f) {
        const VertexFunction g = o.op.apply(VertexFunction(o.specs.tree, f));
        const auto v = g.values();
        return std::vector<double>(v.begin(), v.end());
      }, py::arg("values"))
      .def("analyze", &analyze, py::arg("depths") = py::none(), py::arg("tol") = ClassifyConfig{}.abs_tol)
      .def("norms", [](const Operator& o) { return dump_stable(norms_report(o.op)); })
      .def("oracle", [](const Operator& o, std::uint64_t seed) { return dump_stable(oracle_report(o.op, seed)); },
           py::arg("seed") = 0)
      .def("dot", [](const Operator& o) { return to_dot(o.op.tree(), &o.op.phi()); });

  m.def("fixture_names", [] {
    std::vector<std::string> out;
    for (const auto& f : reference_fixtures()) out.push_back(f.name);
    return out;
  });
  m.def("run_fixture", [](const std::string& name) {
    const FixtureOutcome r = run_fixture(find_fixture(name));
    return std::pair(dump_stable(r.report), r.failures);
  }, py::arg("name"));
  m.def("export_tree", [](const std::string& tree) {
    return dump_stable(tree_to_spec_json(*load_tree(parse_json_text(tree, "tree"))));
  }, py::arg("tree"));
  m.def("tree_dot", [](const std::string& tree) { return to_dot(*load_tree(parse_json_text(tree, "tree"))); },
        py::arg("tree"));
  m.def("golden_dir", [] { return golden_dir().string(); });
}
