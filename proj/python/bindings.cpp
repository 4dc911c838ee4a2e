#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ffincidence/apps.hpp"
#include "ffincidence/counting.hpp"
#include "ffincidence/experiment.hpp"
#include "ffincidence/generate.hpp"
#include "ffincidence/io.hpp"
#include "ffincidence/spectral.hpp"
#include "ffincidence/theorems.hpp"

namespace py = pybind11;
using namespace ffincidence;

namespace {

py::dict report_dict(const BoundReport& r) {
  py::dict d;
  d["theorem_id"] = r.theorem_id;
  d["lhs"] = r.lhs;
  d["main_term"] = py::make_tuple(r.main_term.num, r.main_term.den);
  d["bound_term"] = r.bound_term;
  d["discrepancy"] = r.discrepancy;
  d["ratio"] = r.ratio;
  d["hypothesis_ok"] = r.hypothesis_ok;
  d["checked"] = r.checked;
  d["check_ok"] = r.check_ok;
  return d;
}

py::list report_list(const std::vector<BoundReport>& rs) {
  py::list out;
  for (const auto& r : rs) out.append(report_dict(r));
  return out;
}

CountMethod method_of(const std::string& name) {
  if (name == "naive") return CountMethod::naive;
  if (name == "indexed") return CountMethod::indexed;
  throw py::value_error("method must be 'naive' or 'indexed'");
}

template <class Set>
void bind_set(py::module_& m, const char* name) {
  py::class_<Set>(m, name)
      .def(py::init([](std::uint32_t q, int d1, int d2, std::vector<std::uint64_t> ids, std::vector<std::uint32_t> mult) {
             return Set(Space{q, d1, d2}, std::move(ids), std::move(mult));
           }),
           py::arg("q"), py::arg("d1"), py::arg("d2"), py::arg("ids"), py::arg("mult") = std::vector<std::uint32_t>{})
      .def_property_readonly("q", [](const Set& s) { return s.space().q; })
      .def_property_readonly("d1", [](const Set& s) { return s.space().d1; })
      .def_property_readonly("d2", [](const Set& s) { return s.space().d2; })
      .def_property_readonly("ids", [](const Set& s) { return std::vector<std::uint64_t>(s.ids().begin(), s.ids().end()); })
      .def_property_readonly("multiplicities",
                             [](const Set& s) {
                               std::vector<std::uint32_t> m;
                               for (std::size_t i = 0; i < s.support_size(); ++i) m.push_back(s.multiplicity(i));
                               return m;
                             })
      .def("__len__", [](const Set& s) { return s.size(); })
      .def("__eq__", [](const Set& a, const Set& b) { return a == b; });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact incidence counts, product polarity graphs and bound checks over finite fields";

  py::register_exception<OracleMismatch>(m, "OracleMismatch", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<FieldSpec>(m, "Field")
      .def(py::init([](std::uint64_t q) { return field_of_order(q); }), py::arg("q"))
      .def_property_readonly("q", &FieldSpec::q)
      .def_property_readonly("p", &FieldSpec::p)
      .def_property_readonly("k", &FieldSpec::k)
      .def_property_readonly("modulus", &FieldSpec::modulus)
      .def("add", &FieldSpec::add)
      .def("sub", &FieldSpec::sub)
      .def("neg", &FieldSpec::neg)
      .def("mul", &FieldSpec::mul)
      .def("inv", &FieldSpec::inv)
      .def("div", &FieldSpec::div)
      .def("pow", &FieldSpec::pow);

  bind_set<PointSet>(m, "PointSet");
  bind_set<LinePairSet>(m, "LinePairSet");
  bind_set<HyperplanePairSet>(m, "HyperplanePairSet");

  m.def("full_points", [](std::uint32_t q, int d1, int d2) { return full_points(Space{q, d1, d2}); });
  m.def("random_points", [](std::uint32_t q, int d1, int d2, std::uint64_t n, std::uint64_t seed) {
    return random_points(Space{q, d1, d2}, n, seed);
  });
  m.def("multiset_random_points", [](std::uint32_t q, int d1, int d2, std::uint64_t n, std::uint32_t max_mult,
                                     std::uint64_t seed) {
    return multiset_random_points(Space{q, d1, d2}, n, max_mult, seed);
  });
  m.def("full_linepairs", &full_linepairs);
  m.def("random_linepairs", &random_linepairs, py::arg("q"), py::arg("n"), py::arg("nonvertical_only"), py::arg("seed"));
  m.def("full_hyperplanepairs", [](std::uint32_t q, int d1, int d2) { return full_hyperplanepairs(Space{q, d1, d2}); });
  m.def("random_hyperplanepairs", [](std::uint32_t q, int d1, int d2, std::uint64_t n, std::uint64_t seed) {
    return random_hyperplanepairs(Space{q, d1, d2}, n, seed);
  });
  m.def("cartesian", &cartesian);

  m.def(
      "count_incidences",
      [](const FieldSpec& f, const PointSet& p, const LinePairSet& l, const std::string& method, unsigned workers) {
        return count_incidences(f, p, l, method_of(method), workers).count;
      },
      py::arg("field"), py::arg("points"), py::arg("lines"), py::arg("method") = "indexed", py::arg("workers") = 0);
  m.def(
      "count_hyperplane_incidences",
      [](const FieldSpec& f, const PointSet& p, const HyperplanePairSet& h, const std::string& method, unsigned workers) {
        return count_incidences(f, p, h, method_of(method), workers).count;
      },
      py::arg("field"), py::arg("points"), py::arg("planes"), py::arg("method") = "indexed", py::arg("workers") = 0);

  m.def("dump_set", [](const PointSet& s) {
    std::ostringstream os;
    write_set(os, s);
    return os.str();
  });
  m.def("dump_set", [](const LinePairSet& s) {
    std::ostringstream os;
    write_set(os, s);
    return os.str();
  });
  m.def("load_points", [](const std::string& text) {
    std::istringstream is(text);
    return read_points(is);
  });
  m.def("load_linepairs", [](const std::string& text) {
    std::istringstream is(text);
    return read_linepairs(is);
  });

  py::class_<IncidenceGraph>(m, "IncidenceGraph")
      .def_property_readonly("q", &IncidenceGraph::q)
      .def_property_readonly("d1", &IncidenceGraph::d1)
      .def_property_readonly("d2", &IncidenceGraph::d2)
      .def_property_readonly("n", &IncidenceGraph::n)
      .def_property_readonly("k", &IncidenceGraph::k)
      .def("neighbors",
           [](const IncidenceGraph& g, std::uint32_t v) {
             if (v >= g.n()) throw py::index_error("vertex out of range");
             const auto nb = g.neighbors(v);
             return std::vector<std::uint32_t>(nb.begin(), nb.end());
           })
      .def("adjacent", &IncidenceGraph::adjacent);
  m.def("build_graph", &build_graph, py::arg("field"), py::arg("d1"), py::arg("d2"), py::arg("workers") = 0);
  m.def(
      "second_eigenvalue",
      [](const IncidenceGraph& g, double tol) {
        const auto r = second_eigenvalue(g, tol);
        py::dict d;
        d["lambda2"] = r.lambda2;
        d["method"] = std::string(to_string(r.method));
        d["residual"] = r.residual;
        d["explicit_bound"] = r.explicit_bound;
        d["order_bound"] = r.order_bound;
        d["within_explicit_bound"] = r.within_explicit_bound;
        return d;
      },
      py::arg("graph"), py::arg("tol") = 1e-8);
  m.def("explicit_lambda_bound", &explicit_lambda_bound);

  m.def("verify_cs", [](const FieldSpec& f, const PointSet& p, const LinePairSet& l) { return report_list(verify_cs(f, p, l)); });
  m.def("verify_vinh", [](const FieldSpec& f, const PointSet& p, const LinePairSet& l) {
    return report_dict(verify_vinh(f, p, l, LambdaMode::paper));
  });

  m.def(
      "dot_product_pair_count",
      [](const FieldSpec& f, const PointSet& e, Elem a, Elem b, const std::string& variant) {
        DotVariant v;
        if (variant == "corrected") v = DotVariant::corrected;
        else if (variant == "as_written") v = DotVariant::as_written;
        else throw py::value_error("variant must be 'corrected' or 'as_written'");
        const auto r = dot_product_pair_count(f, e, a, b, v);
        py::dict d;
        d["count"] = r.count;
        d["reduction_count"] = r.reduction_count;
        d["bound"] = r.bound;
        return d;
      },
      py::arg("field"), py::arg("points"), py::arg("a"), py::arg("b"), py::arg("variant") = "corrected");
  m.def("sum_product", [](const FieldSpec& f, const PointSet& a) {
    const auto r = sum_product(f, a);
    py::dict d;
    d["size"] = r.size;
    d["sumset"] = r.sumset;
    d["productset"] = r.productset;
    d["incidences"] = r.incidences;
    d["lower_bound_ok"] = r.lower_bound_ok;
    d["conclusion_ratio"] = r.conclusion_ratio;
    return d;
  });

  m.def(
      "run",
      [](const std::string& command, const std::map<std::string, std::string>& options) {
        ExperimentConfig c;
        apply_option(c, "command", command);
        for (const auto& [k, v] : options) apply_option(c, k, v);
        finalize_config(c, std::nullopt);
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run(c, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("command"), py::arg("options") = std::map<std::string, std::string>{},
      "Runs one command with flag-style options; returns (exit_code, stdout, stderr).");
}
