// Python access to documents, the vertex algebra, KMS solving and the CLI.
#include "ultra/cli.hpp"
#include "ultra/document.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ultra;

namespace {

struct Graph {
    UltragraphDocument doc;
    VertexAlgebra alg;

    explicit Graph(UltragraphDocument d) : doc(std::move(d)), alg(doc.graph) {}
};

py::dict mfunction_dict(const MFunction& m) {
    py::dict out, vertices, families;
    for (const auto& [name, v] : m.vertices) vertices[py::str(name)] = v.str();
    for (const auto& [id, f] : m.families) {
        py::list heads;
        for (const auto& h : f.heads) heads.append(h.str());
        families[py::str(id)] = py::dict(py::arg("heads") = heads, py::arg("tail") = f.tail.str());
    }
    py::list minimal;
    for (const auto& [set, v] : m.minimal_sets) minimal.append(py::make_tuple(set.str(), v.str()));
    out["truncation"] = m.truncation;
    out["vertices"] = vertices;
    out["families"] = families;
    out["minimal_sets"] = minimal;
    return out;
}

py::dict solution_dict(const KmsSolution& s) {
    py::dict out;
    out["feasible"] = s.feasible;
    out["dimension"] = s.dimension;
    out["m"] = s.feasible ? py::object(mfunction_dict(s.m)) : py::none();
    return out;
}

EdgeWeight weights_for(const Graph& g, const std::map<std::string, std::string>& overrides) {
    EdgeWeight w = g.doc.weights;
    for (const auto& [id, value] : overrides) w.values[id] = Scalar::parse(value);
    return w;
}

Index default_truncation(const Graph& g) { return g.doc.graph.explicit_index_bound() + 3; }

EdgePath edge_path(const std::vector<std::string>& ids) {
    EdgePath p;
    for (const auto& id : ids) p.push_back(parse_edge_ref(id));
    return p;
}

}  // namespace

PYBIND11_MODULE(_ultra, m) {
    m.doc() = "Ultragraph analysis core";

    static py::exception<DocumentError> document_error(m, "DocumentError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DocumentError& e) {
            std::string what = e.code + ": " + e.what();
            if (e.line > 0) what += " (line " + std::to_string(e.line) + ")";
            document_error(what.c_str());
        }
    });

    m.def("digest", &digest, "FNV-1a 64-bit digest as 16 hex digits");

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one CLI command; returns (exit code, stdout, stderr).");

    py::class_<Graph>(m, "Graph")
        .def_static(
            "from_json", [](const std::string& text) { return Graph(parse_document(text)); }, py::arg("text"))
        .def_static(
            "load", [](const std::string& path) { return Graph(load_document(path)); }, py::arg("path"))
        .def("to_json", [](const Graph& g) { return serialize_document(g.doc); })
        .def("digest", [](const Graph& g) { return digest(serialize_document(g.doc)); })
        .def("minimal_sets",
             [](const Graph& g) {
                 std::vector<std::string> out;
                 for (const auto& v : g.alg.minimal_sets()) out.push_back(v.set.str());
                 return out;
             })
        .def("sinks", [](const Graph& g) { return g.doc.graph.sinks().str(); })
        .def("range", [](const Graph& g, const std::string& edge) { return g.doc.graph.range(parse_edge_ref(edge)).str(); },
             py::arg("edge"))
        .def("rfum2",
             [](const Graph& g) {
                 auto v = g.alg.check_rfum2();
                 py::dict out;
                 out["holds"] = v.holds;
                 out["counterexample"] = v.counterexample ? py::object(py::str(*v.counterexample)) : py::none();
                 return out;
             })
        .def(
            "decompose",
            [](const Graph& g, const std::string& expr) {
                Decomposition d = g.alg.decompose(parse_set_expr(expr, g.doc.graph));
                std::vector<std::string> minimal;
                for (const auto& v : d.minimal_parts()) minimal.push_back(v.str());
                py::dict out;
                out["minimal"] = minimal;
                out["finite"] = d.finite_part.str();
                return out;
            },
            py::arg("expr"))
        .def(
            "kms",
            [](const Graph& g, const std::string& beta, std::optional<Index> truncation,
               const std::map<std::string, std::string>& weights) {
                auto sys = build_constraints(g.alg, weights_for(g, weights), Scalar::parse(beta),
                                             truncation.value_or(default_truncation(g)));
                return solution_dict(solve_kms(sys));
            },
            py::arg("beta"), py::arg("truncation") = py::none(),
            py::arg("weights") = std::map<std::string, std::string>{})
        .def(
            "ground",
            [](const Graph& g, std::optional<Index> truncation, const std::string& convention) {
                GroundConvention c;
                if (convention == "printed")
                    c = GroundConvention::Printed;
                else if (convention == "zero-temperature")
                    c = GroundConvention::ZeroTemperature;
                else
                    throw std::invalid_argument("convention must be printed or zero-temperature");
                return solution_dict(solve_ground(g.alg, truncation.value_or(default_truncation(g)), c));
            },
            py::arg("truncation") = py::none(), py::arg("convention") = "printed")
        .def(
            "verify",
            [](const Graph& g, const std::string& mfunction, const std::string& beta, const std::string& tol,
               const std::map<std::string, std::string>& weights) {
                auto mf = parse_mfunction(mfunction, g.doc.graph);
                py::list out;
                for (const auto& v : verify_m(mf, g.alg, weights_for(g, weights), Scalar::parse(beta),
                                              Scalar::parse(tol)))
                    out.append(py::dict(py::arg("condition") = v.condition, py::arg("set") = v.set,
                                        py::arg("residual") = v.residual.str()));
                return out;
            },
            py::arg("mfunction"), py::arg("beta"), py::arg("tol") = "0",
            py::arg("weights") = std::map<std::string, std::string>{})
        .def(
            "condition_l",
            [](const Graph& g, std::size_t max_len, std::optional<Index> truncation) {
                auto r = check_condition_L(g.doc.graph, max_len, truncation.value_or(default_truncation(g)));
                const char* names[] = {"holds", "fails", "unknown"};
                py::dict out;
                out["verdict"] = names[static_cast<int>(r.verdict)];
                out["cycles_checked"] = r.cycles_checked;
                out["counterexample"] = r.counterexample ? py::object(py::str(r.counterexample->path.str()))
                                                         : py::none();
                return out;
            },
            py::arg("max_len") = 6, py::arg("truncation") = py::none())
        .def(
            "stabilizers",
            [](const Graph& g, const std::vector<std::string>& prefix, const std::vector<std::string>& cycle) {
                auto s = stabilizers(g.doc.graph, BoundaryPoint::periodic(edge_path(prefix), edge_path(cycle)));
                py::dict out;
                auto minimum = [](const std::optional<std::size_t>& v) {
                    return v ? py::object(py::int_(*v)) : py::object(py::float_(INFINITY));
                };
                out["stab"] = s.stab.str();
                out["stab_min"] = minimum(s.stab_min);
                out["stab_ess"] = s.stab_ess.str();
                out["stab_ess_min"] = minimum(s.stab_ess_min);
                return out;
            },
            py::arg("prefix"), py::arg("cycle"));
}
