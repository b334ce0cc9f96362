#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include <teleroute/bench.hpp>
#include <teleroute/circuit.hpp>
#include <teleroute/protocol_verifier.hpp>
#include <teleroute/router.hpp>
#include <teleroute/routing_graph.hpp>
#include <teleroute/teleport_optimizer.hpp>

namespace py = pybind11;
using namespace teleroute;

namespace {

// JSON crosses the boundary as text; the Python side decodes it.
std::string dump(const nlohmann::ordered_json& j) { return j.dump(); }

AnnealConfig config_from(const std::string& json_text) {
    if (json_text.empty()) return {};
    return anneal_config_from_json(nlohmann::json::parse(json_text));
}

py::list layers_to_py(const LayeredCircuit& c) {
    py::list out;
    for (const auto& layer : c.layers) {
        py::list l;
        for (const auto& g : layer) l.append(py::make_tuple(g.id, g.control, g.target));
        out.append(l);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_teleroute, m) {
    py::register_exception<CircuitParseError>(m, "CircuitParseError", PyExc_ValueError);
    py::register_exception<RoutingError>(m, "RoutingError", PyExc_RuntimeError);
    py::register_exception<bench::BenchError>(m, "BenchError", PyExc_RuntimeError);

    py::class_<Layout>(m, "Layout")
        .def_property_readonly("rows", [](const Layout& l) { return l.graph.rows(); })
        .def_property_readonly("cols", [](const Layout& l) { return l.graph.cols(); })
        .def_property_readonly("vertex_count", [](const Layout& l) { return l.graph.size(); })
        .def_property_readonly("positions", [](const Layout& l) { return l.mapping.positions(); })
        .def("neighbors", [](const Layout& l, VertexId v) { return l.graph.neighbors(v); })
        .def("is_canonical_data", [](const Layout& l, VertexId v) {
            if (!l.graph.contains(v)) throw py::index_error("vertex out of range");
            return l.graph.is_canonical_data(v);
        })
        .def("graph_json", [](const Layout& l) { return dump(graph_to_json(l.graph)); })
        .def("routable", [](const Layout& l) { return layout_routable(l.graph); });

    m.def("build_layout", [](const std::string& name, int qubits, std::uint64_t seed) {
        return build_layout(parse_layout_name(name), qubits, seed);
    }, py::arg("name"), py::arg("qubits"), py::arg("seed") = 0);

    m.def("window_layout", [](const std::string& name, int rows, int cols, int phase_r, int phase_c,
                              const std::vector<VertexId>& positions) {
        RoutingGraph g = window_graph(layout_spec(parse_layout_name(name)), LayoutWindow{rows, cols, phase_r, phase_c});
        Mapping mp(g.size(), positions);
        return Layout{std::move(g), std::move(mp)};
    }, py::arg("name"), py::arg("rows"), py::arg("cols"), py::arg("phase_r") = 0, py::arg("phase_c") = 0,
       py::arg("positions"));

    m.def("layout_density", [](const std::string& name) {
        return layout_spec(parse_layout_name(name)).density();
    });

    py::class_<LayeredCircuit>(m, "Circuit")
        .def_readonly("qubits", &LayeredCircuit::qubits)
        .def_property_readonly("depth", [](const LayeredCircuit& c) { return logical_depth(c); })
        .def_property_readonly("gate_count", &LayeredCircuit::gate_count)
        .def_property_readonly("layers", &layers_to_py)
        .def("__str__", [](const LayeredCircuit& c) { return serialize_circuit(c); });

    m.def("random_circuit", &random_circuit, py::arg("qubits"), py::arg("gates_per_layer"), py::arg("depth"),
          py::arg("seed") = 0);
    m.def("parse_circuit", [](const std::string& text) { return parse_circuit(text); });

    py::class_<Schedule>(m, "Schedule")
        .def_property_readonly("depth", &Schedule::depth)
        .def_property_readonly("gate_counts", &Schedule::gate_counts)
        .def_property_readonly("final_positions", [](const Schedule& s) { return s.final_mapping.positions(); })
        .def("to_json", [](const Schedule& s) { return dump(schedule_to_json(s)); });

    m.def("route_static", [](const Layout& l, const LayeredCircuit& c) {
        return route_static(l.graph, l.mapping, c);
    });

    m.def("compile_optimized", [](const Layout& l, const LayeredCircuit& c, const std::string& config) {
        OptimizerStats st;
        Schedule s = compile_optimized(l.graph, l.mapping, c, config_from(config), &st);
        py::dict d;
        d["windows"] = st.windows;
        d["windows_searched"] = st.windows_searched;
        d["windows_improved"] = st.windows_improved;
        d["windows_committed"] = st.windows_committed;
        d["tree_teleports"] = st.tree_teleports;
        d["idle_teleports"] = st.idle_teleports;
        d["evaluations"] = st.evaluations;
        return py::make_tuple(std::move(s), d);
    }, py::arg("layout"), py::arg("circuit"), py::arg("config") = "");

    m.def("check_schedule", [](const Layout& l, const LayeredCircuit& c, const Schedule& s) {
        return check_schedule(l.graph, l.mapping, c, s);
    });

    m.def("default_config", [] { return dump(anneal_config_to_json(AnnealConfig{})); });

    m.def("protocol_names", [] {
        std::vector<std::string> names;
        for (auto p : protocol::all_protocols()) names.emplace_back(protocol::protocol_name_str(p));
        return names;
    });
    m.def("verify_protocol", [](const std::string& name) {
        const auto& spec = protocol::protocol_spec(protocol::parse_protocol_name(name));
        return dump(protocol::report_to_json(protocol::verify_protocol(spec)));
    });

    m.def("run_sample", [](const std::string& layout, int q, int g, int d_l, std::uint64_t seed,
                           const std::string& config) {
        const auto r = bench::run_sample(parse_layout_name(layout), q, g, d_l, seed, config_from(config), true);
        return dump(bench::records_to_json({r}).at(0));
    }, py::arg("layout"), py::arg("q"), py::arg("g"), py::arg("d_l"), py::arg("seed") = 0,
       py::arg("config") = "");
}
