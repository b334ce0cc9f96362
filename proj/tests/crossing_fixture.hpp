#pragma once

// Four qubits on a pair-layout window where the second logical layer's two gates
// cannot be routed side by side. Found by exhaustive search over placements on the
// window's data vertices; mirrored in data/crossing_*.

#include "teleroute/circuit.hpp"
#include "teleroute/routing_graph.hpp"

namespace fixture {

inline teleroute::LayoutWindow crossing_window() { return {6, 6, 0, 0}; }

inline teleroute::RoutingGraph crossing_graph() {
    return teleroute::window_graph(teleroute::layout_spec(teleroute::LayoutName::Pair), crossing_window());
}

inline teleroute::Mapping crossing_mapping(const teleroute::RoutingGraph& g) {
    return teleroute::Mapping(g.size(), {9, 17, 49, 41});
}

inline const char* crossing_source() { return "qubits 4\ncnot 2 3\ncnot 0 1\n---\ncnot 0 3\ncnot 2 1\n"; }

inline teleroute::LayeredCircuit crossing_circuit() { return teleroute::parse_circuit(crossing_source()); }

}  // namespace fixture
