#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "teleroute/circuit.hpp"
#include "teleroute/routing_graph.hpp"

namespace teleroute {

enum class RouteKind : std::uint8_t { StandardCNOT, TeleportControl, TeleportTarget, IdleTeleport };

std::string_view route_kind_str(RouteKind k);

/// One lattice-surgery operation in a routed layer.
///
/// For CNOT kinds `path` runs from the control position to the target position.
/// For IdleTeleport it runs from the qubit's position to its destination and `gate`
/// is -1. `branch` is non-empty only for trees and ends at `ancilla`.
struct Route {
    GateId gate = -1;
    RouteKind kind = RouteKind::StandardCNOT;
    std::vector<VertexId> path;
    std::vector<VertexId> branch;
    VertexId ancilla = kNoVertex;
    QubitLabel qubit = kNoLabel;  // moved label for IdleTeleport

    [[nodiscard]] std::size_t footprint() const { return path.size() + branch.size(); }
    friend bool operator==(const Route&, const Route&) = default;
};

struct RoutedLayer {
    std::vector<Route> routes;

    [[nodiscard]] std::size_t gate_count() const;
    friend bool operator==(const RoutedLayer&, const RoutedLayer&) = default;
};

struct Schedule {
    std::vector<RoutedLayer> layers;
    Mapping final_mapping;

    [[nodiscard]] std::size_t depth() const { return layers.size(); }
    [[nodiscard]] std::vector<std::size_t> gate_counts() const;
    friend bool operator==(const Schedule&, const Schedule&) = default;
};

class RoutingError : public std::runtime_error {
public:
    RoutingError(const std::string& what, std::vector<GateId> gates)
        : std::runtime_error(what), gates_(std::move(gates)) {}
    [[nodiscard]] const std::vector<GateId>& gates() const { return gates_; }

private:
    std::vector<GateId> gates_;
};

/// Per-vertex blocking flags; nonzero means the vertex is not free ancilla space.
using BlockMask = std::vector<std::uint8_t>;

/// Marks every data-occupied vertex of `m`.
BlockMask occupancy_mask(const RoutingGraph& g, const Mapping& m);

/// Minimum-hop path src -> dst whose interior (at least one vertex) avoids `blocked`.
/// Among shortest paths the lexicographically smallest id sequence wins.
std::optional<std::vector<VertexId>> shortest_free_path(const RoutingGraph& g, VertexId src, VertexId dst,
                                                        std::span<const std::uint8_t> blocked);

struct LayerRouting {
    RoutedLayer layer;
    std::vector<Gate> unrouted;
};

/// Shortest-first vertex-disjoint routing of one logical layer. Claims the routed
/// vertices in `blocked`.
LayerRouting route_layer(const RoutingGraph& g, const Mapping& m, std::span<const Gate> gates, BlockMask& blocked);
LayerRouting route_layer(const RoutingGraph& g, const Mapping& m, std::span<const Gate> gates);

/// Static-mapping compilation of the whole circuit.
Schedule route_static(const RoutingGraph& g, const Mapping& m, const LayeredCircuit& c);

struct WindowRouting {
    std::vector<RoutedLayer> layers;
    [[nodiscard]] int depth() const { return int(layers.size()); }
};

/// Routes the given logical layers as a self-contained circuit. Throws RoutingError
/// when some gate can never be routed.
WindowRouting route_window(const RoutingGraph& g, const Mapping& m, std::vector<Layer> layers);

/// Non-throwing variant returning only the routed depth. Routing stops as soon as the
/// depth exceeds `cap`, in which case cap + 1 is returned.
std::optional<int> window_depth(const RoutingGraph& g, const Mapping& m, std::vector<Layer> layers,
                                int cap = std::numeric_limits<int>::max() - 1);

/// Mapping after executing the teleports of one routed layer.
void apply_layer_moves(Mapping& m, const RoutedLayer& layer);

/// Replays a schedule and returns every violated invariant (empty when valid):
/// vertex-disjoint layers, free interiors, endpoints matching the live mapping,
/// ancilla placement, gate conservation, mapping bijectivity, depth >= d_L.
std::vector<std::string> check_schedule(const RoutingGraph& g, const Mapping& initial, const LayeredCircuit& c,
                                        const Schedule& s);

nlohmann::ordered_json route_to_json(const Route& r);
nlohmann::ordered_json schedule_to_json(const Schedule& s);

}  // namespace teleroute
