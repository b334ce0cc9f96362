#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "teleroute/circuit.hpp"
#include "teleroute/router.hpp"
#include "teleroute/routing_graph.hpp"

namespace teleroute {

enum class MovedQubit : std::uint8_t { Control, Target };

/// Turns a routed CNOT path into a 3-terminal tree whose third terminal receives
/// the control or target qubit.
struct TreeExtension {
    GateId base_gate = -1;
    VertexId attach = kNoVertex;    // interior path vertex the branch hangs off
    std::vector<VertexId> branch;   // attach-side first, ends at new_ancilla; empty if on-path
    VertexId new_ancilla = kNoVertex;
    MovedQubit moved = MovedQubit::Target;

    friend bool operator==(const TreeExtension&, const TreeExtension&) = default;
};

/// What an improving window commits. `Window` always commits the lookahead's routed
/// layers and advances past them; `Adaptive` does so only when the window routes in
/// as many layers as it has, and otherwise commits the current layer with the
/// teleports applied and advances by one.
enum class CommitPolicy : std::uint8_t { Adaptive, Window };

struct AnnealConfig {
    int k = 5;                          // lookahead logical layers
    int r = 10;                         // neighbourhood radius in edges
    int iterations = 200;               // per window; 0 disables the search
    double t0 = 2.0;
    double cooling = 0.97;
    std::uint64_t seed = 0;
    double extend_probability = 0.5;    // per route, for the initial candidate
    CommitPolicy commit = CommitPolicy::Adaptive;

    void validate() const;
};

AnnealConfig anneal_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json anneal_config_to_json(const AnnealConfig& cfg);

inline constexpr int kUnroutable = 1 << 20;

struct Candidate {
    std::vector<std::optional<TreeExtension>> extensions;  // one slot per route of the layer
    int objective = kUnroutable;
    std::size_t footprint = 0;

    [[nodiscard]] std::size_t extended_count() const;
};

/// Read-only view of the layer being optimised.
struct TreeSearch {
    const RoutingGraph& graph;
    const Mapping& mapping;  // before any extension teleport
    const RoutedLayer& layer;
    BlockMask base;          // data-occupied vertices plus every route vertex of the layer

    TreeSearch(const RoutingGraph& g, const Mapping& m, const RoutedLayer& l);

    [[nodiscard]] bool extendable(std::size_t route) const;
    /// Ancilla position the route currently uses under `c`.
    [[nodiscard]] VertexId current_ancilla(const Candidate& c, std::size_t route) const;
    /// Mapping after the candidate's teleports.
    [[nodiscard]] Mapping apply(const Candidate& c) const;
    [[nodiscard]] std::size_t footprint(const Candidate& c) const;
    /// True when every branch is free space and all trees are jointly disjoint.
    [[nodiscard]] bool valid(const Candidate& c) const;
};

Candidate initial_candidate(const TreeSearch& s, int radius, double extend_probability, std::mt19937_64& rng);
Candidate neighbor(const TreeSearch& s, const Candidate& c, int radius, std::mt19937_64& rng);

/// Objective: routed depth of `lookahead` under the candidate's mapping. Values above
/// `cap` are reported as cap + 1.
int evaluate(const TreeSearch& s, const Candidate& c, const std::vector<Layer>& lookahead,
             int cap = kUnroutable - 1);

struct AnnealStats {
    int evaluations = 0;
    int accepted = 0;
};

/// Metropolis search over tree extensions; returns the best candidate seen
/// (lowest objective, then smallest footprint).
Candidate anneal(const RoutingGraph& g, const Mapping& m, const RoutedLayer& layer, const std::vector<Layer>& lookahead,
                 const AnnealConfig& cfg, AnnealStats* stats = nullptr);

/// Rewrites the layer's routes as trees and applies the teleports to `m`.
void apply_candidate(const TreeSearch& s, const Candidate& c, RoutedLayer& layer, Mapping& m);

/// Teleports idle displaced qubits back to the nearest free canonical data vertex.
/// `blocked` must already mark data-occupied vertices and the layer's routes; it and
/// `m` are updated with every committed move.
std::vector<Route> idle_restore(const RoutingGraph& g, Mapping& m, const RoutedLayer& layer, BlockMask& blocked);
std::vector<Route> idle_restore(const RoutingGraph& g, Mapping& m, const RoutedLayer& layer);

struct OptimizerStats {
    int windows = 0;
    int windows_searched = 0;
    int windows_improved = 0;
    int windows_committed = 0;
    int tree_teleports = 0;
    int idle_teleports = 0;
    int evaluations = 0;
};

/// Sliding-window compilation with CNOT + teleportation trees.
Schedule compile_optimized(const RoutingGraph& g, const Mapping& m, const LayeredCircuit& c, const AnnealConfig& cfg,
                           OptimizerStats* stats = nullptr);

}  // namespace teleroute
