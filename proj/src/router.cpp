#include "teleroute/router.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace teleroute {

std::string_view route_kind_str(RouteKind k) {
    switch (k) {
        case RouteKind::StandardCNOT: return "cnot";
        case RouteKind::TeleportControl: return "cnot_teleport_control";
        case RouteKind::TeleportTarget: return "cnot_teleport_target";
        case RouteKind::IdleTeleport: return "idle_teleport";
    }
    return "?";
}

std::size_t RoutedLayer::gate_count() const {
    return std::size_t(std::count_if(routes.begin(), routes.end(),
                                     [](const Route& r) { return r.kind != RouteKind::IdleTeleport; }));
}

std::vector<std::size_t> Schedule::gate_counts() const {
    std::vector<std::size_t> out;
    out.reserve(layers.size());
    for (const auto& l : layers) out.push_back(l.gate_count());
    return out;
}

BlockMask occupancy_mask(const RoutingGraph& g, const Mapping& m) {
    BlockMask mask(g.size(), 0);
    for (VertexId v : m.positions()) mask[v] = 1;
    return mask;
}

namespace {

// Stamped scratch buffers so a search never has to clear O(V) state.
struct SearchScratch {
    std::vector<std::uint32_t> reached;  // dist holds a tentative value
    std::vector<std::uint32_t> closed;   // dist is final
    std::vector<std::uint32_t> goal;
    std::vector<std::int32_t> dist;
    std::vector<VertexId> now, later;
    std::uint32_t stamp = 0;

    void prepare(std::size_t n) {
        if (reached.size() != n) {
            reached.assign(n, 0);
            closed.assign(n, 0);
            goal.assign(n, 0);
            dist.assign(n, 0);
            stamp = 0;
        }
        if (++stamp == 0) {
            std::fill(reached.begin(), reached.end(), 0);
            std::fill(closed.begin(), closed.end(), 0);
            std::fill(goal.begin(), goal.end(), 0);
            stamp = 1;
        }
        now.clear();
        later.clear();
    }
};

SearchScratch& scratch() {
    thread_local SearchScratch s;
    return s;
}

}  // namespace

std::optional<std::vector<VertexId>> shortest_free_path(const RoutingGraph& g, VertexId src, VertexId dst,
                                                        std::span<const std::uint8_t> blocked) {
    if (!g.contains(src) || !g.contains(dst)) throw std::out_of_range("unknown path endpoint");
    if (src == dst) throw std::invalid_argument("path endpoints coincide");
    if (blocked.size() != g.size()) throw std::invalid_argument("block mask size mismatch");

    auto& s = scratch();
    s.prepare(g.size());
    const auto st = s.stamp;

    bool any_goal = false;
    for (auto p = g.adj_begin(src); p != g.adj_end(src); ++p)
        if (*p != dst && !blocked[*p]) {
            s.goal[*p] = st;
            any_goal = true;
        }
    if (!any_goal) return std::nullopt;

    // A* from dst towards the free neighbours of src. Every edge changes one grid
    // coordinate by one, so Manhattan distance to src, minus one, is consistent and
    // f grows in steps of 0 or 2. Expanding every vertex with f <= the goal distance
    // settles all vertices that lie on a shortest path.
    const int sr = g.row_of(src), sc = g.col_of(src);
    auto h = [&](VertexId v) { return std::abs(g.row_of(v) - sr) + std::abs(g.col_of(v) - sc) - 1; };

    s.dist[dst] = 0;
    s.reached[dst] = st;
    s.now.push_back(dst);
    int f = h(dst);
    std::int32_t found = -1;
    for (;;) {
        if (s.now.empty()) {
            if (s.later.empty()) break;
            std::swap(s.now, s.later);
            f += 2;
            if (found >= 0 && f > found) break;
            continue;
        }
        VertexId u = s.now.back();
        s.now.pop_back();
        if (s.closed[u] == st) continue;
        const std::int32_t du = s.dist[u];
        if (du + h(u) != f) continue;  // stale entry, re-queued with a shorter distance
        s.closed[u] = st;
        if (found < 0 && s.goal[u] == st) found = du;
        for (auto p = g.adj_begin(u); p != g.adj_end(u); ++p) {
            VertexId w = *p;
            if (w == src || blocked[w] || s.closed[w] == st) continue;
            if (s.reached[w] == st && s.dist[w] <= du + 1) continue;
            s.reached[w] = st;
            s.dist[w] = du + 1;
            (du + 1 + h(w) == f ? s.now : s.later).push_back(w);
        }
    }
    if (found < 0) return std::nullopt;

    std::vector<VertexId> path;
    path.reserve(std::size_t(found) + 2);
    path.push_back(src);
    VertexId cur = src;
    std::int32_t want = found;
    while (want >= 0) {
        VertexId next = kNoVertex;
        for (auto p = g.adj_begin(cur); p != g.adj_end(cur); ++p) {
            VertexId w = *p;
            if (s.closed[w] != st || s.dist[w] != want) continue;
            if (cur == src && s.goal[w] != st) continue;
            next = w;
            break;
        }
        path.push_back(next);
        cur = next;
        --want;
    }
    return path;
}

LayerRouting route_layer(const RoutingGraph& g, const Mapping& m, std::span<const Gate> gates, BlockMask& blocked) {
    struct Entry {
        std::optional<std::vector<VertexId>> path;
        bool valid = false;
        bool done = false;
    };
    std::vector<Entry> entries(gates.size());
    for (const auto& gate : gates)
        if (gate.control == gate.target)
            throw std::invalid_argument("gate " + std::to_string(gate.id) + " has identical endpoints");

    auto interior_free = [&](const std::vector<VertexId>& p) {
        for (std::size_t k = 1; k + 1 < p.size(); ++k)
            if (blocked[p[k]]) return false;
        return true;
    };

    // Claiming vertices only lengthens paths, so a cached length is a lower bound and
    // a cached path that is still free remains the lexicographically smallest
    // shortest one. Only the front-runner ever needs recomputing.
    LayerRouting out;
    for (;;) {
        std::size_t best = gates.size();
        for (std::size_t i = 0; i < gates.size(); ++i) {
            auto& e = entries[i];
            if (e.done) continue;
            if (!e.valid) {
                e.path = shortest_free_path(g, m.position(gates[i].control), m.position(gates[i].target), blocked);
                e.valid = true;
            }
            if (!e.path) continue;
            if (best == gates.size() || e.path->size() < entries[best].path->size() ||
                (e.path->size() == entries[best].path->size() && gates[i].id < gates[best].id))
                best = i;
        }
        if (best == gates.size()) break;

        auto& chosen = entries[best];
        if (!interior_free(*chosen.path)) {
            chosen.valid = false;
            continue;
        }
        chosen.done = true;
        for (VertexId v : *chosen.path) blocked[v] = 1;
        Route r;
        r.gate = gates[best].id;
        r.kind = RouteKind::StandardCNOT;
        r.path = std::move(*chosen.path);
        r.ancilla = r.path[1];
        out.layer.routes.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < gates.size(); ++i)
        if (!entries[i].done) out.unrouted.push_back(gates[i]);
    return out;
}

LayerRouting route_layer(const RoutingGraph& g, const Mapping& m, std::span<const Gate> gates) {
    BlockMask blocked = occupancy_mask(g, m);
    return route_layer(g, m, gates, blocked);
}

namespace {

// Routes `c` layer by layer with pushes. Returns the ids of a stuck layer's gates,
// or nothing on success.
std::optional<std::vector<GateId>> route_all(const RoutingGraph& g, const Mapping& m, LayeredCircuit& c,
                                             std::vector<RoutedLayer>* out, int* depth,
                                             int cap = std::numeric_limits<int>::max()) {
    const BlockMask base = occupancy_mask(g, m);
    BlockMask blocked;
    for (std::size_t j = 0; j < c.layers.size(); ++j) {
        if (c.layers[j].empty()) continue;
        blocked = base;
        auto routed = route_layer(g, m, c.layers[j], blocked);
        if (routed.layer.routes.empty()) {
            std::vector<GateId> ids;
            for (const auto& gate : routed.unrouted) ids.push_back(gate.id);
            return ids;
        }
        for (const auto& gate : routed.unrouted) push_gate(c, gate.id, j);
        if (out) out->push_back(std::move(routed.layer));
        if (depth && ++*depth > cap) break;
    }
    return std::nullopt;
}

std::string stuck_message(const std::vector<GateId>& ids) {
    std::string msg = "no route exists for any remaining gate of a layer; stuck gates:";
    for (GateId id : ids) msg += " " + std::to_string(id);
    return msg;
}

}  // namespace

Schedule route_static(const RoutingGraph& g, const Mapping& m, const LayeredCircuit& c) {
    if (m.qubit_count() < std::size_t(c.qubits)) throw std::invalid_argument("mapping does not place every qubit");
    LayeredCircuit work = c;
    Schedule s;
    if (auto stuck = route_all(g, m, work, &s.layers, nullptr)) throw RoutingError(stuck_message(*stuck), *stuck);
    s.final_mapping = m;
    return s;
}

WindowRouting route_window(const RoutingGraph& g, const Mapping& m, std::vector<Layer> layers) {
    LayeredCircuit work{int(m.qubit_count()), std::move(layers)};
    WindowRouting w;
    if (auto stuck = route_all(g, m, work, &w.layers, nullptr)) throw RoutingError(stuck_message(*stuck), *stuck);
    return w;
}

std::optional<int> window_depth(const RoutingGraph& g, const Mapping& m, std::vector<Layer> layers, int cap) {
    LayeredCircuit work{int(m.qubit_count()), std::move(layers)};
    int depth = 0;
    if (route_all(g, m, work, nullptr, &depth, cap)) return std::nullopt;
    return depth;
}

void apply_layer_moves(Mapping& m, const RoutedLayer& layer) {
    for (const auto& r : layer.routes) {
        switch (r.kind) {
            case RouteKind::StandardCNOT: break;
            case RouteKind::TeleportControl: m.teleport(m.occupant(r.path.front()), r.ancilla); break;
            case RouteKind::TeleportTarget: m.teleport(m.occupant(r.path.back()), r.ancilla); break;
            case RouteKind::IdleTeleport: m.teleport(r.qubit, r.path.back()); break;
        }
    }
}

namespace {

bool adjacent(const RoutingGraph& g, VertexId a, VertexId b) {
    for (auto p = g.adj_begin(a); p != g.adj_end(a); ++p)
        if (*p == b) return true;
    return false;
}

}  // namespace

std::vector<std::string> check_schedule(const RoutingGraph& g, const Mapping& initial, const LayeredCircuit& c,
                                        const Schedule& s) {
    std::vector<std::string> errors;
    auto fail = [&](std::size_t layer, const std::string& what) {
        errors.push_back("layer " + std::to_string(layer) + ": " + what);
    };
    std::unordered_map<GateId, Gate> gates;
    for (const auto& layer : c.layers)
        for (const auto& gate : layer) gates[gate.id] = gate;
    std::unordered_map<GateId, int> seen;

    Mapping m = initial;
    std::vector<std::size_t> used(g.size(), 0);
    for (std::size_t li = 0; li < s.layers.size(); ++li) {
        const auto& layer = s.layers[li];
        const std::size_t tag = li + 1;
        for (const auto& r : layer.routes) {
            const std::string who = r.kind == RouteKind::IdleTeleport ? "idle teleport of " + std::to_string(r.qubit)
                                                                       : "gate " + std::to_string(r.gate);
            if (r.path.size() < 3) {
                fail(li, who + " has no interior ancilla vertex");
                continue;
            }
            for (std::size_t k = 0; k + 1 < r.path.size(); ++k)
                if (!adjacent(g, r.path[k], r.path[k + 1])) fail(li, who + " path is not connected");
            for (VertexId v : r.path) {
                if (used[v] == tag) fail(li, who + " reuses vertex " + std::to_string(v));
                used[v] = tag;
            }
            for (VertexId v : r.branch) {
                if (used[v] == tag) fail(li, who + " reuses vertex " + std::to_string(v));
                used[v] = tag;
                if (m.occupied(v)) fail(li, who + " branch crosses occupied vertex " + std::to_string(v));
            }
            for (std::size_t k = 1; k + 1 < r.path.size(); ++k)
                if (m.occupied(r.path[k])) fail(li, who + " interior crosses occupied vertex " + std::to_string(r.path[k]));
            if (!r.branch.empty()) {
                bool attached = false;
                for (std::size_t k = 1; k + 1 < r.path.size(); ++k) attached |= adjacent(g, r.path[k], r.branch.front());
                if (!attached) fail(li, who + " branch does not attach to the path interior");
                for (std::size_t k = 0; k + 1 < r.branch.size(); ++k)
                    if (!adjacent(g, r.branch[k], r.branch[k + 1])) fail(li, who + " branch is not connected");
                if (r.ancilla != r.branch.back()) fail(li, who + " ancilla is not the branch end");
            } else if (std::find(r.path.begin() + 1, r.path.end() - 1, r.ancilla) == r.path.end() - 1) {
                fail(li, who + " ancilla is not on the path interior");
            }

            if (r.kind == RouteKind::IdleTeleport) {
                if (r.qubit < 0 || std::size_t(r.qubit) >= m.qubit_count() || m.position(r.qubit) != r.path.front())
                    fail(li, who + " does not start at the qubit's position");
                if (m.occupied(r.path.back())) fail(li, who + " destination is occupied");
                continue;
            }
            auto it = gates.find(r.gate);
            if (it == gates.end()) {
                fail(li, who + " is not part of the circuit");
                continue;
            }
            ++seen[r.gate];
            if (m.position(it->second.control) != r.path.front() || m.position(it->second.target) != r.path.back())
                fail(li, who + " endpoints do not match the current mapping");
            if (r.kind == RouteKind::StandardCNOT && !r.branch.empty()) fail(li, who + " is a tree without a teleport");
        }
        try {
            apply_layer_moves(m, layer);
        } catch (const std::exception& e) {
            fail(li, std::string("teleport failed: ") + e.what());
        }
        if (!m.consistent()) fail(li, "mapping lost bijectivity");
    }
    for (const auto& [id, gate] : gates) {
        auto it = seen.find(id);
        int n = it == seen.end() ? 0 : it->second;
        if (n != 1) errors.push_back("gate " + std::to_string(id) + " scheduled " + std::to_string(n) + " times");
    }
    for (const auto& [id, n] : seen)
        if (!gates.count(id)) errors.push_back("unknown gate " + std::to_string(id));
    std::size_t nonempty = std::count_if(c.layers.begin(), c.layers.end(), [](const Layer& l) { return !l.empty(); });
    if (s.depth() < nonempty) errors.push_back("routed depth below logical depth");
    if (!(m == s.final_mapping)) errors.push_back("final mapping does not match replay");
    return errors;
}

nlohmann::ordered_json route_to_json(const Route& r) {
    nlohmann::ordered_json j;
    j["gate"] = r.gate;
    j["kind"] = route_kind_str(r.kind);
    j["path"] = r.path;
    j["branch"] = r.branch;
    j["ancilla"] = r.ancilla;
    if (r.kind == RouteKind::IdleTeleport) j["qubit"] = r.qubit;
    return j;
}

nlohmann::ordered_json schedule_to_json(const Schedule& s) {
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& l : s.layers) {
        nlohmann::ordered_json routes = nlohmann::ordered_json::array();
        for (const auto& r : l.routes) routes.push_back(route_to_json(r));
        layers.push_back({{"routes", std::move(routes)}});
    }
    nlohmann::ordered_json j;
    j["layers"] = std::move(layers);
    j["depth"] = s.depth();
    j["final_mapping"] = s.final_mapping.positions();
    j["gate_counts"] = s.gate_counts();
    return j;
}

}  // namespace teleroute
