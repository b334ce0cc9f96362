#include "teleroute/teleport_optimizer.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "teleroute/seed.hpp"

namespace teleroute {

void AnnealConfig::validate() const {
    if (k < 1) throw std::invalid_argument("lookahead k must be at least 1");
    if (r < 1) throw std::invalid_argument("radius r must be at least 1");
    if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
    if (!(t0 > 0)) throw std::invalid_argument("initial temperature must be positive");
    if (!(cooling > 0 && cooling < 1)) throw std::invalid_argument("cooling factor must lie in (0, 1)");
    if (!(extend_probability >= 0 && extend_probability <= 1))
        throw std::invalid_argument("extension probability must lie in [0, 1]");
}

AnnealConfig anneal_config_from_json(const nlohmann::json& j) {
    static const char* known[] = {"k", "r", "iterations", "t0", "cooling", "seed", "extend_probability", "commit"};
    for (const auto& [key, value] : j.items())
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
            throw std::invalid_argument("unknown anneal config field '" + key + "'");
    AnnealConfig cfg;
    cfg.k = j.value("k", cfg.k);
    cfg.r = j.value("r", cfg.r);
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.t0 = j.value("t0", cfg.t0);
    cfg.cooling = j.value("cooling", cfg.cooling);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.extend_probability = j.value("extend_probability", cfg.extend_probability);
    if (j.contains("commit")) {
        const auto policy = j.at("commit").get<std::string>();
        if (policy == "adaptive")
            cfg.commit = CommitPolicy::Adaptive;
        else if (policy == "window")
            cfg.commit = CommitPolicy::Window;
        else
            throw std::invalid_argument("commit must be \"adaptive\" or \"window\"");
    }
    cfg.validate();
    return cfg;
}

nlohmann::ordered_json anneal_config_to_json(const AnnealConfig& cfg) {
    nlohmann::ordered_json j;
    j["k"] = cfg.k;
    j["r"] = cfg.r;
    j["iterations"] = cfg.iterations;
    j["t0"] = cfg.t0;
    j["cooling"] = cfg.cooling;
    j["seed"] = cfg.seed;
    j["extend_probability"] = cfg.extend_probability;
    j["commit"] = cfg.commit == CommitPolicy::Adaptive ? "adaptive" : "window";
    return j;
}

std::size_t Candidate::extended_count() const {
    return std::size_t(std::count_if(extensions.begin(), extensions.end(), [](const auto& e) { return e.has_value(); }));
}

namespace {

// Bounded BFS with parent pointers; reused across calls through stamps.
struct Bfs {
    std::vector<std::uint32_t> seen;
    std::vector<std::int32_t> dist;
    std::vector<VertexId> parent;
    std::vector<VertexId> order;
    std::uint32_t stamp = 0;

    template <class Passable>
    void run(const RoutingGraph& g, VertexId start, int radius, Passable&& passable) {
        if (seen.size() != g.size()) {
            seen.assign(g.size(), 0);
            dist.assign(g.size(), 0);
            parent.assign(g.size(), kNoVertex);
            stamp = 0;
        }
        if (++stamp == 0) {
            std::fill(seen.begin(), seen.end(), 0);
            stamp = 1;
        }
        order.clear();
        order.push_back(start);
        seen[start] = stamp;
        dist[start] = 0;
        parent[start] = kNoVertex;
        for (std::size_t head = 0; head < order.size(); ++head) {
            VertexId u = order[head];
            if (dist[u] >= radius) continue;
            for (auto p = g.adj_begin(u); p != g.adj_end(u); ++p) {
                VertexId w = *p;
                if (seen[w] == stamp || !passable(w)) continue;
                seen[w] = stamp;
                dist[w] = dist[u] + 1;
                parent[w] = u;
                order.push_back(w);
            }
        }
    }

    [[nodiscard]] bool reached(VertexId v) const { return seen[v] == stamp; }
};

Bfs& bfs() {
    thread_local Bfs b;
    return b;
}

bool is_interior(const Route& r, VertexId v) { return std::find(r.path.begin() + 1, r.path.end() - 1, v) != r.path.end() - 1; }

QubitLabel moved_label(const Mapping& m, const Route& r, MovedQubit which) {
    return which == MovedQubit::Control ? m.occupant(r.path.front()) : m.occupant(r.path.back());
}

BlockMask mask_without(const TreeSearch& s, const Candidate& c, std::size_t skip) {
    BlockMask mask = s.base;
    for (std::size_t i = 0; i < c.extensions.size(); ++i)
        if (i != skip && c.extensions[i])
            for (VertexId v : c.extensions[i]->branch) mask[v] = 1;
    return mask;
}

}  // namespace

TreeSearch::TreeSearch(const RoutingGraph& g, const Mapping& m, const RoutedLayer& l)
    : graph(g), mapping(m), layer(l), base(occupancy_mask(g, m)) {
    for (const auto& r : l.routes) {
        for (VertexId v : r.path) base[v] = 1;
        for (VertexId v : r.branch) base[v] = 1;
    }
}

bool TreeSearch::extendable(std::size_t route) const {
    return layer.routes[route].kind == RouteKind::StandardCNOT && layer.routes[route].path.size() >= 3;
}

VertexId TreeSearch::current_ancilla(const Candidate& c, std::size_t route) const {
    if (route < c.extensions.size() && c.extensions[route]) return c.extensions[route]->new_ancilla;
    return layer.routes[route].ancilla;
}

Mapping TreeSearch::apply(const Candidate& c) const {
    Mapping out = mapping;
    for (std::size_t i = 0; i < c.extensions.size(); ++i) {
        if (!c.extensions[i]) continue;
        const auto& e = *c.extensions[i];
        out.teleport(moved_label(mapping, layer.routes[i], e.moved), e.new_ancilla);
    }
    return out;
}

std::size_t TreeSearch::footprint(const Candidate& c) const {
    std::size_t n = 0;
    for (const auto& r : layer.routes) n += r.footprint();
    for (const auto& e : c.extensions)
        if (e) n += e->branch.size();
    return n;
}

bool TreeSearch::valid(const Candidate& c) const {
    if (c.extensions.size() != layer.routes.size()) return false;
    BlockMask mask = base;
    for (std::size_t i = 0; i < c.extensions.size(); ++i) {
        if (!c.extensions[i]) continue;
        if (!extendable(i)) return false;
        const auto& e = *c.extensions[i];
        const Route& r = layer.routes[i];
        if (e.base_gate != r.gate || !is_interior(r, e.attach)) return false;
        if (e.branch.empty()) {
            if (e.new_ancilla != e.attach) return false;
            continue;
        }
        if (e.branch.back() != e.new_ancilla) return false;
        VertexId prev = e.attach;
        for (VertexId v : e.branch) {
            if (mask[v]) return false;
            const auto& nb = graph.neighbors(prev);
            if (std::find(nb.begin(), nb.end(), v) == nb.end()) return false;
            mask[v] = 1;
            prev = v;
        }
    }
    return true;
}

Candidate initial_candidate(const TreeSearch& s, int radius, double extend_probability, std::mt19937_64& rng) {
    const auto& routes = s.layer.routes;
    Candidate c;
    c.extensions.resize(routes.size());
    BlockMask mask = s.base;
    std::bernoulli_distribution extend(extend_probability);
    std::bernoulli_distribution coin(0.5);
    auto& b = bfs();
    for (std::size_t i = 0; i < routes.size(); ++i) {
        if (!s.extendable(i) || !extend(rng)) continue;
        const Route& r = routes[i];
        std::uniform_int_distribution<std::size_t> pick_attach(1, r.path.size() - 2);
        VertexId attach = r.path[pick_attach(rng)];
        b.run(s.graph, attach, radius, [&](VertexId v) { return !mask[v]; });
        if (b.order.size() < 2) continue;
        std::uniform_int_distribution<std::size_t> pick_end(1, b.order.size() - 1);
        VertexId end = b.order[pick_end(rng)];
        TreeExtension e;
        e.base_gate = r.gate;
        e.attach = attach;
        e.new_ancilla = end;
        e.moved = coin(rng) ? MovedQubit::Control : MovedQubit::Target;
        for (VertexId v = end; v != attach; v = b.parent[v]) e.branch.push_back(v);
        std::reverse(e.branch.begin(), e.branch.end());
        for (VertexId v : e.branch) mask[v] = 1;
        c.extensions[i] = std::move(e);
    }
    return c;
}

Candidate neighbor(const TreeSearch& s, const Candidate& c, int radius, std::mt19937_64& rng) {
    std::vector<std::size_t> movable;
    for (std::size_t i = 0; i < s.layer.routes.size(); ++i)
        if (s.extendable(i)) movable.push_back(i);
    if (movable.empty()) return c;

    std::uniform_int_distribution<std::size_t> pick_route(0, movable.size() - 1);
    std::bernoulli_distribution coin(0.5);
    auto& b = bfs();
    constexpr int kAttempts = 8;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        const std::size_t i = movable[pick_route(rng)];
        const Route& r = s.layer.routes[i];
        const BlockMask mask = mask_without(s, c, i);
        const VertexId from = s.current_ancilla(c, i);
        b.run(s.graph, from, radius, [&](VertexId v) { return !mask[v] || is_interior(r, v); });

        const bool removable = c.extensions[i].has_value();
        const std::size_t targets = b.order.size() - 1;  // order[0] is the current ancilla
        const std::size_t choices = targets + (removable ? 1 : 0);
        if (choices == 0) continue;
        std::uniform_int_distribution<std::size_t> pick(0, choices - 1);
        const std::size_t choice = pick(rng);
        Candidate out = c;
        if (choice == targets) {
            out.extensions[i].reset();
            return out;
        }
        const VertexId end = b.order[choice + 1];

        TreeExtension e;
        e.base_gate = r.gate;
        e.new_ancilla = end;
        e.moved = coin(rng) ? MovedQubit::Control : MovedQubit::Target;
        if (is_interior(r, end)) {
            e.attach = end;
        } else {
            // Shortest free branch from the new ancilla back to the path interior.
            auto& back = bfs();
            back.run(s.graph, end, int(s.graph.size()), [&](VertexId v) { return !mask[v] || is_interior(r, v); });
            VertexId attach = kNoVertex;
            std::int32_t best = 0;
            for (std::size_t k = 1; k + 1 < r.path.size(); ++k) {
                VertexId v = r.path[k];
                if (!back.reached(v)) continue;
                if (attach == kNoVertex || back.dist[v] < best || (back.dist[v] == best && v < attach)) {
                    attach = v;
                    best = back.dist[v];
                }
            }
            if (attach == kNoVertex) continue;
            // The nearest interior vertex has a BFS-tree path free of other interior vertices.
            std::vector<VertexId> chain;
            for (VertexId v = back.parent[attach]; v != kNoVertex; v = back.parent[v]) chain.push_back(v);
            e.attach = attach;
            e.branch = std::move(chain);
        }
        out.extensions[i] = std::move(e);
        return out;
    }
    return c;
}

int evaluate(const TreeSearch& s, const Candidate& c, const std::vector<Layer>& lookahead, int cap) {
    return window_depth(s.graph, s.apply(c), lookahead, std::min(cap, kUnroutable - 1)).value_or(kUnroutable);
}

namespace {

bool better(const Candidate& a, const Candidate& b) {
    return a.objective < b.objective || (a.objective == b.objective && a.footprint < b.footprint);
}

}  // namespace

Candidate anneal(const RoutingGraph& g, const Mapping& m, const RoutedLayer& layer, const std::vector<Layer>& lookahead,
                 const AnnealConfig& cfg, AnnealStats* stats) {
    cfg.validate();
    TreeSearch s(g, m, layer);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int lower = int(std::count_if(lookahead.begin(), lookahead.end(), [](const Layer& l) { return !l.empty(); }));

    AnnealStats local;
    auto score = [&](Candidate& c, int cap) {
        c.objective = evaluate(s, c, lookahead, cap);
        c.footprint = s.footprint(c);
        ++local.evaluations;
    };

    Candidate current = initial_candidate(s, cfg.r, cfg.extend_probability, rng);
    score(current, kUnroutable - 1);
    Candidate best = current;
    double temperature = cfg.t0;
    for (int it = 0; it < cfg.iterations; ++it) {
        // Nothing routes the lookahead in fewer layers than it has.
        if (best.objective <= lower) break;
        Candidate next = neighbor(s, current, cfg.r, rng);
        // Metropolis test drawn up front: accept iff delta <= 0 or u < exp(-delta / T),
        // so the objective only matters up to the largest acceptable value.
        const double u = unit(rng);
        const double slack = u > 0 ? -temperature * std::log(u) : double(kUnroutable);
        const int max_delta = std::max(0, int(std::min(std::ceil(slack) - 1.0, double(kUnroutable))));
        const int cap = int(std::min<long>(long(current.objective) + max_delta, kUnroutable - 1));
        if (next.extensions == current.extensions) {
            next.objective = current.objective;
            next.footprint = current.footprint;
        } else {
            score(next, cap);
        }
        if (next.objective <= cap) {
            current = next;
            ++local.accepted;
        }
        if (better(next, best)) best = std::move(next);
        temperature *= cfg.cooling;
    }
    // Drop extensions the best objective does not need; every teleport displaces a
    // qubit and crowds later layers.
    if (cfg.iterations > 0)
        for (std::size_t i = 0; i < best.extensions.size(); ++i) {
            if (!best.extensions[i]) continue;
            Candidate trimmed = best;
            trimmed.extensions[i].reset();
            score(trimmed, best.objective);
            if (!better(best, trimmed)) best = std::move(trimmed);
        }
    if (stats) {
        stats->evaluations += local.evaluations;
        stats->accepted += local.accepted;
    }
    return best;
}

void apply_candidate(const TreeSearch& s, const Candidate& c, RoutedLayer& layer, Mapping& m) {
    for (std::size_t i = 0; i < c.extensions.size(); ++i) {
        if (!c.extensions[i]) continue;
        const auto& e = *c.extensions[i];
        Route& r = layer.routes[i];
        const QubitLabel label = moved_label(s.mapping, s.layer.routes[i], e.moved);
        r.kind = e.moved == MovedQubit::Control ? RouteKind::TeleportControl : RouteKind::TeleportTarget;
        r.branch = e.branch;
        r.ancilla = e.new_ancilla;
        m.teleport(label, e.new_ancilla);
    }
}

std::vector<Route> idle_restore(const RoutingGraph& g, Mapping& m, const RoutedLayer& layer, BlockMask& blocked) {
    std::vector<char> busy(m.qubit_count(), 0);
    for (const auto& r : layer.routes) {
        if (r.kind == RouteKind::IdleTeleport) {
            busy[r.qubit] = 1;
            continue;
        }
        busy[m.occupant(r.path.front())] = 1;
        busy[m.occupant(r.path.back())] = 1;
    }

    std::vector<Route> moves;
    auto& b = bfs();
    for (QubitLabel label = 0; label < QubitLabel(m.qubit_count()); ++label) {
        if (busy[label]) continue;
        const VertexId from = m.position(label);
        if (g.is_canonical_data(from)) continue;

        b.run(g, from, int(g.size()), [&](VertexId v) { return !blocked[v]; });
        std::vector<std::pair<std::int32_t, VertexId>> gaps;
        for (VertexId v : b.order)
            if (v != from && g.is_canonical_data(v)) gaps.emplace_back(b.dist[v], v);
        std::sort(gaps.begin(), gaps.end());

        std::optional<std::vector<VertexId>> best;
        VertexId dest = kNoVertex;
        for (const auto& [d, v] : gaps) {
            if (best && std::size_t(d) + 1 > best->size() - 1) break;
            auto p = shortest_free_path(g, from, v, blocked);
            if (p && (!best || p->size() < best->size())) {
                best = std::move(p);
                dest = v;
            }
        }
        if (!best) continue;
        for (VertexId v : *best) blocked[v] = 1;
        Route r;
        r.kind = RouteKind::IdleTeleport;
        r.path = std::move(*best);
        r.ancilla = r.path[1];
        r.qubit = label;
        m.teleport(label, dest);
        busy[label] = 1;
        moves.push_back(std::move(r));
    }
    return moves;
}

std::vector<Route> idle_restore(const RoutingGraph& g, Mapping& m, const RoutedLayer& layer) {
    BlockMask blocked = occupancy_mask(g, m);
    for (const auto& r : layer.routes) {
        for (VertexId v : r.path) blocked[v] = 1;
        for (VertexId v : r.branch) blocked[v] = 1;
    }
    return idle_restore(g, m, layer, blocked);
}

Schedule compile_optimized(const RoutingGraph& g, const Mapping& m0, const LayeredCircuit& c0, const AnnealConfig& cfg,
                           OptimizerStats* stats) {
    cfg.validate();
    if (m0.qubit_count() < std::size_t(c0.qubits)) throw std::invalid_argument("mapping does not place every qubit");
    LayeredCircuit c = c0;
    Mapping m = m0;
    Schedule s;
    OptimizerStats local;

    std::size_t j = 0;
    while (j < c.layers.size()) {
        if (c.layers[j].empty()) {
            ++j;
            continue;
        }
        // (i) route the current logical layer, push leftovers, refill gaps.
        BlockMask blocked = occupancy_mask(g, m);
        const Layer current = c.layers[j];
        auto routed = route_layer(g, m, current, blocked);
        for (const auto& gate : routed.unrouted) push_gate(c, gate.id, j);
        RoutedLayer layer = std::move(routed.layer);
        auto idle = idle_restore(g, m, layer, blocked);
        local.idle_teleports += int(idle.size());
        for (auto& r : idle) layer.routes.push_back(std::move(r));
        if (layer.routes.empty()) {
            std::vector<GateId> ids;
            for (const auto& gate : current) ids.push_back(gate.id);
            throw RoutingError("no route exists for any remaining gate of a layer and no idle qubit can move", ids);
        }

        // (ii) search tree extensions against the lookahead window.
        const std::size_t end = std::min(c.layers.size(), j + 1 + std::size_t(cfg.k));
        std::vector<Layer> window(c.layers.begin() + std::ptrdiff_t(j + 1), c.layers.begin() + std::ptrdiff_t(end));
        const int lower = int(std::count_if(window.begin(), window.end(), [](const Layer& l) { return !l.empty(); }));
        ++local.windows;
        bool improved = false;
        if (cfg.iterations > 0 && lower > 0 && layer.gate_count() > 0) {
            const int base = window_depth(g, m, window).value_or(kUnroutable);
            if (base > lower) {
                ++local.windows_searched;
                AnnealConfig window_cfg = cfg;
                window_cfg.seed = splitmix64(cfg.seed ^ splitmix64(s.layers.size()));
                AnnealStats as;
                Candidate best = anneal(g, m, layer, window, window_cfg, &as);
                local.evaluations += as.evaluations;
                if (best.objective < base) {
                    // (iii) apply the teleports; commit the window when it is tight.
                    TreeSearch search(g, m, layer);
                    apply_candidate(search, best, layer, m);
                    local.tree_teleports += int(best.extended_count());
                    ++local.windows_improved;
                    s.layers.push_back(std::move(layer));
                    improved = true;
                    if (cfg.commit == CommitPolicy::Window || best.objective <= lower) {
                        auto w = route_window(g, m, window);
                        for (auto& l : w.layers) s.layers.push_back(std::move(l));
                        c.layers.erase(c.layers.begin() + std::ptrdiff_t(j + 1),
                                       c.layers.begin() + std::ptrdiff_t(end));
                        ++local.windows_committed;
                    }
                }
            }
        }
        if (!improved) s.layers.push_back(std::move(layer));
        ++j;
    }
    s.final_mapping = m;
    if (stats) *stats = local;
    return s;
}

}  // namespace teleroute
