#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <numeric>
#include <random>

#include "crossing_fixture.hpp"
#include "oracles.hpp"
#include "teleroute/router.hpp"

using namespace teleroute;

namespace {

RoutingGraph open_grid(int rows, int cols) { return RoutingGraph(rows, cols, std::vector<Role>(rows * cols, Role::Ancilla)); }

// Small random instance: every vertex not left free holds a label; labels 0..2g-1
// are the gate operands.
struct SmallInstance {
    RoutingGraph graph;
    Mapping mapping;
    std::vector<Gate> gates;
};

SmallInstance small_instance(std::mt19937_64& rng, int max_free, int max_gates) {
    std::uniform_int_distribution<int> dim(3, 5);
    int rows = dim(rng), cols = dim(rng);
    RoutingGraph g = open_grid(rows, cols);
    std::vector<VertexId> order(g.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int n = int(g.size());
    std::uniform_int_distribution<int> gates_d(1, max_gates);
    const int ng = gates_d(rng);
    std::uniform_int_distribution<int> free_d(std::max(1, n - 2 * ng - 40), std::min(max_free, n - 2 * ng));
    const int nfree = free_d(rng);
    std::vector<VertexId> pos(order.begin(), order.begin() + (n - nfree));
    Mapping m(g.size(), pos);
    std::vector<Gate> gates;
    for (int i = 0; i < ng; ++i) gates.push_back({i, 2 * i, 2 * i + 1});
    return {std::move(g), std::move(m), std::move(gates)};
}

std::vector<std::uint8_t> as_vector(const BlockMask& b) { return std::vector<std::uint8_t>(b.begin(), b.end()); }

void expect_valid_layer(const RoutingGraph& g, const Mapping& m, const LayerRouting& lr, std::size_t gate_total) {
    std::vector<int> used(g.size(), 0);
    for (const auto& r : lr.layer.routes) {
        ASSERT_GE(r.path.size(), 3u);
        EXPECT_EQ(r.ancilla, r.path[1]);
        for (std::size_t k = 0; k + 1 < r.path.size(); ++k) EXPECT_TRUE(oracle::adjacent(g, r.path[k], r.path[k + 1]));
        for (std::size_t k = 1; k + 1 < r.path.size(); ++k) EXPECT_FALSE(m.occupied(r.path[k]));
        for (VertexId v : r.path) EXPECT_EQ(used[v]++, 0) << "vertex " << v << " reused";
    }
    EXPECT_EQ(lr.layer.routes.size() + lr.unrouted.size(), gate_total);
}

}  // namespace

TEST(ShortestFreePath, AdjacentEndpointsNeedInteriorAncilla) {
    RoutingGraph g = open_grid(4, 4);
    BlockMask blocked(g.size(), 0);
    const VertexId a = g.id_at(1, 1), b = g.id_at(1, 2);
    auto p = shortest_free_path(g, a, b, blocked);
    ASSERT_TRUE(p);
    // The honeycomb has no triangles: the detour is the rest of a hexagon.
    EXPECT_EQ(p->size(), 6u);
    EXPECT_EQ(p->front(), a);
    EXPECT_EQ(p->back(), b);
}

TEST(ShortestFreePath, SurroundedTarget) {
    RoutingGraph g = open_grid(5, 5);
    BlockMask blocked(g.size(), 0);
    const VertexId dst = g.id_at(2, 2);
    for (VertexId w : g.neighbors(dst)) blocked[w] = 1;
    EXPECT_FALSE(shortest_free_path(g, g.id_at(0, 0), dst, blocked));
    EXPECT_THROW(shortest_free_path(g, dst, dst, blocked), std::invalid_argument);
    EXPECT_THROW(shortest_free_path(g, dst, 99, blocked), std::out_of_range);
    EXPECT_THROW(shortest_free_path(g, 0, 1, BlockMask(3, 0)), std::invalid_argument);
}

TEST(ShortestFreePath, MatchesExhaustiveSearchOnSmallGraphs) {
    std::mt19937_64 rng(8);
    int checked = 0, found = 0;
    while (checked < 1000) {
        std::uniform_int_distribution<int> dim(2, 6);
        const int rows = dim(rng), cols = dim(rng);
        if (rows * cols < 3) continue;
        RoutingGraph g = open_grid(rows, cols);
        std::uniform_int_distribution<VertexId> vd(0, VertexId(g.size()) - 1);
        const VertexId s = vd(rng), t = vd(rng);
        if (s == t) continue;
        // Keep at most 12 free vertices besides the endpoints.
        std::vector<VertexId> others;
        for (VertexId v = 0; v < VertexId(g.size()); ++v)
            if (v != s && v != t) others.push_back(v);
        std::shuffle(others.begin(), others.end(), rng);
        const int cap = std::min<int>(12, int(others.size()));
        std::uniform_int_distribution<int> nf(std::min(4, cap), cap);
        const int nfree = nf(rng);
        BlockMask blocked(g.size(), 0);
        for (std::size_t i = std::size_t(nfree); i < others.size(); ++i) blocked[others[i]] = 1;
        // Endpoints may themselves be marked blocked (they are data patches).
        blocked[s] = std::uint8_t(rng() & 1);
        blocked[t] = std::uint8_t(rng() & 1);

        const auto got = shortest_free_path(g, s, t, blocked);
        const auto bfs = oracle::free_distance(g, s, t, as_vector(blocked));
        const auto exact = oracle::best_path(g, s, t, as_vector(blocked));
        ASSERT_EQ(bool(got), bool(bfs)) << "case " << checked;
        ASSERT_EQ(bool(got), bool(exact));
        if (got) {
            ++found;
            EXPECT_EQ(int(got->size()) - 1, *bfs);
            EXPECT_EQ(*got, *exact);
        }
        ++checked;
    }
    EXPECT_GT(found, 300);
}

TEST(ShortestFreePath, LargerGridAgainstBfs) {
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 300; ++trial) {
        RoutingGraph g = open_grid(8, 8);
        BlockMask blocked(g.size(), 0);
        for (auto& b : blocked) b = std::bernoulli_distribution(0.3)(rng);
        std::uniform_int_distribution<VertexId> vd(0, 63);
        VertexId s = vd(rng), t = vd(rng);
        if (s == t) continue;
        auto got = shortest_free_path(g, s, t, blocked);
        auto bfs = oracle::free_distance(g, s, t, as_vector(blocked));
        ASSERT_EQ(bool(got), bool(bfs));
        if (got) EXPECT_EQ(int(got->size()) - 1, *bfs);
    }
}

TEST(RouteLayer, DisjointGatesBothRouted) {
    RoutingGraph g = open_grid(6, 8);
    Mapping m(g.size(), {g.id_at(1, 1), g.id_at(1, 5), g.id_at(4, 1), g.id_at(4, 5)});
    std::vector<Gate> gates{{0, 0, 1}, {1, 2, 3}};
    auto lr = route_layer(g, m, gates);
    EXPECT_EQ(lr.layer.routes.size(), 2u);
    EXPECT_TRUE(lr.unrouted.empty());
    expect_valid_layer(g, m, lr, 2);
}

TEST(RouteLayer, FullyBlocked) {
    RoutingGraph g = open_grid(3, 3);
    std::vector<VertexId> all(9);
    std::iota(all.begin(), all.end(), 0);
    Mapping m(g.size(), all);
    std::vector<Gate> gates{{0, 0, 8}};
    auto lr = route_layer(g, m, gates);
    EXPECT_TRUE(lr.layer.routes.empty());
    ASSERT_EQ(lr.unrouted.size(), 1u);
    EXPECT_EQ(lr.unrouted[0], gates[0]);
}

TEST(RouteLayer, CrossingLayerRoutesOneGate) {
    RoutingGraph g = fixture::crossing_graph();
    Mapping m = fixture::crossing_mapping(g);
    LayeredCircuit c = fixture::crossing_circuit();
    auto first = route_layer(g, m, c.layers[0]);
    EXPECT_EQ(first.layer.routes.size(), 2u);
    auto second = route_layer(g, m, c.layers[1]);
    EXPECT_EQ(second.layer.routes.size(), 1u);
    EXPECT_EQ(second.unrouted.size(), 1u);
    expect_valid_layer(g, m, second, 2);
}

TEST(RouteLayer, AgainstExhaustiveDisjointPaths) {
    std::mt19937_64 rng(31);
    int exact_cases = 0, crossings = 0;
    for (int trial = 0; trial < 400; ++trial) {
        SmallInstance in = small_instance(rng, 12, 3);
        auto lr = route_layer(in.graph, in.mapping, in.gates);
        expect_valid_layer(in.graph, in.mapping, lr, in.gates.size());

        std::vector<std::pair<VertexId, VertexId>> terms;
        for (const auto& gt : in.gates) terms.push_back({in.mapping.position(gt.control), in.mapping.position(gt.target)});
        const int best = oracle::max_disjoint(in.graph, terms, as_vector(occupancy_mask(in.graph, in.mapping)));
        const int got = int(lr.layer.routes.size());
        EXPECT_LE(got, best);
        // Greedy never stalls while something is routable.
        if (best >= 1) EXPECT_GE(got, 1);
        if (best <= 1) {
            EXPECT_EQ(got, best);
            ++exact_cases;
        }
        const auto occ = as_vector(occupancy_mask(in.graph, in.mapping));
        const bool each_alone = std::all_of(terms.begin(), terms.end(), [&](const auto& t) {
            return oracle::max_disjoint(in.graph, {t}, occ) == 1;
        });
        if (in.gates.size() == 2 && best == 1 && each_alone) {
            // A forced crossing needs exactly one extra routed layer.
            ++crossings;
            LayeredCircuit c{int(in.mapping.qubit_count()), {in.gates}};
            EXPECT_EQ(window_depth(in.graph, in.mapping, c.layers), 2);
        }
    }
    EXPECT_GT(exact_cases, 50);
    EXPECT_GT(crossings, 0);
}

TEST(RouteStatic, SingleGate) {
    RoutingGraph g = open_grid(4, 4);
    Mapping m(g.size(), {g.id_at(1, 1), g.id_at(2, 3)});
    LayeredCircuit c{2, {{{0, 0, 1}}}};
    Schedule s = route_static(g, m, c);
    EXPECT_EQ(s.depth(), 1u);
    EXPECT_EQ(s.final_mapping, m);
    EXPECT_TRUE(check_schedule(g, m, c, s).empty());
}

TEST(RouteStatic, CrossingNeedsThreeLayers) {
    RoutingGraph g = fixture::crossing_graph();
    Mapping m = fixture::crossing_mapping(g);
    LayeredCircuit c = fixture::crossing_circuit();
    Schedule s = route_static(g, m, c);
    EXPECT_EQ(s.depth(), 3u);
    EXPECT_TRUE(check_schedule(g, m, c, s).empty());
    EXPECT_EQ(s.gate_counts(), (std::vector<std::size_t>{2, 1, 1}));
}

TEST(RouteStatic, UnroutableGateReported) {
    RoutingGraph g = open_grid(3, 3);
    std::vector<VertexId> all(9);
    std::iota(all.begin(), all.end(), 0);
    Mapping m(g.size(), all);
    LayeredCircuit c{9, {{{0, 0, 8}}}};
    try {
        route_static(g, m, c);
        FAIL() << "expected RoutingError";
    } catch (const RoutingError& e) {
        EXPECT_EQ(e.gates(), std::vector<GateId>{0});
    }
    EXPECT_FALSE(window_depth(g, m, c.layers));
    EXPECT_THROW(route_window(g, m, c.layers), RoutingError);
}

TEST(RouteStatic, PropertiesOnRandomLayouts) {
    const LayoutName layouts[] = {LayoutName::Single, LayoutName::Pair, LayoutName::Triple, LayoutName::Hex};
    for (LayoutName l : layouts)
        for (std::uint64_t s = 0; s < 3; ++s) {
            Layout lay = build_layout(l, 40, s);
            LayeredCircuit c = random_circuit(40, 6, 12, s + 100);
            Schedule sch = route_static(lay.graph, lay.mapping, c);
            EXPECT_TRUE(check_schedule(lay.graph, lay.mapping, c, sch).empty());
            EXPECT_GE(sch.depth(), logical_depth(c));
            EXPECT_EQ(sch.final_mapping, lay.mapping);
            std::size_t total = 0;
            for (auto n : sch.gate_counts()) total += n;
            EXPECT_EQ(total, c.gate_count());
            EXPECT_EQ(schedule_to_json(sch).dump(), schedule_to_json(route_static(lay.graph, lay.mapping, c)).dump());
        }
}

TEST(RouteWindow, Bounds) {
    RoutingGraph g = open_grid(6, 8);
    Mapping m(g.size(), {g.id_at(1, 1), g.id_at(1, 5), g.id_at(4, 1), g.id_at(4, 5)});
    std::vector<Layer> layers{{{0, 0, 1}, {1, 2, 3}}, {{2, 0, 2}}, {{3, 1, 3}}};
    EXPECT_EQ(route_window(g, m, layers).depth(), 3);
    EXPECT_EQ(window_depth(g, m, layers), 3);
    EXPECT_EQ(route_window(g, m, {}).depth(), 0);
    EXPECT_EQ(window_depth(g, m, {}), 0);
    EXPECT_EQ(window_depth(g, m, layers, 1), 2);

    RoutingGraph cg = fixture::crossing_graph();
    Mapping cm = fixture::crossing_mapping(cg);
    LayeredCircuit c = fixture::crossing_circuit();
    EXPECT_EQ(window_depth(cg, cm, {c.layers[1]}), 2);
}

TEST(CheckSchedule, DetectsCorruption) {
    Layout lay = build_layout(LayoutName::Pair, 30, 4);
    LayeredCircuit c = random_circuit(30, 5, 6, 4);
    Schedule good = route_static(lay.graph, lay.mapping, c);
    ASSERT_TRUE(check_schedule(lay.graph, lay.mapping, c, good).empty());

    Schedule dropped = good;
    dropped.layers[0].routes.pop_back();
    EXPECT_FALSE(check_schedule(lay.graph, lay.mapping, c, dropped).empty());

    Schedule dup = good;
    dup.layers.back().routes.push_back(good.layers[0].routes[0]);
    EXPECT_FALSE(check_schedule(lay.graph, lay.mapping, c, dup).empty());

    Schedule direct = good;
    auto& p = direct.layers[0].routes[0].path;
    p.erase(p.begin() + 1, p.end() - 1);
    EXPECT_FALSE(check_schedule(lay.graph, lay.mapping, c, direct).empty());

    Schedule shared = good;
    ASSERT_GE(shared.layers[0].routes.size(), 2u);
    shared.layers[0].routes[1].path[1] = shared.layers[0].routes[0].path[1];
    EXPECT_FALSE(check_schedule(lay.graph, lay.mapping, c, shared).empty());

    Schedule moved = good;
    moved.final_mapping = apply_teleport(good.final_mapping, 0, lay.graph.id_at(0, 0));
    EXPECT_FALSE(check_schedule(lay.graph, lay.mapping, c, moved).empty());
}

TEST(ScheduleJson, Shape) {
    RoutingGraph g = fixture::crossing_graph();
    Mapping m = fixture::crossing_mapping(g);
    Schedule s = route_static(g, m, fixture::crossing_circuit());
    auto j = schedule_to_json(s);
    EXPECT_EQ(j["depth"], 3);
    EXPECT_EQ(j["layers"].size(), 3u);
    EXPECT_EQ(j["final_mapping"].get<std::vector<int>>(), m.positions());
    const auto& r = j["layers"][0]["routes"][0];
    EXPECT_TRUE(r.contains("gate"));
    EXPECT_TRUE(r.contains("kind"));
    EXPECT_TRUE(r.contains("path"));
    EXPECT_TRUE(r.contains("ancilla"));
}
