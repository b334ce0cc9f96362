#include "teleroute/routing_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include <nlohmann/json.hpp>

namespace teleroute {

namespace {

LayoutSpec make_spec(LayoutName name, int num, int den, int cluster, std::vector<std::string_view> rows) {
    LayoutSpec s;
    s.name = name;
    s.density_num = num;
    s.density_den = den;
    s.cluster_size = cluster;
    s.tile_rows = int(rows.size());
    s.tile_cols = int(rows.front().size());
    for (auto row : rows)
        for (char ch : row) s.mask.push_back(ch == 'D');
    return s;
}

// 'D' marks a data patch. Clusters inside a tile never touch clusters of a
// neighbouring tile, and the ancilla space of any tiling stays connected.
const std::array<LayoutSpec, 4>& all_specs() {
    static const std::array<LayoutSpec, 4> specs = {
        make_spec(LayoutName::Single, 1, 8, 1,
                  {"D...",
                   "....",
                   "..D.",
                   "...."}),
        make_spec(LayoutName::Pair, 1, 4, 2,
                  {"D...",
                   "D...",
                   "..D.",
                   "..D."}),
        make_spec(LayoutName::Triple, 3, 10, 3,
                  {"DD...DD...",
                   "D.....D...",
                   "..DD...DD.",
                   "..D.....D."}),
        make_spec(LayoutName::Hex, 3, 7, 6,
                  {"..DDD.....DDD.",
                   "..DDD.....DDD.",
                   "DDD...DDD.....",
                   "DDD...DDD....."}),
    };
    return specs;
}

}  // namespace

int LayoutSpec::data_per_tile() const { return int(std::count(mask.begin(), mask.end(), true)); }

LayoutName parse_layout_name(std::string_view name) {
    if (name == "single") return LayoutName::Single;
    if (name == "pair") return LayoutName::Pair;
    if (name == "triple") return LayoutName::Triple;
    if (name == "hex") return LayoutName::Hex;
    throw std::invalid_argument("unknown layout '" + std::string(name) + "' (expected single|pair|triple|hex)");
}

std::string_view layout_name_str(LayoutName name) {
    switch (name) {
        case LayoutName::Single: return "single";
        case LayoutName::Pair: return "pair";
        case LayoutName::Triple: return "triple";
        case LayoutName::Hex: return "hex";
    }
    return "?";
}

const LayoutSpec& layout_spec(LayoutName name) { return all_specs()[std::size_t(name)]; }

RoutingGraph::RoutingGraph(int rows, int cols, std::vector<Role> roles, std::optional<LayoutName> layout)
    : rows_(rows), cols_(cols), layout_(layout) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("graph dimensions must be positive");
    if (roles.size() != std::size_t(rows) * cols) throw std::invalid_argument("role vector does not match dimensions");
    vertices_.reserve(roles.size());
    neighbor_lists_.resize(roles.size());
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            VertexId id = id_at(r, c);
            vertices_.push_back({id, r, c, roles[id]});
            auto& nb = neighbor_lists_[id];
            if (c > 0) nb.push_back(id_at(r, c - 1));
            if (c + 1 < cols) nb.push_back(id_at(r, c + 1));
            if ((r + c) % 2 == 0) {
                if (r + 1 < rows) nb.push_back(id_at(r + 1, c));
            } else if (r > 0) {
                nb.push_back(id_at(r - 1, c));
            }
            std::sort(nb.begin(), nb.end());
        }
    }
    adj_start_.reserve(vertices_.size() + 1);
    adj_start_.push_back(0);
    for (const auto& nb : neighbor_lists_) {
        adj_.insert(adj_.end(), nb.begin(), nb.end());
        adj_start_.push_back(adj_.size());
    }
}

const PatchVertex& RoutingGraph::vertex(VertexId v) const {
    if (!contains(v)) throw std::out_of_range("unknown vertex " + std::to_string(v));
    return vertices_[v];
}

const std::vector<VertexId>& RoutingGraph::neighbors(VertexId v) const {
    if (!contains(v)) throw std::out_of_range("unknown vertex " + std::to_string(v));
    return neighbor_lists_[v];
}

std::vector<VertexId> RoutingGraph::canonical_data_vertices() const {
    std::vector<VertexId> out;
    for (const auto& v : vertices_)
        if (v.canonical_role == Role::Data) out.push_back(v.id);
    return out;
}

Mapping::Mapping(std::size_t vertex_count, const std::vector<VertexId>& positions)
    : position_(positions), occupant_(vertex_count, kNoLabel) {
    for (std::size_t label = 0; label < positions.size(); ++label) {
        VertexId v = positions[label];
        if (v < 0 || std::size_t(v) >= vertex_count) throw std::invalid_argument("mapping position out of range");
        if (occupant_[v] != kNoLabel) throw std::invalid_argument("two labels mapped to vertex " + std::to_string(v));
        occupant_[v] = QubitLabel(label);
    }
}

VertexId Mapping::position(QubitLabel label) const {
    if (label < 0 || std::size_t(label) >= position_.size())
        throw std::out_of_range("unknown qubit label " + std::to_string(label));
    return position_[label];
}

void Mapping::teleport(QubitLabel label, VertexId dest) {
    VertexId src = position(label);
    if (dest < 0 || std::size_t(dest) >= occupant_.size()) throw std::out_of_range("unknown vertex " + std::to_string(dest));
    if (occupant_[dest] != kNoLabel)
        throw std::invalid_argument("teleport destination " + std::to_string(dest) + " is occupied");
    occupant_[src] = kNoLabel;
    occupant_[dest] = label;
    position_[label] = dest;
}

bool Mapping::consistent() const {
    std::size_t placed = 0;
    for (std::size_t v = 0; v < occupant_.size(); ++v) {
        QubitLabel l = occupant_[v];
        if (l == kNoLabel) continue;
        ++placed;
        if (l < 0 || std::size_t(l) >= position_.size() || position_[l] != VertexId(v)) return false;
    }
    return placed == position_.size();
}

Mapping apply_teleport(const Mapping& m, QubitLabel label, VertexId dest) {
    Mapping out = m;
    out.teleport(label, dest);
    return out;
}

namespace {

// Roles of the tiling cropped to `rows` x `cols` interior vertices. Clusters cut by
// the window edge are dropped so every kept cluster has its full shape.
std::vector<Role> window_roles(const LayoutSpec& spec, const LayoutWindow& w) {
    const int rows = w.rows, cols = w.cols;
    const int R = rows + 2, C = cols + 2;
    std::vector<Role> roles(std::size_t(R) * C, Role::Ancilla);
    // An even total offset keeps r + c parity, so clusters keep their shape.
    for (int r = 1; r <= rows; ++r)
        for (int c = 1; c <= cols; ++c)
            if (spec.mask[std::size_t((r - 1 + w.phase_r) % spec.tile_rows) * spec.tile_cols +
                          std::size_t((c - 1 + w.phase_c) % spec.tile_cols)])
                roles[std::size_t(r) * C + c] = Role::Data;
    if (spec.cluster_size == 1) return roles;

    RoutingGraph g(R, C, roles);
    std::vector<char> seen(roles.size(), 0);
    std::vector<VertexId> comp;
    for (VertexId v = 0; v < VertexId(roles.size()); ++v) {
        if (roles[v] != Role::Data || seen[v]) continue;
        comp.assign(1, v);
        seen[v] = 1;
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (VertexId u : g.neighbors(comp[i]))
                if (roles[u] == Role::Data && !seen[u]) {
                    seen[u] = 1;
                    comp.push_back(u);
                }
        if (int(comp.size()) != spec.cluster_size)
            for (VertexId u : comp) roles[u] = Role::Ancilla;
    }
    return roles;
}

}  // namespace

RoutingGraph window_graph(const LayoutSpec& spec, const LayoutWindow& w) {
    if (w.rows < 1 || w.cols < 1) throw std::invalid_argument("window dimensions must be positive");
    if (w.phase_r < 0 || w.phase_c < 0 || w.phase_r >= spec.tile_rows || w.phase_c >= spec.tile_cols ||
        (w.phase_r + w.phase_c) % 2 != 0)
        throw std::invalid_argument("window phase must lie in the tile and have even parity");
    return RoutingGraph(w.rows + 2, w.cols + 2, window_roles(spec, w), spec.name);
}

RoutingGraph tiled_graph(const LayoutSpec& spec, int tiles_r, int tiles_c) {
    return window_graph(spec, {tiles_r * spec.tile_rows, tiles_c * spec.tile_cols, 0, 0});
}

bool layout_routable(const RoutingGraph& g) {
    std::vector<char> seen(g.size(), 0);
    VertexId start = kNoVertex;
    std::size_t free_count = 0;
    for (VertexId v = 0; v < VertexId(g.size()); ++v) {
        if (g.is_canonical_data(v)) {
            bool has_free = false;
            for (VertexId u : g.neighbors(v)) has_free |= !g.is_canonical_data(u);
            if (!has_free) return false;
        } else {
            ++free_count;
            if (start == kNoVertex) start = v;
        }
    }
    if (start == kNoVertex) return false;
    std::vector<VertexId> stack{start};
    seen[start] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        ++reached;
        for (VertexId u : g.neighbors(v))
            if (!seen[u] && !g.is_canonical_data(u)) {
                seen[u] = 1;
                stack.push_back(u);
            }
    }
    return reached == free_count;
}

LayoutWindow layout_window(LayoutName name, int qubits) {
    if (qubits < 1) throw std::invalid_argument("qubit count must be at least 1");
    const LayoutSpec& spec = layout_spec(name);
    struct Option {
        long area;
        double aspect;
        LayoutWindow w;
    };
    std::vector<Option> options;
    // Interior area needed is about q / c; allow flat windows but stop well past square.
    const int side = int(std::ceil(std::sqrt(double(qubits) * spec.density_den / spec.density_num)));
    const int max_rows = 3 * side + 2 * spec.tile_rows;
    const int max_cols = 64 * (side + spec.tile_cols);
    for (int pr = 0; pr < spec.tile_rows; ++pr)
        for (int pc = pr % 2; pc < spec.tile_cols; pc += 2)
            for (int rows = 1; rows <= max_rows; ++rows) {
                auto data_count = [&](int cols) {
                    auto roles = window_roles(spec, {rows, cols, pr, pc});
                    return int(std::count(roles.begin(), roles.end(), Role::Data));
                };
                int hi = spec.tile_cols;
                while (hi < max_cols && data_count(hi) < qubits) hi *= 2;
                if (data_count(hi) < qubits) continue;
                int lo = 0;  // data_count(lo) < qubits <= data_count(hi)
                while (hi - lo > 1) {
                    int mid = (lo + hi) / 2;
                    (data_count(mid) >= qubits ? hi : lo) = mid;
                }
                options.push_back({long(rows + 2) * (hi + 2), std::abs(std::log(double(rows + 2) / double(hi + 2))),
                                   {rows, hi, pr, pc}});
            }
    std::sort(options.begin(), options.end(), [](const Option& a, const Option& b) {
        if (a.area != b.area) return a.area < b.area;
        if (std::abs(a.aspect - b.aspect) > 1e-12) return a.aspect < b.aspect;
        return std::tie(a.w.rows, a.w.phase_r, a.w.phase_c) < std::tie(b.w.rows, b.w.phase_r, b.w.phase_c);
    });
    // Smallest window within an aspect bound, widening the bound only if nothing fits.
    for (double bound : {1.25, 1.5, 2.0, 1e9})
        for (const auto& o : options)
            if (o.aspect <= std::log(bound) + 1e-12 && layout_routable(window_graph(spec, o.w))) return o.w;
    throw std::runtime_error("no routable window found for layout " + std::string(layout_name_str(name)));
}

Layout build_layout(LayoutName name, int qubits, std::uint64_t seed) {
    RoutingGraph graph = window_graph(layout_spec(name), layout_window(name, qubits));
    std::vector<VertexId> data = graph.canonical_data_vertices();
    std::mt19937_64 rng(seed);
    std::shuffle(data.begin(), data.end(), rng);
    data.resize(std::size_t(qubits));
    Mapping mapping(graph.size(), data);
    return {std::move(graph), std::move(mapping)};
}

nlohmann::ordered_json graph_to_json(const RoutingGraph& g) {
    nlohmann::ordered_json vertices = nlohmann::ordered_json::array();
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& v : g.vertices()) {
        vertices.push_back({{"id", v.id},
                            {"row", v.row},
                            {"col", v.col},
                            {"role", v.canonical_role == Role::Data ? "data" : "ancilla"}});
        for (VertexId u : g.neighbors(v.id))
            if (v.id < u) edges.push_back({v.id, u});
    }
    nlohmann::ordered_json out;
    out["dims"] = {g.rows(), g.cols()};
    if (g.layout()) out["layout"] = layout_name_str(*g.layout());
    out["vertices"] = std::move(vertices);
    out["edges"] = std::move(edges);
    return out;
}

nlohmann::ordered_json mapping_to_json(const Mapping& m) { return m.positions(); }

}  // namespace teleroute
