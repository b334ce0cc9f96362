#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace teleroute {

using VertexId = std::int32_t;
using QubitLabel = std::int32_t;

inline constexpr VertexId kNoVertex = -1;
inline constexpr QubitLabel kNoLabel = -1;

enum class Role : std::uint8_t { Data, Ancilla };

struct PatchVertex {
    VertexId id = kNoVertex;
    int row = 0;
    int col = 0;
    Role canonical_role = Role::Ancilla;
};

enum class LayoutName { Single, Pair, Triple, Hex };

/// Periodic data/ancilla mask. `mask[r * tile_cols + c]` is true for a data patch.
///
/// Tiles always have an even number of columns and rows so that stacking them on
/// the brick-wall honeycomb preserves which vertices carry vertical edges.
struct LayoutSpec {
    LayoutName name = LayoutName::Single;
    int density_num = 1;
    int density_den = 8;
    int tile_rows = 0;
    int tile_cols = 0;
    std::vector<bool> mask;
    int cluster_size = 1;

    [[nodiscard]] double density() const { return double(density_num) / density_den; }
    [[nodiscard]] int data_per_tile() const;
};

LayoutName parse_layout_name(std::string_view name);
std::string_view layout_name_str(LayoutName name);
const LayoutSpec& layout_spec(LayoutName name);

/// Honeycomb routing graph in brick-wall coordinates.
///
/// Vertex (r, c) has horizontal neighbours (r, c-1) and (r, c+1). The vertical edge
/// (r, c)-(r+1, c) exists iff r + c is even, so every interior vertex has degree 3.
class RoutingGraph {
public:
    RoutingGraph(int rows, int cols, std::vector<Role> roles, std::optional<LayoutName> layout = std::nullopt);

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] std::size_t size() const { return vertices_.size(); }
    [[nodiscard]] std::optional<LayoutName> layout() const { return layout_; }

    [[nodiscard]] const PatchVertex& vertex(VertexId v) const;
    [[nodiscard]] const std::vector<PatchVertex>& vertices() const { return vertices_; }
    [[nodiscard]] bool contains(VertexId v) const { return v >= 0 && std::size_t(v) < vertices_.size(); }
    [[nodiscard]] VertexId id_at(int row, int col) const { return row * cols_ + col; }
    [[nodiscard]] int row_of(VertexId v) const { return vertices_[v].row; }
    [[nodiscard]] int col_of(VertexId v) const { return vertices_[v].col; }

    /// Neighbours in ascending id order. Throws std::out_of_range for unknown vertices.
    [[nodiscard]] const std::vector<VertexId>& neighbors(VertexId v) const;

    /// Unchecked neighbour access for hot loops.
    [[nodiscard]] const VertexId* adj_begin(VertexId v) const { return adj_.data() + adj_start_[v]; }
    [[nodiscard]] const VertexId* adj_end(VertexId v) const { return adj_.data() + adj_start_[v + 1]; }

    [[nodiscard]] bool is_canonical_data(VertexId v) const { return vertices_[v].canonical_role == Role::Data; }
    [[nodiscard]] std::vector<VertexId> canonical_data_vertices() const;
    [[nodiscard]] std::size_t edge_count() const { return adj_.size() / 2; }

private:
    int rows_;
    int cols_;
    std::optional<LayoutName> layout_;
    std::vector<PatchVertex> vertices_;
    std::vector<std::vector<VertexId>> neighbor_lists_;
    std::vector<VertexId> adj_;
    std::vector<std::size_t> adj_start_;
};

/// Placement of qubit labels on vertices; `position` and `occupant` are kept mutually inverse.
class Mapping {
public:
    Mapping() = default;
    Mapping(std::size_t vertex_count, const std::vector<VertexId>& positions);

    [[nodiscard]] std::size_t qubit_count() const { return position_.size(); }
    [[nodiscard]] VertexId position(QubitLabel label) const;
    [[nodiscard]] QubitLabel occupant(VertexId v) const { return occupant_.at(v); }
    [[nodiscard]] bool occupied(VertexId v) const { return occupant_[v] != kNoLabel; }
    [[nodiscard]] const std::vector<VertexId>& positions() const { return position_; }
    [[nodiscard]] const std::vector<QubitLabel>& occupants() const { return occupant_; }

    /// Moves `label` to the free vertex `dest`. Throws std::invalid_argument if occupied.
    void teleport(QubitLabel label, VertexId dest);

    /// Checks the bijection invariant.
    [[nodiscard]] bool consistent() const;

    friend bool operator==(const Mapping&, const Mapping&) = default;

private:
    std::vector<VertexId> position_;
    std::vector<QubitLabel> occupant_;
};

/// Returns a copy of `m` with `label` teleported to `dest`.
Mapping apply_teleport(const Mapping& m, QubitLabel label, VertexId dest);

struct Layout {
    RoutingGraph graph;
    Mapping mapping;
};

/// Crops the layout's infinite tiling to the smallest near-square window holding
/// `qubits` complete clusters, adds a one-vertex ancilla border, and places labels
/// 0..q-1 on a seeded shuffle of the data vertices.
Layout build_layout(LayoutName name, int qubits, std::uint64_t seed);

/// Interior size of a crop of the tiling and the tile cell its first interior vertex
/// falls on (phase_r + phase_c even).
struct LayoutWindow {
    int rows = 0;
    int cols = 0;
    int phase_r = 0;
    int phase_c = 0;
};

/// The window build_layout uses for `qubits` data patches.
LayoutWindow layout_window(LayoutName name, int qubits);

/// Tiling cropped to the window plus border; clusters cut by the window edge
/// become ancilla patches.
RoutingGraph window_graph(const LayoutSpec& spec, const LayoutWindow& w);
RoutingGraph tiled_graph(const LayoutSpec& spec, int tiles_r, int tiles_c);

/// Every data vertex has a free neighbour and the ancilla space is connected.
bool layout_routable(const RoutingGraph& g);

nlohmann::ordered_json graph_to_json(const RoutingGraph& g);
nlohmann::ordered_json mapping_to_json(const Mapping& m);

}  // namespace teleroute
