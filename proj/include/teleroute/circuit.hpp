#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "teleroute/routing_graph.hpp"

namespace teleroute {

using GateId = std::int32_t;

struct Gate {
    GateId id = -1;
    QubitLabel control = kNoLabel;
    QubitLabel target = kNoLabel;

    [[nodiscard]] bool touches(QubitLabel q) const { return control == q || target == q; }
    [[nodiscard]] bool overlaps(const Gate& o) const { return touches(o.control) || touches(o.target); }

    friend bool operator==(const Gate&, const Gate&) = default;
};

using Layer = std::vector<Gate>;

/// CNOT circuit split into logical layers of pairwise disjoint gate support.
struct LayeredCircuit {
    int qubits = 0;
    std::vector<Layer> layers;

    [[nodiscard]] std::size_t gate_count() const;
    /// Disjoint support per layer, unique ids, operands in range.
    [[nodiscard]] bool well_formed() const;

    friend bool operator==(const LayeredCircuit&, const LayeredCircuit&) = default;
};

class CircuitParseError : public std::runtime_error {
public:
    CircuitParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

/// `depth` layers of `gates_per_layer` disjoint (control, target) pairs each, drawn
/// uniformly without replacement. Gate ids run 0..G-1 in layer order.
LayeredCircuit random_circuit(int qubits, int gates_per_layer, int depth, std::uint64_t seed);

/// Line format: `qubits N`, `cnot C T`, `---` separators, `#` comments. Sections
/// between separators are layered as-soon-as-possible; each separator starts a
/// fresh layer boundary that later gates never move above.
LayeredCircuit parse_circuit(std::string_view text);
std::string serialize_circuit(const LayeredCircuit& c);

/// Moves gate `id` from layer `from_layer` to the next one, cascading any gate there
/// that shares a qubit further down. Appends a layer when needed.
void push_gate(LayeredCircuit& c, GateId id, std::size_t from_layer);

inline std::size_t logical_depth(const LayeredCircuit& c) { return c.layers.size(); }

}  // namespace teleroute
