#include "teleroute/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

namespace teleroute {

std::size_t LayeredCircuit::gate_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.size();
    return n;
}

bool LayeredCircuit::well_formed() const {
    std::unordered_set<GateId> ids;
    std::vector<char> used(std::size_t(std::max(qubits, 0)), 0);
    for (const auto& layer : layers) {
        std::fill(used.begin(), used.end(), 0);
        for (const auto& g : layer) {
            if (g.control == g.target) return false;
            if (g.control < 0 || g.control >= qubits || g.target < 0 || g.target >= qubits) return false;
            if (used[g.control] || used[g.target]) return false;
            used[g.control] = used[g.target] = 1;
            if (!ids.insert(g.id).second) return false;
        }
    }
    return true;
}

LayeredCircuit random_circuit(int qubits, int gates_per_layer, int depth, std::uint64_t seed) {
    if (gates_per_layer < 0 || depth < 0) throw std::invalid_argument("negative gate or layer count");
    if (2 * gates_per_layer > qubits)
        throw std::invalid_argument("cannot place " + std::to_string(gates_per_layer) + " disjoint gates on " +
                                    std::to_string(qubits) + " qubits");
    LayeredCircuit c;
    c.qubits = qubits;
    c.layers.reserve(std::size_t(depth));
    std::mt19937_64 rng(seed);
    std::vector<QubitLabel> pool(static_cast<std::size_t>(qubits));
    GateId next = 0;
    for (int d = 0; d < depth; ++d) {
        std::iota(pool.begin(), pool.end(), 0);
        // Partial Fisher-Yates: the first 2g entries are a uniform ordered sample.
        for (int i = 0; i < 2 * gates_per_layer; ++i) {
            std::uniform_int_distribution<int> pick(i, qubits - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        Layer layer;
        for (int i = 0; i < gates_per_layer; ++i) layer.push_back({next++, pool[2 * i], pool[2 * i + 1]});
        c.layers.push_back(std::move(layer));
    }
    return c;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

int parse_int(std::string_view tok, int line) {
    int v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw CircuitParseError(line, "expected integer, got '" + std::string(tok) + "'");
    return v;
}

}  // namespace

LayeredCircuit parse_circuit(std::string_view text) {
    LayeredCircuit c;
    bool have_header = false;
    // ASAP layering: a gate lands one past the last layer touching either qubit,
    // but never above the floor set by the most recent separator.
    std::vector<std::size_t> ready;
    std::size_t floor = 0;
    GateId next = 0;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        auto tok = split_ws(line);
        if (tok[0] == "qubits") {
            if (have_header) throw CircuitParseError(line_no, "duplicate qubits header");
            if (tok.size() != 2) throw CircuitParseError(line_no, "expected 'qubits N'");
            c.qubits = parse_int(tok[1], line_no);
            if (c.qubits < 1) throw CircuitParseError(line_no, "qubit count must be positive");
            ready.assign(std::size_t(c.qubits), 0);
            have_header = true;
        } else if (tok[0] == "---") {
            if (tok.size() != 1) throw CircuitParseError(line_no, "unexpected tokens after separator");
            floor = c.layers.size();
        } else if (tok[0] == "cnot") {
            if (!have_header) throw CircuitParseError(line_no, "gate before 'qubits' header");
            if (tok.size() != 3) throw CircuitParseError(line_no, "expected 'cnot C T'");
            int ctrl = parse_int(tok[1], line_no);
            int tgt = parse_int(tok[2], line_no);
            if (ctrl < 0 || ctrl >= c.qubits || tgt < 0 || tgt >= c.qubits)
                throw CircuitParseError(line_no, "qubit index out of range");
            if (ctrl == tgt) throw CircuitParseError(line_no, "control equals target");
            std::size_t layer = std::max({floor, ready[ctrl], ready[tgt]});
            if (layer >= c.layers.size()) c.layers.resize(layer + 1);
            c.layers[layer].push_back({next++, ctrl, tgt});
            ready[ctrl] = ready[tgt] = layer + 1;
        } else {
            throw CircuitParseError(line_no, "unknown directive '" + std::string(tok[0]) + "'");
        }
        if (eol == text.size()) break;
    }
    if (!have_header) throw CircuitParseError(line_no, "missing 'qubits N' header");
    return c;
}

std::string serialize_circuit(const LayeredCircuit& c) {
    std::ostringstream out;
    out << "qubits " << c.qubits << '\n';
    for (std::size_t i = 0; i < c.layers.size(); ++i) {
        if (i > 0) out << "---\n";
        for (const auto& g : c.layers[i]) out << "cnot " << g.control << ' ' << g.target << '\n';
    }
    return out.str();
}

void push_gate(LayeredCircuit& c, GateId id, std::size_t from_layer) {
    if (from_layer >= c.layers.size()) throw std::out_of_range("layer index out of range");
    auto& src = c.layers[from_layer];
    auto it = std::find_if(src.begin(), src.end(), [id](const Gate& g) { return g.id == id; });
    if (it == src.end())
        throw std::invalid_argument("gate " + std::to_string(id) + " not in layer " + std::to_string(from_layer));
    Gate gate = *it;
    src.erase(it);
    const std::size_t to = from_layer + 1;
    if (to == c.layers.size()) c.layers.emplace_back();
    // Cascade first so the destination has room; dependents keep their order.
    std::vector<GateId> blockers;
    for (const auto& g : c.layers[to])
        if (g.overlaps(gate)) blockers.push_back(g.id);
    for (GateId b : blockers) push_gate(c, b, to);
    c.layers[to].push_back(gate);
}

}  // namespace teleroute
