#include <gtest/gtest.h>

#include <random>

#include "crossing_fixture.hpp"
#include "oracles.hpp"
#include "teleroute/circuit.hpp"

using namespace teleroute;

TEST(RandomCircuit, ShapeAndSupport) {
    LayeredCircuit c = random_circuit(120, 8, 40, 1);
    EXPECT_EQ(logical_depth(c), 40u);
    EXPECT_EQ(c.gate_count(), 320u);
    EXPECT_TRUE(c.well_formed());
    for (const auto& l : c.layers) EXPECT_EQ(l.size(), 8u);

    LayeredCircuit two = random_circuit(2, 1, 1, 9);
    ASSERT_EQ(two.layers.size(), 1u);
    ASSERT_EQ(two.layers[0].size(), 1u);
    const Gate& g = two.layers[0][0];
    EXPECT_TRUE((g.control == 0 && g.target == 1) || (g.control == 1 && g.target == 0));

    EXPECT_EQ(random_circuit(60, 5, 100, 3).gate_count(), 500u);
    EXPECT_EQ(logical_depth(random_circuit(120, 8, 320, 3)), 320u);
    EXPECT_THROW(random_circuit(5, 3, 1, 0), std::invalid_argument);
}

TEST(RandomCircuit, SeededAndUniformish) {
    EXPECT_EQ(random_circuit(30, 5, 20, 77), random_circuit(30, 5, 20, 77));
    EXPECT_NE(random_circuit(30, 5, 20, 77), random_circuit(30, 5, 20, 78));
    // Each qubit appears as an operand with probability 2g/q per layer.
    LayeredCircuit c = random_circuit(20, 5, 4000, 5);
    std::vector<int> hits(20, 0);
    for (const auto& l : c.layers)
        for (const auto& g : l) {
            ++hits[g.control];
            ++hits[g.target];
        }
    for (int h : hits) EXPECT_NEAR(h / 4000.0, 0.5, 0.05);
}

TEST(ParseCircuit, AsapLayering) {
    EXPECT_EQ(parse_circuit("qubits 2\ncnot 0 1\ncnot 0 1").layers.size(), 2u);
    EXPECT_EQ(parse_circuit("qubits 4\ncnot 0 1\ncnot 2 3").layers.size(), 1u);
    // A separator keeps later gates below it even when they are independent.
    EXPECT_EQ(parse_circuit("qubits 4\ncnot 0 1\n---\ncnot 2 3\n").layers.size(), 2u);
    EXPECT_EQ(logical_depth(parse_circuit("qubits 3\n")), 0u);
}

TEST(ParseCircuit, CrossingExample) {
    LayeredCircuit c = fixture::crossing_circuit();
    ASSERT_EQ(logical_depth(c), 2u);
    ASSERT_EQ(c.layers[0].size(), 2u);
    EXPECT_EQ(c.layers[0][0].control, 2);
    EXPECT_EQ(c.layers[0][0].target, 3);
    EXPECT_EQ(c.layers[0][1].control, 0);
    EXPECT_EQ(c.layers[0][1].target, 1);
    EXPECT_EQ(c.layers[1][0].control, 0);
    EXPECT_EQ(c.layers[1][0].target, 3);
    EXPECT_EQ(c.layers[1][1].control, 2);
    EXPECT_EQ(c.layers[1][1].target, 1);
}

TEST(ParseCircuit, CommentsAndWhitespace) {
    LayeredCircuit c = parse_circuit("# header\n  qubits 3  \n\ncnot 0 2 # trailing\r\n\tcnot 1 0\n");
    EXPECT_EQ(c.qubits, 3);
    EXPECT_EQ(c.gate_count(), 2u);
    EXPECT_EQ(c.layers.size(), 2u);
}

TEST(ParseCircuit, Errors) {
    auto line_of = [](const char* src) {
        try {
            parse_circuit(src);
        } catch (const CircuitParseError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("cnot 0 1\n"), 1);
    EXPECT_EQ(line_of("qubits 2\ncnot 0 2\n"), 2);
    EXPECT_EQ(line_of("qubits 2\ncnot 1 1\n"), 2);
    EXPECT_EQ(line_of("qubits 2\n\ncnot 0 x\n"), 3);
    EXPECT_EQ(line_of("qubits 2\nswap 0 1\n"), 2);
    EXPECT_EQ(line_of("qubits 2\nqubits 3\n"), 2);
    EXPECT_EQ(line_of("qubits 0\n"), 1);
    EXPECT_EQ(line_of("qubits 2\ncnot 0 1 1\n"), 2);
    EXPECT_NE(line_of("\n\n"), -1);
}

TEST(ParseCircuit, RoundTrip) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        LayeredCircuit c = random_circuit(16, 1 + int(s % 8), 25, s);
        std::string text = serialize_circuit(c);
        LayeredCircuit back = parse_circuit(text);
        EXPECT_EQ(back, c);
        EXPECT_EQ(serialize_circuit(back), text);
    }
}

TEST(PushGate, Examples) {
    LayeredCircuit c{3, {{{0, 0, 1}}, {{1, 1, 2}}}};
    push_gate(c, 0, 0);
    ASSERT_EQ(c.layers.size(), 3u);
    EXPECT_TRUE(c.layers[0].empty());
    EXPECT_EQ(c.layers[1], (Layer{{0, 0, 1}}));
    EXPECT_EQ(c.layers[2], (Layer{{1, 1, 2}}));

    LayeredCircuit d{4, {{{0, 0, 1}}, {{1, 2, 3}}}};
    push_gate(d, 0, 0);
    ASSERT_EQ(d.layers.size(), 2u);
    EXPECT_EQ(d.layers[1], (Layer{{1, 2, 3}, {0, 0, 1}}));

    EXPECT_THROW(push_gate(d, 5, 1), std::invalid_argument);
    EXPECT_THROW(push_gate(d, 0, 7), std::out_of_range);
}

TEST(PushGate, RandomPushesPreserveDependencies) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        LayeredCircuit c = random_circuit(12, 1 + trial % 6, 15, rng());
        const auto before = oracle::qubit_orders(c);
        const std::size_t gates = c.gate_count();
        for (int step = 0; step < 60; ++step) {
            std::uniform_int_distribution<std::size_t> pick_layer(0, c.layers.size() - 1);
            std::size_t l = pick_layer(rng);
            if (c.layers[l].empty()) continue;
            std::uniform_int_distribution<std::size_t> pick_gate(0, c.layers[l].size() - 1);
            push_gate(c, c.layers[l][pick_gate(rng)].id, l);
            ASSERT_TRUE(c.well_formed());
        }
        EXPECT_EQ(c.gate_count(), gates);
        EXPECT_EQ(oracle::qubit_orders(c), before);
    }
}
