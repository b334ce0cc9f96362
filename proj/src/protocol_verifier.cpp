#include "teleroute/protocol_verifier.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace teleroute::protocol {

namespace {

using Op2 = Eigen::Matrix<Complex, 2, 2>;

Op2 pauli_matrix(Pauli p) {
    Op2 m;
    if (p == Pauli::X)
        m << 0, 1, 1, 0;
    else
        m << 1, 0, 0, -1;
    return m;
}

Operator8 on_wires(const std::array<Op2, 3>& ops) {
    Operator8 out;
    for (int row = 0; row < 8; ++row)
        for (int col = 0; col < 8; ++col) {
            Complex v = 1;
            for (int w = 0; w < 3; ++w) {
                int shift = 2 - w;
                v *= ops[w]((row >> shift) & 1, (col >> shift) & 1);
            }
            out(row, col) = v;
        }
    return out;
}

Operator8 pauli_on(const Measurement& m) {
    std::array<Op2, 3> ops{Op2::Identity(), Op2::Identity(), Op2::Identity()};
    ops[int(m.first)] = pauli_matrix(m.pauli);
    if (m.second) ops[int(*m.second)] = pauli_matrix(m.pauli);
    return on_wires(ops);
}

Operator8 single_pauli(Pauli p, Wire w) {
    std::array<Op2, 3> ops{Op2::Identity(), Op2::Identity(), Op2::Identity()};
    ops[int(w)] = pauli_matrix(p);
    return on_wires(ops);
}

State2 eigenstate(Pauli p, int outcome) {
    const double s = 1.0 / std::sqrt(2.0);
    State2 v;
    if (p == Pauli::Z)
        v << (outcome ? 0 : 1), (outcome ? 1 : 0);
    else
        v << s, (outcome ? -s : s);
    return v;
}

State2 prep_state(AncillaPrep prep) { return prep == AncillaPrep::Zero ? eigenstate(Pauli::Z, 0) : eigenstate(Pauli::X, 0); }

Operator8 branch_op8(const ProtocolSpec& p, const std::array<int, 3>& outcomes) {
    Operator8 op = Operator8::Identity();
    for (std::size_t i = 0; i < p.measurements.size(); ++i) {
        Operator8 proj = (Operator8::Identity() + (outcomes[i] ? -1.0 : 1.0) * pauli_on(p.measurements[i])) / 2.0;
        op = proj * op;
    }
    for (const auto& c : p.corrections) {
        int parity = 0;
        for (int i = 0; i < 3; ++i)
            if ((c.outcomes >> i) & 1) parity ^= outcomes[i];
        if (parity) op = single_pauli(c.pauli, c.wire) * op;
    }
    return op;
}

// Contracts the measured wire against its post-measurement eigenstate and orders
// the remaining two wires as (logical control, logical target).
State4 logical_output(const ProtocolSpec& p, const Eigen::Matrix<Complex, 8, 1>& psi, int outcome) {
    const Wire measured = p.measured_wire();
    const State2 bra = eigenstate(p.measurements.back().pauli, outcome);
    State4 out = State4::Zero();
    for (int idx = 0; idx < 8; ++idx) {
        int bits[3] = {(idx >> 2) & 1, (idx >> 1) & 1, idx & 1};
        int oc = bits[int(p.out_control)];
        int ot = bits[int(p.out_target)];
        out(oc * 2 + ot) += std::conj(bra(bits[int(measured)])) * psi(idx);
    }
    return out;
}

Eigen::Matrix<Complex, 8, 1> embed(const State4& input, const State2& anc) {
    Eigen::Matrix<Complex, 8, 1> psi;
    for (int ct = 0; ct < 4; ++ct)
        for (int a = 0; a < 2; ++a) psi(ct * 2 + a) = input(ct) * anc(a);
    return psi;
}

std::array<int, 3> outcome_bits(int b) { return {(b >> 2) & 1, (b >> 1) & 1, b & 1}; }

}  // namespace

std::string_view protocol_name_str(ProtocolName p) {
    switch (p) {
        case ProtocolName::StandardCNOT: return "standard";
        case ProtocolName::CNOTTeleportTarget: return "tele-target";
        case ProtocolName::CNOTTeleportControl: return "tele-control";
    }
    return "?";
}

ProtocolName parse_protocol_name(std::string_view s) {
    if (s == "standard") return ProtocolName::StandardCNOT;
    if (s == "tele-target") return ProtocolName::CNOTTeleportTarget;
    if (s == "tele-control") return ProtocolName::CNOTTeleportControl;
    throw std::invalid_argument("unknown protocol '" + std::string(s) + "'");
}

// Outcome bits: 1 = first joint measurement, 2 = second, 4 = final single-wire one.
const ProtocolSpec& protocol_spec(ProtocolName p) {
    static const ProtocolSpec standard{
        ProtocolName::StandardCNOT,
        AncillaPrep::Plus,
        {{Pauli::Z, Wire::Control, Wire::Ancilla}, {Pauli::X, Wire::Ancilla, Wire::Target}, {Pauli::Z, Wire::Ancilla, {}}},
        {{Pauli::X, Wire::Target, 0b101}, {Pauli::Z, Wire::Control, 0b010}},
        Wire::Control,
        Wire::Target};
    static const ProtocolSpec tele_target{
        ProtocolName::CNOTTeleportTarget,
        AncillaPrep::Plus,
        {{Pauli::Z, Wire::Control, Wire::Ancilla}, {Pauli::X, Wire::Ancilla, Wire::Target}, {Pauli::Z, Wire::Target, {}}},
        {{Pauli::X, Wire::Ancilla, 0b101}, {Pauli::Z, Wire::Control, 0b010}, {Pauli::Z, Wire::Ancilla, 0b010}},
        Wire::Control,
        Wire::Ancilla};
    static const ProtocolSpec tele_control{
        ProtocolName::CNOTTeleportControl,
        AncillaPrep::Zero,
        {{Pauli::X, Wire::Ancilla, Wire::Target}, {Pauli::Z, Wire::Control, Wire::Ancilla}, {Pauli::X, Wire::Control, {}}},
        {{Pauli::X, Wire::Target, 0b010}, {Pauli::X, Wire::Ancilla, 0b010}, {Pauli::Z, Wire::Ancilla, 0b101}},
        Wire::Ancilla,
        Wire::Target};
    switch (p) {
        case ProtocolName::StandardCNOT: return standard;
        case ProtocolName::CNOTTeleportTarget: return tele_target;
        case ProtocolName::CNOTTeleportControl: return tele_control;
    }
    throw std::invalid_argument("unknown protocol");
}

std::vector<ProtocolName> all_protocols() {
    return {ProtocolName::StandardCNOT, ProtocolName::CNOTTeleportControl, ProtocolName::CNOTTeleportTarget};
}

std::vector<OutcomeBranch> simulate_branches(const ProtocolSpec& p, const State4& input, const State2& ancilla) {
    if (std::abs(input.norm() - 1.0) > 1e-9) throw std::invalid_argument("input state is not normalised");
    if (std::abs(ancilla.norm() - 1.0) > 1e-9) throw std::invalid_argument("ancilla state is not normalised");
    if (p.measurements.size() != 3) throw std::invalid_argument("protocol must record exactly three outcomes");
    const auto psi = embed(input, ancilla);
    std::vector<OutcomeBranch> out;
    for (int b = 0; b < 8; ++b) {
        OutcomeBranch br;
        br.outcomes = outcome_bits(b);
        br.op = branch_op8(p, br.outcomes);
        Eigen::Matrix<Complex, 8, 1> after = br.op * psi;
        // Pauli corrections are unitary, so the norm is the projector's probability.
        br.probability = after.squaredNorm();
        br.possible = br.probability > 1e-12;
        br.output = State4::Zero();
        if (br.possible) br.output = logical_output(p, after / std::sqrt(br.probability), br.outcomes[2]);
        out.push_back(std::move(br));
    }
    return out;
}

std::vector<OutcomeBranch> simulate_branches(const ProtocolSpec& p, const State4& input) {
    return simulate_branches(p, input, prep_state(p.prep));
}

Operator4 branch_operator(const ProtocolSpec& p, const std::array<int, 3>& outcomes) {
    const Operator8 op = branch_op8(p, outcomes);
    const State2 anc = prep_state(p.prep);
    Operator4 k;
    for (int col = 0; col < 4; ++col) {
        State4 e = State4::Zero();
        e(col) = 1;
        k.col(col) = logical_output(p, op * embed(e, anc), outcomes[2]);
    }
    return k;
}

VerificationReport verify_protocol(const ProtocolSpec& p) {
    Operator4 cnot;
    cnot << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;

    // Choi matrix J = sum_ij |i><j| (x) K |i><j| K^dagger over the 16 basis operators.
    auto choi = [](const Operator4& k) {
        Eigen::Matrix<Complex, 16, 16> j = Eigen::Matrix<Complex, 16, 16>::Zero();
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                Operator4 e = Operator4::Zero();
                e(a, b) = 1;
                j.block<4, 4>(a * 4, b * 4) = k * e * k.adjoint();
            }
        return j;
    };
    const auto ideal = choi(cnot);

    VerificationReport rep;
    rep.protocol = p.name;
    rep.pass = true;
    double total = 0;
    for (int b = 0; b < 8; ++b) {
        BranchReport br;
        br.outcomes = outcome_bits(b);
        const Operator4 k = branch_operator(p, br.outcomes);
        // Probability for the maximally mixed input; an ideal branch is input-independent.
        br.probability = (k.adjoint() * k).trace().real() / 4.0;
        total += br.probability;
        if (br.probability > 1e-12) {
            br.max_error = (choi(k) / br.probability - ideal).cwiseAbs().maxCoeff();
            br.ok = br.max_error <= kChoiTolerance;
        } else {
            br.ok = true;
        }
        if (!br.ok && rep.pass) {
            rep.pass = false;
            rep.first_failure = rep.branches.size();
        }
        rep.branches.push_back(br);
    }
    if (std::abs(total - 1.0) > kChoiTolerance) rep.pass = false;
    return rep;
}

nlohmann::ordered_json report_to_json(const VerificationReport& r) {
    nlohmann::ordered_json branches = nlohmann::ordered_json::array();
    for (const auto& b : r.branches)
        branches.push_back({{"outcomes", b.outcomes}, {"probability", b.probability}, {"ok", b.ok}});
    nlohmann::ordered_json j;
    j["protocol"] = protocol_name_str(r.protocol);
    j["pass"] = r.pass;
    j["branches"] = std::move(branches);
    if (r.first_failure) j["first_failure"] = r.branches[*r.first_failure].outcomes;
    return j;
}

}  // namespace teleroute::protocol
