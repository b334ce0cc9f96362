#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace teleroute::protocol {

using Complex = std::complex<double>;
using Operator8 = Eigen::Matrix<Complex, 8, 8>;
using Operator4 = Eigen::Matrix<Complex, 4, 4>;
using State4 = Eigen::Matrix<Complex, 4, 1>;
using State2 = Eigen::Matrix<Complex, 2, 1>;

enum class ProtocolName { StandardCNOT, CNOTTeleportTarget, CNOTTeleportControl };

/// Wire 0 is the most significant qubit of the 8-dimensional state.
enum class Wire : std::uint8_t { Control = 0, Target = 1, Ancilla = 2 };
enum class Pauli : std::uint8_t { X, Z };
enum class AncillaPrep : std::uint8_t { Zero, Plus };

/// Pauli measurement on one wire (`second` unset) or a joint P⊗P measurement.
struct Measurement {
    Pauli pauli = Pauli::Z;
    Wire first = Wire::Control;
    std::optional<Wire> second;
};

/// Applies `pauli` to `wire` when the parity of the outcomes selected by `outcomes`
/// (bit i = i-th measurement) is odd.
struct Correction {
    Pauli pauli = Pauli::X;
    Wire wire = Wire::Target;
    std::uint8_t outcomes = 0;
};

struct ProtocolSpec {
    ProtocolName name = ProtocolName::StandardCNOT;
    AncillaPrep prep = AncillaPrep::Plus;
    std::vector<Measurement> measurements;  // two joint, then one single-wire
    std::vector<Correction> corrections;
    Wire out_control = Wire::Control;       // where the logical control ends up
    Wire out_target = Wire::Target;

    [[nodiscard]] Wire measured_wire() const { return measurements.back().first; }
};

std::string_view protocol_name_str(ProtocolName p);
ProtocolName parse_protocol_name(std::string_view s);  // standard | tele-target | tele-control
const ProtocolSpec& protocol_spec(ProtocolName p);
std::vector<ProtocolName> all_protocols();

struct OutcomeBranch {
    std::array<int, 3> outcomes{};
    double probability = 0;
    bool possible = false;
    Operator8 op;     // corrections times projectors, on (control, target, ancilla)
    State4 output;    // normalised (logical control, logical target) state
};

/// Runs every measurement-outcome branch on `input` (control, target) with the
/// ancilla prepared in `ancilla`. Throws std::invalid_argument for unnormalised input.
std::vector<OutcomeBranch> simulate_branches(const ProtocolSpec& p, const State4& input, const State2& ancilla);
std::vector<OutcomeBranch> simulate_branches(const ProtocolSpec& p, const State4& input);

/// 4x4 map from (control, target) inputs to the logical output wires for one branch,
/// including ancilla preparation and projection of the measured wire.
Operator4 branch_operator(const ProtocolSpec& p, const std::array<int, 3>& outcomes);

struct BranchReport {
    std::array<int, 3> outcomes{};
    double probability = 0;
    double max_error = 0;
    bool ok = false;
};

struct VerificationReport {
    ProtocolName protocol = ProtocolName::StandardCNOT;
    bool pass = false;
    std::vector<BranchReport> branches;
    std::optional<std::size_t> first_failure;
};

inline constexpr double kChoiTolerance = 1e-9;

/// Compares each branch's Choi matrix with that of CNOT on the logical output wires.
VerificationReport verify_protocol(const ProtocolSpec& p);

nlohmann::ordered_json report_to_json(const VerificationReport& r);

}  // namespace teleroute::protocol
