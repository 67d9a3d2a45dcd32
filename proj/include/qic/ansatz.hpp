#pragma once

// Layered W_chain + rotation-triple ansatz.
//
// Each of the L layers is
//   CX(0,1) CX(1,2) ... CX(n-2,n-1) CX(n-1,0)        (ring-closed chain, n gates)
//   R_a(q,0) R_b(q,1) R_c(q,2) for q = 0..n-1        (3n rotations)
// where (a,b,c) is the rotation sequence. Parameter index of rotation
// (layer l, qubit q, axis slot r) is (l*n + q)*3 + r.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "qic/error.hpp"
#include "qic/statevec.hpp"

namespace qic {

using ParamVector = std::vector<double>;

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

using RotationSequence = std::array<Axis, 3>;

inline constexpr RotationSequence kXYZ{Axis::X, Axis::Y, Axis::Z};
inline constexpr RotationSequence kZXZ{Axis::Z, Axis::X, Axis::Z};

[[nodiscard]] constexpr GateKind gate_kind(Axis a) noexcept {
    switch (a) {
    case Axis::X:
        return GateKind::RX;
    case Axis::Y:
        return GateKind::RY;
    case Axis::Z:
        return GateKind::RZ;
    }
    return GateKind::RX;
}

struct AnsatzConfig {
    int n{2};
    int layers{2};
    RotationSequence rotations{kZXZ};

    static constexpr int m_prime = 3;

    friend bool operator==(const AnsatzConfig &, const AnsatzConfig &) = default;
};

inline void validate(const AnsatzConfig &config) {
    if (config.n < 2 || config.n > kMaxQubits) {
        throw ConfigError("ansatz needs 2.." + std::to_string(kMaxQubits) +
                          " qubits, got " + std::to_string(config.n));
    }
    if (config.layers < 1) {
        throw ConfigError("ansatz needs at least one layer");
    }
}

[[nodiscard]] inline std::size_t param_count(const AnsatzConfig &config) {
    validate(config);
    return static_cast<std::size_t>(AnsatzConfig::m_prime) *
           static_cast<std::size_t>(config.n) * static_cast<std::size_t>(config.layers);
}

[[nodiscard]] inline std::vector<GateOp> build_ansatz(const AnsatzConfig &config) {
    validate(config);
    const int n = config.n;
    std::vector<GateOp> gates;
    gates.reserve(static_cast<std::size_t>(4 * n * config.layers));
    std::size_t index = 0;
    for (int layer = 0; layer < config.layers; ++layer) {
        for (int q = 0; q + 1 < n; ++q) {
            gates.push_back(GateOp::cx(q, q + 1));
        }
        gates.push_back(GateOp::cx(n - 1, 0));
        for (int q = 0; q < n; ++q) {
            for (Axis a : config.rotations) {
                gates.push_back(GateOp::rotation(gate_kind(a), q, index++));
            }
        }
    }
    return gates;
}

/// ASAP-scheduled depth: each gate lands one step after the latest gate on
/// any of its qubits.
[[nodiscard]] inline int circuit_depth(const std::vector<GateOp> &gates, int n) {
    std::vector<int> front(static_cast<std::size_t>(n), 0);
    int depth = 0;
    for (const auto &g : gates) {
        int level = front[static_cast<std::size_t>(g.target)];
        if (g.control) {
            level = std::max(level, front[static_cast<std::size_t>(*g.control)]);
        }
        ++level;
        front[static_cast<std::size_t>(g.target)] = level;
        if (g.control) {
            front[static_cast<std::size_t>(*g.control)] = level;
        }
        depth = std::max(depth, level);
    }
    return depth;
}

/// Initial parameters used by every cold compilation: all ones.
[[nodiscard]] inline ParamVector ones_params(const AnsatzConfig &config) {
    return ParamVector(param_count(config), 1.0);
}

/// Maps an angle to [0, 2*pi).
[[nodiscard]] inline double wrap_angle(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(angle, two_pi);
    if (w < 0.0) {
        w += two_pi;
    }
    if (w >= two_pi) {
        w = 0.0;
    }
    return w;
}

// Ansatz id byte: ring topology (the only one) with the rotation sequence
// packed base 3 as a*9 + b*3 + c. XYZ -> 5, ZXZ -> 20.
[[nodiscard]] constexpr std::uint8_t ansatz_id(const RotationSequence &seq) noexcept {
    return static_cast<std::uint8_t>(static_cast<int>(seq[0]) * 9 +
                                     static_cast<int>(seq[1]) * 3 +
                                     static_cast<int>(seq[2]));
}

[[nodiscard]] inline RotationSequence rotations_from_id(std::uint8_t id) {
    if (id >= 27) {
        throw ConfigError("unknown ansatz id " + std::to_string(id));
    }
    return {static_cast<Axis>(id / 9), static_cast<Axis>((id / 3) % 3),
            static_cast<Axis>(id % 3)};
}

[[nodiscard]] inline std::string rotations_name(const RotationSequence &seq) {
    std::string s;
    for (Axis a : seq) {
        s += "XYZ"[static_cast<int>(a)];
    }
    return s;
}

[[nodiscard]] inline RotationSequence parse_rotations(const std::string &name) {
    if (name.size() != 3) {
        throw ConfigError("rotation sequence must have three axes, got '" + name + "'");
    }
    RotationSequence seq{};
    for (std::size_t i = 0; i < 3; ++i) {
        switch (name[i]) {
        case 'X': case 'x': seq[i] = Axis::X; break;
        case 'Y': case 'y': seq[i] = Axis::Y; break;
        case 'Z': case 'z': seq[i] = Axis::Z; break;
        default:
            throw ConfigError("bad rotation axis '" + std::string(1, name[i]) + "'");
        }
    }
    return seq;
}

} // namespace qic
