#pragma once

// Dense state-vector simulation over the gate alphabet {RX, RY, RZ, CX}.
//
// Conventions used everywhere in the library:
//   * R_a(phi) = exp(-i * phi * sigma_a / 2) for a in {x, y, z}.
//   * Qubit 0 is the most significant bit of the basis index, so for n = 2
//     the amplitudes are ordered |00>, |01>, |10>, |11> with qubit 0 on the
//     left. Qubit q therefore flips index bit (n - 1 - q).

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qic/error.hpp"

namespace qic {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 12;
inline constexpr double kNormTolerance = 1e-10;

enum class GateKind : std::uint8_t { RX, RY, RZ, CX };

[[nodiscard]] constexpr bool is_rotation(GateKind kind) noexcept {
    return kind != GateKind::CX;
}

struct GateOp {
    GateKind kind{GateKind::RX};
    int target{0};
    std::optional<int> control{};
    std::optional<std::size_t> param_index{};

    [[nodiscard]] static GateOp rotation(GateKind kind, int target,
                                         std::size_t param_index) {
        return GateOp{kind, target, std::nullopt, param_index};
    }
    [[nodiscard]] static GateOp cx(int control, int target) {
        return GateOp{GateKind::CX, target, control, std::nullopt};
    }

    friend bool operator==(const GateOp &, const GateOp &) = default;
};

/// Throws ConfigError when the gate does not fit an n-qubit register.
inline void validate_gate(const GateOp &gate, int n) {
    if (gate.target < 0 || gate.target >= n) {
        throw ConfigError("gate target " + std::to_string(gate.target) +
                          " out of range for " + std::to_string(n) + " qubits");
    }
    if (gate.kind == GateKind::CX) {
        if (!gate.control || *gate.control < 0 || *gate.control >= n) {
            throw ConfigError("CX control missing or out of range");
        }
        if (*gate.control == gate.target) {
            throw ConfigError("CX control equals target");
        }
    } else if (gate.control) {
        throw ConfigError("rotation gates take no control qubit");
    }
}

/// Unit-norm vector of 2^n complex amplitudes.
class QuantumState {
  public:
    /// |0...0> on n qubits.
    [[nodiscard]] static QuantumState zero(int n) {
        check_qubits(n);
        std::vector<Complex> amps(std::size_t{1} << n);
        amps[0] = Complex{1.0, 0.0};
        return QuantumState(n, std::move(amps));
    }

    /// Wraps amplitudes that are already normalized (within kNormTolerance).
    [[nodiscard]] static QuantumState from_amplitudes(std::vector<Complex> amps) {
        const int n = qubits_for_length(amps.size());
        QuantumState state(n, std::move(amps));
        if (std::abs(state.norm_squared() - 1.0) > kNormTolerance) {
            throw UsageError("amplitudes are not unit norm");
        }
        return state;
    }

    /// Normalizes a real vector of length 2^n. Throws UsageError on a zero vector.
    [[nodiscard]] static QuantumState from_real(std::span<const double> values) {
        double norm2 = 0.0;
        for (double v : values) {
            norm2 += v * v;
        }
        if (!(norm2 > 0.0)) {
            throw UsageError("cannot normalize a zero vector");
        }
        const double inv = 1.0 / std::sqrt(norm2);
        std::vector<Complex> amps;
        amps.reserve(values.size());
        for (double v : values) {
            amps.emplace_back(v * inv, 0.0);
        }
        const int n = qubits_for_length(amps.size());
        return QuantumState(n, std::move(amps));
    }

    [[nodiscard]] int num_qubits() const noexcept { return n_; }
    [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] const Complex &operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    /// In-place gate application. `angle` must be given exactly for rotations.
    void apply(const GateOp &gate, std::optional<double> angle = std::nullopt) {
        validate_gate(gate, n_);
        if (is_rotation(gate.kind) != angle.has_value()) {
            throw UsageError(angle ? "angle supplied for CX gate"
                                   : "rotation gate requires an angle");
        }
        if (gate.kind == GateKind::CX) {
            apply_cx(*gate.control, gate.target);
        } else {
            apply_rotation(gate.kind, gate.target, *angle);
        }
    }

    friend bool operator==(const QuantumState &, const QuantumState &) = default;

  private:
    QuantumState(int n, std::vector<Complex> amps) : n_(n), amps_(std::move(amps)) {}

    static void check_qubits(int n) {
        if (n < 1 || n > kMaxQubits) {
            throw ConfigError("qubit count " + std::to_string(n) + " outside [1, " +
                              std::to_string(kMaxQubits) + "]");
        }
    }

    static int qubits_for_length(std::size_t len) {
        int n = 0;
        while ((std::size_t{1} << n) < len) {
            ++n;
        }
        if ((std::size_t{1} << n) != len) {
            throw UsageError("amplitude count " + std::to_string(len) +
                             " is not a power of two");
        }
        check_qubits(n);
        return n;
    }

    [[nodiscard]] std::size_t mask_of(int qubit) const noexcept {
        return std::size_t{1} << (n_ - 1 - qubit);
    }

    void apply_cx(int control, int target) {
        const std::size_t cmask = mask_of(control);
        const std::size_t tmask = mask_of(target);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cmask) && !(i & tmask)) {
                std::swap(amps_[i], amps_[i | tmask]);
            }
        }
    }

    void apply_rotation(GateKind kind, int target, double angle) {
        const double c = std::cos(angle / 2.0);
        const double s = std::sin(angle / 2.0);
        // 2x2 matrix [[m00, m01], [m10, m11]]
        Complex m00, m01, m10, m11;
        switch (kind) {
        case GateKind::RX:
            m00 = m11 = Complex{c, 0.0};
            m01 = m10 = Complex{0.0, -s};
            break;
        case GateKind::RY:
            m00 = m11 = Complex{c, 0.0};
            m01 = Complex{-s, 0.0};
            m10 = Complex{s, 0.0};
            break;
        case GateKind::RZ:
            m00 = Complex{c, -s};
            m11 = Complex{c, s};
            m01 = m10 = Complex{};
            break;
        case GateKind::CX:
            return;
        }
        const std::size_t tmask = mask_of(target);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & tmask) {
                continue;
            }
            const Complex a0 = amps_[i];
            const Complex a1 = amps_[i | tmask];
            amps_[i] = m00 * a0 + m01 * a1;
            amps_[i | tmask] = m10 * a0 + m11 * a1;
        }
    }

    int n_;
    std::vector<Complex> amps_;
};

[[nodiscard]] inline QuantumState zero_state(int n) { return QuantumState::zero(n); }

[[nodiscard]] inline QuantumState apply_gate(QuantumState state, const GateOp &gate,
                                             std::optional<double> angle = std::nullopt) {
    state.apply(gate, angle);
    return state;
}

/// Applies `gates` to |0...0>, drawing rotation angles from `params`.
[[nodiscard]] inline QuantumState run_circuit(std::span<const GateOp> gates,
                                              std::span<const double> params, int n) {
    QuantumState state = QuantumState::zero(n);
    for (const auto &g : gates) {
        if (is_rotation(g.kind)) {
            if (!g.param_index || *g.param_index >= params.size()) {
                throw ConfigError("gate parameter index out of range");
            }
            state.apply(g, params[*g.param_index]);
        } else {
            state.apply(g);
        }
    }
    return state;
}

/// |<target|state>|^2.
[[nodiscard]] inline double fidelity(const QuantumState &state, const QuantumState &target) {
    if (state.dim() != target.dim()) {
        throw UsageError("fidelity of states with different dimensions");
    }
    Complex overlap{};
    const auto a = state.amplitudes();
    const auto b = target.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        overlap += std::conj(b[i]) * a[i];
    }
    const double f = std::norm(overlap);
    return f > 1.0 ? 1.0 : f;
}

} // namespace qic
