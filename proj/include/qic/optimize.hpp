#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "qic/ansatz.hpp"
#include "qic/error.hpp"
#include "qic/statevec.hpp"

namespace qic {

struct CompileSettings {
    int n_iter{100};
    double tau{1e-3};
    double alpha{0.1};
    double adam_beta1{0.9};
    double adam_beta2{0.999};
    double adam_eps{1e-8};
};

inline void validate(const CompileSettings &s) {
    if (s.n_iter < 1) {
        throw ConfigError("n_iter must be at least 1");
    }
    if (!(s.tau > 0.0)) {
        throw ConfigError("tau must be positive");
    }
    if (!(s.alpha > 0.0)) {
        throw ConfigError("learning rate must be positive");
    }
}

struct CompileResult {
    ParamVector theta_star;
    double final_cost{1.0};
    int iterations_used{0};
    long long evaluations_used{0};
};

/// Cost 1 - |<target|U(theta)|0>|^2 for a fixed ansatz and target, counting
/// every circuit execution as one quantum evaluation.
class Objective {
  public:
    Objective(const AnsatzConfig &config, const QuantumState &target)
        : config_(config), gates_(build_ansatz(config)), m_(param_count(config)),
          target_(target) {
        if (target.num_qubits() != config.n) {
            throw UsageError("target has " + std::to_string(target.num_qubits()) +
                             " qubits, ansatz has " + std::to_string(config.n));
        }
    }

    [[nodiscard]] const AnsatzConfig &config() const noexcept { return config_; }
    [[nodiscard]] const QuantumState &target() const noexcept { return target_; }
    [[nodiscard]] std::size_t num_params() const noexcept { return m_; }
    [[nodiscard]] long long evaluations() const noexcept { return evaluations_; }

    [[nodiscard]] QuantumState prepare(std::span<const double> theta) const {
        check_length(theta);
        return run_circuit(gates_, theta, config_.n);
    }

    double cost(std::span<const double> theta) {
        ++evaluations_;
        return 1.0 - fidelity(prepare(theta), target_);
    }

    /// Parameter-shift gradient: (C(theta + pi/2 e_j) - C(theta - pi/2 e_j)) / 2.
    /// Exactly 2m evaluations.
    std::vector<double> gradient(std::span<const double> theta) {
        check_length(theta);
        constexpr double shift = std::numbers::pi / 2.0;
        ParamVector shifted(theta.begin(), theta.end());
        std::vector<double> grad(m_);
        for (std::size_t j = 0; j < m_; ++j) {
            const double orig = shifted[j];
            shifted[j] = orig + shift;
            const double plus = cost(shifted);
            shifted[j] = orig - shift;
            const double minus = cost(shifted);
            shifted[j] = orig;
            grad[j] = 0.5 * (plus - minus);
        }
        return grad;
    }

  private:
    void check_length(std::span<const double> theta) const {
        if (theta.size() != m_) {
            throw UsageError("parameter vector has " + std::to_string(theta.size()) +
                             " entries, ansatz needs " + std::to_string(m_));
        }
    }

    AnsatzConfig config_;
    std::vector<GateOp> gates_;
    std::size_t m_;
    QuantumState target_;
    long long evaluations_{0};
};

[[nodiscard]] inline double cost(std::span<const double> theta, const QuantumState &target,
                                 const AnsatzConfig &config) {
    Objective obj(config, target);
    return obj.cost(theta);
}

[[nodiscard]] inline std::vector<double> psr_gradient(std::span<const double> theta,
                                                      const QuantumState &target,
                                                      const AnsatzConfig &config) {
    Objective obj(config, target);
    return obj.gradient(theta);
}

/// First and second moment estimates. Empty vectors mean "not started".
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
};

/// One bias-corrected Adam update; `t` counts from 1.
[[nodiscard]] inline std::pair<ParamVector, AdamState>
adam_step(ParamVector theta, std::span<const double> grad, AdamState state, int t,
          const CompileSettings &settings) {
    if (grad.size() != theta.size()) {
        throw UsageError("gradient and parameter lengths differ");
    }
    if (t < 1) {
        throw UsageError("Adam step index starts at 1");
    }
    if (t == 1 || state.m.size() != theta.size()) {
        state.m.assign(theta.size(), 0.0);
        state.v.assign(theta.size(), 0.0);
    }
    const double b1 = settings.adam_beta1;
    const double b2 = settings.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (std::size_t j = 0; j < theta.size(); ++j) {
        state.m[j] = b1 * state.m[j] + (1.0 - b1) * grad[j];
        state.v[j] = b2 * state.v[j] + (1.0 - b2) * grad[j] * grad[j];
        const double m_hat = state.m[j] / c1;
        const double v_hat = state.v[j] / c2;
        theta[j] -= settings.alpha * m_hat / (std::sqrt(v_hat) + settings.adam_eps);
    }
    return {std::move(theta), std::move(state)};
}

/// Variational compilation from `theta0`: stop as soon as the cost drops
/// below tau, otherwise take a PSR gradient + Adam step. iterations_used is
/// the number of gradient steps taken.
[[nodiscard]] inline CompileResult compile(Objective &objective, ParamVector theta0,
                                           const CompileSettings &settings) {
    validate(settings);
    const long long start = objective.evaluations();
    ParamVector theta = std::move(theta0);
    AdamState adam;
    for (int t = 0; t < settings.n_iter; ++t) {
        const double c = objective.cost(theta);
        if (c < settings.tau) {
            return {std::move(theta), c, t, objective.evaluations() - start};
        }
        const auto grad = objective.gradient(theta);
        auto [next, next_state] = adam_step(std::move(theta), grad, std::move(adam), t + 1,
                                            settings);
        theta = std::move(next);
        adam = std::move(next_state);
    }
    const double c = objective.cost(theta);
    return {std::move(theta), c, settings.n_iter, objective.evaluations() - start};
}

[[nodiscard]] inline CompileResult compile(ParamVector theta0, const QuantumState &target,
                                           const AnsatzConfig &config,
                                           const CompileSettings &settings) {
    Objective obj(config, target);
    return compile(obj, std::move(theta0), settings);
}

} // namespace qic
