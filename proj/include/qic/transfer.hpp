#pragma once

// Warm-start transfer of compiled parameters between neighbouring blocks.
//
// Given parameters theta_x that prepare a neighbour's state, the target y is
// tried in four steps:
//   1. reuse theta_x as-is if C_y(theta_x) < tau (best neighbour by cost);
//   2. otherwise take one first-order Taylor step
//        theta~ = theta_x - grad C_y(theta_x) * C_y(theta_x) / |grad C_y(theta_x)|^2
//      (minimum-norm root of the linearized cost) and accept it if C_y(theta~) < tau;
//   3. otherwise compile starting from theta~;
//   4. if the gradient is degenerate, compile starting from theta_x.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qic/ansatz.hpp"
#include "qic/error.hpp"
#include "qic/optimize.hpp"
#include "qic/statevec.hpp"

namespace qic {

/// How a block's parameters were obtained. Values are the on-disk tag bytes.
enum class Origin : std::uint8_t {
    Zero = 0,
    ColdCompiled = 1,
    WarmCompiled = 2,
    Reused = 3,
    Estimated = 4,
};

[[nodiscard]] constexpr std::string_view origin_name(Origin o) noexcept {
    switch (o) {
    case Origin::Zero:
        return "ZERO";
    case Origin::ColdCompiled:
        return "COLD_COMPILED";
    case Origin::WarmCompiled:
        return "WARM_COMPILED";
    case Origin::Reused:
        return "REUSED";
    case Origin::Estimated:
        return "ESTIMATED";
    }
    return "UNKNOWN";
}

[[nodiscard]] constexpr bool is_transferred(Origin o) noexcept {
    return o == Origin::Reused || o == Origin::Estimated;
}

inline constexpr double kGradientNormFloor = 1e-12;

struct TransferOutcome {
    ParamVector theta;
    double cost{1.0};
    Origin origin{Origin::ColdCompiled};
    int iterations_used{0};
    long long evaluations_used{0};
};

struct Neighbor {
    std::span<const double> theta;
    int row{0};
    int col{0};
};

/// Minimum-norm solution of C + grad . (theta~ - theta_x) = 0.
[[nodiscard]] inline ParamVector taylor_estimate(std::span<const double> theta_x,
                                                 double cost_y_at_x,
                                                 std::span<const double> grad_y_at_x) {
    if (theta_x.size() != grad_y_at_x.size()) {
        throw UsageError("parameter and gradient lengths differ");
    }
    double norm2 = 0.0;
    for (double g : grad_y_at_x) {
        norm2 += g * g;
    }
    if (!(norm2 > kGradientNormFloor)) {
        throw DegenerateGradient("gradient norm^2 " + std::to_string(norm2) +
                                 " below floor");
    }
    const double step = cost_y_at_x / norm2;
    ParamVector out(theta_x.begin(), theta_x.end());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] -= step * grad_y_at_x[j];
    }
    return out;
}

/// Runs the reuse / estimate / warm-compile ladder for one target.
/// `objective` must wrap target y; its evaluation counter is advanced.
[[nodiscard]] inline TransferOutcome run_transfer(Objective &objective,
                                                  std::span<const Neighbor> neighbors,
                                                  const CompileSettings &settings) {
    validate(settings);
    if (neighbors.empty()) {
        throw UsageError("run_transfer needs at least one compiled neighbour");
    }
    const long long start = objective.evaluations();

    const Neighbor *best = nullptr;
    double best_cost = 0.0;
    for (const auto &nb : neighbors) {
        const double c = objective.cost(nb.theta);
        const bool better =
            best == nullptr || c < best_cost ||
            (c == best_cost && (nb.row < best->row ||
                                (nb.row == best->row && nb.col < best->col)));
        if (better) {
            best = &nb;
            best_cost = c;
        }
    }
    ParamVector theta_x(best->theta.begin(), best->theta.end());
    if (best_cost < settings.tau) {
        return {std::move(theta_x), best_cost, Origin::Reused, 0,
                objective.evaluations() - start};
    }

    const auto grad = objective.gradient(theta_x);
    ParamVector warm_start;
    try {
        ParamVector estimate = taylor_estimate(theta_x, best_cost, grad);
        const double c = objective.cost(estimate);
        if (c < settings.tau) {
            return {std::move(estimate), c, Origin::Estimated, 0,
                    objective.evaluations() - start};
        }
        warm_start = std::move(estimate);
    } catch (const DegenerateGradient &) {
        warm_start = std::move(theta_x);
    }

    CompileResult r = compile(objective, std::move(warm_start), settings);
    return {std::move(r.theta_star), r.final_cost, Origin::WarmCompiled, r.iterations_used,
            objective.evaluations() - start};
}

[[nodiscard]] inline TransferOutcome run_transfer(const QuantumState &target_y,
                                                  std::span<const Neighbor> neighbors,
                                                  const AnsatzConfig &config,
                                                  const CompileSettings &settings) {
    Objective obj(config, target_y);
    return run_transfer(obj, neighbors, settings);
}

} // namespace qic
