#pragma once

#include <cmath>
#include <cstdint>

#include "qlab/errors.hpp"
#include "qlab/path.hpp"

namespace qlab {

// Truncated birth-death chain induced by an L-threshold policy. The closed
// forms require theta = lambda/(1-p) != 1; powers are evaluated through
// exp/log in the theta > 1 branch so large L cannot overflow.
struct ThresholdModel {
    double p = 0.0;
    double lambda = 0.0;
    Slot L = 1;
    double theta = 0.0;
};

inline ThresholdModel make_threshold_model(double p, double lambda, Slot L) {
    validate(ModelParams{lambda, p});
    if (L < 1) throw parameter_error("threshold model: L must be >= 1");
    ThresholdModel m{p, lambda, L, lambda / (1.0 - p)};
    if (std::abs(m.theta - 1.0) < 1e-12)
        throw unsupported_parameter_error("threshold closed forms need lambda != 1-p");
    return m;
}

// Steady-state probability of queue length i under the L-threshold policy.
inline double threshold_steady_state(const ThresholdModel& m, Slot i) {
    if (i < 0) throw parameter_error("threshold_steady_state: i must be >= 0");
    if (i > m.L) return 0.0;
    const double lt = std::log(m.theta);
    if (m.theta < 1.0)
        return std::exp(static_cast<double>(i) * lt) * (1.0 - m.theta) /
               (1.0 - std::exp(static_cast<double>(m.L + 1) * lt));
    return std::exp(static_cast<double>(i - m.L - 1) * lt) * (m.theta - 1.0) /
           (1.0 - std::exp(-static_cast<double>(m.L + 1) * lt));
}

// Time-average queue length under the L-threshold policy.
inline double threshold_queue_mean(const ThresholdModel& m) {
    const double th = m.theta;
    const double Ld = static_cast<double>(m.L);
    if (th < 1.0) {
        const double thL = std::pow(th, Ld);
        return th / ((th - 1.0) * (th * thL - 1.0)) * (1.0 - thL + Ld * thL * (th - 1.0));
    }
    const double inv = std::exp(-(Ld + 1.0) * std::log(th));  // theta^-(L+1)
    const double denom = 1.0 - inv;
    return Ld / denom - (th / (th - 1.0)) * (1.0 / th - inv) / denom;
}

// Continuous-time deletion rate lambda * mu_L under the L-threshold policy.
inline double threshold_deletion_rate(const ThresholdModel& m) {
    const double th = m.theta;
    const double Ld = static_cast<double>(m.L);
    if (th < 1.0) {
        const double thL = std::pow(th, Ld);
        return m.lambda * thL * (1.0 - th) / (1.0 - th * thL);
    }
    const double inv = std::exp(-(Ld + 1.0) * std::log(th));
    return m.lambda * (th - 1.0) / (th * (1.0 - inv));
}

namespace detail {

// Deletion rate that also covers lambda == 1-p, where the truncated chain is
// uniform and the rate is lambda/(L+1).
inline double threshold_rate_any(double p, double lambda, Slot L) {
    const double theta = lambda / (1.0 - p);
    if (std::abs(theta - 1.0) < 1e-12) return lambda / static_cast<double>(L + 1);
    return threshold_deletion_rate(ThresholdModel{p, lambda, L, theta});
}

}  // namespace detail

// Smallest L whose threshold policy deletes at continuous rate <= budget, in
// the system with service rate 1-p. The closed-form guess is corrected by a
// local integer search, which is authoritative.
inline Slot min_feasible_threshold(double budget, const ModelParams& params) {
    validate(params);
    if (!(budget > 0.0)) throw parameter_error("threshold budget must be positive");
    const double lambda = params.lambda;
    const double p = params.p;
    const double theta = lambda / (1.0 - p);
    if (theta > 1.0 && budget <= lambda - (1.0 - p))
        throw unsupported_parameter_error("no finite threshold meets this deletion budget");

    Slot guess = 1;
    if (std::abs(theta - 1.0) < 1e-12) {
        guess = static_cast<Slot>(std::ceil(lambda / budget)) - 1;
    } else if (theta > 1.0) {
        // rate(L) <= budget  <=>  theta^L >= budget(1-p) / (lambda(budget+1-p-lambda))
        const double arg = budget * (1.0 - p) / (lambda * (budget + 1.0 - p - lambda));
        if (arg > 1.0) guess = static_cast<Slot>(std::ceil(std::log(arg) / std::log(theta)));
    } else {
        const double arg = budget / (lambda * (1.0 - theta) + budget * theta);
        if (arg < 1.0) guess = static_cast<Slot>(std::ceil(std::log(arg) / std::log(theta)));
    }
    if (guess < 1) guess = 1;
    while (detail::threshold_rate_any(p, lambda, guess) > budget) ++guess;
    while (guess > 1 && detail::threshold_rate_any(p, lambda, guess - 1) <= budget) --guess;
    return guess;
}

// Smallest feasible threshold when the full budget p is available. Defined
// for lambda in [1-p, 1); at lambda == 1-p the uniform-chain rate applies.
inline Slot optimal_threshold(double p, double lambda) {
    ModelParams params{lambda, p};
    validate(params);
    if (lambda < 1.0 - p)
        throw unsupported_parameter_error("optimal_threshold needs lambda >= 1-p");
    return min_feasible_threshold(p, params);
}

// Offline-policy closed forms; all need lambda > 1-p strictly.
struct NOBModel {
    double p = 0.0;
    double lambda = 0.0;
};

inline NOBModel make_nob_model(double p, double lambda) {
    validate(ModelParams{lambda, p});
    if (!(lambda > 1.0 - p))
        throw unsupported_parameter_error("offline closed forms need lambda > 1-p");
    return NOBModel{p, lambda};
}

inline double nob_queue_mean(const NOBModel& m) {
    return (1.0 - m.p) / (m.lambda - (1.0 - m.p));
}

// Geometric steady-state law of the post-deletion walk.
inline double nob_steady_state(const NOBModel& m, Slot i) {
    if (i < 0) throw parameter_error("nob_steady_state: i must be >= 0");
    const double rho = (1.0 - m.p) / m.lambda;
    return (1.0 - rho) * std::pow(rho, static_cast<double>(i));
}

// Mean slots between adjacent offline deletions.
inline double nob_epoch_mean(const NOBModel& m) {
    return (m.lambda + 1.0 - m.p) / (m.lambda - (1.0 - m.p));
}

// Lookahead scaling w = c * ln(1/(1-lambda)).
inline double lookahead_window(double p, double lambda, double c) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("lookahead_window: p out of range");
    if (!(c > 0.0)) throw parameter_error("lookahead_window: c must be positive");
    if (lambda < 0.0 || lambda >= 1.0)
        throw unsupported_parameter_error("lookahead_window: lambda out of range");
    return c * std::log(1.0 / (1.0 - lambda));
}

struct DelayMetrics {
    double t_all = 0.0;  // over all jobs, deleted ones counted as zero delay
    double t_adt = 0.0;  // over admitted jobs only
};

// Little's-law conversions from average queue length to waiting times.
inline DelayMetrics delay_metrics(double avg_queue, double lambda, double r_d) {
    if (!(lambda > 0.0)) throw parameter_error("delay_metrics: lambda must be positive");
    if (r_d < 0.0 || lambda <= r_d)
        throw parameter_error("delay_metrics: need 0 <= r_d < lambda");
    return DelayMetrics{avg_queue / lambda, avg_queue / (lambda - r_d)};
}

}  // namespace qlab
