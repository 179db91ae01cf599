#pragma once

#include "qlorder/signal_model.hpp"

#include <span>
#include <vector>

namespace qlorder {

/// Normalized margins of L(nu0) against its neighbours and the correlation
/// of the two noise projections that drive them.
struct DecisionStats {
    double r = 0.0;
    double q = 0.0;
    double rho = 0.0;
};

struct NoiseProjection {
    double eta = 0.0;
    double xi = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Box of absolute parameter errors. One entry means the errors are shared
/// by every component; otherwise there is one entry per component.
struct ErrorBox {
    struct Ranges {
        Interval amp;
        Interval freq;
        Interval phase;
    };
    std::vector<Ranges> ranges;

    void validate() const;
};

struct AbridgedResult {
    double p_exact = 0.0;
    double p_approx = 0.0;
    bool approx_valid = false;
};

struct WorstCase {
    double p = 0.0;
    std::vector<ParamErrors> errors; // same layout as the box
    std::size_t evaluations = 0;
};

struct WorstCaseOptions {
    std::size_t grid_points = 11;
    std::size_t max_full_grid_dims = 6;
    std::size_t max_refine_evaluations = 4000;
};

/// Standard normal CDF via erfc.
double normal_cdf(double x) noexcept;

/// 1 - normal_cdf(x) without cancellation.
double normal_sf(double x) noexcept;

/// R, Q and rho for true order nu0 (1-based). Requires nu0 + 1 <= nu_max.
///
/// With nu0 == 1 there is no lower neighbour and R is +inf. A negative
/// measured amplitude on component nu0 (or nu0 + 1) reverses the direction
/// of the corresponding decision inequality; the returned R (or Q) and rho
/// are sign-adjusted so that p_a = 1 - Pr(xi1 > -R, xi2 < Q) still holds
/// with corr(xi1, xi2) = rho.
DecisionStats decision_stats(std::span<const ComponentParams> true_params,
                             std::span<const ComponentParams> measured_params, std::span<const Envelope> envelopes,
                             double sigma, std::size_t nu0);

/// eta = sigma * sum_t n(t) f(t) cos(w* t + Psi(t) - phi*), xi = eta / (sigma sqrt(K**_{i,i})).
NoiseProjection noise_projection(std::span<const double> unit_noise, const ComponentParams& measured,
                                 const Envelope& env, double sigma);

/// 1 - (2pi)^-1/2 int_{-inf}^{Q} exp(-y^2/2) Phi((R + rho y) / sqrt(1 - rho^2)) dy.
double abridged_error_exact(const DecisionStats& stats);

/// 1 - Phi(R) Phi(Q) + rho / (2pi) exp(-R^2/2) exp(-Q^2/2).
double abridged_error_approx(const DecisionStats& stats);

/// min(R, Q) > 3 and |rho| < 0.9.
bool approx_valid(const DecisionStats& stats) noexcept;

AbridgedResult abridged(const DecisionStats& stats);

/// Largest p_a over the error box: grid scan, then a compass search from the
/// best grid point. The spec's nu_true is the true order.
WorstCase worst_case_abridged(const SignalSpec& spec, const ErrorBox& box, double sigma,
                              const WorstCaseOptions& options = {});

/// p_a at one error setting (single-entry `errors` = shared).
double abridged_at(const SignalSpec& spec, std::span<const ParamErrors> errors, double sigma);

} // namespace qlorder
