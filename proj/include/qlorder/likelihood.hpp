#pragma once

#include "qlorder/signal_model.hpp"

#include <span>
#include <vector>

namespace qlorder {

/// Which parameter set component j was taken from in a correlation sum.
enum class Role { measured, truth };

/// Half-sums over the difference (V) and sum (W) frequencies of a pair of
/// reference waveforms. Together with the two phases they give back the
/// correlation K_{i,j}:
///   K = Vc cos(phi_i - phi_j) + Vs sin(phi_i - phi_j) + Wc cos(phi_i + phi_j) + Ws sin(phi_i + phi_j)
struct CorrelationDecomposition {
    double v_cos = 0.0;
    double v_sin = 0.0;
    double w_cos = 0.0;
    double w_sin = 0.0;
    Role j_role = Role::measured;
};

/// Entry k holds L(k + 1).
struct LikelihoodProfile {
    std::vector<double> values;
};

// All correlation sums include the envelope product f_i(t) f_j(t) and are
// accumulated left to right (t = 1..N) in long double.

/// sum_t f_i f_j cos(w_i t + Psi_i - phi_i) cos(w_j t + Psi_j - phi_j), both
/// components at measured values.
double k_double_star(const ComponentParams& i_params, const Envelope& i_env, const ComponentParams& j_params,
                     const Envelope& j_env);

/// Same sum with component i measured and component j at its true values.
double k_star(const ComponentParams& i_measured, const ComponentParams& j_true, const Envelope& i_env,
              const Envelope& j_env);

CorrelationDecomposition decompose_k(const ComponentParams& i_params, const Envelope& i_env,
                                     const ComponentParams& j_params, const Envelope& j_env, Role j_role);

double recompose_k(const CorrelationDecomposition& d, double phase_i, double phase_j) noexcept;

/// f_i(t) cos(w_i t + Psi_i(t) - phi_i) for t = 1..N.
std::vector<double> reference_waveform(const ComponentParams& params, const Envelope& env);

/// L(nu) with measured parameters substituted for the unknown true ones.
double log_likelihood(const Observation& x, std::size_t nu, std::span<const ComponentParams> measured,
                      std::span<const Envelope> envelopes);

LikelihoodProfile likelihood_profile(const Observation& x, std::span<const ComponentParams> measured,
                                     std::span<const Envelope> envelopes);

/// argmax over nu = 1..nu_max of L(nu); ties go to the smallest nu.
std::size_t ql_estimate(const Observation& x, std::span<const ComponentParams> measured,
                        std::span<const Envelope> envelopes);

/// Index of the largest entry plus one, first occurrence on ties.
std::size_t argmax_order(const LikelihoodProfile& profile);

/// Reusable QL estimator for a fixed set of measured parameters.
///
/// Reference waveforms and the K** matrix depend only on the measured
/// parameters, so Monte Carlo loops build this once and then pay one dot
/// product per component per observation.
class QlEstimator {
public:
    QlEstimator(std::span<const ComponentParams> measured, std::span<const Envelope> envelopes);

    std::size_t nu_max() const noexcept { return amplitudes_.size(); }
    std::size_t n_samples() const noexcept { return n_samples_; }

    /// K**_{i,j}, 0-based indices.
    double k(std::size_t i, std::size_t j) const noexcept { return k_[i * nu_max() + j]; }

    LikelihoodProfile profile(std::span<const double> samples, double sigma) const;
    std::size_t estimate(std::span<const double> samples, double sigma) const;

private:
    std::size_t n_samples_;
    std::vector<double> amplitudes_;
    std::vector<std::vector<double>> references_;
    std::vector<double> k_;
};

} // namespace qlorder
