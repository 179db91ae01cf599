#include "qlorder/likelihood.hpp"

#include "qlorder/errors.hpp"

#include <cmath>

namespace qlorder {

namespace {

void require_same_length(const Envelope& a, const Envelope& b, const char* op) {
    if (a.size() != b.size() || a.amp.size() != a.phase.size() || b.amp.size() != b.phase.size()) {
        throw InvalidArgument(std::string(op) + ": envelope lengths differ");
    }
}

double correlation(const ComponentParams& pi, const Envelope& ei, const ComponentParams& pj, const Envelope& ej,
                   const char* op) {
    require_same_length(ei, ej, op);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < ei.size(); ++k) {
        const double t = static_cast<double>(k + 1);
        const double ci = std::cos(pi.frequency * t + ei.phase[k] - pi.phase);
        const double cj = std::cos(pj.frequency * t + ej.phase[k] - pj.phase);
        acc += static_cast<long double>(ei.amp[k] * ej.amp[k]) * (ci * cj);
    }
    return static_cast<double>(acc);
}

void check_inputs(const Observation& x, std::span<const ComponentParams> measured,
                  std::span<const Envelope> envelopes) {
    if (measured.empty()) throw InvalidArgument("likelihood: at least one hypothesis is required");
    if (measured.size() != envelopes.size()) throw InvalidArgument("likelihood: params/envelopes length mismatch");
    if (!(x.sigma > 0.0)) throw InvalidArgument("likelihood: sigma must be positive");
    for (const auto& env : envelopes) {
        if (env.size() != x.samples.size() || env.phase.size() != env.amp.size()) {
            throw InvalidArgument("likelihood: envelope length differs from observation length");
        }
    }
}

} // namespace

double k_double_star(const ComponentParams& i_params, const Envelope& i_env, const ComponentParams& j_params,
                     const Envelope& j_env) {
    return correlation(i_params, i_env, j_params, j_env, "k_double_star");
}

double k_star(const ComponentParams& i_measured, const ComponentParams& j_true, const Envelope& i_env,
              const Envelope& j_env) {
    return correlation(i_measured, i_env, j_true, j_env, "k_star");
}

CorrelationDecomposition decompose_k(const ComponentParams& i_params, const Envelope& i_env,
                                     const ComponentParams& j_params, const Envelope& j_env, Role j_role) {
    require_same_length(i_env, j_env, "decompose_k");
    long double vc = 0.0L, vs = 0.0L, wc = 0.0L, ws = 0.0L;
    const double dw = i_params.frequency - j_params.frequency;
    const double sw = i_params.frequency + j_params.frequency;
    for (std::size_t k = 0; k < i_env.size(); ++k) {
        const double t = static_cast<double>(k + 1);
        const long double ff = i_env.amp[k] * j_env.amp[k];
        const double diff = dw * t + i_env.phase[k] - j_env.phase[k];
        const double sum = sw * t + i_env.phase[k] + j_env.phase[k];
        vc += ff * std::cos(diff);
        vs += ff * std::sin(diff);
        wc += ff * std::cos(sum);
        ws += ff * std::sin(sum);
    }
    return {static_cast<double>(vc / 2), static_cast<double>(vs / 2), static_cast<double>(wc / 2),
            static_cast<double>(ws / 2), j_role};
}

double recompose_k(const CorrelationDecomposition& d, double phase_i, double phase_j) noexcept {
    const double diff = phase_i - phase_j;
    const double sum = phase_i + phase_j;
    return d.v_cos * std::cos(diff) + d.v_sin * std::sin(diff) + d.w_cos * std::cos(sum) + d.w_sin * std::sin(sum);
}

std::vector<double> reference_waveform(const ComponentParams& params, const Envelope& env) {
    std::vector<double> r(env.size());
    for (std::size_t k = 0; k < env.size(); ++k) {
        const double t = static_cast<double>(k + 1);
        r[k] = env.amp[k] * std::cos(params.frequency * t + env.phase[k] - params.phase);
    }
    return r;
}

double log_likelihood(const Observation& x, std::size_t nu, std::span<const ComponentParams> measured,
                      std::span<const Envelope> envelopes) {
    check_inputs(x, measured, envelopes);
    if (nu < 1 || nu > measured.size()) throw InvalidArgument("log_likelihood: nu must lie in 1..nu_max");

    long double data = 0.0L;
    for (std::size_t i = 0; i < nu; ++i) {
        const auto r = reference_waveform(measured[i], envelopes[i]);
        long double dot = 0.0L;
        for (std::size_t k = 0; k < r.size(); ++k) dot += static_cast<long double>(x.samples[k]) * r[k];
        data += measured[i].amplitude * dot;
    }
    long double quad = 0.0L;
    for (std::size_t i = 0; i < nu; ++i) {
        for (std::size_t j = 0; j < nu; ++j) {
            quad += static_cast<long double>(measured[i].amplitude) * measured[j].amplitude *
                    k_double_star(measured[i], envelopes[i], measured[j], envelopes[j]);
        }
    }
    const long double s2 = static_cast<long double>(x.sigma) * x.sigma;
    return static_cast<double>(data / s2 - quad / (2 * s2));
}

std::size_t argmax_order(const LikelihoodProfile& profile) {
    if (profile.values.empty()) throw InvalidArgument("argmax_order: empty profile");
    std::size_t best = 0;
    for (std::size_t k = 1; k < profile.values.size(); ++k) {
        if (profile.values[k] > profile.values[best]) best = k;
    }
    return best + 1;
}

QlEstimator::QlEstimator(std::span<const ComponentParams> measured, std::span<const Envelope> envelopes) {
    if (measured.empty()) throw InvalidArgument("QlEstimator: at least one hypothesis is required");
    if (measured.size() != envelopes.size()) throw InvalidArgument("QlEstimator: params/envelopes length mismatch");
    n_samples_ = envelopes[0].size();
    const std::size_t m = measured.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (envelopes[i].size() != n_samples_ || envelopes[i].phase.size() != n_samples_) {
            throw InvalidArgument("QlEstimator: envelope lengths differ");
        }
        amplitudes_.push_back(measured[i].amplitude);
        references_.push_back(reference_waveform(measured[i], envelopes[i]));
    }
    k_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double v = k_double_star(measured[i], envelopes[i], measured[j], envelopes[j]);
            k_[i * m + j] = v;
            k_[j * m + i] = v;
        }
    }
}

LikelihoodProfile QlEstimator::profile(std::span<const double> samples, double sigma) const {
    if (samples.size() != n_samples_) throw InvalidArgument("likelihood_profile: observation length mismatch");
    if (!(sigma > 0.0)) throw InvalidArgument("likelihood_profile: sigma must be positive");
    const std::size_t m = nu_max();
    const long double s2 = static_cast<long double>(sigma) * sigma;
    LikelihoodProfile out;
    out.values.reserve(m);
    long double running = 0.0L;
    for (std::size_t v = 0; v < m; ++v) {
        const auto& r = references_[v];
        long double dot = 0.0L;
        for (std::size_t k = 0; k < n_samples_; ++k) dot += static_cast<long double>(samples[k]) * r[k];
        long double cross = 0.0L;
        for (std::size_t j = 0; j < v; ++j) cross += static_cast<long double>(amplitudes_[j]) * k(v, j);
        const long double a = amplitudes_[v];
        // adds the new data term and one row+column of the quadratic form
        running += (a * dot - a * a * k(v, v) / 2 - a * cross) / s2;
        out.values.push_back(static_cast<double>(running));
    }
    return out;
}

std::size_t QlEstimator::estimate(std::span<const double> samples, double sigma) const {
    return argmax_order(profile(samples, sigma));
}

LikelihoodProfile likelihood_profile(const Observation& x, std::span<const ComponentParams> measured,
                                     std::span<const Envelope> envelopes) {
    check_inputs(x, measured, envelopes);
    return QlEstimator(measured, envelopes).profile(x.samples, x.sigma);
}

std::size_t ql_estimate(const Observation& x, std::span<const ComponentParams> measured,
                        std::span<const Envelope> envelopes) {
    return argmax_order(likelihood_profile(x, measured, envelopes));
}

} // namespace qlorder
