#include "qlorder/signal_model.hpp"

#include "qlorder/errors.hpp"
#include "qlorder/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qlorder {

Envelope Envelope::constant(std::size_t n_samples) {
    return Envelope{std::vector<double>(n_samples, 1.0), std::vector<double>(n_samples, 0.0)};
}

void Envelope::validate() const {
    if (amp.empty() || amp.size() != phase.size()) {
        throw InvalidArgument("envelope: amplitude and phase sequences must be non-empty and equally long");
    }
    for (std::size_t t = 0; t < amp.size(); ++t) {
        if (!std::isfinite(amp[t]) || !std::isfinite(phase[t])) {
            throw InvalidArgument("envelope: non-finite entry at t = " + std::to_string(t + 1));
        }
    }
}

std::vector<ComponentParams> SignalSpec::params() const {
    std::vector<ComponentParams> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c.params);
    return out;
}

std::vector<Envelope> SignalSpec::envelopes() const {
    std::vector<Envelope> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c.envelope);
    return out;
}

void SignalSpec::validate() const {
    if (n_samples == 0) throw InvalidArgument("signal spec: n_samples must be positive");
    if (nu_true < 1 || nu_true > components.size()) {
        throw InvalidArgument("signal spec: nu_true must lie in 1..nu_max");
    }
    for (const auto& c : components) {
        c.envelope.validate();
        if (c.envelope.size() != n_samples) {
            throw InvalidArgument("signal spec: envelope length differs from n_samples");
        }
        if (!std::isfinite(c.params.amplitude) || !std::isfinite(c.params.frequency) ||
            !std::isfinite(c.params.phase)) {
            throw InvalidArgument("signal spec: non-finite component parameter");
        }
    }
}

double wrap_angle(double radians) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(radians, two_pi);
    if (w < 0.0) w += two_pi;
    // fmod of a tiny negative value can round up to exactly 2pi
    if (w >= two_pi) w = 0.0;
    return w;
}

SignalSpec make_constant_envelope_spec(std::size_t n_samples, std::span<const ComponentParams> params,
                                       std::size_t nu_true) {
    SignalSpec spec;
    spec.n_samples = n_samples;
    spec.nu_true = nu_true;
    for (const auto& p : params) spec.components.push_back({p, Envelope::constant(n_samples)});
    spec.validate();
    return spec;
}

std::vector<double> synthesize(std::span<const ComponentParams> params, std::span<const Envelope> envelopes,
                               std::size_t nu) {
    if (params.size() != envelopes.size()) throw InvalidArgument("synthesize: params/envelopes length mismatch");
    if (nu < 1 || nu > params.size()) throw InvalidArgument("synthesize: nu must lie in 1..nu_max");
    const std::size_t n = envelopes[0].size();
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < nu; ++i) {
        const auto& p = params[i];
        const auto& env = envelopes[i];
        if (env.size() != n) throw InvalidArgument("synthesize: envelope lengths differ");
        for (std::size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k + 1);
            s[k] += p.amplitude * env.amp[k] * std::cos(p.frequency * t - p.phase + env.phase[k]);
        }
    }
    return s;
}

std::vector<double> synthesize(const SignalSpec& spec, std::size_t nu) {
    if (nu < 1 || nu > spec.nu_max()) throw InvalidArgument("synthesize: nu must lie in 1..nu_max");
    return synthesize(spec.params(), spec.envelopes(), nu);
}

Observation observe(const SignalSpec& spec, double sigma, std::uint64_t seed) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("observe: sigma must be positive");
    Observation obs{synthesize(spec, spec.nu_true), sigma};
    NoiseStream noise(seed);
    for (double& v : obs.samples) v += sigma * noise.next();
    return obs;
}

std::vector<ComponentParams> apply_errors(std::span<const ComponentParams> true_params,
                                          std::span<const ParamErrors> errors) {
    const bool shared = errors.size() == 1;
    if (!shared && errors.size() != true_params.size()) {
        throw InvalidArgument("apply_errors: " + std::to_string(errors.size()) + " error triples for " +
                              std::to_string(true_params.size()) + " components");
    }
    std::vector<ComponentParams> out;
    out.reserve(true_params.size());
    for (std::size_t i = 0; i < true_params.size(); ++i) {
        const auto& e = shared ? errors[0] : errors[i];
        const auto& p = true_params[i];
        out.push_back({p.amplitude + e.d_amp, wrap_angle(p.frequency + e.d_freq), wrap_angle(p.phase + e.d_phase)});
    }
    return out;
}

} // namespace qlorder
