#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qlorder {

/// Pre-sampled amplitude envelope f(t) and phase envelope Psi(t) at t = 1..N.
/// Index 0 holds t = 1.
struct Envelope {
    std::vector<double> amp;
    std::vector<double> phase;

    /// f = 1, Psi = 0: the plain sum-of-sinusoids case.
    static Envelope constant(std::size_t n_samples);

    std::size_t size() const noexcept { return amp.size(); }
    void validate() const;
};

struct ComponentParams {
    double amplitude = 0.0;
    double frequency = 0.0; // rad/sample, [0, 2pi)
    double phase = 0.0;     // rad, [0, 2pi)

    friend bool operator==(const ComponentParams&, const ComponentParams&) = default;
};

/// Absolute measurement errors of one component (or of all of them, when shared).
struct ParamErrors {
    double d_amp = 0.0;
    double d_freq = 0.0;
    double d_phase = 0.0;

    friend bool operator==(const ParamErrors&, const ParamErrors&) = default;
};

struct Component {
    ComponentParams params;
    Envelope envelope;
};

struct SignalSpec {
    std::size_t n_samples = 0;
    std::vector<Component> components; // nu_max entries
    std::size_t nu_true = 1;

    std::size_t nu_max() const noexcept { return components.size(); }
    std::vector<ComponentParams> params() const;
    std::vector<Envelope> envelopes() const;
    void validate() const;
};

struct Observation {
    std::vector<double> samples;
    double sigma = 1.0;
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double radians) noexcept;

/// Spec whose components all use constant envelopes.
SignalSpec make_constant_envelope_spec(std::size_t n_samples, std::span<const ComponentParams> params,
                                       std::size_t nu_true);

/// s(t) = sum_{i<=nu} a_i f_i(t) cos(w_i t - phi_i + Psi_i(t)), t = 1..N.
std::vector<double> synthesize(const SignalSpec& spec, std::size_t nu);

/// Sum of the first `nu` components of `params` over the given envelopes.
std::vector<double> synthesize(std::span<const ComponentParams> params, std::span<const Envelope> envelopes,
                               std::size_t nu);

/// synthesize(spec, nu_true) plus sigma * n(t), n drawn from NoiseStream(seed).
Observation observe(const SignalSpec& spec, double sigma, std::uint64_t seed);

/// Component-wise a0 + da, w0 + dw, phi0 + dphi; frequency and phase wrapped.
/// A single-entry `errors` list is shared by every component.
std::vector<ComponentParams> apply_errors(std::span<const ComponentParams> true_params,
                                          std::span<const ParamErrors> errors);

} // namespace qlorder
