#pragma once

#include "qlorder/signal_model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qlorder {

/// How a dB figure maps onto the noise scale.
///   amplitude: z = a0^2 / (2 sigma)       (default)
///   power:     z = a0^2 / (2 sigma^2)
enum class SnrConvention { amplitude, power };

double snr_to_sigma(double snr_db, double a0, SnrConvention convention = SnrConvention::amplitude);

struct TrialConfig {
    SignalSpec spec;
    std::vector<ParamErrors> errors; // one shared entry, or one per component
    double snr_db = 0.0;
    std::size_t n_trials = 20000;
    std::uint64_t base_seed = 1;
    SnrConvention convention = SnrConvention::amplitude;
    unsigned threads = 1;

    /// Amplitude used in the SNR definition: the first true component's.
    double reference_amplitude() const;
    double sigma() const;
};

struct McEstimate {
    double p_err = 0.0;
    double std_err = 0.0;
    std::size_t n_trials = 0;
    std::vector<std::size_t> histogram; // histogram[k] = count of nu_hat == k + 1

    friend bool operator==(const McEstimate&, const McEstimate&) = default;
};

struct CurvePoint {
    double snr_db = 0.0;
    McEstimate estimate;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Trial k draws its noise from derive_key(base_seed, stream, k), so the
/// result does not depend on `threads`.
McEstimate run_trials(const TrialConfig& config, std::uint64_t stream = 0);

/// One run_trials per SNR; row i uses stream i.
std::vector<CurvePoint> error_curve(const TrialConfig& config, std::span<const double> snr_list);

} // namespace qlorder
