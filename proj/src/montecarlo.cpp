#include "qlorder/montecarlo.hpp"

#include "qlorder/errors.hpp"
#include "qlorder/likelihood.hpp"
#include "qlorder/noise.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace qlorder {

double snr_to_sigma(double snr_db, double a0, SnrConvention convention) {
    if (!(a0 > 0.0)) throw InvalidArgument("snr_to_sigma: a0 must be positive");
    const double ratio = a0 * a0 / (2.0 * std::pow(10.0, snr_db / 10.0));
    return convention == SnrConvention::amplitude ? ratio : std::sqrt(ratio);
}

double TrialConfig::reference_amplitude() const {
    if (spec.components.empty()) throw InvalidArgument("trial config: no components");
    return std::abs(spec.components.front().params.amplitude);
}

double TrialConfig::sigma() const { return snr_to_sigma(snr_db, reference_amplitude(), convention); }

namespace {

void tally(const QlEstimator& estimator, std::span<const double> clean, double sigma, std::uint64_t base_seed,
           std::uint64_t stream, std::size_t first, std::size_t last, std::vector<std::size_t>& counts) {
    std::vector<double> x(clean.size());
    for (std::size_t trial = first; trial < last; ++trial) {
        NoiseStream noise(derive_key(base_seed, stream, trial));
        for (std::size_t t = 0; t < x.size(); ++t) x[t] = clean[t] + sigma * noise.next();
        ++counts[estimator.estimate(x, sigma) - 1];
    }
}

} // namespace

McEstimate run_trials(const TrialConfig& config, std::uint64_t stream) {
    config.spec.validate();
    if (config.n_trials < 1) throw InvalidArgument("run_trials: n_trials must be at least 1");
    const double sigma = config.sigma();
    const auto truth = config.spec.params();
    const auto envs = config.spec.envelopes();
    const auto measured = apply_errors(truth, config.errors);
    const QlEstimator estimator(measured, envs);
    const auto clean = synthesize(config.spec, config.spec.nu_true);
    const std::size_t nu_max = config.spec.nu_max();

    const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, config.n_trials);
    std::vector<std::vector<std::size_t>> partial(workers, std::vector<std::size_t>(nu_max, 0));
    auto chunk_begin = [&](std::size_t w) { return config.n_trials * w / workers; };
    if (workers == 1) {
        tally(estimator, clean, sigma, config.base_seed, stream, 0, config.n_trials, partial[0]);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                tally(estimator, clean, sigma, config.base_seed, stream, chunk_begin(w), chunk_begin(w + 1),
                      partial[w]);
            });
        }
    }

    McEstimate out;
    out.n_trials = config.n_trials;
    out.histogram.assign(nu_max, 0);
    for (const auto& counts : partial) {
        for (std::size_t k = 0; k < nu_max; ++k) out.histogram[k] += counts[k];
    }
    const std::size_t errors = config.n_trials - out.histogram[config.spec.nu_true - 1];
    out.p_err = static_cast<double>(errors) / static_cast<double>(config.n_trials);
    out.std_err = std::sqrt(out.p_err * (1.0 - out.p_err) / static_cast<double>(config.n_trials));
    return out;
}

std::vector<CurvePoint> error_curve(const TrialConfig& config, std::span<const double> snr_list) {
    if (snr_list.empty()) throw InvalidArgument("error_curve: empty SNR list");
    std::vector<CurvePoint> rows;
    rows.reserve(snr_list.size());
    auto cfg = config;
    for (std::size_t i = 0; i < snr_list.size(); ++i) {
        cfg.snr_db = snr_list[i];
        rows.push_back({snr_list[i], run_trials(cfg, i)});
    }
    return rows;
}

} // namespace qlorder
