#pragma once

#include "qlorder/montecarlo.hpp"
#include "qlorder/theory.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qlorder {

enum class EnvelopeKind {
    constant, // f = 1, Psi = 0
    am,       // f = 1 + m cos(2 pi t / N), Psi = 0; m = envelope_param
    chirp,    // f = 1, Psi = beta t^2; beta = envelope_param
};

enum class SweepVar { delta_a, delta_omega, delta_phi };

/// Everything a CLI run needs. Errors are relative for amplitude
/// (delta_a = da / a0) and frequency (delta_omega = dw / w_step), absolute
/// for phase. Each error list holds one shared value or one per component.
struct ExperimentConfig {
    std::string scenario = "custom";

    std::size_t n_samples = 128;
    double bandwidth = 1.0; // w_step = 2 pi bandwidth / n_samples
    std::vector<double> amplitudes;
    std::vector<double> frequencies;
    std::vector<double> phases;
    EnvelopeKind envelope = EnvelopeKind::constant;
    double envelope_param = 0.0;

    std::vector<double> delta_a{0.0};
    std::vector<double> delta_omega{0.0};
    std::vector<double> delta_phi{0.0};

    std::size_t nu_true = 2;
    std::size_t nu_max = 3;
    std::vector<double> snr_grid;
    double snr_fixed = -11.0;
    SnrConvention snr_convention = SnrConvention::amplitude;
    std::size_t trials = 20000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string output;

    // Worst-case search box, in the same units as the errors.
    std::optional<Interval> box_delta_a;
    std::optional<Interval> box_delta_omega;
    std::optional<Interval> box_delta_phi;
    std::size_t box_points = 11;

    double omega_step() const noexcept;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Five grid tones a0 = 0.4, N = 128, nu0 = 2, nu_max = 3, errors
/// delta_a = 0.25, delta_omega = 0.02, delta_phi = 0.1.
ExperimentConfig preset_five_tones();

ExperimentConfig parse_config(std::string_view text, const std::string& path = "<config>");
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

SignalSpec build_spec(const ExperimentConfig& config);
std::vector<ParamErrors> absolute_errors(const ExperimentConfig& config);
double sigma_at(const ExperimentConfig& config, double snr_db);
TrialConfig trial_config(const ExperimentConfig& config);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// One real per line, t = 1..N; blank lines and '#' comments skipped.
std::vector<double> read_samples(const std::string& path);

struct ErrorProbabilityRow {
    double snr_db = 0.0;
    double p_mc = 0.0;
    double std_err = 0.0;
    double p_exact = 0.0;
    double p_approx = 0.0;
    bool approx_valid = false;
};

struct TheoryRow {
    double snr_db = 0.0;
    DecisionStats stats;
    AbridgedResult result;
};

struct NormalizedRow {
    double var = 0.0;
    double p_a = 0.0;
    double p_a_normalized = 0.0;
};

struct WorstCaseRow {
    double p_max = 0.0;
    double delta_a = 0.0;
    double delta_omega = 0.0;
    double delta_phi = 0.0;
    double p_at_zero = 0.0;
};

std::vector<TheoryRow> theory_rows(const ExperimentConfig& config, std::span<const double> snr_list);
std::vector<ErrorProbabilityRow> sweep_error_probability(const ExperimentConfig& config);
std::vector<NormalizedRow> sweep_normalized(const ExperimentConfig& config, SweepVar var,
                                            std::span<const double> grid);
/// Shared-error box from the config's box_* entries (missing entries pin the
/// error at its configured value).
ErrorBox config_box(const ExperimentConfig& config);
WorstCaseRow worst_case_report(const ExperimentConfig& config, const ErrorBox& box);

SweepVar parse_sweep_var(std::string_view name);
std::string_view to_string(SweepVar var) noexcept;

void write_csv(std::ostream& out, std::span<const ErrorProbabilityRow> rows);
void write_csv(std::ostream& out, std::span<const TheoryRow> rows);
void write_csv(std::ostream& out, std::span<const NormalizedRow> rows);
void write_csv(std::ostream& out, const WorstCaseRow& row);

/// First-order Doppler: v = c * |dw| / w.
double doppler_speed_limit(double delta_omega_abs_max, double carrier_omega, double wave_speed);

} // namespace qlorder
