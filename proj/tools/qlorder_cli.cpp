// qlorder: command-line front end for the QL model-order estimator.
//
// Exit codes: 0 success, 1 usage/config error, 2 numerical degeneracy.

#include "qlorder/errors.hpp"
#include "qlorder/experiments.hpp"
#include "qlorder/likelihood.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using namespace qlorder;

struct Common {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::vector<double> snr_db;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config_path, "Experiment config file (default: built-in five-tone preset)");
    cmd->add_option("--out", common.out_path, "Output CSV path (default: config 'output', else stdout)");
    cmd->add_option("--seed", common.seed, "Base seed");
    cmd->add_option("--trials", common.trials, "Monte Carlo trials per SNR");
    cmd->add_option("--snr-db", common.snr_db, "Comma-separated SNR list in dB; a single value also sets the fixed SNR")->delimiter(',');
    cmd->add_option("--threads", common.threads, "Worker threads for Monte Carlo");
}

ExperimentConfig resolve(const Common& common) {
    ExperimentConfig c = common.config_path.empty() ? preset_five_tones() : load_config(common.config_path);
    if (common.seed) c.seed = *common.seed;
    if (common.trials) c.trials = *common.trials;
    if (common.threads) c.threads = *common.threads;
    if (!common.snr_db.empty()) c.snr_grid = common.snr_db;
    if (common.snr_db.size() == 1) c.snr_fixed = common.snr_db.front();
    if (!common.out_path.empty()) c.output = common.out_path;
    return c;
}

template <class Fn>
void emit(const ExperimentConfig& c, Fn&& write) {
    if (c.output.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(c.output);
    if (!out) throw ConfigError(c.output, 0, "cannot open output file");
    write(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-likelihood estimation of the number of sinusoids"};
    app.require_subcommand(1);

    Common common;
    std::string samples_path;
    auto* estimate = app.add_subcommand("estimate", "Estimate the number of sinusoids in a samples file");
    add_common(estimate, common);
    estimate->add_option("--samples", samples_path, "One real sample per line, t = 1..N")->required();

    auto* theory = app.add_subcommand("theory", "Print R, Q, rho and the abridged error probability");
    add_common(theory, common);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo error probability vs SNR, joined with theory");
    add_common(simulate, common);

    std::string sweep_var = "delta_a";
    std::vector<double> grid;
    auto* sweep = app.add_subcommand("sweep", "Normalized abridged error probability over one error variable");
    add_common(sweep, common);
    sweep->add_option("--var", sweep_var, "delta_a, delta_omega or delta_phi");
    sweep->add_option("--grid", grid, "Comma-separated values of the swept variable")->delimiter(',')->required();

    auto* worst = app.add_subcommand("worstcase", "Largest abridged error probability over the [box] error ranges");
    add_common(worst, common);

    auto* preset = app.add_subcommand("preset", "Dump the built-in five-tone config");
    add_common(preset, common);

    double d_omega = 0.0, carrier = 0.0, speed = 0.0;
    auto* doppler = app.add_subcommand("doppler", "Source speed limit implied by a frequency error bound");
    doppler->add_option("--delta-omega", d_omega, "Largest allowed |frequency error|, rad/sample")->required();
    doppler->add_option("--carrier", carrier, "Carrier frequency, rad/sample")->required();
    doppler->add_option("--wave-speed", speed, "Propagation speed, m/s")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (doppler->parsed()) {
            std::cout << format_double(doppler_speed_limit(d_omega, carrier, speed)) << '\n';
            return 0;
        }
        const ExperimentConfig c = resolve(common);
        if (estimate->parsed()) {
            const auto samples = read_samples(samples_path);
            auto cfg = c;
            cfg.n_samples = samples.size();
            const auto spec = build_spec(cfg);
            const auto measured = apply_errors(spec.params(), absolute_errors(cfg));
            const Observation x{samples, sigma_at(cfg, cfg.snr_fixed)};
            std::cout << ql_estimate(x, measured, spec.envelopes()) << '\n';
        } else if (theory->parsed()) {
            std::vector<double> snr = common.snr_db.empty() ? std::vector<double>{c.snr_fixed} : c.snr_grid;
            const auto rows = theory_rows(c, snr);
            emit(c, [&](std::ostream& out) { write_csv(out, std::span<const TheoryRow>(rows)); });
        } else if (simulate->parsed()) {
            const auto rows = sweep_error_probability(c);
            emit(c, [&](std::ostream& out) { write_csv(out, std::span<const ErrorProbabilityRow>(rows)); });
        } else if (sweep->parsed()) {
            const auto rows = sweep_normalized(c, parse_sweep_var(sweep_var), grid);
            emit(c, [&](std::ostream& out) { write_csv(out, std::span<const NormalizedRow>(rows)); });
        } else if (worst->parsed()) {
            const auto row = worst_case_report(c, config_box(c));
            emit(c, [&](std::ostream& out) { write_csv(out, row); });
        } else if (preset->parsed()) {
            emit(c, [&](std::ostream& out) { out << serialize_config(c); });
        }
    } catch (const DegenerateError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
