#include "qlorder/errors.hpp"
#include "qlorder/experiments.hpp"
#include "qlorder/montecarlo.hpp"
#include "qlorder/theory.hpp"

#include <doctest.h>

#include <cmath>

using namespace qlorder;

namespace {

TrialConfig figure_config(std::size_t nu_true, std::size_t nu_max, double snr_db, std::size_t trials) {
    auto c = preset_five_tones();
    c.nu_true = nu_true;
    c.nu_max = nu_max;
    c.trials = trials;
    auto t = trial_config(c);
    t.snr_db = snr_db;
    return t;
}

double exact_for(const TrialConfig& t) {
    const auto truth = t.spec.params();
    const auto measured = apply_errors(truth, t.errors);
    return abridged_error_exact(decision_stats(truth, measured, t.spec.envelopes(), t.sigma(), t.spec.nu_true));
}

} // namespace

TEST_CASE("snr_to_sigma") {
    CHECK(snr_to_sigma(0.0, 0.4) == doctest::Approx(0.08).epsilon(1e-15));
    CHECK(snr_to_sigma(-11.0, 0.4) == doctest::Approx(0.08 * std::pow(10.0, 1.1)).epsilon(1e-14));
    CHECK(snr_to_sigma(-11.0, 0.4) == doctest::Approx(1.00714).epsilon(1e-5));
    // doubling z (linear, +3.0103 dB) halves sigma
    const double z = 10 * std::log10(2.0);
    CHECK(snr_to_sigma(-5.0 + z, 0.4) == doctest::Approx(snr_to_sigma(-5.0, 0.4) / 2).epsilon(1e-14));
    CHECK(snr_to_sigma(0.0, 0.4, SnrConvention::power) == doctest::Approx(std::sqrt(0.08)).epsilon(1e-15));
    CHECK_THROWS_AS(snr_to_sigma(0.0, 0.0), InvalidArgument);
}

TEST_CASE("run_trials basics") {
    SUBCASE("single trial") {
        const auto est = run_trials(figure_config(2, 3, -12.0, 1));
        CHECK((est.p_err == 0.0 || est.p_err == 1.0));
        CHECK(est.std_err == 0.0);
        CHECK(est.n_trials == 1);
        std::size_t total = 0;
        for (auto c : est.histogram) total += c;
        CHECK(total == 1);
    }
    SUBCASE("very high SNR: no errors") {
        const auto est = run_trials(figure_config(2, 3, 10.0, 1000));
        CHECK(est.p_err == 0.0);
        CHECK(est.histogram[1] == 1000);
    }
    SUBCASE("invariants of the estimate") {
        const auto est = run_trials(figure_config(3, 5, -12.0, 3000));
        const std::size_t wrong = 3000 - est.histogram[2];
        CHECK(est.p_err == static_cast<double>(wrong) / 3000.0);
        CHECK(est.std_err == doctest::Approx(std::sqrt(est.p_err * (1 - est.p_err) / 3000.0)));
    }
    SUBCASE("zero trials rejected") {
        auto t = figure_config(2, 3, 0.0, 10);
        t.n_trials = 0;
        CHECK_THROWS_AS(run_trials(t), InvalidArgument);
    }
}

TEST_CASE("run_trials is independent of thread count") {
    auto cfg = figure_config(3, 5, -11.0, 2500);
    const auto serial = run_trials(cfg, 4);
    for (unsigned threads : {2u, 3u, 7u}) {
        cfg.threads = threads;
        CHECK(run_trials(cfg, 4) == serial);
    }
}

TEST_CASE("two-hypothesis-neighbour case matches theory") {
    for (double snr : {-13.0, -10.0}) {
        const auto cfg = figure_config(2, 3, snr, 6000);
        const auto est = run_trials(cfg);
        CHECK(std::abs(est.p_err - exact_for(cfg)) <= 3 * est.std_err);
    }
}

TEST_CASE("abridged probability bounds the error from below") {
    for (double snr : {-14.0, -11.0, -8.0}) {
        const auto cfg = figure_config(3, 5, snr, 6000);
        const auto est = run_trials(cfg);
        CHECK(est.p_err + 3 * est.std_err >= exact_for(cfg));
    }
}

TEST_CASE("error_curve") {
    const auto cfg = figure_config(2, 3, 0.0, 2000);
    SUBCASE("single SNR equals run_trials") {
        const double snr[] = {-12.0};
        const auto rows = error_curve(cfg, snr);
        REQUIRE(rows.size() == 1);
        auto single = cfg;
        single.snr_db = -12.0;
        CHECK(rows[0].estimate == run_trials(single));
        CHECK(rows[0].snr_db == -12.0);
    }
    SUBCASE("deterministic and decreasing") {
        const double snr[] = {-16.0, -13.0, -10.0, -7.0};
        const auto a = error_curve(cfg, snr);
        const auto b = error_curve(cfg, snr);
        CHECK(a == b);
        for (std::size_t i = 1; i < a.size(); ++i) {
            CHECK(a[i].estimate.p_err <= a[i - 1].estimate.p_err + 3 * (a[i].estimate.std_err + a[i - 1].estimate.std_err));
        }
        CHECK(a.back().estimate.p_err < a.front().estimate.p_err);
    }
    SUBCASE("rows use disjoint seed streams") {
        const double snr[] = {-12.0, -12.0};
        const auto rows = error_curve(cfg, snr);
        CHECK(rows[0].estimate.histogram != rows[1].estimate.histogram);
    }
    SUBCASE("empty list rejected") { CHECK_THROWS_AS(error_curve(cfg, std::span<const double>{}), InvalidArgument); }
}

TEST_CASE("errors concentrate on adjacent orders as SNR grows") {
    const double snr[] = {-20.0, -16.0, -12.0};
    const auto rows = error_curve(figure_config(3, 5, 0.0, 20000), snr);
    double prev = 1e9;
    for (const auto& row : rows) {
        const auto& h = row.estimate.histogram;
        const double far = static_cast<double>(h[0] + h[4]);
        const double near = static_cast<double>(h[1] + h[3]);
        REQUIRE(near > 0.0);
        const double ratio = far / near;
        CHECK(ratio < prev);
        prev = ratio;
    }
}
