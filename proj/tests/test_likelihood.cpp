#include "oracles.hpp"

#include "qlorder/errors.hpp"
#include "qlorder/experiments.hpp"
#include "qlorder/likelihood.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qlorder;

namespace {

constexpr double pi = std::numbers::pi;

SignalSpec five_tones(std::size_t nu_true, std::size_t nu_max) {
    auto c = preset_five_tones();
    c.nu_true = nu_true;
    c.nu_max = nu_max;
    return build_spec(c);
}

Envelope random_envelope(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> amp(-1.5, 1.5), ph(-pi, pi);
    Envelope e = Envelope::constant(n);
    for (std::size_t k = 0; k < n; ++k) {
        e.amp[k] = amp(rng);
        e.phase[k] = ph(rng);
    }
    return e;
}

// Likelihood written from the squared-error form, with the model signal built
// sample by sample: (1/s^2) sum x s - (1/2 s^2) sum s^2.
double naive_likelihood(const Observation& x, std::size_t nu, const std::vector<ComponentParams>& p,
                        const std::vector<Envelope>& env) {
    long double xs = 0.0L, ss = 0.0L;
    for (std::size_t k = 0; k < x.samples.size(); ++k) {
        const double t = static_cast<double>(k + 1);
        long double s = 0.0L;
        for (std::size_t i = 0; i < nu; ++i) {
            s += p[i].amplitude * env[i].amp[k] * std::cos(p[i].frequency * t - p[i].phase + env[i].phase[k]);
        }
        xs += x.samples[k] * s;
        ss += s * s;
    }
    const double s2 = x.sigma * x.sigma;
    return static_cast<double>(xs / s2 - ss / (2 * s2));
}

double relative_gap(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

} // namespace

TEST_CASE("k_double_star: four-term hand sum") {
    const ComponentParams p{1.0, pi / 2, 0.0};
    const auto env = Envelope::constant(4);
    CHECK(k_double_star(p, env, p, env) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("k_double_star: diagonal against the Dirichlet closed form") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi);
    for (std::size_t n : {64u, 512u, 4096u}) {
        const auto env = Envelope::constant(n);
        for (int rep = 0; rep < 20; ++rep) {
            const ComponentParams p{1.0, ang(rng), ang(rng)};
            const double closed = n / 2.0 + 0.5 * oracle::cos_sum(2 * p.frequency, -2 * p.phase, n);
            CHECK(k_double_star(p, env, p, env) == doctest::Approx(closed).epsilon(1e-10));
        }
    }
}

TEST_CASE("decomposition recomposes to the direct sums") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi);
    const std::size_t n = 200;
    for (int rep = 0; rep < 300; ++rep) {
        const auto ei = random_envelope(rng, n);
        const auto ej = random_envelope(rng, n);
        const ComponentParams pi_{1.0, ang(rng), ang(rng)};
        const ComponentParams pj{1.0, ang(rng), ang(rng)};
        double scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) scale += std::abs(ei.amp[k] * ej.amp[k]);
        const double direct = oracle::product_sum(pi_.frequency, pi_.phase, ei.amp, ei.phase, pj.frequency, pj.phase,
                                                  ej.amp, ej.phase);
        const auto d = decompose_k(pi_, ei, pj, ej, Role::truth);
        CHECK(d.j_role == Role::truth);
        CHECK(relative_gap(recompose_k(d, pi_.phase, pj.phase), direct, scale) < 1e-9);
        CHECK(relative_gap(k_double_star(pi_, ei, pj, ej), direct, scale) < 1e-12);
        // bound on each coefficient
        for (double v : {d.v_cos, d.v_sin, d.w_cos, d.w_sin}) CHECK(std::abs(v) <= 0.5 * scale + 1e-12);
    }
}

TEST_CASE("decompose_k special cases") {
    const std::size_t n = 128;
    const auto env = Envelope::constant(n);
    SUBCASE("equal frequencies") {
        const auto d = decompose_k({0.4, 1.3, 0.2}, env, {0.4, 1.3, 2.0}, env, Role::measured);
        CHECK(d.v_cos == doctest::Approx(n / 2.0).epsilon(1e-15));
        CHECK(std::abs(d.v_sin) < 1e-15);
    }
    SUBCASE("zero envelope") {
        Envelope zero = env;
        std::fill(zero.amp.begin(), zero.amp.end(), 0.0);
        const auto d = decompose_k({1.0, 0.7, 0.1}, zero, {1.0, 1.9, 0.4}, env, Role::measured);
        CHECK(d.v_cos == 0.0);
        CHECK(d.v_sin == 0.0);
        CHECK(d.w_cos == 0.0);
        CHECK(d.w_sin == 0.0);
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(decompose_k({}, env, {}, Envelope::constant(n - 1), Role::measured), InvalidArgument);
        CHECK_THROWS_AS(k_double_star({}, env, {}, Envelope::constant(3)), InvalidArgument);
        CHECK_THROWS_AS(k_star({}, {}, env, Envelope::constant(3)), InvalidArgument);
    }
}

TEST_CASE("k_star") {
    const auto spec = five_tones(2, 5);
    const auto truth = spec.params();
    const auto envs = spec.envelopes();

    SUBCASE("zero errors collapse to k_double_star") {
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                CHECK(k_star(truth[i], truth[j], envs[i], envs[j]) == k_double_star(truth[i], envs[i], truth[j], envs[j]));
            }
        }
    }
    SUBCASE("adjacent grid tones are nearly orthogonal") {
        const double v = k_star(truth[0], truth[1], envs[0], envs[1]);
        const auto& e = envs[0];
        const double direct =
            oracle::product_sum(truth[0].frequency, truth[0].phase, e.amp, e.phase, truth[1].frequency, truth[1].phase,
                                e.amp, e.phase);
        CHECK(v == doctest::Approx(direct).epsilon(1e-12));
        CHECK(std::abs(v) < 0.05 * 64.0);
    }
}

TEST_CASE("correlation matrix properties") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi);
    for (int rep = 0; rep < 200; ++rep) {
        const auto ei = random_envelope(rng, 50);
        const auto ej = random_envelope(rng, 50);
        const ComponentParams a{1.0, ang(rng), ang(rng)}, b{1.0, ang(rng), ang(rng)};
        CHECK(k_double_star(a, ei, b, ej) == k_double_star(b, ej, a, ei));
        CHECK(k_double_star(a, ei, a, ei) > 0.0);
    }
}

TEST_CASE("log_likelihood") {
    const auto spec = five_tones(2, 3);
    const auto envs = spec.envelopes();

    SUBCASE("zero amplitudes") {
        auto p = spec.params();
        for (auto& c : p) c.amplitude = 0.0;
        const auto x = observe(spec, 0.5, 1);
        CHECK(log_likelihood(x, 3, p, envs) == 0.0);
    }
    SUBCASE("silent data leaves the energy term") {
        const auto p = spec.params();
        const Observation x{std::vector<double>(128, 0.0), 0.7};
        const double k11 = k_double_star(p[0], envs[0], p[0], envs[0]);
        CHECK(log_likelihood(x, 1, p, envs) == doctest::Approx(-p[0].amplitude * p[0].amplitude * k11 / (2 * 0.49)));
    }
    SUBCASE("noiseless data prefers the true order") {
        const auto p = spec.params();
        const Observation x{synthesize(spec, 2), 1.0};
        const double l1 = naive_likelihood(x, 1, p, envs);
        const double l2 = naive_likelihood(x, 2, p, envs);
        CHECK(log_likelihood(x, 2, p, envs) - log_likelihood(x, 1, p, envs) == doctest::Approx(l2 - l1).epsilon(1e-10));
        CHECK(l2 - l1 > 0.0);
    }
    SUBCASE("dimension errors") {
        const auto p = spec.params();
        const Observation x{std::vector<double>(100, 0.0), 1.0};
        CHECK_THROWS_AS(log_likelihood(x, 1, p, envs), InvalidArgument);
        const Observation ok{std::vector<double>(128, 0.0), 1.0};
        CHECK_THROWS_AS(log_likelihood(ok, 0, p, envs), InvalidArgument);
        CHECK_THROWS_AS(log_likelihood(ok, 4, p, envs), InvalidArgument);
    }
}

TEST_CASE("likelihood_profile matches per-order recomputation") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), ang(0.0, 2 * pi), noise(-1.0, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 96, m = 5;
        std::vector<ComponentParams> p;
        std::vector<Envelope> envs;
        for (std::size_t i = 0; i < m; ++i) {
            p.push_back({amp(rng), ang(rng), ang(rng)});
            envs.push_back(random_envelope(rng, n));
        }
        Observation x{std::vector<double>(n), 0.3 + std::abs(amp(rng))};
        for (auto& v : x.samples) v = noise(rng);
        const auto prof = likelihood_profile(x, p, envs);
        REQUIRE(prof.values.size() == m);
        for (std::size_t nu = 1; nu <= m; ++nu) {
            const double naive = naive_likelihood(x, nu, p, envs);
            CHECK(std::abs(prof.values[nu - 1] - naive) <= 1e-10 * std::max(1.0, std::abs(naive)));
            CHECK(std::abs(log_likelihood(x, nu, p, envs) - naive) <= 1e-10 * std::max(1.0, std::abs(naive)));
        }
    }
}

TEST_CASE("likelihood_profile edge cases") {
    const auto spec = five_tones(1, 2);
    auto p = spec.params();
    const auto envs = spec.envelopes();
    const auto x = observe(spec, 1.0, 8);
    SUBCASE("single hypothesis") {
        const std::vector<ComponentParams> one{p[0]};
        const std::vector<Envelope> env1{envs[0]};
        const auto prof = likelihood_profile(x, one, env1);
        REQUIRE(prof.values.size() == 1);
        CHECK(prof.values[0] == doctest::Approx(log_likelihood(x, 1, one, env1)).epsilon(1e-12));
        CHECK(ql_estimate(x, one, env1) == 1);
    }
    SUBCASE("all amplitudes zero") {
        for (auto& c : p) c.amplitude = 0.0;
        for (double v : likelihood_profile(x, p, envs).values) CHECK(v == 0.0);
    }
}

TEST_CASE("ql_estimate") {
    SUBCASE("noiseless data, exact parameters") {
        const auto spec = five_tones(2, 3);
        const Observation x{synthesize(spec, 2), 1e-3};
        CHECK(ql_estimate(x, spec.params(), spec.envelopes()) == 2);
    }
    SUBCASE("noiseless data, moderate measurement errors") {
        for (std::size_t nu0 : {2u, 3u}) {
            const auto spec = five_tones(nu0, 5);
            const auto c = preset_five_tones();
            const ParamErrors e{0.25 * 0.4, 0.02 * c.omega_step(), 0.1};
            const auto measured = apply_errors(spec.params(), std::span<const ParamErrors>(&e, 1));
            const Observation x{synthesize(spec, nu0), 1e-3};
            // exhaustive profile: the maximum must sit at nu0
            const auto prof = likelihood_profile(x, measured, spec.envelopes());
            for (std::size_t k = 0; k < prof.values.size(); ++k) {
                if (k + 1 != nu0) CHECK(prof.values[k] < prof.values[nu0 - 1]);
            }
            CHECK(ql_estimate(x, measured, spec.envelopes()) == nu0);
        }
    }
    SUBCASE("ties go to the smallest order") {
        CHECK(argmax_order(LikelihoodProfile{{1.0, 3.0, 3.0, 2.0}}) == 2);
        CHECK(argmax_order(LikelihoodProfile{{0.0, 0.0}}) == 1);
    }
    SUBCASE("scaling data, sigma and amplitudes together keeps the estimate") {
        const auto spec = five_tones(2, 5);
        auto scaled = spec.params();
        for (auto& p : scaled) p.amplitude *= 3.5;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            auto x = observe(spec, 1.0, seed);
            const auto nu = ql_estimate(x, spec.params(), spec.envelopes());
            for (auto& v : x.samples) v *= 3.5;
            x.sigma *= 3.5;
            CHECK(ql_estimate(x, scaled, spec.envelopes()) == nu);
        }
    }
    SUBCASE("sigma alone does not move the estimate") {
        const auto spec = five_tones(2, 5);
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            auto x = observe(spec, 1.0, seed);
            const auto nu = ql_estimate(x, spec.params(), spec.envelopes());
            x.sigma = 0.01;
            CHECK(ql_estimate(x, spec.params(), spec.envelopes()) == nu);
        }
    }
}

TEST_CASE("QlEstimator exposes K**") {
    const auto spec = five_tones(2, 3);
    const auto p = spec.params();
    const auto envs = spec.envelopes();
    const QlEstimator est(p, envs);
    CHECK(est.nu_max() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(est.k(i, j) == k_double_star(p[i], envs[i], p[j], envs[j]));
    }
    CHECK_THROWS_AS(est.profile(std::vector<double>(5, 0.0), 1.0), InvalidArgument);
}
