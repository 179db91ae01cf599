#include "qlorder/theory.hpp"

#include "qlorder/errors.hpp"
#include "qlorder/likelihood.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace qlorder {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// The integral starts below -max(R, Q) - 8, and never above -12 (Gaussian mass ~1.8e-33).
constexpr double tail_floor = 12.0;
constexpr double tail_margin = 8.0;
// Beyond this the standard normal density underflows.
constexpr double upper_limit = 40.0;
constexpr double panel_width = 0.5;
constexpr double panel_tolerance = 1e-10;
constexpr unsigned max_depth = 15;
constexpr double step_window = 16.0;
constexpr double rho_slack = 1e-12;
constexpr double degenerate_rho = 1e-10;

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double checked_rho(double rho) {
    if (std::isnan(rho) || std::abs(rho) > 1.0 + rho_slack) {
        throw InvalidArgument("abridged error probability: |rho| must not exceed 1");
    }
    return std::clamp(rho, -1.0, 1.0);
}

double clamp_probability(double p) noexcept { return std::clamp(p, 0.0, 1.0); }

} // namespace

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

void ErrorBox::validate() const {
    if (ranges.empty()) throw InvalidArgument("error box: no ranges");
    for (const auto& r : ranges) {
        for (const Interval* iv : {&r.amp, &r.freq, &r.phase}) {
            if (!std::isfinite(iv->lo) || !std::isfinite(iv->hi) || iv->lo > iv->hi) {
                throw InvalidArgument("error box: every interval needs finite lo <= hi");
            }
        }
    }
}

DecisionStats decision_stats(std::span<const ComponentParams> true_params,
                             std::span<const ComponentParams> measured_params, std::span<const Envelope> envelopes,
                             double sigma, std::size_t nu0) {
    if (nu0 < 1 || nu0 + 1 > measured_params.size()) {
        throw InvalidArgument("decision_stats: need 1 <= nu0 and nu0 + 1 <= nu_max");
    }
    if (true_params.size() < nu0 || envelopes.size() < nu0 + 1) {
        throw InvalidArgument("decision_stats: too few true components or envelopes");
    }
    if (!(sigma > 0.0)) throw InvalidArgument("decision_stats: sigma must be positive");

    const std::size_t m = nu0 - 1; // 0-based index of component nu0
    const std::size_t k = nu0;     // and of nu0 + 1
    auto kk = [&](std::size_t i, std::size_t j) {
        return k_double_star(measured_params[i], envelopes[i], measured_params[j], envelopes[j]);
    };
    auto signal_term = [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j < nu0; ++j) {
            s += true_params[j].amplitude * k_star(measured_params[i], true_params[j], envelopes[i], envelopes[j]);
        }
        return s;
    };

    const double k_mm = kk(m, m);
    const double k_kk = kk(k, k);
    if (!(k_mm > 0.0) || !(k_kk > 0.0)) {
        throw DegenerateError("decision_stats: component " + std::to_string(k_mm > 0.0 ? nu0 + 1 : nu0) +
                              " has a zero-energy reference waveform");
    }
    const double a_m = measured_params[m].amplitude;
    const double a_k = measured_params[k].amplitude;
    if (a_m == 0.0 || a_k == 0.0) {
        throw DegenerateError("decision_stats: zero measured amplitude makes the likelihood margin vanish");
    }

    DecisionStats s;
    if (nu0 == 1) {
        s.r = inf;
    } else {
        double num = signal_term(m) - 0.5 * a_m * k_mm;
        for (std::size_t j = 0; j < m; ++j) num -= measured_params[j].amplitude * kk(m, j);
        s.r = num / (sigma * std::sqrt(k_mm));
    }
    double num_q = -signal_term(k) + 0.5 * a_k * k_kk;
    for (std::size_t j = 0; j < nu0; ++j) num_q += measured_params[j].amplitude * kk(k, j);
    s.q = num_q / (sigma * std::sqrt(k_kk));
    s.rho = kk(m, k) / std::sqrt(k_mm * k_kk);

    if (a_m < 0.0) {
        s.r = -s.r;
        s.rho = -s.rho;
    }
    if (a_k < 0.0) {
        s.q = -s.q;
        s.rho = -s.rho;
    }
    return s;
}

NoiseProjection noise_projection(std::span<const double> unit_noise, const ComponentParams& measured,
                                 const Envelope& env, double sigma) {
    if (unit_noise.size() != env.size()) throw InvalidArgument("noise_projection: length mismatch");
    const auto r = reference_waveform(measured, env);
    long double dot = 0.0L;
    for (std::size_t t = 0; t < r.size(); ++t) dot += static_cast<long double>(unit_noise[t]) * r[t];
    const double k_ii = k_double_star(measured, env, measured, env);
    if (!(k_ii > 0.0)) throw DegenerateError("noise_projection: zero-energy reference waveform");
    NoiseProjection out;
    out.eta = sigma * static_cast<double>(dot);
    out.xi = out.eta / (sigma * std::sqrt(k_ii));
    return out;
}

double abridged_error_exact(const DecisionStats& stats) {
    const double rho = checked_rho(stats.rho);
    const double r = stats.r;
    const double q = stats.q;
    if (std::isnan(r) || std::isnan(q)) throw InvalidArgument("abridged_error_exact: NaN margin");

    // Infinite margins remove one of the two events.
    if (r == -inf || q == -inf) return 1.0;
    if (r == inf) return normal_sf(q);
    if (q == inf) return normal_sf(r);

    // p = 1 - Pr(xi1 > -R, xi2 < Q) = Pr(xi2 > Q) + int_{-inf}^{Q} phi(y) Pr(xi1 < -R | y) dy.
    // The complement keeps relative accuracy in the far tail.
    if (1.0 - std::abs(rho) < degenerate_rho) {
        // xi1 = +-xi2: the conditional probability is an indicator.
        if (rho > 0.0) return clamp_probability(normal_sf(q) + normal_cdf(std::min(q, -r)));
        return clamp_probability(std::max(normal_sf(q), normal_sf(r)));
    }

    const double scale = std::sqrt((1.0 - rho) * (1.0 + rho));
    auto integrate = [](auto&& f, double a, double b) {
        return b > a ? boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth,
                                                                                     panel_tolerance)
                     : 0.0;
    };
    auto panels = [&](auto&& f, double a, double b) {
        double sum = 0.0;
        for (double x = a; x < b; x += panel_width) sum += integrate(f, x, std::min(x + panel_width, b));
        return sum;
    };
    auto integrand = [&](double y) { return normal_pdf(y) * normal_sf((r + rho * y) / scale); };

    double integral = 0.0;
    const double hi = std::min(q, upper_limit);
    const double lower_limit = -std::clamp(std::max(r, q) + tail_margin, tail_floor, upper_limit);
    if (hi > lower_limit) {
        // The conditional probability steps at y = -R/rho over a width scale/|rho|. Around the step,
        // integrate in u = (y - centre) / width, where the normal_sf argument is exactly +-u.
        const double centre = rho != 0.0 ? -r / rho : inf;
        const double width = rho != 0.0 ? scale / std::abs(rho) : inf;
        const double win_lo = std::max(lower_limit, centre - step_window * width);
        const double win_hi = std::min(hi, centre + step_window * width);
        if (std::isfinite(centre) && std::isfinite(width) && win_lo < win_hi) {
            const double sign = rho > 0.0 ? 1.0 : -1.0;
            auto stepped = [&](double u) { return width * normal_pdf(centre + width * u) * normal_sf(sign * u); };
            std::vector<double> cuts{(win_lo - centre) / width, (win_hi - centre) / width};
            for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
                if (k > cuts[0] && k < cuts[1]) cuts.push_back(k);
            }
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) integral += integrate(stepped, cuts[i], cuts[i + 1]);
            integral += panels(integrand, lower_limit, win_lo) + panels(integrand, win_hi, hi);
        } else {
            integral = panels(integrand, lower_limit, hi);
        }
    }
    return clamp_probability(normal_sf(q) + integral);
}

double abridged_error_approx(const DecisionStats& stats) {
    checked_rho(stats.rho);
    const double sr = normal_sf(stats.r);
    const double sq = normal_sf(stats.q);
    // 1 - Phi(R) Phi(Q) written without cancellation.
    const double miss = sr + sq - sr * sq;
    return miss + stats.rho / (2.0 * std::numbers::pi) * std::exp(-0.5 * stats.r * stats.r) *
                      std::exp(-0.5 * stats.q * stats.q);
}

bool approx_valid(const DecisionStats& stats) noexcept {
    return std::min(stats.q, stats.r) > 3.0 && std::abs(stats.rho) < 0.9;
}

AbridgedResult abridged(const DecisionStats& stats) {
    return {abridged_error_exact(stats), abridged_error_approx(stats), approx_valid(stats)};
}

double abridged_at(const SignalSpec& spec, std::span<const ParamErrors> errors, double sigma) {
    const auto truth = spec.params();
    const auto measured = apply_errors(truth, errors);
    const auto envs = spec.envelopes();
    return abridged_error_exact(decision_stats(truth, measured, envs, sigma, spec.nu_true));
}

namespace {

// Flattened search point: entry 3c + {0,1,2} = (d_amp, d_freq, d_phase) of range c.
class BoxSearch {
public:
    BoxSearch(const SignalSpec& spec, const ErrorBox& box, double sigma)
        : spec_(spec), truth_(spec.params()), envs_(spec.envelopes()), sigma_(sigma) {
        for (const auto& r : box.ranges) {
            for (const Interval& iv : {r.amp, r.freq, r.phase}) bounds_.push_back(iv);
        }
        for (std::size_t d = 0; d < bounds_.size(); ++d) {
            if (bounds_[d].width() > 0.0) active_.push_back(d);
        }
    }

    const std::vector<std::size_t>& active() const { return active_; }
    const Interval& bounds(std::size_t d) const { return bounds_[d]; }
    std::size_t evaluations() const { return evaluations_; }

    std::vector<double> lower_corner() const {
        std::vector<double> x(bounds_.size());
        for (std::size_t d = 0; d < x.size(); ++d) x[d] = bounds_[d].lo;
        return x;
    }

    std::vector<double> center() const {
        std::vector<double> x(bounds_.size());
        for (std::size_t d = 0; d < x.size(); ++d) x[d] = 0.5 * (bounds_[d].lo + bounds_[d].hi);
        return x;
    }

    double grid_value(std::size_t d, std::size_t i, std::size_t points) const {
        const auto& b = bounds_[d];
        if (points < 2) return 0.5 * (b.lo + b.hi);
        if (i + 1 == points) return b.hi;
        return b.lo + b.width() * static_cast<double>(i) / static_cast<double>(points - 1);
    }

    double evaluate(const std::vector<double>& x) {
        ++evaluations_;
        const auto errs = to_errors(x);
        const auto measured = apply_errors(truth_, errs);
        return abridged_error_exact(decision_stats(truth_, measured, envs_, sigma_, spec_.nu_true));
    }

    std::vector<ParamErrors> to_errors(const std::vector<double>& x) const {
        std::vector<ParamErrors> errs(x.size() / 3);
        for (std::size_t c = 0; c < errs.size(); ++c) errs[c] = {x[3 * c], x[3 * c + 1], x[3 * c + 2]};
        return errs;
    }

private:
    const SignalSpec& spec_;
    std::vector<ComponentParams> truth_;
    std::vector<Envelope> envs_;
    double sigma_;
    std::vector<Interval> bounds_;
    std::vector<std::size_t> active_;
    std::size_t evaluations_ = 0;
};

struct Best {
    std::vector<double> x;
    double p = -1.0;
};

void full_grid(BoxSearch& search, std::size_t points, Best& best) {
    const auto& active = search.active();
    std::vector<std::size_t> index(active.size(), 0);
    auto x = search.lower_corner();
    while (true) {
        for (std::size_t a = 0; a < active.size(); ++a) x[active[a]] = search.grid_value(active[a], index[a], points);
        // lexicographic order, strict improvement: ties keep the smallest triple
        if (const double p = search.evaluate(x); p > best.p) best = {x, p};
        std::size_t a = active.size();
        while (a > 0) {
            --a;
            if (++index[a] < points) break;
            index[a] = 0;
            if (a == 0) return;
        }
    }
}

void cyclic_scan(BoxSearch& search, std::size_t points, Best& best) {
    best.x = search.center();
    best.p = search.evaluate(best.x);
    for (int cycle = 0; cycle < 20; ++cycle) {
        bool moved = false;
        for (std::size_t d : search.active()) {
            auto x = best.x;
            for (std::size_t i = 0; i < points; ++i) {
                x[d] = search.grid_value(d, i, points);
                if (const double p = search.evaluate(x); p > best.p) {
                    best = {x, p};
                    moved = true;
                }
            }
        }
        if (!moved) break;
    }
}

void compass_refine(BoxSearch& search, std::size_t points, std::size_t budget, Best& best) {
    const auto& active = search.active();
    std::vector<double> step(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
        step[a] = search.bounds(active[a]).width() / static_cast<double>(std::max<std::size_t>(points, 2) - 1) / 2;
    }
    const std::size_t stop_at = search.evaluations() + budget;
    while (search.evaluations() < stop_at) {
        bool improved = false;
        for (std::size_t a = 0; a < active.size() && !improved; ++a) {
            const std::size_t d = active[a];
            const auto& b = search.bounds(d);
            for (double dir : {-1.0, 1.0}) {
                auto x = best.x;
                x[d] = std::clamp(x[d] + dir * step[a], b.lo, b.hi);
                if (x[d] == best.x[d]) continue;
                if (const double p = search.evaluate(x); p > best.p) {
                    best = {x, p};
                    improved = true;
                    break;
                }
            }
        }
        if (improved) continue;
        bool done = true;
        for (std::size_t a = 0; a < active.size(); ++a) {
            step[a] /= 2;
            if (step[a] > 1e-7 * search.bounds(active[a]).width()) done = false;
        }
        if (done) break;
    }
}

} // namespace

WorstCase worst_case_abridged(const SignalSpec& spec, const ErrorBox& box, double sigma,
                              const WorstCaseOptions& options) {
    box.validate();
    spec.validate();
    if (box.ranges.size() != 1 && box.ranges.size() != spec.nu_max()) {
        throw InvalidArgument("worst_case_abridged: box needs one shared range or one per component");
    }
    BoxSearch search(spec, box, sigma);
    Best best;
    if (search.active().empty()) {
        best.x = search.lower_corner();
        best.p = search.evaluate(best.x);
    } else {
        if (search.active().size() <= options.max_full_grid_dims) {
            full_grid(search, options.grid_points, best);
        } else {
            cyclic_scan(search, options.grid_points, best);
        }
        compass_refine(search, options.grid_points, options.max_refine_evaluations, best);
    }
    return {best.p, search.to_errors(best.x), search.evaluations()};
}

} // namespace qlorder
