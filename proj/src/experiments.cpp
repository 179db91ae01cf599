#include "qlorder/experiments.hpp"

#include "qlorder/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace qlorder {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parser {
    const std::string& path;
    std::size_t line = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path, line, what); }

    double plain_number(std::string_view tok) const {
        double v = 0.0;
        const auto* end = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(tok.data(), end, v);
        if (ec != std::errc{} || ptr != end || !std::isfinite(v)) fail("not a finite number: '" + std::string(tok) + "'");
        return v;
    }

    // Accepts plain decimals and the forms pi, pi/D, K*pi, K*pi/D.
    double number(std::string_view tok) const {
        tok = trim(tok);
        const auto at = tok.find("pi");
        if (at == std::string_view::npos) return plain_number(tok);
        double v = std::numbers::pi;
        const auto head = trim(tok.substr(0, at));
        if (!head.empty()) {
            if (head == "-") v = -v;
            else if (head.back() == '*') v *= plain_number(trim(head.substr(0, head.size() - 1)));
            else fail("cannot parse '" + std::string(tok) + "'");
        }
        const auto tail = trim(tok.substr(at + 2));
        if (!tail.empty()) {
            if (tail.front() != '/') fail("cannot parse '" + std::string(tok) + "'");
            v /= plain_number(trim(tail.substr(1)));
        }
        return v;
    }

    std::vector<double> list(std::string_view value) const {
        std::vector<double> out;
        value = trim(value);
        if (value.empty()) return out;
        std::size_t start = 0;
        while (true) {
            const auto comma = value.find(',', start);
            out.push_back(number(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        return out;
    }

    std::uint64_t unsigned_int(std::string_view tok) const {
        tok = trim(tok);
        std::uint64_t v = 0;
        const auto* end = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(tok.data(), end, v);
        if (ec != std::errc{} || ptr != end) fail("not a non-negative integer: '" + std::string(tok) + "'");
        return v;
    }

    Interval interval(std::string_view value) const {
        const auto v = list(value);
        if (v.size() != 2 || v[0] > v[1]) fail("expected 'lo, hi' with lo <= hi");
        return {v[0], v[1]};
    }
};

std::string join(std::span<const double> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

std::string_view to_string(EnvelopeKind kind) {
    switch (kind) {
    case EnvelopeKind::constant: return "constant";
    case EnvelopeKind::am: return "am";
    case EnvelopeKind::chirp: return "chirp";
    }
    return "constant";
}

void validate(const ExperimentConfig& c, const std::string& path) {
    auto fail = [&](const std::string& what) { throw ConfigError(path, 0, what); };
    if (c.n_samples == 0) fail("n_samples must be positive");
    if (c.nu_max < 2) fail("nu_max must be at least 2");
    if (c.nu_true < 1 || c.nu_true + 1 > c.nu_max) fail("need 1 <= nu_true < nu_max");
    if (c.amplitudes.size() < c.nu_max || c.frequencies.size() < c.nu_max || c.phases.size() < c.nu_max) {
        fail("amplitudes, frequencies and phases need at least nu_max entries");
    }
    if (c.amplitudes[0] == 0.0) fail("first amplitude sets the SNR reference and must be non-zero");
    for (const auto* errs : {&c.delta_a, &c.delta_omega, &c.delta_phi}) {
        if (errs->size() != 1 && errs->size() != c.nu_max) fail("error lists need 1 or nu_max entries");
    }
    if (c.trials == 0) fail("trials must be positive");
    if (c.threads == 0) fail("threads must be positive");
    if (!(c.bandwidth > 0.0)) fail("bandwidth must be positive");
    if (c.box_points < 1) fail("box points must be positive");
}

} // namespace

double ExperimentConfig::omega_step() const noexcept {
    return 2.0 * std::numbers::pi * bandwidth / static_cast<double>(n_samples);
}

ExperimentConfig preset_five_tones() {
    ExperimentConfig c;
    c.scenario = "five_tones";
    c.n_samples = 128;
    c.bandwidth = 1.0;
    c.amplitudes = {0.4, 0.4, 0.4, 0.4, 0.4};
    c.frequencies = {1.2075, 1.2566, 1.3057, 1.3548, 1.4039};
    constexpr double pi = std::numbers::pi;
    c.phases = {0.0, pi / 4, pi / 3, pi / 5, pi / 6};
    c.delta_a = {0.25};
    c.delta_omega = {0.02};
    c.delta_phi = {0.1};
    c.nu_true = 2;
    c.nu_max = 3;
    c.snr_grid = {-16.0, -15.0, -14.0, -13.0, -12.0, -11.0, -10.0, -9.0, -8.0};
    c.snr_fixed = -11.0;
    c.trials = 20000;
    c.seed = 1;
    c.box_delta_a = Interval{-0.25, 0.25};
    c.box_delta_omega = Interval{-0.02, 0.02};
    c.box_delta_phi = Interval{-0.1, 0.1};
    return c;
}

ExperimentConfig parse_config(std::string_view text, const std::string& path) {
    ExperimentConfig c;
    Parser p{path};
    std::string section;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line;
        std::string_view ln = raw;
        if (const auto hash = ln.find('#'); hash != std::string_view::npos) ln = ln.substr(0, hash);
        ln = trim(ln);
        if (ln.empty()) continue;
        if (ln.front() == '[') {
            if (ln.back() != ']') p.fail("malformed section header");
            section = std::string(trim(ln.substr(1, ln.size() - 2)));
            if (section != "run" && section != "signal" && section != "errors" && section != "box") {
                p.fail("unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = ln.find('=');
        if (eq == std::string_view::npos) p.fail("expected 'key = value'");
        if (section.empty()) p.fail("key outside of any section");
        const std::string key(trim(ln.substr(0, eq)));
        const std::string_view value = trim(ln.substr(eq + 1));
        if (!seen.insert(section + "." + key).second) p.fail("duplicate key '" + key + "'");

        if (section == "run") {
            if (key == "scenario") c.scenario = std::string(value);
            else if (key == "nu_true") c.nu_true = p.unsigned_int(value);
            else if (key == "nu_max") c.nu_max = p.unsigned_int(value);
            else if (key == "snr_db") c.snr_grid = p.list(value);
            else if (key == "snr_fixed") c.snr_fixed = p.number(value);
            else if (key == "snr_convention") {
                if (value == "amplitude") c.snr_convention = SnrConvention::amplitude;
                else if (value == "power") c.snr_convention = SnrConvention::power;
                else p.fail("snr_convention must be 'amplitude' or 'power'");
            } else if (key == "trials") c.trials = p.unsigned_int(value);
            else if (key == "seed") c.seed = p.unsigned_int(value);
            else if (key == "threads") c.threads = static_cast<unsigned>(p.unsigned_int(value));
            else if (key == "output") c.output = std::string(value);
            else p.fail("unknown key '" + key + "' in [run]");
        } else if (section == "signal") {
            if (key == "n_samples") c.n_samples = p.unsigned_int(value);
            else if (key == "bandwidth") c.bandwidth = p.number(value);
            else if (key == "amplitudes") c.amplitudes = p.list(value);
            else if (key == "frequencies") c.frequencies = p.list(value);
            else if (key == "phases") c.phases = p.list(value);
            else if (key == "envelope") {
                if (value == "constant") c.envelope = EnvelopeKind::constant;
                else if (value == "am") c.envelope = EnvelopeKind::am;
                else if (value == "chirp") c.envelope = EnvelopeKind::chirp;
                else p.fail("envelope must be constant, am or chirp");
            } else if (key == "envelope_param") c.envelope_param = p.number(value);
            else p.fail("unknown key '" + key + "' in [signal]");
        } else if (section == "errors") {
            if (key == "delta_a") c.delta_a = p.list(value);
            else if (key == "delta_omega") c.delta_omega = p.list(value);
            else if (key == "delta_phi") c.delta_phi = p.list(value);
            else p.fail("unknown key '" + key + "' in [errors]");
        } else {
            if (key == "delta_a") c.box_delta_a = p.interval(value);
            else if (key == "delta_omega") c.box_delta_omega = p.interval(value);
            else if (key == "delta_phi") c.box_delta_phi = p.interval(value);
            else if (key == "points") c.box_points = p.unsigned_int(value);
            else p.fail("unknown key '" + key + "' in [box]");
        }
    }
    validate(c, path);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[run]\n"
        << "scenario = " << c.scenario << '\n'
        << "nu_true = " << c.nu_true << '\n'
        << "nu_max = " << c.nu_max << '\n'
        << "snr_db = " << join(c.snr_grid) << '\n'
        << "snr_fixed = " << format_double(c.snr_fixed) << '\n'
        << "snr_convention = " << (c.snr_convention == SnrConvention::amplitude ? "amplitude" : "power") << '\n'
        << "trials = " << c.trials << '\n'
        << "seed = " << c.seed << '\n'
        << "threads = " << c.threads << '\n';
    if (!c.output.empty()) out << "output = " << c.output << '\n';
    out << "\n[signal]\n"
        << "n_samples = " << c.n_samples << '\n'
        << "bandwidth = " << format_double(c.bandwidth) << '\n'
        << "amplitudes = " << join(c.amplitudes) << '\n'
        << "frequencies = " << join(c.frequencies) << '\n'
        << "phases = " << join(c.phases) << '\n'
        << "envelope = " << to_string(c.envelope) << '\n'
        << "envelope_param = " << format_double(c.envelope_param) << '\n'
        << "\n[errors]\n"
        << "delta_a = " << join(c.delta_a) << '\n'
        << "delta_omega = " << join(c.delta_omega) << '\n'
        << "delta_phi = " << join(c.delta_phi) << '\n'
        << "\n[box]\n";
    auto interval = [&](const char* key, const std::optional<Interval>& iv) {
        if (iv) out << key << " = " << format_double(iv->lo) << ", " << format_double(iv->hi) << '\n';
    };
    interval("delta_a", c.box_delta_a);
    interval("delta_omega", c.box_delta_omega);
    interval("delta_phi", c.box_delta_phi);
    out << "points = " << c.box_points << '\n';
    return out.str();
}

SignalSpec build_spec(const ExperimentConfig& c) {
    validate(c, "<config>");
    SignalSpec spec;
    spec.n_samples = c.n_samples;
    spec.nu_true = c.nu_true;
    for (std::size_t i = 0; i < c.nu_max; ++i) {
        Envelope env = Envelope::constant(c.n_samples);
        for (std::size_t k = 0; k < c.n_samples; ++k) {
            const double t = static_cast<double>(k + 1);
            if (c.envelope == EnvelopeKind::am) {
                env.amp[k] = 1.0 + c.envelope_param * std::cos(2.0 * std::numbers::pi * t / static_cast<double>(c.n_samples));
            } else if (c.envelope == EnvelopeKind::chirp) {
                env.phase[k] = c.envelope_param * t * t;
            }
        }
        spec.components.push_back({{c.amplitudes[i], wrap_angle(c.frequencies[i]), wrap_angle(c.phases[i])}, std::move(env)});
    }
    spec.validate();
    return spec;
}

std::vector<ParamErrors> absolute_errors(const ExperimentConfig& c) {
    const bool shared = c.delta_a.size() == 1 && c.delta_omega.size() == 1 && c.delta_phi.size() == 1;
    const std::size_t n = shared ? 1 : c.nu_max;
    auto pick = [](const std::vector<double>& v, std::size_t i) { return v.size() == 1 ? v[0] : v[i]; };
    std::vector<ParamErrors> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = {pick(c.delta_a, i) * c.amplitudes[i], pick(c.delta_omega, i) * c.omega_step(), pick(c.delta_phi, i)};
    }
    return out;
}

double sigma_at(const ExperimentConfig& c, double snr_db) {
    return snr_to_sigma(snr_db, std::abs(c.amplitudes.at(0)), c.snr_convention);
}

TrialConfig trial_config(const ExperimentConfig& c) {
    TrialConfig t;
    t.spec = build_spec(c);
    t.errors = absolute_errors(c);
    t.snr_db = c.snr_fixed;
    t.n_trials = c.trials;
    t.base_seed = c.seed;
    t.convention = c.snr_convention;
    t.threads = c.threads;
    return t;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<double> read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open file");
    Parser p{path};
    std::vector<double> out;
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line;
        std::string_view ln = raw;
        if (const auto hash = ln.find('#'); hash != std::string_view::npos) ln = ln.substr(0, hash);
        ln = trim(ln);
        if (ln.empty()) continue;
        out.push_back(p.plain_number(ln));
    }
    if (out.empty()) throw ConfigError(path, 0, "no samples");
    return out;
}

std::vector<TheoryRow> theory_rows(const ExperimentConfig& c, std::span<const double> snr_list) {
    const auto spec = build_spec(c);
    const auto truth = spec.params();
    const auto measured = apply_errors(truth, absolute_errors(c));
    const auto envs = spec.envelopes();
    std::vector<TheoryRow> rows;
    for (double snr : snr_list) {
        TheoryRow row{snr, decision_stats(truth, measured, envs, sigma_at(c, snr), c.nu_true), {}};
        row.result = abridged(row.stats);
        rows.push_back(row);
    }
    return rows;
}

std::vector<ErrorProbabilityRow> sweep_error_probability(const ExperimentConfig& c) {
    std::vector<ErrorProbabilityRow> rows;
    if (c.snr_grid.empty()) return rows;
    const auto curve = error_curve(trial_config(c), c.snr_grid);
    const auto theory = theory_rows(c, c.snr_grid);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        rows.push_back({curve[i].snr_db, curve[i].estimate.p_err, curve[i].estimate.std_err, theory[i].result.p_exact,
                        theory[i].result.p_approx, theory[i].result.approx_valid});
    }
    return rows;
}

SweepVar parse_sweep_var(std::string_view name) {
    if (name == "delta_a") return SweepVar::delta_a;
    if (name == "delta_omega") return SweepVar::delta_omega;
    if (name == "delta_phi") return SweepVar::delta_phi;
    throw InvalidArgument("unknown sweep variable '" + std::string(name) + "'");
}

std::string_view to_string(SweepVar var) noexcept {
    switch (var) {
    case SweepVar::delta_a: return "delta_a";
    case SweepVar::delta_omega: return "delta_omega";
    case SweepVar::delta_phi: return "delta_phi";
    }
    return "delta_a";
}

std::vector<NormalizedRow> sweep_normalized(const ExperimentConfig& c, SweepVar var, std::span<const double> grid) {
    if (grid.empty()) throw InvalidArgument("sweep_normalized: empty grid");
    const auto spec = build_spec(c);
    const double sigma = sigma_at(c, c.snr_fixed);
    const bool shared = c.delta_a.size() == 1 && c.delta_omega.size() == 1 && c.delta_phi.size() == 1;
    auto p_at = [&](double value) {
        auto cfg = c;
        auto& slot = var == SweepVar::delta_a       ? cfg.delta_a
                     : var == SweepVar::delta_omega ? cfg.delta_omega
                                                    : cfg.delta_phi;
        slot.assign(shared ? 1 : c.nu_max, value);
        return abridged_at(spec, absolute_errors(cfg), sigma);
    };
    const double p0 = p_at(0.0);
    if (!(p0 > 0.0)) throw DegenerateError("sweep_normalized: p_a at zero error is 0, cannot normalize");
    std::vector<NormalizedRow> rows;
    for (double g : grid) {
        const double p = p_at(g);
        rows.push_back({g, p, p / p0});
    }
    return rows;
}

ErrorBox config_box(const ExperimentConfig& c) {
    const double a0 = c.amplitudes.at(0);
    const double w_step = c.omega_step();
    auto scaled = [](const std::optional<Interval>& iv, double fixed, double scale) {
        const Interval r = iv.value_or(Interval{fixed, fixed});
        const double lo = r.lo * scale;
        const double hi = r.hi * scale;
        return Interval{std::min(lo, hi), std::max(lo, hi)};
    };
    ErrorBox box;
    box.ranges.push_back({scaled(c.box_delta_a, c.delta_a.at(0), a0), scaled(c.box_delta_omega, c.delta_omega.at(0), w_step),
                          scaled(c.box_delta_phi, c.delta_phi.at(0), 1.0)});
    return box;
}

WorstCaseRow worst_case_report(const ExperimentConfig& c, const ErrorBox& box) {
    const auto spec = build_spec(c);
    const double sigma = sigma_at(c, c.snr_fixed);
    WorstCaseOptions options;
    options.grid_points = c.box_points;
    const auto worst = worst_case_abridged(spec, box, sigma, options);
    const ParamErrors zero{};
    WorstCaseRow row;
    row.p_max = worst.p;
    row.delta_a = worst.errors[0].d_amp / c.amplitudes.at(0);
    row.delta_omega = worst.errors[0].d_freq / c.omega_step();
    row.delta_phi = worst.errors[0].d_phase;
    row.p_at_zero = abridged_at(spec, std::span<const ParamErrors>(&zero, 1), sigma);
    return row;
}

namespace {
const char* flag(bool b) { return b ? "true" : "false"; }
} // namespace

void write_csv(std::ostream& out, std::span<const ErrorProbabilityRow> rows) {
    out << "snr_db,p_mc,std_err,p_exact,p_approx,approx_valid\n";
    for (const auto& r : rows) {
        out << format_double(r.snr_db) << ',' << format_double(r.p_mc) << ',' << format_double(r.std_err) << ','
            << format_double(r.p_exact) << ',' << format_double(r.p_approx) << ',' << flag(r.approx_valid) << '\n';
    }
}

void write_csv(std::ostream& out, std::span<const TheoryRow> rows) {
    out << "snr_db,r,q,rho,p_exact,p_approx,approx_valid\n";
    for (const auto& r : rows) {
        out << format_double(r.snr_db) << ',' << format_double(r.stats.r) << ',' << format_double(r.stats.q) << ','
            << format_double(r.stats.rho) << ',' << format_double(r.result.p_exact) << ','
            << format_double(r.result.p_approx) << ',' << flag(r.result.approx_valid) << '\n';
    }
}

void write_csv(std::ostream& out, std::span<const NormalizedRow> rows) {
    out << "var,p_a,p_a_normalized\n";
    for (const auto& r : rows) {
        out << format_double(r.var) << ',' << format_double(r.p_a) << ',' << format_double(r.p_a_normalized) << '\n';
    }
}

void write_csv(std::ostream& out, const WorstCaseRow& row) {
    out << "p_max,argmax_delta_a,argmax_delta_omega,argmax_delta_phi,p_at_zero\n"
        << format_double(row.p_max) << ',' << format_double(row.delta_a) << ',' << format_double(row.delta_omega) << ','
        << format_double(row.delta_phi) << ',' << format_double(row.p_at_zero) << '\n';
}

double doppler_speed_limit(double delta_omega_abs_max, double carrier_omega, double wave_speed) {
    if (!(carrier_omega > 0.0) || !(wave_speed > 0.0)) {
        throw InvalidArgument("doppler_speed_limit: carrier frequency and wave speed must be positive");
    }
    if (!(delta_omega_abs_max >= 0.0)) throw InvalidArgument("doppler_speed_limit: frequency error bound must be >= 0");
    return wave_speed * delta_omega_abs_max / carrier_omega;
}

} // namespace qlorder
