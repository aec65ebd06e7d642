#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "duet/correlators.hpp"
#include "duet/entanglement.hpp"
#include "duet/errors.hpp"
#include "duet/greens.hpp"
#include "duet/oracle.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace duet::cli {

namespace {

constexpr double pi = std::numbers::pi;
const double nan = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string> known_keys = {
    "system.W",        "system.delta",       "system.psi",          "system.omega_a",   "system.omega_b",
    "system.omega_c",  "system.theta",       "bath1.gamma",         "bath1.lambda",     "bath1.temperature",
    "bath1.cutoff",    "bath2.gamma",        "bath2.lambda",        "bath2.temperature", "bath2.cutoff",
    "regime",          "grid.t_min",         "grid.t_max",          "grid.n_points",    "grid.tau_min",
    "grid.tau_max",    "grid.tau_points",    "outputs",             "oracle.n_modes",   "oracle.omega_max",
    "oracle.time",     "noise.dt",           "noise.n_freq",        "tol",              "sweep.param",
    "sweep.values",    "sweep.min",          "sweep.max",           "sweep.points"};

const std::vector<std::string> all_outputs = {"qq_pp", "qq_mm", "qq_pm", "pp_pp", "pp_mm", "pp_pm"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool parse_plain(const std::string& s, double& x) {
    if (s.empty()) return false;
    char* end = nullptr;
    x = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

// plain numbers or [a*]pi[/b]
bool parse_value(const std::string& raw, double& x) {
    const std::string s = trim(raw);
    if (parse_plain(s, x)) return true;
    const auto p = s.find("pi");
    if (p == std::string::npos) return false;
    double a = 1.0, b = 1.0;
    std::string head = trim(s.substr(0, p)), tail = trim(s.substr(p + 2));
    if (!head.empty()) {
        if (head.back() != '*') return false;
        if (!parse_plain(trim(head.substr(0, head.size() - 1)), a)) return false;
    }
    if (!tail.empty()) {
        if (tail.front() != '/') return false;
        if (!parse_plain(trim(tail.substr(1)), b) || b == 0.0) return false;
    }
    x = a * pi / b;
    return true;
}

BathSpec make_bath(const KeyValues& kv, int j) {
    const std::string p = "bath" + std::to_string(j) + ".";
    const double g = kv.number(p + "gamma", 0.0);
    const double lam = kv.number(p + "lambda", 100.0);
    const double T = kv.number(p + "temperature", 0.0);
    const std::string cut = kv.get(p + "cutoff", "strict");
    BathSpec b;
    if (cut == "strict")
        b = BathSpec::strict(g, T, lam);
    else if (cut == "sharp")
        b = BathSpec::sharp(g, lam, T);
    else if (cut == "drude")
        b = BathSpec::drude(g, lam, T);
    else if (cut == "exponential") {
        b = BathSpec::sharp(g, lam, T);
        b.family = CutoffFamily::Exponential;
    } else
        throw ConfigError(kv.origin(p + "cutoff") + ": " + p + "cutoff must be strict, sharp, drude or exponential");
    try {
        b.validate();
    } catch (const std::exception& e) {
        throw ConfigError("bath" + std::to_string(j) + ": " + e.what());
    }
    return b;
}

Grid make_grid(const KeyValues& kv, const std::string& lo, const std::string& hi, const std::string& n, Grid g) {
    g.min = kv.number(lo, g.min);
    g.max = kv.number(hi, g.max);
    g.points = static_cast<int>(kv.integer(n, g.points));
    if (g.points < 1) throw ConfigError(kv.origin(n) + ": " + n + " must be at least 1");
    if (g.min < 0.0 || g.max < g.min) throw ConfigError(kv.origin(hi) + ": need 0 <= " + lo + " <= " + hi);
    return g;
}

GreensRegime greens_regime(Regime r) {
    switch (r) {
        case Regime::OneBath: return GreensRegime::OneBath;
        case Regime::StrongDelta0: return GreensRegime::StrongDelta0;
        case Regime::Weak: return GreensRegime::WeakCoupling;
        default: return GreensRegime::NumericBromwich;
    }
}

bool wants_momenta(const RunConfig& cfg) {
    return std::any_of(cfg.outputs.begin(), cfg.outputs.end(), [](const std::string& o) { return o[0] == 'p'; });
}

cplx pick(const StationaryValues& v, const std::string& kind) {
    if (kind == "qq_pp") return v.qq_pp;
    if (kind == "qq_mm") return v.qq_mm;
    if (kind == "qq_pm") return v.qq_pm;
    if (kind == "pp_pp") return v.pp_pp;
    if (kind == "pp_mm") return v.pp_mm;
    return v.pp_pm;
}

struct Row {
    double x;
    cplx v;
    std::string source;
};

// Shared state of one invocation.
struct Session {
    RunConfig cfg;
    Regime regime = Regime::Auto;
    fs::path out;
    std::string command;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    json extra = json::object();

    void warn(const std::string& msg) {
        if (std::find(warnings.begin(), warnings.end(), msg) != warnings.end()) return;
        std::cerr << "warning: " << msg << "\n";
        warnings.push_back(msg);
    }

    void write_series(const std::string& name, const std::string& xname, const std::vector<Row>& rows) {
        std::ofstream f(out / name);
        if (!f) throw ConfigError("cannot write " + (out / name).string());
        f << xname << ",re,im,source\n";
        for (const Row& r : rows)
            f << format_number(r.x) << "," << format_number(r.v.real()) << "," << format_number(r.v.imag()) << ","
              << r.source << "\n";
        files.push_back(name);
    }
};

json bath_json(const BathSpec& b) {
    const char* fam = b.strict_ohmic                                ? "strict"
                      : b.family == CutoffFamily::SharpCutoff       ? "sharp"
                      : b.family == CutoffFamily::Drude             ? "drude"
                                                                    : "exponential";
    return {{"gamma", b.gamma}, {"lambda", b.lambda_cut}, {"temperature", b.temperature}, {"cutoff", fam}};
}

void write_manifest(const Session& s) {
    const RunConfig& c = s.cfg;
    json m;
    m["command"] = s.command;
    m["regime"] = regime_name(s.regime);
    m["system"] = {{"W", c.basis.w_mean},
                   {"delta", c.basis.detuning},
                   {"psi", c.basis.psi_angle},
                   {"lambda_angle", c.basis.lambda_angle},
                   {"omega_plus", c.basis.omega_plus},
                   {"omega_minus", c.basis.omega_minus}};
    m["bath1"] = bath_json(c.baths[0]);
    m["bath2"] = bath_json(c.baths[1]);
    m["t_grid"] = {c.t_grid.min, c.t_grid.max, c.t_grid.points};
    m["tau_grid"] = {c.tau_grid.min, c.tau_grid.max, c.tau_grid.points};
    m["outputs"] = c.outputs;
    m["oracle"] = {{"n_modes", c.oracle_modes}, {"omega_max", c.oracle_omega_max}, {"time", c.oracle_time}};
    m["tol"] = c.tol;
    m["tau_min_lambda"] = c.tau_min_lambda;
    for (auto& [k, v] : s.extra.items()) m[k] = v;
    m["files"] = s.files;
    m["warnings"] = s.warnings;
    std::ofstream(s.out / "manifest.json") << m.dump(2) << "\n";
}

void write_plot_script(const Session& s, const std::string& xlabel) {
    std::ofstream f(s.out / "plot.gp");
    f << "set datafile separator ','\nset key autotitle columnhead\nset xlabel '" << xlabel << "'\n";
    f << "set terminal pngcairo size 900,600\n";
    for (const std::string& name : s.files) {
        if (name.size() < 4 || name.substr(name.size() - 4) != ".csv" || name == "sweep.csv") continue;
        const std::string stem = name.substr(0, name.size() - 4);
        f << "set output '" << stem << ".png'\nset title '" << stem << "'\n";
        f << "plot '" << name << "' using 1:2 with lines title 'Re', '' using 1:3 with lines title 'Im'\n";
    }
    if (std::find(s.files.begin(), s.files.end(), "sweep.csv") != s.files.end()) {
        f << "set output 'sweep.png'\nset title 'stationary coherence'\n";
        f << "plot 'sweep.csv' using 2:4 with linespoints title 'Re <q+q->'\n";
    }
}

void check_recurrence(Session& s, const Propagator& P, double t) {
    if (P.beyond_recurrence(t)) {
        s.warn("oracle times beyond the bath recurrence time; raise oracle.n_modes");
        s.extra["recurrence_exceeded"] = true;
    }
}

// ---- subcommands ----

void run_evolve(Session& s) {
    const RunConfig& c = s.cfg;
    for (const std::string& o : c.outputs)
        if (o[0] == 'p') throw ConfigError("evolve reports position correlators only; drop '" + o + "' from outputs");
    const GreensKernel kernel(greens_regime(s.regime), c.basis, c.baths[0], c.baths[1]);
    const std::vector<double> times = c.t_grid.nodes();
    std::vector<CMat2> init;
    for (double t : times) init.push_back(initial_moments(kernel(t), c.basis.omega_plus, c.basis.omega_minus));

    std::vector<CMat2> noise;
    if (c.baths[0].strict_ohmic || c.baths[1].strict_ohmic)
        s.warn("noise part needs finite-band baths; only the initial-condition part is written");
    else {
        FiniteTimeOptions fo;
        fo.dt = c.noise_dt;
        fo.n_freq = c.noise_freq;
        noise = finite_time_noise([&](double u) { return kernel(u).g; }, c.baths[0], c.baths[1],
                                  c.basis.psi_angle, times, fo);
    }
    for (const std::string& o : c.outputs) {
        const int a = o == "qq_mm" ? 1 : 0, b = o == "qq_pp" ? 0 : 1;
        std::vector<Row> rows;
        for (size_t i = 0; i < times.size(); ++i) rows.push_back({times[i], init[i](a, b), "initial"});
        for (size_t i = 0; i < noise.size(); ++i) rows.push_back({times[i], noise[i](a, b), "noise"});
        for (size_t i = 0; i < noise.size(); ++i) rows.push_back({times[i], init[i](a, b) + noise[i](a, b), "total"});
        s.write_series(o + ".csv", "t", rows);
    }
    s.extra["greens"] = regime_name(s.regime);
}

StationaryValues stationary_at(const RunConfig& c, Regime r, const LaplaceMatrix& mat, double tau, bool momenta) {
    switch (r) {
        case Regime::StrongDelta0:
        case Regime::OneBath: return stationary_strong(c.basis, c.baths[0], c.baths[1], tau, momenta);
        case Regime::Weak: return stationary_weak(c.basis, c.baths[0], c.baths[1], tau, momenta);
        default: {
            quad::Options o;
            o.rel_tol = c.tol;
            o.throw_on_failure = true;
            return stationary_numeric(mat, tau, momenta, o);
        }
    }
}

double momentum_tau_floor(const RunConfig& c) {
    double floor = 0.0;
    for (const BathSpec& b : c.baths)
        if (b.strict_ohmic && b.gamma > 0.0) floor = std::max(floor, 1.0 / b.lambda_cut);
    return floor;
}

void run_stationary(Session& s) {
    const RunConfig& c = s.cfg;
    const LaplaceMatrix mat(c.basis, c.baths[0], c.baths[1]);
    const bool momenta = wants_momenta(c);
    const double floor = c.tau_min_lambda ? momentum_tau_floor(c) : 0.0;
    std::map<std::string, std::vector<Row>> rows;
    const std::string src = regime_name(s.regime);
    for (double tau : c.tau_grid.nodes()) {
        const StationaryValues v = stationary_at(c, s.regime, mat, tau, momenta && tau >= floor);
        const double tp = std::max(tau, floor);
        const StationaryValues vp = tp == tau ? v : stationary_at(c, s.regime, mat, tp, true);
        for (const std::string& o : c.outputs) {
            if (o[0] == 'q')
                rows[o].push_back({tau, pick(v, o), src});
            else
                rows[o].push_back({tp, pick(vp, o), src});
        }
    }
    for (const std::string& o : c.outputs) s.write_series(o + ".csv", "tau", rows[o]);
    if (floor > 0.0) s.extra["momentum_tau_floor"] = floor;
}

struct OracleRun {
    DiscretizedBath d1, d2;
    QuadraticForm H;
    CovarianceState st;
};

OracleRun oracle_setup(const RunConfig& c) {
    OracleRun r;
    const double W = c.basis.w_mean;
    auto wmax = [&](const BathSpec& b) { return c.oracle_omega_max > 0.0 ? c.oracle_omega_max : default_omega_max(b, W); };
    r.d1 = discretize(c.baths[0], c.oracle_modes, wmax(c.baths[0]));
    r.d2 = discretize(c.baths[1], c.oracle_modes, wmax(c.baths[1]));
    r.H = build_hamiltonian(c.basis, discrete_counterterms(r.d1, r.d2, c.basis.psi_angle), r.d1, r.d2,
                            c.basis.psi_angle);
    r.st = initial_state(c.basis, r.d1, r.d2, c.baths[0].temperature, c.baths[1].temperature);
    return r;
}

// rotate (q+, q-, p+, p-) to the bare oscillators (q_a, q_b, p_a, p_b)
Eigen::Matrix4d oscillator_covariance(const NormalModeBasis& nb, const Eigen::Matrix4d& c) {
    Eigen::Matrix4d R = Eigen::Matrix4d::Zero();
    R.topLeftCorner<2, 2>() = nb.rotation;
    R.bottomRightCorner<2, 2>() = nb.rotation;
    return R * c * R.transpose();
}

void run_oracle(Session& s) {
    const RunConfig& c = s.cfg;
    OracleRun r = oracle_setup(c);
    Propagator P(r.H, std::min(r.d1.recurrence_time(), r.d2.recurrence_time()));
    P.prepare(r.st);
    const int idx[6][2] = {{0, 0}, {1, 1}, {0, 1}, {2, 2}, {3, 3}, {2, 3}};
    std::map<std::string, std::vector<Row>> rows;
    std::vector<Row> en;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (double t : c.t_grid.nodes()) {
        check_recurrence(s, P, t);
        const Eigen::Matrix4d cov = P.system_covariance(t);
        for (const std::string& o : c.outputs) {
            const auto k = std::find(all_outputs.begin(), all_outputs.end(), o) - all_outputs.begin();
            rows[o].push_back({t, cov(idx[k][0], idx[k][1]), "oracle"});
        }
        const Eigen::Matrix4d osc = oscillator_covariance(c.basis, cov);
        worst_margin = std::min(worst_margin, uncertainty_margin(osc));
        en.push_back({t, log_negativity(osc), "oracle"});
    }
    for (const std::string& o : c.outputs) s.write_series(o + ".csv", "t", rows[o]);
    s.write_series("log_negativity.csv", "t", en);
    s.extra["oracle_modes"] = {r.d1.count(), r.d2.count()};
    s.extra["recurrence_time"] = std::min(r.d1.recurrence_time(), r.d2.recurrence_time());
    s.extra["uncertainty_margin"] = worst_margin;
}

// ---- presets ----

Grid preset_grid(const KeyValues& kv, Grid g) { return make_grid(kv, "grid.t_min", "grid.t_max", "grid.n_points", g); }

void run_fig1(Session& s, const KeyValues& kv) {
    const NormalModeBasis nb = renormalized_basis(1.0, 0.0, pi / 4);
    for (double g2 : {0.01, 0.03}) {
        const BathSpec b1 = BathSpec::strict(0.1, 0.0), b2 = BathSpec::strict(g2, 0.0);
        const GreensKernel k(GreensRegime::StrongDelta0, nb, b1, b2);
        std::vector<Row> rows;
        for (double t : preset_grid(kv, {0.0, 10.0 / g2, 2001}).nodes())
            rows.push_back({t, nb.w_mean * coherence_initial_strong(k, t), "initial"});
        char name[64];
        std::snprintf(name, sizeof name, "fig1_gamma2_%g.csv", g2);
        s.write_series(name, "t", rows);
    }
    s.regime = Regime::StrongDelta0;
    s.cfg.basis = nb;
    s.cfg.baths[0] = BathSpec::strict(0.1, 0.0);
    s.cfg.baths[1] = BathSpec::strict(0.01, 0.0);
    s.extra["preset"] = {{"gamma1", 0.1}, {"gamma2", {0.01, 0.03}}, {"psi", pi / 4}, {"delta", 0.0}};
}

void run_fig2(Session& s, const KeyValues& kv) {
    const NormalModeBasis nb = renormalized_basis(1.0, 0.0, pi / 4);
    const BathSpec b1 = BathSpec::strict(0.1, 0.0), b2 = BathSpec::strict(0.0, 0.0);
    const GreensKernel k(GreensRegime::OneBath, nb, b1, b2);
    std::vector<Row> rows;
    for (double t : preset_grid(kv, {0.0, 200.0, 2001}).nodes())
        rows.push_back({t, nb.w_mean * coherence_initial_strong(k, t), "initial"});
    s.write_series("fig2.csv", "t", rows);
    s.regime = Regime::OneBath;
    s.cfg.basis = nb;
    s.cfg.baths[0] = b1;
    s.cfg.baths[1] = b2;
}

void run_fig3(Session& s, const KeyValues& kv) {
    const double W = 1.0, D = 0.25, psi = pi / 4, g1 = 0.05, g2 = 0.005;
    std::vector<Row> rows;
    for (double t : preset_grid(kv, {0.0, 400.0, 8001}).nodes())
        rows.push_back({t, W * coherence_initial_weak(W, D, psi, g1, g2, t), "initial"});
    s.write_series("fig3.csv", "t", rows);
    s.regime = Regime::Weak;
    s.cfg.basis = renormalized_basis(W, D, psi);
    s.cfg.baths[0] = BathSpec::strict(g1, 0.0);
    s.cfg.baths[1] = BathSpec::strict(g2, 0.0);
}

// ---- sweep ----

struct SweepRow {
    double value = 0.0;
    std::string regime;
    cplx coherence{nan, nan};
    double t_plus = nan, t_minus = nan, decay = nan, h1 = nan, h2 = nan, en = nan;
    std::string error;
};

SweepRow sweep_point(const KeyValues& base, const std::string& key, double value) {
    SweepRow row;
    row.value = value;
    try {
        KeyValues kv = base;
        kv.set(key, format_number(value), "sweep");
        const RunConfig c = build_config(kv);
        const Regime r = resolve_regime(c);
        row.regime = regime_name(r);
        const LaplaceMatrix mat(c.basis, c.baths[0], c.baths[1]);
        check_stability(mat);
        row.coherence = stationary_at(c, r, mat, 0.0, false).qq_pm;
        std::tie(row.t_plus, row.t_minus) =
            effective_temperatures(c.basis.psi_angle, c.baths[0].temperature, c.baths[1].temperature);
        row.decay = slowest_decay_rate(mat);
        const double W = c.basis.w_mean;
        if (!c.baths[0].strict_ohmic && c.baths[0].gamma > 0.0) row.h1 = H_function(c.baths[0], W, 0.0).real();
        if (!c.baths[1].strict_ohmic && c.baths[1].gamma > 0.0) row.h2 = H_function(c.baths[1], W, 0.0).real();
        if (c.oracle_time > 0.0) {
            OracleRun o = oracle_setup(c);
            Propagator P(o.H);
            P.prepare(o.st);
            row.en = log_negativity(oscillator_covariance(c.basis, P.system_covariance(c.oracle_time)));
        }
    } catch (const std::exception& e) {
        row.coherence = {nan, nan};
        row.t_plus = row.t_minus = row.decay = row.h1 = row.h2 = row.en = nan;
        row.error = e.what();
        std::replace(row.error.begin(), row.error.end(), ',', ';');
        std::replace(row.error.begin(), row.error.end(), '\n', ' ');
    }
    return row;
}

std::vector<double> sweep_values(const KeyValues& kv) {
    std::vector<double> vals;
    if (kv.has("sweep.values")) {
        for (const std::string& item : split(kv.get("sweep.values", ""), ',')) {
            double x;
            if (!parse_value(item, x)) throw ConfigError(kv.origin("sweep.values") + ": bad number '" + item + "'");
            vals.push_back(x);
        }
    } else if (kv.has("sweep.min") && kv.has("sweep.max")) {
        const int n = static_cast<int>(kv.integer("sweep.points", 11));
        if (n < 1) throw ConfigError(kv.origin("sweep.points") + ": sweep.points must be at least 1");
        const double a = kv.number("sweep.min", 0.0), b = kv.number("sweep.max", 0.0);
        for (int i = 0; i < n; ++i) vals.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    }
    if (vals.empty()) throw ConfigError("sweep needs sweep.values or sweep.min/sweep.max");
    return vals;
}

void run_sweep(Session& s, const KeyValues& kv, int workers) {
    const std::string key = kv.get("sweep.param", "");
    if (key.empty()) throw ConfigError("sweep needs sweep.param");
    if (!known_keys.count(key) || key.rfind("sweep.", 0) == 0 || key == "regime" || key == "outputs" ||
        key.find("cutoff") != std::string::npos)
        throw ConfigError(kv.origin("sweep.param") + ": cannot sweep '" + key + "'");
    const std::vector<double> vals = sweep_values(kv);
    std::vector<SweepRow> rows(vals.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next++; i < vals.size(); i = next++) rows[i] = sweep_point(kv, key, vals[i]);
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(vals.size())));
    for (int w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    std::ofstream f(s.out / "sweep.csv");
    f << "index," << key
      << ",regime,coherence_re,coherence_im,t_eff_plus,t_eff_minus,decay_rate,h1_zero,h2_zero,log_negativity,error\n";
    size_t failed = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& r = rows[i];
        failed += !r.error.empty();
        f << i << "," << format_number(r.value) << "," << r.regime << "," << format_number(r.coherence.real()) << ","
          << format_number(r.coherence.imag()) << "," << format_number(r.t_plus) << "," << format_number(r.t_minus)
          << "," << format_number(r.decay) << "," << format_number(r.h1) << "," << format_number(r.h2) << ","
          << format_number(r.en) << "," << r.error << "\n";
    }
    s.files.push_back("sweep.csv");
    s.extra["sweep"] = {{"param", key}, {"points", vals.size()}, {"failed", failed}};
    if (failed) s.warn(std::to_string(failed) + " sweep point(s) failed; see the error column");
}

}  // namespace

// ---- public helpers ----

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Auto: return "auto";
        case Regime::StrongDelta0: return "strong_delta0";
        case Regime::OneBath: return "one_bath";
        case Regime::Weak: return "weak";
        case Regime::Numeric: return "numeric";
    }
    return "?";
}

Regime parse_regime(const std::string& s) {
    for (Regime r : {Regime::Auto, Regime::StrongDelta0, Regime::OneBath, Regime::Weak, Regime::Numeric})
        if (s == regime_name(r)) return r;
    throw ConfigError("unknown regime '" + s + "' (auto, strong_delta0, one_bath, weak, numeric)");
}

KeyValues KeyValues::parse(const std::string& text, const std::string& origin) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const std::string where = origin + ":" + std::to_string(n);
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": missing key");
        if (kv.has(key)) throw ConfigError(where + ": duplicate key '" + key + "' (first at " + kv.origin(key) + ")");
        kv.set(key, trim(line.substr(eq + 1)), where);
    }
    return kv;
}

KeyValues KeyValues::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

void KeyValues::set(const std::string& key, const std::string& value, const std::string& origin) {
    if (!known_keys.count(key)) throw ConfigError(origin + ": unknown key '" + key + "'");
    values_[key] = value;
    origins_[key] = origin;
}

std::string KeyValues::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValues::number(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double x;
    if (!parse_value(it->second, x) || !std::isfinite(x))
        throw ConfigError(origin(key) + ": " + key + " expects a number, got '" + it->second + "'");
    return x;
}

long KeyValues::integer(const std::string& key, long fallback) const {
    const double x = number(key, static_cast<double>(fallback));
    if (x != std::floor(x)) throw ConfigError(origin(key) + ": " + key + " expects an integer");
    return static_cast<long>(x);
}

const std::string& KeyValues::origin(const std::string& key) const {
    static const std::string none = "default";
    const auto it = origins_.find(key);
    return it == origins_.end() ? none : it->second;
}

std::vector<double> Grid::nodes() const {
    std::vector<double> t(points);
    for (int i = 0; i < points; ++i) t[i] = points == 1 ? min : min + (max - min) * i / (points - 1);
    return t;
}

RunConfig build_config(const KeyValues& kv) {
    RunConfig c;
    const bool bare = kv.has("system.omega_a") || kv.has("system.omega_b") || kv.has("system.omega_c") ||
                      kv.has("system.theta");
    const bool direct = kv.has("system.W") || kv.has("system.delta") || kv.has("system.psi");
    if (bare && direct) throw ConfigError("give either system.W/delta/psi or system.omega_a/omega_b/omega_c/theta");
    try {
        if (bare) {
            SystemParams p;
            p.omega_a = kv.number("system.omega_a", 1.0);
            p.omega_b = kv.number("system.omega_b", 1.0);
            p.omega_c = kv.number("system.omega_c", 0.0);
            p.theta = kv.number("system.theta", 0.0);
            c.basis = diagonalize(p);
        } else {
            const double W = kv.number("system.W", 1.0), D = kv.number("system.delta", 0.0);
            if (!(W > 0.0) || !(W - std::abs(D) / 2 > 0.0))
                throw ConfigError("system.W must exceed |system.delta|/2 > 0");
            c.basis = renormalized_basis(W, D, kv.number("system.psi", pi / 4));
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("system: ") + e.what());
    }
    c.baths[0] = make_bath(kv, 1);
    c.baths[1] = make_bath(kv, 2);
    c.regime = parse_regime(kv.get("regime", "auto"));
    c.t_grid = make_grid(kv, "grid.t_min", "grid.t_max", "grid.n_points", c.t_grid);
    c.tau_grid = make_grid(kv, "grid.tau_min", "grid.tau_max", "grid.tau_points", c.tau_grid);
    if (kv.has("outputs")) {
        c.outputs = split(kv.get("outputs", ""), ',');
        for (const std::string& o : c.outputs)
            if (std::find(all_outputs.begin(), all_outputs.end(), o) == all_outputs.end())
                throw ConfigError(kv.origin("outputs") + ": unknown output '" + o + "'");
        if (c.outputs.empty()) throw ConfigError(kv.origin("outputs") + ": outputs is empty");
    }
    c.oracle_modes = static_cast<int>(kv.integer("oracle.n_modes", c.oracle_modes));
    c.oracle_omega_max = kv.number("oracle.omega_max", 0.0);
    c.oracle_time = kv.number("oracle.time", 0.0);
    c.noise_dt = kv.number("noise.dt", c.noise_dt);
    c.noise_freq = static_cast<int>(kv.integer("noise.n_freq", c.noise_freq));
    c.tol = kv.number("tol", c.tol);
    if (c.oracle_modes < 2) throw ConfigError(kv.origin("oracle.n_modes") + ": oracle.n_modes must be at least 2");
    if (!(c.noise_dt > 0.0) || c.noise_freq < 3) throw ConfigError("noise.dt must be positive and noise.n_freq >= 3");
    if (!(c.tol > 0.0)) throw ConfigError(kv.origin("tol") + ": tol must be positive");
    return c;
}

Regime resolve_regime(const RunConfig& c) {
    if (c.regime != Regime::Auto) return c.regime;
    const double D = c.basis.detuning;
    const double g1 = c.baths[0].gamma, g2 = c.baths[1].gamma;
    if (D == 0.0) return g2 == 0.0 ? Regime::OneBath : Regime::StrongDelta0;
    const double scale = std::min(c.basis.w_mean - D / 2, std::abs(D));
    return std::max(g1, g2) / scale < 0.2 ? Regime::Weak : Regime::Numeric;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int run(int argc, char** argv) {
    CLI::App app{"Two oscillators coupled to two thermal baths: correlators, coherence and a finite-bath oracle"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    double tol = 0.0;
    bool tau_min_lambda = false;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--out", out_dir, "output directory (default $DUET_BATHS_OUT or ./duet_out)");
    app.add_option("--workers", workers, "sweep worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tol", tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
    app.add_flag("--tau-min-lambda", tau_min_lambda, "evaluate momentum correlators at tau >= 1/Lambda");
    app.add_option("--set", overrides, "override a config key, key=value (repeatable)");
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"evolve", "finite-time equal-time correlators from the system ground state"},
        {"stationary", "stationary two-time correlators on the tau grid"},
        {"sweep", "stationary summaries over one swept parameter"},
        {"oracle", "exact finite-bath Gaussian evolution"},
        {"fig1", "two-bath strong-coupling coherence transient"},
        {"fig2", "one-bath coherence memory"},
        {"fig3", "weak-coupling beats"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Session s;
    s.command = app.get_subcommands().front()->get_name();
    try {
        KeyValues kv = config_path.empty() ? KeyValues{} : KeyValues::from_file(config_path);
        for (const std::string& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
            kv.set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)), "--set " + trim(o.substr(0, eq)));
        }
        if (tol > 0.0) kv.set("tol", format_number(tol), "--tol");
        s.cfg = build_config(kv);
        s.cfg.tau_min_lambda = tau_min_lambda;
        s.regime = resolve_regime(s.cfg);

        if (out_dir.empty()) {
            const char* env = std::getenv("DUET_BATHS_OUT");
            out_dir = env && *env ? env : "duet_out";
        }
        s.out = out_dir;
        std::error_code ec;
        fs::create_directories(s.out, ec);
        if (ec) throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());

        if (s.command == "evolve" || s.command == "stationary")
            check_stability(LaplaceMatrix(s.cfg.basis, s.cfg.baths[0], s.cfg.baths[1]));
        std::string xlabel = "W t";
        if (s.command == "evolve")
            run_evolve(s);
        else if (s.command == "stationary") {
            run_stationary(s);
            xlabel = "W tau";
        } else if (s.command == "oracle")
            run_oracle(s);
        else if (s.command == "sweep") {
            run_sweep(s, kv, workers);
            xlabel = kv.get("sweep.param", "");
        } else if (s.command == "fig1")
            run_fig1(s, kv);
        else if (s.command == "fig2")
            run_fig2(s, kv);
        else
            run_fig3(s, kv);
        write_manifest(s);
        write_plot_script(s, xlabel);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const StabilityError& e) {
        std::cerr << "unstable parameters: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

}  // namespace duet::cli
