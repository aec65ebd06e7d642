#pragma once

#include <map>
#include <string>
#include <vector>

#include "duet/model.hpp"

namespace duet::cli {

enum class Regime { Auto, StrongDelta0, OneBath, Weak, Numeric };

const char* regime_name(Regime r);
Regime parse_regime(const std::string& s);

// Flat "dotted.key = value" store; remembers where each key came from.
class KeyValues {
public:
    static KeyValues parse(const std::string& text, const std::string& origin);
    static KeyValues from_file(const std::string& path);

    void set(const std::string& key, const std::string& value, const std::string& origin = "override");
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
    const std::string& origin(const std::string& key) const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> origins_;
};

struct Grid {
    double min = 0.0, max = 0.0;
    int points = 0;
    std::vector<double> nodes() const;
};

struct RunConfig {
    NormalModeBasis basis;
    BathSpec baths[2];
    Regime regime = Regime::Auto;
    Grid t_grid{0.0, 60.0, 601};
    Grid tau_grid{0.0, 20.0, 201};
    std::vector<std::string> outputs{"qq_pp", "qq_mm", "qq_pm"};
    int oracle_modes = 400;
    double oracle_omega_max = 0.0;  // 0: per-bath default
    double oracle_time = 0.0;       // sweep log-negativity time, 0 disables
    double noise_dt = 0.01;
    int noise_freq = 8001;
    double tol = 1e-8;
    bool tau_min_lambda = false;
};

// Throws ConfigError naming the offending key and its origin.
RunConfig build_config(const KeyValues& kv);

// gamma_2 = 0 and Delta = 0 -> OneBath; Delta = 0 -> StrongDelta0;
// max gamma / min(W - Delta/2, |Delta|) < 0.2 -> Weak; else Numeric.
Regime resolve_regime(const RunConfig& cfg);

// %.17g
std::string format_number(double x);

// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace duet::cli
