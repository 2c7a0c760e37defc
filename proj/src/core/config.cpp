#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace riso {

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

void ScenarioConfig::finalize() {
    beta0_lin = db_to_lin(beta0);
    k_br_lin = db_to_lin(k_BR);
    k_ru_lin = db_to_lin(k_RU);
    p_max_mw = dbm_to_mw(P_max);
    sigma2_mw = dbm_to_mw(noise_psd) * W;
    validate();
}

void ScenarioConfig::validate() const {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ValidationError(msg);
    };
    need(N_t >= 1, "N_t must be >= 1");
    need(K >= 1, "K must be >= 1");
    need(M >= 0, "M must be >= 0");
    need(N >= 1, "N must be >= 1");
    need(Q >= 1, "Q must be >= 1");
    need(L0 >= 1 && L1 >= 1 && L2 >= 1, "tap counts must be >= 1");
    need(total_taps() <= N, "max delay taps L must satisfy L <= N");
    need(W > 0, "W must be positive");
    need(p_max_mw > 0, "P_max must be positive");
    need(R_qos > 0, "R_qos must be positive");
    need(tau > 0, "tau must be positive");
    need(beta_q > 0, "beta_q must be positive");
    need(lambda1 >= 0 && lambda2 >= 0, "lambda1, lambda2 must be >= 0");
    need(d0 > 0, "d0 must be positive");
    need(D1 > 0 && D2 > 0, "D1, D2 must be positive");
    need(R_inner > 0, "R_inner must be positive");
    need(D3 >= 0, "D3 must be >= 0");
    need(N1 < N2 && N2 < N3 && N3 < N4 && N4 < N5,
         "stage boundaries must satisfy N1 < N2 < N3 < N4 < N5");
    need(N1 >= 1, "N1 must be >= 1");
    need(B >= 1, "B must be >= 1");
    need(val_interval >= 1, "val_interval must be >= 1");
    need(arch_conv1 >= 1 && arch_conv2 >= 1 && arch_conv3 >= 1 && arch_fc >= 1,
         "network widths must be >= 1");
    need(arch_se_reduction >= 1, "arch_se_reduction must be >= 1");
}

namespace {

struct Field {
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        auto add_i = [&t](const std::string& k, int ScenarioConfig::*p) {
            t[k] = {[p, k](ScenarioConfig& c, const std::string& v) {
                        size_t pos = 0;
                        c.*p = std::stoi(v, &pos);
                        if (pos != v.size())
                            throw ConfigError("bad integer for key '" + k + "': " + v);
                    },
                    [p](const ScenarioConfig& c) { return std::to_string(c.*p); }};
        };
        auto add_d = [&t](const std::string& k, double ScenarioConfig::*p) {
            t[k] = {[p, k](ScenarioConfig& c, const std::string& v) {
                        size_t pos = 0;
                        c.*p = std::stod(v, &pos);
                        if (pos != v.size())
                            throw ConfigError("bad number for key '" + k + "': " + v);
                    },
                    [p](const ScenarioConfig& c) { return fmt_double(c.*p); }};
        };
        add_i("N_t", &ScenarioConfig::N_t);
        add_i("K", &ScenarioConfig::K);
        add_i("M", &ScenarioConfig::M);
        add_i("N", &ScenarioConfig::N);
        add_i("Q", &ScenarioConfig::Q);
        add_i("L0", &ScenarioConfig::L0);
        add_i("L1", &ScenarioConfig::L1);
        add_i("L2", &ScenarioConfig::L2);
        add_d("W", &ScenarioConfig::W);
        add_d("noise_psd", &ScenarioConfig::noise_psd);
        add_d("P_max", &ScenarioConfig::P_max);
        add_d("R_qos", &ScenarioConfig::R_qos);
        add_d("k_BR", &ScenarioConfig::k_BR);
        add_d("k_RU", &ScenarioConfig::k_RU);
        add_d("beta0", &ScenarioConfig::beta0);
        add_d("d0", &ScenarioConfig::d0);
        add_d("xi0", &ScenarioConfig::xi0);
        add_d("xi1", &ScenarioConfig::xi1);
        add_d("xi2", &ScenarioConfig::xi2);
        add_d("D1", &ScenarioConfig::D1);
        add_d("D2", &ScenarioConfig::D2);
        add_d("R_inner", &ScenarioConfig::R_inner);
        add_d("D3", &ScenarioConfig::D3);
        add_d("lambda1", &ScenarioConfig::lambda1);
        add_d("lambda2", &ScenarioConfig::lambda2);
        add_d("tau", &ScenarioConfig::tau);
        add_d("beta_q", &ScenarioConfig::beta_q);
        add_d("mu1", &ScenarioConfig::mu1);
        add_d("mu2", &ScenarioConfig::mu2);
        add_d("mu3", &ScenarioConfig::mu3);
        add_i("N1", &ScenarioConfig::N1);
        add_i("N2", &ScenarioConfig::N2);
        add_i("N3", &ScenarioConfig::N3);
        add_i("N4", &ScenarioConfig::N4);
        add_i("N5", &ScenarioConfig::N5);
        add_i("B", &ScenarioConfig::B);
        add_i("val_interval", &ScenarioConfig::val_interval);
        t["seed"] = {[](ScenarioConfig& c, const std::string& v) {
                         c.seed = std::stoull(v);
                     },
                     [](const ScenarioConfig& c) { return std::to_string(c.seed); }};
        add_i("arch_conv1", &ScenarioConfig::arch_conv1);
        add_i("arch_conv2", &ScenarioConfig::arch_conv2);
        add_i("arch_conv3", &ScenarioConfig::arch_conv3);
        add_i("arch_fc", &ScenarioConfig::arch_fc);
        add_i("arch_se_reduction", &ScenarioConfig::arch_se_reduction);
        return t;
    }();
    return table;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

ScenarioConfig load_config(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value, got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        auto it = fields().find(key);
        if (it == fields().end())
            throw ConfigError("unknown config key '" + key + "'");
        try {
            it->second.set(cfg, val);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad value for key '" + key + "': " + val);
        }
    }
    cfg.finalize();
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

std::string ScenarioConfig::serialize() const {
    std::ostringstream out;
    for (const auto& [key, field] : fields())
        out << key << " = " << field.get(*this) << "\n";
    return out.str();
}

std::uint64_t ScenarioConfig::hash() const {
    std::string s = serialize();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Geometry sample_geometry(const ScenarioConfig& cfg, RandomStream& rng) {
    Geometry g;
    g.user_x.resize(cfg.K);
    g.user_y.resize(cfg.K);
    g.d_direct.resize(cfg.K);
    g.d_ru.resize(cfg.K);
    g.d_br = std::hypot(cfg.D1, cfg.D2);
    double a = cfg.R_inner;
    double b = cfg.R_inner + cfg.D3;
    for (int k = 0; k < cfg.K; ++k) {
        // uniform over the sector area: r ~ sqrt-law, angle uniform in the
        // quarter opening toward the BS side (x >= 0, y <= D2)
        double u = rng.uniform();
        double r = std::sqrt(a * a + u * (b * b - a * a));
        double ang = -0.5 * M_PI * rng.uniform();
        double x = r * std::cos(ang);
        double y = cfg.D2 + r * std::sin(ang);
        g.user_x[k] = x;
        g.user_y[k] = y;
        g.d_ru[k] = r;
        g.d_direct[k] = std::hypot(x - cfg.D1, y);
    }
    return g;
}

double path_gain(double d, double xi, const ScenarioConfig& cfg) {
    if (d <= 0) throw std::domain_error("path_gain: distance must be positive");
    return cfg.beta0_lin * std::pow(d / cfg.d0, -xi);
}

} // namespace riso
