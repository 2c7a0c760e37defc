#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace riso {

namespace {

EvalMetrics aggregate_reports(const std::vector<RateReport>& reports,
                              const ScenarioConfig& cfg, double latency_ms) {
    EvalMetrics m;
    m.per_user_mbps.assign(cfg.K, 0.0);
    std::vector<double> pooled;
    int qos_ok = 0, qos_total = 0;
    for (const RateReport& rep : reports) {
        m.sum_rates_mbps.push_back(rep.sum_rate / 1e6);
        for (int k = 0; k < cfg.K; ++k) {
            double r = rep.per_user[k] / 1e6;
            m.per_user_mbps[k] += r;
            pooled.push_back(r);
            ++qos_total;
            if (rep.per_user[k] >= cfg.R_qos) ++qos_ok;
        }
    }
    size_t n = reports.size();
    if (n > 0) {
        for (double& v : m.per_user_mbps) v /= double(n);
        for (double v : m.sum_rates_mbps) m.mean_sum_rate_mbps += v;
        m.mean_sum_rate_mbps /= double(n);
    }
    m.rate_5pct_mbps = percentile_low(pooled, 5.0);
    m.qos_satisfaction = qos_total ? double(qos_ok) / qos_total : 0.0;
    m.inference_latency_ms = latency_ms;
    return m;
}

} // namespace

EvalMetrics evaluate_scheme(const std::string& scheme, ModelParameters* params,
                            const Dataset& dataset, const ScenarioConfig& cfg,
                            std::uint64_t scheme_seed,
                            const std::string& oracle_cache_dir) {
    if (scheme == "trained") {
        if (!params) throw std::invalid_argument("scheme 'trained' needs a checkpoint");
        return evaluate(*params, dataset, cfg);
    }
    if (scheme == "continuous") {
        if (!params)
            throw std::invalid_argument("scheme 'continuous' needs a checkpoint");
        std::vector<RateReport> reports;
        double lat = 0.0;
        for (const FrequencyChannel& fc : dataset.records) {
            auto t0 = std::chrono::steady_clock::now();
            Tensor4 xb = features_beam(fc);
            std::vector<double> theta =
                params->beamnet->forward(xb, PhaseMode::Continuous, false);
            EffectiveChannel eff = effective_channel(fc, theta, cfg.Q);
            Tensor4 xa = features_alloc(eff);
            RandomStream dummy(0);
            std::vector<double> alloc = params->allocationnet->forward(
                xa, AllocMode::Hard, cfg.tau, dummy, false);
            auto t1 = std::chrono::steady_clock::now();
            lat += std::chrono::duration<double, std::milli>(t1 - t0).count();
            BeamformingSolution sol = solve_beamforming(eff, alloc, cfg);
            reports.push_back(compute_rates(eff, alloc, sol, cfg));
        }
        return aggregate_reports(
            reports, cfg,
            dataset.records.empty() ? 0.0 : lat / double(dataset.records.size()));
    }
    if (scheme == "oracle") {
        std::vector<RateReport> reports;
        int id = 0;
        for (const FrequencyChannel& fc : dataset.records) {
            OracleResult res =
                oracle_cache_dir.empty()
                    ? exhaustive_oracle(fc, cfg)
                    : exhaustive_oracle_cached(fc, cfg, oracle_cache_dir, id);
            reports.push_back(res.report);
            ++id;
        }
        return aggregate_reports(reports, cfg, 0.0);
    }
    BaselineKind kind = baseline_from_tag(scheme);
    RandomStream root(scheme_seed);
    std::vector<RateReport> reports;
    double lat = 0.0;
    int id = 0;
    for (const FrequencyChannel& fc : dataset.records) {
        RandomStream rs = root.substream(0xb45e ^ std::uint64_t(id));
        auto t0 = std::chrono::steady_clock::now();
        auto [dec, rep] = run_baseline(kind, fc, params, cfg, rs);
        auto t1 = std::chrono::steady_clock::now();
        lat += std::chrono::duration<double, std::milli>(t1 - t0).count();
        reports.push_back(std::move(rep));
        ++id;
    }
    return aggregate_reports(
        reports, cfg,
        dataset.records.empty() ? 0.0 : lat / double(dataset.records.size()));
}

ScenarioConfig apply_axis(const ScenarioConfig& cfg, const std::string& axis,
                          double value) {
    ScenarioConfig out = cfg;
    if (axis == "P_max") {
        out.P_max = value;
    } else if (axis == "M") {
        out.M = int(value);
    } else if (axis == "rician") {
        out.k_BR = value;
        out.k_RU = value;
    } else if (axis == "taps") {
        int v = int(value);
        if (v < 2) throw std::invalid_argument("taps axis value must be >= 2");
        out.L0 = v;
        out.L1 = v / 2;
        out.L2 = v / 2 + 1;
    } else if (axis == "geometry") {
        out.R_inner = value;
    } else if (axis == "lambda1") {
        out.lambda1 = value;
    } else {
        throw std::invalid_argument("unknown sweep axis: " + axis);
    }
    out.finalize();
    return out;
}

namespace {

std::string fmt_axis_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// per-value checkpoint if present, else the shared one
std::string find_checkpoint(const std::string& dir, const std::string& axis,
                            double value) {
    std::string per_value =
        dir + "/model_" + axis + "_" + fmt_axis_value(value) + ".ckpt";
    if (std::filesystem::exists(per_value)) return per_value;
    std::string shared = dir + "/model.ckpt";
    if (std::filesystem::exists(shared)) return shared;
    throw std::runtime_error(
        "no checkpoint found: expected " + per_value + " or " + shared +
        "; train one with: riso train --config <cfg> --data <dir> --out " + dir);
}

} // namespace

ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::string& axis,
                                const std::vector<double>& values,
                                const std::vector<std::string>& schemes,
                                const std::string& checkpoint_dir,
                                int eval_count, std::uint64_t eval_seed) {
    if (schemes.empty())
        throw std::invalid_argument("run_experiment: no schemes given");
    ExperimentResult result;
    result.axis_name = axis;
    result.config_snapshot = cfg.serialize();
    for (double value : values) {
        ScenarioConfig vcfg = apply_axis(cfg, axis, value);
        Dataset eval_set = generate_records(vcfg, "eval", eval_count, eval_seed);
        bool needs_model = false;
        for (const std::string& s : schemes)
            if (s != "without_ris" && s != "oracle") needs_model = true;
        ModelParameters params;
        bool have_model = false;
        if (needs_model) {
            std::string ckpt = find_checkpoint(checkpoint_dir, axis, value);
            // robustness sweeps reuse the reference checkpoint, whose
            // architecture follows the training config, not vcfg
            ScenarioConfig model_cfg = vcfg;
            if (axis == "rician" || axis == "taps" || axis == "geometry" ||
                axis == "P_max" || axis == "lambda1") {
                model_cfg = cfg;
                model_cfg.finalize();
            }
            params = load_checkpoint(ckpt, model_cfg);
            have_model = true;
        }
        for (const std::string& scheme : schemes) {
            ExperimentRow row;
            row.scheme = scheme;
            row.axis = value;
            ModelParameters* p = have_model ? &params : nullptr;
            if (scheme == "without_ris") p = nullptr;  // row stays model-free
            row.metrics =
                evaluate_scheme(scheme, p, eval_set, vcfg, eval_seed ^ 0x5c3e);
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

void write_metrics(const ExperimentResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    auto write_file = [](const std::string& path, const std::string& body) {
        std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp);
            out << body;
        }
        std::remove(path.c_str());
        std::rename(tmp.c_str(), path.c_str());
    };
    std::ostringstream csv;
    csv << "scheme,axis,mean_sum_rate_mbps,rate_5pct_mbps,qos_fraction\n";
    char buf[256];
    for (const ExperimentRow& r : result.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g\n",
                      r.scheme.c_str(), r.axis, r.metrics.mean_sum_rate_mbps,
                      r.metrics.rate_5pct_mbps, r.metrics.qos_satisfaction);
        csv << buf;
    }
    write_file(dir + "/metrics.csv", csv.str());

    std::ostringstream tim;
    tim << "scheme,axis,latency_ms\n";
    for (const ExperimentRow& r : result.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.6f\n", r.scheme.c_str(),
                      r.axis, r.metrics.inference_latency_ms);
        tim << buf;
    }
    write_file(dir + "/timings.csv", tim.str());
    write_file(dir + "/config.resolved", result.config_snapshot);
    std::ostringstream meta;
    meta << "axis = " << result.axis_name << "\n";
    write_file(dir + "/sweep.meta", meta.str());
}

ExperimentResult parse_metrics(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open metrics file: " + csv_path);
    ExperimentResult result;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            if (line.rfind("scheme,axis,", 0) != 0)
                throw std::runtime_error(csv_path + ":1: unexpected header");
            continue;
        }
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        ExperimentRow row;
        if (!std::getline(ls, row.scheme, ','))
            throw std::runtime_error(csv_path + ":" + std::to_string(lineno) +
                                     ": missing scheme");
        double vals[4];
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(ls, field, ','))
                throw std::runtime_error(csv_path + ":" + std::to_string(lineno) +
                                         ": missing column " + std::to_string(i + 2));
            try {
                vals[i] = std::stod(field);
            } catch (const std::exception&) {
                throw std::runtime_error(csv_path + ":" + std::to_string(lineno) +
                                         ": bad number '" + field + "'");
            }
        }
        row.axis = vals[0];
        row.metrics.mean_sum_rate_mbps = vals[1];
        row.metrics.rate_5pct_mbps = vals[2];
        row.metrics.qos_satisfaction = vals[3];
        result.rows.push_back(std::move(row));
    }
    return result;
}

// ---------- SVG plotting ----------

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;
};

void render_lines(const std::string& out_svg, const std::vector<Series>& series,
                  const std::string& xlabel, const std::string& ylabel,
                  const std::vector<double>& vmarks = {}) {
    if (series.empty()) throw std::runtime_error("plot: no series to draw");
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Series& s : series)
        for (auto [x, y] : s.pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    const double W = 720, H = 480, ml = 70, mr = 160, mt = 30, mb = 50;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
        << H << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
        << "' y2='" << H - mb << "' stroke='black'/>\n";
    svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
        << H - mb << "' stroke='black'/>\n";
    char buf[256];
    for (int i = 0; i <= 5; ++i) {
        double xv = xmin + i * (xmax - xmin) / 5.0;
        double yv = ymin + i * (ymax - ymin) / 5.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x='%.1f' y='%.1f' font-size='11' text-anchor='middle'>%g</text>\n",
                      px(xv), H - mb + 16, xv);
        svg << buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x='%.1f' y='%.1f' font-size='11' text-anchor='end'>%g</text>\n",
                      ml - 6, py(yv) + 4, yv);
        svg << buf;
    }
    for (double xv : vmarks) {
        std::snprintf(buf, sizeof(buf),
                      "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' "
                      "stroke='#aaaaaa' stroke-dasharray='4,3'/>\n",
                      px(xv), mt, px(xv), H - mb);
        svg << buf;
    }
    int ci = 0;
    for (const Series& s : series) {
        const char* color = kPalette[ci % 8];
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (auto [x, y] : s.pts) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x), py(y));
            svg << buf;
        }
        svg << "'/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<rect x='%.1f' y='%.1f' width='12' height='3' fill='%s'/>"
                      "<text x='%.1f' y='%.1f' font-size='12'>%s</text>\n",
                      W - mr + 10, mt + 20.0 * ci, color, W - mr + 28,
                      mt + 20.0 * ci + 6, s.label.c_str());
        svg << buf;
        ++ci;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x='%.1f' y='%.1f' font-size='13' text-anchor='middle'>%s</text>\n",
                  (ml + W - mr) / 2, H - 12.0, xlabel.c_str());
    svg << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x='14' y='%.1f' font-size='13' transform='rotate(-90 14 %.1f)' "
                  "text-anchor='middle'>%s</text>\n",
                  (mt + H - mb) / 2, (mt + H - mb) / 2, ylabel.c_str());
    svg << buf;
    svg << "</svg>\n";
    std::string tmp = out_svg + ".tmp";
    {
        std::ofstream out(tmp);
        out << svg.str();
    }
    std::remove(out_svg.c_str());
    std::rename(tmp.c_str(), out_svg.c_str());
}

} // namespace

void emit_metrics_plot(const std::string& metrics_csv, const std::string& out_svg) {
    ExperimentResult res = parse_metrics(metrics_csv);
    if (res.rows.empty()) throw std::runtime_error("plot: empty metrics table");
    std::vector<Series> series;
    for (const ExperimentRow& r : res.rows) {
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const Series& s) { return s.label == r.scheme; });
        if (it == series.end()) {
            series.push_back({r.scheme, {}});
            it = series.end() - 1;
        }
        it->pts.emplace_back(r.axis, r.metrics.mean_sum_rate_mbps);
    }
    for (Series& s : series)
        std::sort(s.pts.begin(), s.pts.end());
    render_lines(out_svg, series, "axis value", "mean sum rate (Mbps)");
}

void emit_history_plot(const std::string& history_path, const std::string& out_svg) {
    std::ifstream in(history_path);
    if (!in) throw std::runtime_error("cannot open history file: " + history_path);
    std::string line;
    int lineno = 0;
    Series train{"train loss", {}}, val{"val loss", {}};
    std::vector<double> boundaries;
    int last_stage = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) continue;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int it, stage;
        double rate, qos, reg, total;
        std::string val_field;
        if (!(ls >> it >> stage >> rate >> qos >> reg >> total >> val_field))
            throw std::runtime_error(history_path + ":" + std::to_string(lineno) +
                                     ": malformed record");
        train.pts.emplace_back(double(it), total);
        if (val_field != "-") val.pts.emplace_back(double(it), std::stod(val_field));
        if (stage != last_stage && last_stage >= 0) boundaries.push_back(double(it));
        last_stage = stage;
    }
    std::vector<Series> series{train};
    if (!val.pts.empty()) series.push_back(val);
    render_lines(out_svg, series, "iteration", "loss", boundaries);
}

} // namespace riso
