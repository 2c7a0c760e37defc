// Command-line front end. Talks to the core exclusively through the C API.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "risofdma.h"

namespace {

int fail(riso_status s, const char* op) {
    std::fprintf(stderr, "riso: %s failed (%s): %s\n", op, riso_status_name(s),
                 riso_last_error());
    return 1;
}

struct ConfigHandle {
    riso_config* cfg = nullptr;
    ~ConfigHandle() { riso_config_free(cfg); }
};

int load_config(const std::string& path,
                const std::vector<std::string>& overrides, ConfigHandle& h) {
    riso_status s = path.empty() ? riso_config_load_text("", &h.cfg)
                                 : riso_config_load_file(path.c_str(), &h.cfg);
    if (s != RISO_OK) return fail(s, "config load");
    for (const std::string& ov : overrides) {
        size_t eq = ov.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "riso: bad --set '%s', expected key=value\n",
                         ov.c_str());
            return 1;
        }
        s = riso_config_set(h.cfg, ov.substr(0, eq).c_str(),
                            ov.substr(eq + 1).c_str());
        if (s != RISO_OK) return fail(s, "config override");
    }
    return 0;
}

int print_report(riso_status s, const char* op, char* report) {
    if (s != RISO_OK) return fail(s, op);
    std::printf("%s\n", report);
    riso_free_string(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted MISO-OFDMA simulator and learning toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "config file (key = value lines)");
    app.add_option("--set", overrides, "override a config key, key=value")
        ->take_all();

    // generate-data
    auto* gen = app.add_subcommand("generate-data", "sample channel datasets");
    std::string gen_out = "data";
    int gen_train = 512, gen_val = 128;
    std::uint64_t gen_seed = 1;
    bool gen_force = false;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--train", gen_train, "training realizations");
    gen->add_option("--val", gen_val, "validation realizations");
    gen->add_option("--seed", gen_seed, "dataset seed");
    gen->add_flag("--force", gen_force, "overwrite existing files");

    // train
    auto* tr = app.add_subcommand("train", "run the training schedule");
    std::string tr_data = "data", tr_out = "run";
    bool tr_joint = false;
    tr->add_option("--data", tr_data, "dataset directory");
    tr->add_option("--out", tr_out, "output directory (model.ckpt, history.tsv)");
    tr->add_flag("--joint", tr_joint, "joint updates from scratch");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "evaluate a checkpoint");
    std::string ev_ckpt, ev_data;
    ev->add_option("--checkpoint", ev_ckpt, "model checkpoint")->required();
    ev->add_option("--data", ev_data, "dataset file")->required();

    // baseline
    auto* bl = app.add_subcommand("baseline", "run a comparison scheme");
    std::string bl_scheme, bl_ckpt, bl_data;
    std::uint64_t bl_seed = 7;
    bl->add_option("--scheme", bl_scheme,
                   "trained | continuous | random_ris | random_allocation | "
                   "without_ris | fixed_allocation")
        ->required();
    bl->add_option("--checkpoint", bl_ckpt, "model checkpoint (if needed)");
    bl->add_option("--data", bl_data, "dataset file")->required();
    bl->add_option("--seed", bl_seed, "randomized-scheme seed");

    // oracle
    auto* orc = app.add_subcommand("oracle", "exhaustive search (tiny scale)");
    std::string orc_data, orc_cache;
    int orc_max = 0;
    orc->add_option("--data", orc_data, "dataset file")->required();
    orc->add_option("--cache", orc_cache, "result cache directory");
    orc->add_option("--max-records", orc_max, "limit realizations (0 = all)");

    // sweep
    auto* sw = app.add_subcommand("sweep", "evaluate schemes along one axis");
    std::string sw_axis, sw_ckpt_dir = "run", sw_out = "sweep";
    std::vector<double> sw_values;
    std::vector<std::string> sw_schemes;
    int sw_count = 64;
    std::uint64_t sw_seed = 99;
    sw->add_option("--axis", sw_axis,
                   "P_max | M | rician | taps | geometry | lambda1")
        ->required();
    sw->add_option("--values", sw_values, "axis values")->required()->take_all();
    sw->add_option("--schemes", sw_schemes, "schemes to evaluate")
        ->required()
        ->take_all();
    sw->add_option("--checkpoints", sw_ckpt_dir, "checkpoint directory");
    sw->add_option("--count", sw_count, "evaluation realizations per point");
    sw->add_option("--seed", sw_seed, "evaluation seed");
    sw->add_option("--out", sw_out, "output directory");

    // plot
    auto* pl = app.add_subcommand("plot", "render SVG figures");
    std::string pl_metrics, pl_history, pl_out;
    pl->add_option("--metrics", pl_metrics, "metrics.csv from a sweep");
    pl->add_option("--history", pl_history, "history.tsv from training");
    pl->add_option("--out", pl_out, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    ConfigHandle cfg;
    if (int rc = load_config(config_path, overrides, cfg)) return rc;

    if (gen->parsed()) {
        riso_status s = riso_generate_data(cfg.cfg, gen_out.c_str(), gen_train,
                                           gen_val, gen_seed, gen_force ? 1 : 0);
        if (s != RISO_OK) return fail(s, "generate-data");
        std::printf("wrote %s/train.bin (%d) and %s/val.bin (%d)\n",
                    gen_out.c_str(), gen_train, gen_out.c_str(), gen_val);
        return 0;
    }
    if (tr->parsed()) {
        riso_status s = riso_train(cfg.cfg, tr_data.c_str(), tr_out.c_str(),
                                   tr_joint ? 1 : 0);
        if (s != RISO_OK) return fail(s, "train");
        std::printf("wrote %s/model.ckpt and %s/history.tsv\n", tr_out.c_str(),
                    tr_out.c_str());
        return 0;
    }
    if (ev->parsed()) {
        char* report = nullptr;
        riso_status s = riso_evaluate(cfg.cfg, ev_ckpt.c_str(), ev_data.c_str(),
                                      &report);
        return print_report(s, "evaluate", report);
    }
    if (bl->parsed()) {
        char* report = nullptr;
        riso_status s = riso_baseline(cfg.cfg, bl_scheme.c_str(),
                                      bl_ckpt.empty() ? nullptr : bl_ckpt.c_str(),
                                      bl_data.c_str(), bl_seed, &report);
        return print_report(s, "baseline", report);
    }
    if (orc->parsed()) {
        char* report = nullptr;
        riso_status s = riso_oracle(cfg.cfg, orc_data.c_str(),
                                    orc_cache.empty() ? nullptr : orc_cache.c_str(),
                                    orc_max, &report);
        return print_report(s, "oracle", report);
    }
    if (sw->parsed()) {
        std::vector<const char*> scheme_ptrs;
        for (const std::string& s : sw_schemes) scheme_ptrs.push_back(s.c_str());
        riso_status s = riso_sweep(cfg.cfg, sw_axis.c_str(), sw_values.data(),
                                   int(sw_values.size()), scheme_ptrs.data(),
                                   int(scheme_ptrs.size()), sw_ckpt_dir.c_str(),
                                   sw_count, sw_seed, sw_out.c_str());
        if (s != RISO_OK) return fail(s, "sweep");
        std::printf("wrote %s/metrics.csv and %s/timings.csv\n", sw_out.c_str(),
                    sw_out.c_str());
        return 0;
    }
    if (pl->parsed()) {
        if (pl_metrics.empty() == pl_history.empty()) {
            std::fprintf(stderr,
                         "riso: plot needs exactly one of --metrics/--history\n");
            return 1;
        }
        riso_status s = pl_metrics.empty()
                            ? riso_plot_history(pl_history.c_str(), pl_out.c_str())
                            : riso_plot_metrics(pl_metrics.c_str(), pl_out.c_str());
        if (s != RISO_OK) return fail(s, "plot");
        std::printf("wrote %s\n", pl_out.c_str());
        return 0;
    }
    return 0;
}
