#include "risofdma.h"

#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "core/experiment.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

struct CapiError {
    riso_status status;
    std::string message;
};

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F>
riso_status guarded(F&& fn) {
    try {
        fn();
        g_last_error.clear();
        return RISO_OK;
    } catch (const CapiError& e) {
        g_last_error = e.message;
        return e.status;
    } catch (const riso::ConfigError& e) {
        g_last_error = e.what();
        return RISO_ERR_VALIDATION;
    } catch (const riso::ValidationError& e) {
        g_last_error = e.what();
        return RISO_ERR_VALIDATION;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return RISO_ERR_INVALID_ARGUMENT;
    } catch (const std::ios_base::failure& e) {
        g_last_error = e.what();
        return RISO_ERR_IO;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RISO_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw CapiError{RISO_ERR_INVALID_ARGUMENT, what};
}

json metrics_to_json(const riso::EvalMetrics& m) {
    return json{{"mean_sum_rate_mbps", m.mean_sum_rate_mbps},
                {"per_user_mbps", m.per_user_mbps},
                {"rate_5pct_mbps", m.rate_5pct_mbps},
                {"qos_satisfaction", m.qos_satisfaction},
                {"inference_latency_ms", m.inference_latency_ms}};
}

} // namespace

struct riso_config {
    riso::ScenarioConfig cfg;
};

extern "C" {

const char* riso_status_name(riso_status s) {
    switch (s) {
        case RISO_OK: return "ok";
        case RISO_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case RISO_ERR_VALIDATION: return "validation_error";
        case RISO_ERR_IO: return "io_error";
        case RISO_ERR_MODEL: return "model_error";
        case RISO_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char* riso_last_error(void) { return g_last_error.c_str(); }

void riso_free_string(char* s) { delete[] s; }

riso_status riso_config_load_file(const char* path, riso_config** out) {
    return guarded([&] {
        require(path && out, "riso_config_load_file: null argument");
        auto* h = new riso_config{riso::load_config_file(path)};
        *out = h;
    });
}

riso_status riso_config_load_text(const char* text, riso_config** out) {
    return guarded([&] {
        require(text && out, "riso_config_load_text: null argument");
        auto* h = new riso_config{riso::load_config(text)};
        *out = h;
    });
}

riso_status riso_config_set(riso_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        require(cfg && key && value, "riso_config_set: null argument");
        std::string text = cfg->cfg.serialize();
        text += std::string(key) + " = " + value + "\n";
        cfg->cfg = riso::load_config(text);
    });
}

riso_status riso_config_serialize(const riso_config* cfg, char** out_text) {
    return guarded([&] {
        require(cfg && out_text, "riso_config_serialize: null argument");
        *out_text = dup_string(cfg->cfg.serialize());
    });
}

void riso_config_free(riso_config* cfg) { delete cfg; }

riso_status riso_generate_data(const riso_config* cfg, const char* dir,
                               int train_count, int val_count, uint64_t seed,
                               int force) {
    return guarded([&] {
        require(cfg && dir, "riso_generate_data: null argument");
        require(train_count >= 1 && val_count >= 1,
                "riso_generate_data: counts must be >= 1");
        riso::generate_dataset_files(cfg->cfg, dir, train_count, val_count, seed,
                                     force != 0);
    });
}

riso_status riso_train(const riso_config* cfg, const char* data_dir,
                       const char* out_dir, int joint_from_scratch) {
    return guarded([&] {
        require(cfg && data_dir && out_dir, "riso_train: null argument");
        riso::Dataset train =
            riso::load_dataset(std::string(data_dir) + "/train.bin");
        riso::Dataset val = riso::load_dataset(std::string(data_dir) + "/val.bin");
        if (train.config_hash != cfg->cfg.hash())
            throw CapiError{RISO_ERR_VALIDATION,
                            "riso_train: dataset was generated under a "
                            "different configuration"};
        std::filesystem::create_directories(out_dir);
        riso::RandomStream rng(cfg->cfg.seed);
        riso::ModelParameters params =
            riso::ModelParameters::create(cfg->cfg, rng);
        riso::RandomStream train_rng = rng.substream(0x7121);
        riso::TrainHistory history =
            joint_from_scratch
                ? riso::joint_train(train, val, params, cfg->cfg, train_rng)
                : riso::phased_train(train, val, params, cfg->cfg, train_rng);
        riso::save_checkpoint(std::string(out_dir) + "/model.ckpt", params,
                              cfg->cfg);
        history.save(std::string(out_dir) + "/history.tsv");
    });
}

riso_status riso_evaluate(const riso_config* cfg, const char* checkpoint,
                          const char* dataset_path, char** out_report) {
    return guarded([&] {
        require(cfg && checkpoint && dataset_path && out_report,
                "riso_evaluate: null argument");
        riso::ModelParameters params;
        try {
            params = riso::load_checkpoint(checkpoint, cfg->cfg);
        } catch (const std::exception& e) {
            throw CapiError{RISO_ERR_MODEL, e.what()};
        }
        riso::Dataset ds = riso::load_dataset(dataset_path);
        riso::EvalMetrics m = riso::evaluate(params, ds, cfg->cfg);
        json rep = metrics_to_json(m);
        rep["scheme"] = "trained";
        rep["records"] = ds.records.size();
        *out_report = dup_string(rep.dump(2));
    });
}

riso_status riso_baseline(const riso_config* cfg, const char* scheme,
                          const char* checkpoint, const char* dataset_path,
                          uint64_t seed, char** out_report) {
    return guarded([&] {
        require(cfg && scheme && dataset_path && out_report,
                "riso_baseline: null argument");
        riso::ModelParameters params;
        bool have_params = false;
        if (checkpoint && checkpoint[0]) {
            try {
                params = riso::load_checkpoint(checkpoint, cfg->cfg);
            } catch (const std::exception& e) {
                throw CapiError{RISO_ERR_MODEL, e.what()};
            }
            have_params = true;
        }
        riso::Dataset ds = riso::load_dataset(dataset_path);
        riso::EvalMetrics m = riso::evaluate_scheme(
            scheme, have_params ? &params : nullptr, ds, cfg->cfg, seed);
        json rep = metrics_to_json(m);
        rep["scheme"] = scheme;
        rep["records"] = ds.records.size();
        *out_report = dup_string(rep.dump(2));
    });
}

riso_status riso_oracle(const riso_config* cfg, const char* dataset_path,
                        const char* cache_dir, int max_records,
                        char** out_report) {
    return guarded([&] {
        require(cfg && dataset_path && out_report, "riso_oracle: null argument");
        riso::Dataset ds = riso::load_dataset(dataset_path);
        if (max_records > 0 && size_t(max_records) < ds.records.size())
            ds.records.resize(size_t(max_records));
        riso::EvalMetrics m =
            riso::evaluate_scheme("oracle", nullptr, ds, cfg->cfg, 0,
                                  cache_dir ? cache_dir : "");
        json rep = metrics_to_json(m);
        rep["scheme"] = "oracle";
        rep["records"] = ds.records.size();
        rep["sum_rates_mbps"] = m.sum_rates_mbps;
        *out_report = dup_string(rep.dump(2));
    });
}

riso_status riso_sweep(const riso_config* cfg, const char* axis,
                       const double* values, int n_values,
                       const char* const* schemes, int n_schemes,
                       const char* checkpoint_dir, int eval_count,
                       uint64_t eval_seed, const char* out_dir) {
    return guarded([&] {
        require(cfg && axis && values && schemes && out_dir,
                "riso_sweep: null argument");
        require(n_values >= 1 && n_schemes >= 1 && eval_count >= 1,
                "riso_sweep: counts must be >= 1");
        std::vector<double> vs(values, values + n_values);
        std::vector<std::string> sc;
        for (int i = 0; i < n_schemes; ++i) sc.emplace_back(schemes[i]);
        riso::ExperimentResult res = riso::run_experiment(
            cfg->cfg, axis, vs, sc, checkpoint_dir ? checkpoint_dir : "",
            eval_count, eval_seed);
        riso::write_metrics(res, out_dir);
    });
}

riso_status riso_plot_metrics(const char* metrics_csv, const char* out_svg) {
    return guarded([&] {
        require(metrics_csv && out_svg, "riso_plot_metrics: null argument");
        riso::emit_metrics_plot(metrics_csv, out_svg);
    });
}

riso_status riso_plot_history(const char* history_tsv, const char* out_svg) {
    return guarded([&] {
        require(history_tsv && out_svg, "riso_plot_history: null argument");
        riso::emit_history_plot(history_tsv, out_svg);
    });
}

} // extern "C"
