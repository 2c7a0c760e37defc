#ifndef RISOFDMA_H
#define RISOFDMA_H

/* C interface to the RIS-assisted MISO-OFDMA simulator and learning toolkit.
 * All entry points return a riso_status; on failure riso_last_error() holds a
 * human-readable message for the calling thread. Strings returned through
 * char** out-parameters are heap-allocated and must be released with
 * riso_free_string(). */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum riso_status {
    RISO_OK = 0,
    RISO_ERR_INVALID_ARGUMENT = 1,
    RISO_ERR_VALIDATION = 2,
    RISO_ERR_IO = 3,
    RISO_ERR_MODEL = 4,
    RISO_ERR_INTERNAL = 5
} riso_status;

const char* riso_status_name(riso_status s);

/* Last error message on this thread; empty string if none. */
const char* riso_last_error(void);

void riso_free_string(char* s);

/* ---- configuration -------------------------------------------------- */

typedef struct riso_config riso_config;

/* Parse a flat key=value document (empty path/text yields defaults). */
riso_status riso_config_load_file(const char* path, riso_config** out);
riso_status riso_config_load_text(const char* text, riso_config** out);

/* Override a single key, revalidating derived quantities. */
riso_status riso_config_set(riso_config* cfg, const char* key, const char* value);

/* Canonical serialization of the resolved configuration. */
riso_status riso_config_serialize(const riso_config* cfg, char** out_text);

void riso_config_free(riso_config* cfg);

/* ---- pipeline operations -------------------------------------------- */

/* Write <dir>/train.bin, <dir>/val.bin and the resolved config. */
riso_status riso_generate_data(const riso_config* cfg, const char* dir,
                               int train_count, int val_count, uint64_t seed,
                               int force);

/* Train on <data_dir>/{train,val}.bin; writes model.ckpt and history.tsv to
 * out_dir. joint_from_scratch != 0 replaces the phased schedule with joint
 * updates for the same iteration budget. */
riso_status riso_train(const riso_config* cfg, const char* data_dir,
                       const char* out_dir, int joint_from_scratch);

/* Evaluate a checkpoint on a dataset; out_report receives a JSON object with
 * mean_sum_rate_mbps, per_user_mbps, rate_5pct_mbps, qos_satisfaction and
 * inference_latency_ms. */
riso_status riso_evaluate(const riso_config* cfg, const char* checkpoint,
                          const char* dataset_path, char** out_report);

/* Run one evaluation scheme ("trained", "continuous", "random_ris",
 * "random_allocation", "without_ris", "fixed_allocation") on a dataset.
 * checkpoint may be NULL for schemes that do not need one. */
riso_status riso_baseline(const riso_config* cfg, const char* scheme,
                          const char* checkpoint, const char* dataset_path,
                          uint64_t seed, char** out_report);

/* Exhaustive search over binary phases and one-hot allocations for the first
 * max_records realizations (max_records <= 0 means all). Guarded to 1e7
 * candidates per realization. cache_dir may be NULL to disable caching. */
riso_status riso_oracle(const riso_config* cfg, const char* dataset_path,
                        const char* cache_dir, int max_records,
                        char** out_report);

/* Sweep one config axis ("P_max", "M", "rician", "taps", "geometry",
 * "lambda1") over n_values points, evaluating every scheme at every point on
 * a freshly generated evaluation set. Writes metrics.csv, timings.csv and the
 * resolved config to out_dir. */
riso_status riso_sweep(const riso_config* cfg, const char* axis,
                       const double* values, int n_values,
                       const char* const* schemes, int n_schemes,
                       const char* checkpoint_dir, int eval_count,
                       uint64_t eval_seed, const char* out_dir);

/* ---- plotting -------------------------------------------------------- */

riso_status riso_plot_metrics(const char* metrics_csv, const char* out_svg);
riso_status riso_plot_history(const char* history_tsv, const char* out_svg);

#ifdef __cplusplus
}
#endif

#endif /* RISOFDMA_H */
