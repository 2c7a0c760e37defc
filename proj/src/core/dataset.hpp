#ifndef RISO_DATASET_HPP
#define RISO_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "channel.hpp"

namespace riso {

// Single-file binary container: header (magic, version, config hash, shapes,
// seed, record count) followed by per-record geometry + hd_f + hr_f arrays.
// All integers little-endian u64, all floats little-endian doubles.
struct Dataset {
    std::string split;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::vector<FrequencyChannel> records;
};

Dataset generate_records(const ScenarioConfig& cfg, const std::string& split,
                         int count, std::uint64_t seed);

void save_dataset(const std::string& path, const Dataset& ds, bool force);
Dataset load_dataset(const std::string& path);

// both splits in one call; writes <dir>/train.bin and <dir>/val.bin plus the
// resolved config beside them
void generate_dataset_files(const ScenarioConfig& cfg, const std::string& dir,
                            int train_count, int val_count, std::uint64_t seed,
                            bool force);

} // namespace riso

#endif
