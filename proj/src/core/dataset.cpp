#include "dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace riso {

namespace {

constexpr char kMagic[8] = {'R', 'I', 'S', 'D', 'A', 'T', 'A', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
    out.write(reinterpret_cast<char*>(b), 8);
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

void write_doubles(std::ostream& out, const double* p, size_t n) {
    out.write(reinterpret_cast<const char*>(p), std::streamsize(n * sizeof(double)));
}

void read_doubles(std::istream& in, double* p, size_t n) {
    in.read(reinterpret_cast<char*>(p), std::streamsize(n * sizeof(double)));
}

} // namespace

Dataset generate_records(const ScenarioConfig& cfg, const std::string& split,
                         int count, std::uint64_t seed) {
    if (count <= 0)
        throw std::invalid_argument("dataset: record count must be positive");
    Dataset ds;
    ds.split = split;
    ds.config_hash = cfg.hash();
    ds.seed = seed;
    ds.records.reserve(count);
    RandomStream root(seed);
    // per-realization substreams keep records independent of generation order
    std::uint64_t split_tag = 1469598103934665603ull;
    for (unsigned char c : split) {
        split_tag ^= c;
        split_tag *= 1099511628211ull;
    }
    for (int i = 0; i < count; ++i) {
        RandomStream rs = root.substream(split_tag ^ (0x1000000ull + i));
        Geometry geo = sample_geometry(cfg, rs);
        ChannelRealization ch = sample_taps(cfg, geo, rs);
        ds.records.push_back(to_frequency(ch, cfg));
    }
    return ds;
}

void save_dataset(const std::string& path, const Dataset& ds, bool force) {
    if (!force && std::filesystem::exists(path))
        throw std::runtime_error("refusing to overwrite existing file " + path +
                                 " (use --force)");
    if (ds.records.empty())
        throw std::runtime_error("dataset: refusing to write empty split");
    const FrequencyChannel& first = ds.records.front();
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write dataset: " + path);
        out.write(kMagic, 8);
        write_u64(out, ds.config_hash);
        write_u64(out, ds.seed);
        write_u64(out, first.N);
        write_u64(out, first.K);
        write_u64(out, first.M);
        write_u64(out, first.N_t);
        write_u64(out, ds.records.size());
        for (const FrequencyChannel& fc : ds.records) {
            int K = fc.K;
            write_doubles(out, fc.geometry.user_x.data(), K);
            write_doubles(out, fc.geometry.user_y.data(), K);
            write_doubles(out, fc.geometry.d_direct.data(), K);
            write_doubles(out, &fc.geometry.d_br, 1);
            write_doubles(out, fc.geometry.d_ru.data(), K);
            write_doubles(out, reinterpret_cast<const double*>(fc.hd_f.data()),
                          fc.hd_f.size() * 2);
            write_doubles(out, reinterpret_cast<const double*>(fc.hr_f.data()),
                          fc.hr_f.size() * 2);
        }
    }
    std::remove(path.c_str());
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot finalize dataset file: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::string(magic, 8) != std::string(kMagic, 8))
        throw std::runtime_error("not a dataset file: " + path);
    Dataset ds;
    ds.config_hash = read_u64(in);
    ds.seed = read_u64(in);
    int N = int(read_u64(in));
    int K = int(read_u64(in));
    int M = int(read_u64(in));
    int N_t = int(read_u64(in));
    std::uint64_t count = read_u64(in);
    ds.records.resize(count);
    for (FrequencyChannel& fc : ds.records) {
        fc.N = N;
        fc.K = K;
        fc.M = M;
        fc.N_t = N_t;
        fc.geometry.user_x.resize(K);
        fc.geometry.user_y.resize(K);
        fc.geometry.d_direct.resize(K);
        fc.geometry.d_ru.resize(K);
        read_doubles(in, fc.geometry.user_x.data(), K);
        read_doubles(in, fc.geometry.user_y.data(), K);
        read_doubles(in, fc.geometry.d_direct.data(), K);
        read_doubles(in, &fc.geometry.d_br, 1);
        read_doubles(in, fc.geometry.d_ru.data(), K);
        fc.hd_f.resize(size_t(N) * K * N_t);
        fc.hr_f.resize(size_t(N) * K * M * N_t);
        read_doubles(in, reinterpret_cast<double*>(fc.hd_f.data()),
                     fc.hd_f.size() * 2);
        read_doubles(in, reinterpret_cast<double*>(fc.hr_f.data()),
                     fc.hr_f.size() * 2);
    }
    if (!in) throw std::runtime_error("truncated dataset file: " + path);
    return ds;
}

void generate_dataset_files(const ScenarioConfig& cfg, const std::string& dir,
                            int train_count, int val_count, std::uint64_t seed,
                            bool force) {
    if (train_count <= 0 || val_count <= 0)
        throw std::invalid_argument("dataset: both split sizes must be positive");
    std::filesystem::create_directories(dir);
    Dataset train = generate_records(cfg, "train", train_count, seed);
    Dataset val = generate_records(cfg, "val", val_count, seed);
    save_dataset(dir + "/train.bin", train, force);
    save_dataset(dir + "/val.bin", val, force);
    // resolved config beside the outputs so a run is re-creatable
    std::string cfg_tmp = dir + "/config.resolved.tmp";
    {
        std::ofstream out(cfg_tmp);
        out << cfg.serialize();
    }
    std::string cfg_path = dir + "/config.resolved";
    std::remove(cfg_path.c_str());
    std::rename(cfg_tmp.c_str(), cfg_path.c_str());
}

} // namespace riso
