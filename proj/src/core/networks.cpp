#include "networks.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace riso {

namespace {
double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}
} // namespace

Tensor4 features_beam(const FrequencyChannel& fc) {
    // [2K][(M+1)][N][N_t] with (N, N_t) folded into conv width
    Tensor4 x(1, 2 * fc.K, fc.M + 1, fc.N * fc.N_t);
    for (int k = 0; k < fc.K; ++k)
        for (int n = 0; n < fc.N; ++n)
            for (int t = 0; t < fc.N_t; ++t) {
                int w = n * fc.N_t + t;
                cd d = fc.hd(n, k, t);
                x.at(0, 2 * k, 0, w) = d.real();
                x.at(0, 2 * k + 1, 0, w) = d.imag();
                for (int m = 0; m < fc.M; ++m) {
                    cd r = fc.hr(n, k, m, t);
                    x.at(0, 2 * k, m + 1, w) = r.real();
                    x.at(0, 2 * k + 1, m + 1, w) = r.imag();
                }
            }
    return x;
}

FrequencyChannel unpack_features_beam(const Tensor4& x, int K, int M, int N,
                                      int N_t) {
    FrequencyChannel fc;
    fc.N = N;
    fc.K = K;
    fc.M = M;
    fc.N_t = N_t;
    fc.hd_f.resize(size_t(N) * K * N_t);
    fc.hr_f.resize(size_t(N) * K * M * N_t);
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n)
            for (int t = 0; t < N_t; ++t) {
                int w = n * N_t + t;
                fc.hd(n, k, t) = {x.at(0, 2 * k, 0, w), x.at(0, 2 * k + 1, 0, w)};
                for (int m = 0; m < M; ++m)
                    fc.hr(n, k, m, t) = {x.at(0, 2 * k, m + 1, w),
                                         x.at(0, 2 * k + 1, m + 1, w)};
            }
    return fc;
}

Tensor4 features_alloc(const EffectiveChannel& eff) {
    // [2Q][N][K][N_t] with (K, N_t) folded into conv width
    Tensor4 x(1, 2 * eff.Q, eff.N, eff.K * eff.N_t);
    for (int q = 0; q < eff.Q; ++q)
        for (int n = 0; n < eff.N; ++n)
            for (int k = 0; k < eff.K; ++k)
                for (int t = 0; t < eff.N_t; ++t) {
                    int w = k * eff.N_t + t;
                    cd v = eff.at(q, n, k, t);
                    x.at(0, 2 * q, n, w) = v.real();
                    x.at(0, 2 * q + 1, n, w) = v.imag();
                }
    return x;
}

ArchDescriptor beam_arch(const ScenarioConfig& cfg) {
    ArchDescriptor a;
    a.in_c = 2 * cfg.K;
    a.in_h = cfg.M + 1;
    a.in_w = cfg.N * cfg.N_t;
    a.conv1 = cfg.arch_conv1;
    a.conv2 = cfg.arch_conv2;
    a.conv3 = cfg.arch_conv3;
    a.fc_hidden = cfg.arch_fc;
    a.se_reduction = cfg.arch_se_reduction;
    a.out_dim = cfg.M * cfg.Q;
    return a;
}

ArchDescriptor alloc_arch(const ScenarioConfig& cfg) {
    ArchDescriptor a;
    a.in_c = 2 * cfg.Q;
    a.in_h = cfg.N;
    a.in_w = cfg.K * cfg.N_t;
    a.conv1 = cfg.arch_conv1;
    a.conv2 = cfg.arch_conv2;
    a.conv3 = cfg.arch_conv3;
    a.fc_hidden = cfg.arch_fc;
    a.se_reduction = cfg.arch_se_reduction;
    a.out_dim = cfg.N * cfg.K * cfg.Q;
    return a;
}

// ---------- BeamNet ----------

BeamNet::BeamNet(const ScenarioConfig& cfg)
    : M(cfg.M), Q(cfg.Q), beta_q_(cfg.beta_q),
      in_scale_(1.0 / std::sqrt(cfg.sigma2_mw)),
      net_("beamnet", beam_arch(cfg)) {}

void BeamNet::init(RandomStream& rng) { net_.init(rng); }

std::vector<double> BeamNet::forward(const Tensor4& x, PhaseMode mode,
                                     bool training) {
    mode_ = mode;
    batch_ = x.B;
    // raw channel coefficients are ~1e-6 in linear units; feed the backbone
    // in noise-amplitude units so the first batch-norm sees O(1) variance
    Tensor4 xs = x;
    for (double& v : xs.v) v *= in_scale_;
    raw_ = net_.forward(xs, training);
    phi_.resize(raw_.size());
    std::vector<double> out(raw_.size());
    for (size_t i = 0; i < raw_.size(); ++i) {
        double phi = 2.0 * M_PI * sigmoid(raw_[i]);  // head range [0, 2*pi]
        phi_[i] = phi;
        switch (mode) {
            case PhaseMode::Soft:
                out[i] = soft_quantize_scalar(phi, beta_q_);
                break;
            case PhaseMode::Hard:
                out[i] = phi < M_PI ? 0.0 : M_PI;
                break;
            case PhaseMode::Continuous:
                out[i] = phi;
                break;
        }
    }
    return out;
}

void BeamNet::backward(const std::vector<double>& dtheta) {
    if (mode_ == PhaseMode::Hard)
        throw std::logic_error("BeamNet: hard mode has no gradient path");
    std::vector<double> draw(dtheta.size());
    for (size_t i = 0; i < dtheta.size(); ++i) {
        double dphi = dtheta[i];
        if (mode_ == PhaseMode::Soft) dphi *= soft_quantize_grad(phi_[i], beta_q_);
        double s = phi_[i] / (2.0 * M_PI);  // sigmoid(raw)
        draw[i] = dphi * 2.0 * M_PI * s * (1.0 - s);
    }
    net_.backward(draw);
}

// ---------- AllocationNet ----------

AllocationNet::AllocationNet(const ScenarioConfig& cfg)
    : N(cfg.N), K(cfg.K), Q(cfg.Q),
      in_scale_(1.0 / std::sqrt(cfg.sigma2_mw)),
      net_("allocationnet", alloc_arch(cfg)) {}

void AllocationNet::init(RandomStream& rng) { net_.init(rng); }

std::vector<double> AllocationNet::forward(const Tensor4& x, AllocMode mode,
                                           double tau, RandomStream& rng,
                                           bool training) {
    batch_ = x.B;
    tau_ = tau;
    Tensor4 xs = x;
    for (double& v : xs.v) v *= in_scale_;
    std::vector<double> logits = net_.forward(xs, training);
    size_t per = size_t(N) * K * Q;
    std::vector<double> out(logits.size());
    alpha_.resize(logits.size());
    for (int b = 0; b < batch_; ++b) {
        std::vector<double> slice(logits.begin() + b * per,
                                  logits.begin() + (b + 1) * per);
        std::vector<double> a;
        if (mode == AllocMode::Soft) {
            std::vector<double> noise = sample_gumbel(per, rng);
            a = gumbel_softmax(slice, N, K, Q, tau, noise);
        } else {
            a = hard_allocation(slice, N, K, Q);
        }
        std::copy(a.begin(), a.end(), out.begin() + b * per);
        std::copy(a.begin(), a.end(), alpha_.begin() + b * per);
    }
    return out;
}

void AllocationNet::backward(const std::vector<double>& dalpha) {
    size_t per = size_t(N) * K * Q;
    std::vector<double> dlogits(dalpha.size());
    for (int b = 0; b < batch_; ++b) {
        std::vector<double> a(alpha_.begin() + b * per,
                              alpha_.begin() + (b + 1) * per);
        std::vector<double> da(dalpha.begin() + b * per,
                               dalpha.begin() + (b + 1) * per);
        std::vector<double> dl = gumbel_softmax_backward(a, da, N, K, Q, tau_);
        std::copy(dl.begin(), dl.end(), dlogits.begin() + b * per);
    }
    net_.backward(dlogits);
}

// ---------- ModelParameters / checkpoints ----------

ModelParameters ModelParameters::create(const ScenarioConfig& cfg,
                                        RandomStream& rng) {
    ModelParameters mp;
    mp.beamnet = std::make_unique<BeamNet>(cfg);
    mp.allocationnet = std::make_unique<AllocationNet>(cfg);
    RandomStream r1 = rng.substream(0xbea3);
    RandomStream r2 = rng.substream(0xa110c);
    mp.beamnet->init(r1);
    mp.allocationnet->init(r2);
    mp.config_hash = cfg.hash();
    return mp;
}

namespace {

constexpr char kMagic[8] = {'R', 'I', 'S', 'C', 'K', 'P', 'T', '1'};

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

void write_param(std::ostream& out, const Param& p) {
    write_u64(out, p.name.size());
    out.write(p.name.data(), std::streamsize(p.name.size()));
    write_u64(out, p.w.size());
    out.write(reinterpret_cast<const char*>(p.w.data()),
              std::streamsize(p.w.size() * sizeof(double)));
}

void read_param_into(std::istream& in, std::vector<Param*>& slots) {
    std::uint64_t nlen = read_u64(in);
    std::string name(nlen, '\0');
    in.read(name.data(), std::streamsize(nlen));
    std::uint64_t count = read_u64(in);
    for (Param* p : slots)
        if (p->name == name) {
            if (p->w.size() != count)
                throw std::runtime_error("checkpoint: size mismatch for " + name);
            in.read(reinterpret_cast<char*>(p->w.data()),
                    std::streamsize(count * sizeof(double)));
            return;
        }
    throw std::runtime_error("checkpoint: unknown parameter " + name);
}

} // namespace

void save_checkpoint(const std::string& path, const ModelParameters& params,
                     const ScenarioConfig& cfg) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
        out.write(kMagic, 8);
        write_u64(out, cfg.hash());
        write_u64(out, std::uint64_t(params.training_stage));
        auto all_b = params.beamnet->backbone().state_params();
        auto all_a = params.allocationnet->backbone().state_params();
        write_u64(out, all_b.size() + all_a.size());
        for (const Param* p : all_b) write_param(out, *p);
        for (const Param* p : all_a) write_param(out, *p);
    }
    std::remove(path.c_str());
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot finalize checkpoint: " + path);
}

ModelParameters load_checkpoint(const std::string& path,
                                const ScenarioConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    ModelParameters mp;
    mp.beamnet = std::make_unique<BeamNet>(cfg);
    mp.allocationnet = std::make_unique<AllocationNet>(cfg);
    mp.config_hash = read_u64(in);
    mp.training_stage = int(read_u64(in));
    std::uint64_t count = read_u64(in);
    std::vector<Param*> slots = mp.beamnet->backbone().state_params();
    for (Param* p : mp.allocationnet->backbone().state_params())
        slots.push_back(p);
    for (std::uint64_t i = 0; i < count; ++i) read_param_into(in, slots);
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    return mp;
}

} // namespace riso
