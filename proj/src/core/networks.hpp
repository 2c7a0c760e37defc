#ifndef RISO_NETWORKS_HPP
#define RISO_NETWORKS_HPP

#include <memory>
#include <string>

#include "channel.hpp"
#include "nn.hpp"
#include "relaxations.hpp"

namespace riso {

enum class PhaseMode { Soft, Hard, Continuous };
enum class AllocMode { Soft, Hard };

// Channel planes pack real parts at even indices and imaginary parts at odd
// ones. For BeamNet, the (M+1) axis is direct channel first, then the M
// cascaded rows; the last two axes fold into conv width.
Tensor4 features_beam(const FrequencyChannel& fc);
Tensor4 features_alloc(const EffectiveChannel& eff);

// inverse of features_beam, used to verify the packing is lossless
FrequencyChannel unpack_features_beam(const Tensor4& x, int K, int M, int N, int N_t);

ArchDescriptor beam_arch(const ScenarioConfig& cfg);
ArchDescriptor alloc_arch(const ScenarioConfig& cfg);

// BeamNet: CSI -> RIS phases. Raw head values map through 2*pi*sigmoid to
// [0, 2*pi]; Soft mode applies the sigmoid step approximation, Hard snaps to
// {0, pi}, Continuous bypasses quantization.
class BeamNet {
public:
    BeamNet(const ScenarioConfig& cfg);
    void init(RandomStream& rng);

    // batch of inputs -> phases [B][M][Q] (flattened, phase[(m*Q+q)])
    std::vector<double> forward(const Tensor4& x, PhaseMode mode, bool training);
    // dtheta: gradient w.r.t. the emitted phases (Soft or Continuous mode)
    void backward(const std::vector<double>& dtheta);

    Backbone& backbone() { return net_; }
    int M, Q;

private:
    double beta_q_;
    double in_scale_;  // channels enter in noise-amplitude units
    Backbone net_;
    std::vector<double> raw_, phi_;  // caches for backward
    PhaseMode mode_ = PhaseMode::Soft;
    int batch_ = 0;
};

// AllocationNet: effective CSI -> allocation logits; Soft mode applies
// Gumbel-softmax with resampled noise, Hard takes the per-(n,q) argmax.
class AllocationNet {
public:
    AllocationNet(const ScenarioConfig& cfg);
    void init(RandomStream& rng);

    // returns allocation [B][N][K][Q]; in Soft mode noise is drawn from rng
    std::vector<double> forward(const Tensor4& x, AllocMode mode, double tau,
                                RandomStream& rng, bool training);
    // dalpha: gradient w.r.t. the soft allocation
    void backward(const std::vector<double>& dalpha);

    Backbone& backbone() { return net_; }
    int N, K, Q;

private:
    double in_scale_;  // channels enter in noise-amplitude units
    Backbone net_;
    std::vector<double> alpha_;  // cache per batch
    double tau_ = 0.5;
    int batch_ = 0;
};

struct ModelParameters {
    std::unique_ptr<BeamNet> beamnet;
    std::unique_ptr<AllocationNet> allocationnet;
    std::uint64_t config_hash = 0;
    int training_stage = 0;

    static ModelParameters create(const ScenarioConfig& cfg, RandomStream& rng);
};

void save_checkpoint(const std::string& path, const ModelParameters& params,
                     const ScenarioConfig& cfg);
ModelParameters load_checkpoint(const std::string& path, const ScenarioConfig& cfg);

} // namespace riso

#endif
