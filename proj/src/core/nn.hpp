#ifndef RISO_NN_HPP
#define RISO_NN_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rng.hpp"

namespace riso {

// Minimal dense-layer toolkit with hand-written backward passes. Everything
// runs in double precision so gradient checks against central differences
// are meaningful.

struct Tensor4 {
    int B = 0, C = 0, H = 0, W = 0;
    std::vector<double> v;

    Tensor4() = default;
    Tensor4(int b, int c, int h, int w)
        : B(b), C(c), H(h), W(w), v(size_t(b) * c * h * w, 0.0) {}
    double& at(int b, int c, int h, int w) {
        return v[((size_t(b) * C + c) * H + h) * W + w];
    }
    double at(int b, int c, int h, int w) const {
        return v[((size_t(b) * C + c) * H + h) * W + w];
    }
    size_t size() const { return v.size(); }
};

// named parameter array with its gradient accumulator
struct Param {
    std::string name;
    std::vector<double> w;
    std::vector<double> g;

    void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }
};

class Conv2d {
public:
    Conv2d(const std::string& name, int in_c, int out_c, int ksize = 3);
    void init(RandomStream& rng, double gain = 2.0);
    Tensor4 forward(const Tensor4& x);
    Tensor4 backward(const Tensor4& dy);
    std::vector<Param*> params() { return {&weight_, &bias_}; }
    int out_channels() const { return out_c_; }

private:
    int in_c_, out_c_, k_, pad_;
    Param weight_, bias_;  // weight [out][in][k][k]
    Tensor4 x_;            // cached input
};

class BatchNorm2d {
public:
    explicit BatchNorm2d(const std::string& name, int channels);
    void zero_init_gamma();  // residual-branch trick: block starts as identity
    Tensor4 forward(const Tensor4& x, bool training);
    Tensor4 backward(const Tensor4& dy);
    std::vector<Param*> params() { return {&gamma_, &beta_}; }
    // running statistics travel with checkpoints
    Param* running_mean() { return &run_mean_; }
    Param* running_var() { return &run_var_; }

private:
    int c_;
    double eps_ = 1e-5, momentum_ = 0.1;
    Param gamma_, beta_;
    Param run_mean_, run_var_;  // not trainable, serialized alongside
    Tensor4 xhat_;
    std::vector<double> batch_mean_, batch_inv_std_;
    bool training_ = true;
};

class ReLU {
public:
    Tensor4 forward(const Tensor4& x);
    Tensor4 backward(const Tensor4& dy);
    std::vector<double> forward_vec(const std::vector<double>& x);
    std::vector<double> backward_vec(const std::vector<double>& dy);

private:
    Tensor4 y_;
    std::vector<double> yv_;
};

// 2x2 average pooling, ceil mode so 1-pixel extents survive
class AvgPool2d {
public:
    Tensor4 forward(const Tensor4& x);
    Tensor4 backward(const Tensor4& dy);

private:
    int in_h_ = 0, in_w_ = 0;
};

class Linear {
public:
    Linear(const std::string& name, int in_dim, int out_dim);
    void init(RandomStream& rng, double gain = 2.0);
    // x: [B][in], returns [B][out]
    std::vector<double> forward(const std::vector<double>& x, int batch);
    std::vector<double> backward(const std::vector<double>& dy);
    std::vector<Param*> params() { return {&weight_, &bias_}; }
    int out_dim() const { return out_; }

private:
    int in_, out_, batch_ = 0;
    Param weight_, bias_;  // weight [out][in]
    std::vector<double> x_;
};

// residual conv block with squeeze-and-excitation channel re-weighting
class SEResBlock {
public:
    SEResBlock(const std::string& name, int channels, int reduction);
    void init(RandomStream& rng);
    Tensor4 forward(const Tensor4& x, bool training);
    Tensor4 backward(const Tensor4& dy);
    std::vector<Param*> params();
    std::vector<Param*> bn_state();  // running statistics, for checkpoints

private:
    int c_, red_;
    Conv2d conv_a_, conv_b_;
    BatchNorm2d bn_a_, bn_b_;
    ReLU relu_a_;
    Linear fc1_, fc2_;
    // caches
    Tensor4 x_, y2_;
    std::vector<double> pooled_, mid_, gate_;
};

// Conv -> BN -> ReLU -> AvgPool -> SE-Res -> Conv -> ReLU -> Conv -> ReLU
// -> flatten -> FC -> ReLU -> FC(out)
struct ArchDescriptor {
    int in_c = 0, in_h = 0, in_w = 0;
    int conv1 = 32, conv2 = 64, conv3 = 64;
    int fc_hidden = 512;
    int se_reduction = 16;
    int out_dim = 0;

    bool operator==(const ArchDescriptor&) const = default;
};

class Backbone {
public:
    Backbone(const std::string& name, const ArchDescriptor& arch);
    void init(RandomStream& rng);
    // x: [B][in_c][in_h][in_w] -> raw head values [B][out_dim]
    std::vector<double> forward(const Tensor4& x, bool training);
    // dy: [B][out_dim]; accumulates parameter gradients, returns nothing
    // (input gradients are not needed upstream)
    void backward(const std::vector<double>& dy);
    std::vector<Param*> params();       // trainable
    std::vector<Param*> state_params(); // trainable + BN running stats
    const ArchDescriptor& arch() const { return arch_; }
    void zero_grad();

private:
    ArchDescriptor arch_;
    Conv2d conv1_, conv2_, conv3_;
    BatchNorm2d bn1_;
    ReLU relu1_, relu2_, relu3_, relu_fc_;
    AvgPool2d pool_;
    SEResBlock se_;
    Linear fc1_, fc2_;
    int flat_dim_ = 0, batch_ = 0;
    Tensor4 pre_flat_;
};

class Adam {
public:
    Adam(std::vector<Param*> params, double lr, double beta1 = 0.9,
         double beta2 = 0.999, double eps = 1e-8);
    void step();
    void set_lr(double lr) { lr_ = lr; }

private:
    std::vector<Param*> params_;
    double lr_, b1_, b2_, eps_;
    std::vector<std::vector<double>> m_, v_;
    std::int64_t t_ = 0;
};

} // namespace riso

#endif
