#include "nn.hpp"

#include <cmath>
#include <stdexcept>

namespace riso {

namespace {
double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}
} // namespace

// ---------- Conv2d ----------

Conv2d::Conv2d(const std::string& name, int in_c, int out_c, int ksize)
    : in_c_(in_c), out_c_(out_c), k_(ksize), pad_(ksize / 2) {
    weight_.name = name + ".weight";
    weight_.w.assign(size_t(out_c) * in_c * k_ * k_, 0.0);
    weight_.g = weight_.w;
    bias_.name = name + ".bias";
    bias_.w.assign(out_c, 0.0);
    bias_.g = bias_.w;
}

void Conv2d::init(RandomStream& rng, double gain) {
    double fan_in = double(in_c_) * k_ * k_;
    double std = std::sqrt(gain / fan_in);
    for (double& w : weight_.w) w = std * rng.gauss();
}

Tensor4 Conv2d::forward(const Tensor4& x) {
    if (x.C != in_c_) throw std::invalid_argument("Conv2d: channel mismatch");
    x_ = x;
    Tensor4 y(x.B, out_c_, x.H, x.W);
    auto wgt = [&](int oc, int ic, int i, int j) {
        return weight_.w[((size_t(oc) * in_c_ + ic) * k_ + i) * k_ + j];
    };
    for (int b = 0; b < x.B; ++b)
        for (int oc = 0; oc < out_c_; ++oc)
            for (int h = 0; h < x.H; ++h)
                for (int w = 0; w < x.W; ++w) {
                    double acc = bias_.w[oc];
                    for (int ic = 0; ic < in_c_; ++ic)
                        for (int i = 0; i < k_; ++i) {
                            int hh = h + i - pad_;
                            if (hh < 0 || hh >= x.H) continue;
                            for (int j = 0; j < k_; ++j) {
                                int ww = w + j - pad_;
                                if (ww < 0 || ww >= x.W) continue;
                                acc += wgt(oc, ic, i, j) * x.at(b, ic, hh, ww);
                            }
                        }
                    y.at(b, oc, h, w) = acc;
                }
    return y;
}

Tensor4 Conv2d::backward(const Tensor4& dy) {
    Tensor4 dx(x_.B, in_c_, x_.H, x_.W);
    auto widx = [&](int oc, int ic, int i, int j) {
        return ((size_t(oc) * in_c_ + ic) * k_ + i) * k_ + j;
    };
    for (int b = 0; b < x_.B; ++b)
        for (int oc = 0; oc < out_c_; ++oc)
            for (int h = 0; h < x_.H; ++h)
                for (int w = 0; w < x_.W; ++w) {
                    double d = dy.at(b, oc, h, w);
                    if (d == 0.0) continue;
                    bias_.g[oc] += d;
                    for (int ic = 0; ic < in_c_; ++ic)
                        for (int i = 0; i < k_; ++i) {
                            int hh = h + i - pad_;
                            if (hh < 0 || hh >= x_.H) continue;
                            for (int j = 0; j < k_; ++j) {
                                int ww = w + j - pad_;
                                if (ww < 0 || ww >= x_.W) continue;
                                weight_.g[widx(oc, ic, i, j)] +=
                                    d * x_.at(b, ic, hh, ww);
                                dx.at(b, ic, hh, ww) +=
                                    d * weight_.w[widx(oc, ic, i, j)];
                            }
                        }
                }
    return dx;
}

// ---------- BatchNorm2d ----------

BatchNorm2d::BatchNorm2d(const std::string& name, int channels) : c_(channels) {
    gamma_.name = name + ".gamma";
    gamma_.w.assign(channels, 1.0);
    gamma_.g.assign(channels, 0.0);
    beta_.name = name + ".beta";
    beta_.w.assign(channels, 0.0);
    beta_.g.assign(channels, 0.0);
    run_mean_.name = name + ".running_mean";
    run_mean_.w.assign(channels, 0.0);
    run_var_.name = name + ".running_var";
    run_var_.w.assign(channels, 1.0);
}

void BatchNorm2d::zero_init_gamma() {
    std::fill(gamma_.w.begin(), gamma_.w.end(), 0.0);
}

Tensor4 BatchNorm2d::forward(const Tensor4& x, bool training) {
    training_ = training;
    Tensor4 y(x.B, x.C, x.H, x.W);
    const double cnt = double(x.B) * x.H * x.W;
    if (training) {
        xhat_ = Tensor4(x.B, x.C, x.H, x.W);
        batch_mean_.assign(c_, 0.0);
        batch_inv_std_.assign(c_, 0.0);
        for (int c = 0; c < c_; ++c) {
            double mean = 0.0;
            for (int b = 0; b < x.B; ++b)
                for (int h = 0; h < x.H; ++h)
                    for (int w = 0; w < x.W; ++w) mean += x.at(b, c, h, w);
            mean /= cnt;
            double var = 0.0;
            for (int b = 0; b < x.B; ++b)
                for (int h = 0; h < x.H; ++h)
                    for (int w = 0; w < x.W; ++w) {
                        double d = x.at(b, c, h, w) - mean;
                        var += d * d;
                    }
            var /= cnt;
            double inv = 1.0 / std::sqrt(var + eps_);
            batch_mean_[c] = mean;
            batch_inv_std_[c] = inv;
            run_mean_.w[c] = (1 - momentum_) * run_mean_.w[c] + momentum_ * mean;
            run_var_.w[c] = (1 - momentum_) * run_var_.w[c] + momentum_ * var;
            for (int b = 0; b < x.B; ++b)
                for (int h = 0; h < x.H; ++h)
                    for (int w = 0; w < x.W; ++w) {
                        double xh = (x.at(b, c, h, w) - mean) * inv;
                        xhat_.at(b, c, h, w) = xh;
                        y.at(b, c, h, w) = gamma_.w[c] * xh + beta_.w[c];
                    }
        }
    } else {
        for (int c = 0; c < c_; ++c) {
            double inv = 1.0 / std::sqrt(run_var_.w[c] + eps_);
            for (int b = 0; b < x.B; ++b)
                for (int h = 0; h < x.H; ++h)
                    for (int w = 0; w < x.W; ++w)
                        y.at(b, c, h, w) =
                            gamma_.w[c] * (x.at(b, c, h, w) - run_mean_.w[c]) * inv +
                            beta_.w[c];
        }
    }
    return y;
}

Tensor4 BatchNorm2d::backward(const Tensor4& dy) {
    if (!training_)
        throw std::logic_error("BatchNorm2d: backward requires training mode");
    const Tensor4& xh = xhat_;
    Tensor4 dx(dy.B, dy.C, dy.H, dy.W);
    const double cnt = double(dy.B) * dy.H * dy.W;
    for (int c = 0; c < c_; ++c) {
        double sum_dy = 0.0, sum_dy_xh = 0.0;
        for (int b = 0; b < dy.B; ++b)
            for (int h = 0; h < dy.H; ++h)
                for (int w = 0; w < dy.W; ++w) {
                    double d = dy.at(b, c, h, w);
                    sum_dy += d;
                    sum_dy_xh += d * xh.at(b, c, h, w);
                }
        gamma_.g[c] += sum_dy_xh;
        beta_.g[c] += sum_dy;
        double g = gamma_.w[c] * batch_inv_std_[c];
        for (int b = 0; b < dy.B; ++b)
            for (int h = 0; h < dy.H; ++h)
                for (int w = 0; w < dy.W; ++w) {
                    double d = dy.at(b, c, h, w);
                    dx.at(b, c, h, w) =
                        g * (d - sum_dy / cnt -
                             xh.at(b, c, h, w) * sum_dy_xh / cnt);
                }
    }
    return dx;
}

// ---------- ReLU ----------

Tensor4 ReLU::forward(const Tensor4& x) {
    y_ = x;
    for (double& v : y_.v) v = v > 0 ? v : 0.0;
    return y_;
}

Tensor4 ReLU::backward(const Tensor4& dy) {
    Tensor4 dx = dy;
    for (size_t i = 0; i < dx.v.size(); ++i)
        if (y_.v[i] <= 0.0) dx.v[i] = 0.0;
    return dx;
}

std::vector<double> ReLU::forward_vec(const std::vector<double>& x) {
    yv_ = x;
    for (double& v : yv_) v = v > 0 ? v : 0.0;
    return yv_;
}

std::vector<double> ReLU::backward_vec(const std::vector<double>& dy) {
    std::vector<double> dx = dy;
    for (size_t i = 0; i < dx.size(); ++i)
        if (yv_[i] <= 0.0) dx[i] = 0.0;
    return dx;
}

// ---------- AvgPool2d ----------

Tensor4 AvgPool2d::forward(const Tensor4& x) {
    in_h_ = x.H;
    in_w_ = x.W;
    int oh = (x.H + 1) / 2, ow = (x.W + 1) / 2;
    Tensor4 y(x.B, x.C, oh, ow);
    for (int b = 0; b < x.B; ++b)
        for (int c = 0; c < x.C; ++c)
            for (int h = 0; h < oh; ++h)
                for (int w = 0; w < ow; ++w) {
                    double acc = 0.0;
                    int cnt = 0;
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) {
                            int hh = 2 * h + i, ww = 2 * w + j;
                            if (hh >= x.H || ww >= x.W) continue;
                            acc += x.at(b, c, hh, ww);
                            ++cnt;
                        }
                    y.at(b, c, h, w) = acc / cnt;
                }
    return y;
}

Tensor4 AvgPool2d::backward(const Tensor4& dy) {
    Tensor4 dx(dy.B, dy.C, in_h_, in_w_);
    for (int b = 0; b < dy.B; ++b)
        for (int c = 0; c < dy.C; ++c)
            for (int h = 0; h < dy.H; ++h)
                for (int w = 0; w < dy.W; ++w) {
                    int cnt = 0;
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) {
                            int hh = 2 * h + i, ww = 2 * w + j;
                            if (hh >= in_h_ || ww >= in_w_) continue;
                            ++cnt;
                        }
                    double d = dy.at(b, c, h, w) / cnt;
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) {
                            int hh = 2 * h + i, ww = 2 * w + j;
                            if (hh >= in_h_ || ww >= in_w_) continue;
                            dx.at(b, c, hh, ww) += d;
                        }
                }
    return dx;
}

// ---------- Linear ----------

Linear::Linear(const std::string& name, int in_dim, int out_dim)
    : in_(in_dim), out_(out_dim) {
    weight_.name = name + ".weight";
    weight_.w.assign(size_t(out_dim) * in_dim, 0.0);
    weight_.g = weight_.w;
    bias_.name = name + ".bias";
    bias_.w.assign(out_dim, 0.0);
    bias_.g = bias_.w;
}

void Linear::init(RandomStream& rng, double gain) {
    double std = std::sqrt(gain / in_);
    for (double& w : weight_.w) w = std * rng.gauss();
}

std::vector<double> Linear::forward(const std::vector<double>& x, int batch) {
    if (x.size() != size_t(batch) * in_)
        throw std::invalid_argument("Linear: input size mismatch");
    batch_ = batch;
    x_ = x;
    std::vector<double> y(size_t(batch) * out_);
    for (int b = 0; b < batch; ++b)
        for (int o = 0; o < out_; ++o) {
            double acc = bias_.w[o];
            const double* wr = &weight_.w[size_t(o) * in_];
            const double* xr = &x[size_t(b) * in_];
            for (int i = 0; i < in_; ++i) acc += wr[i] * xr[i];
            y[size_t(b) * out_ + o] = acc;
        }
    return y;
}

std::vector<double> Linear::backward(const std::vector<double>& dy) {
    std::vector<double> dx(size_t(batch_) * in_, 0.0);
    for (int b = 0; b < batch_; ++b)
        for (int o = 0; o < out_; ++o) {
            double d = dy[size_t(b) * out_ + o];
            if (d == 0.0) continue;
            bias_.g[o] += d;
            double* wg = &weight_.g[size_t(o) * in_];
            const double* wr = &weight_.w[size_t(o) * in_];
            const double* xr = &x_[size_t(b) * in_];
            double* dxr = &dx[size_t(b) * in_];
            for (int i = 0; i < in_; ++i) {
                wg[i] += d * xr[i];
                dxr[i] += d * wr[i];
            }
        }
    return dx;
}

// ---------- SEResBlock ----------

SEResBlock::SEResBlock(const std::string& name, int channels, int reduction)
    : c_(channels),
      red_(std::max(1, channels / reduction)),
      conv_a_(name + ".conv_a", channels, channels),
      conv_b_(name + ".conv_b", channels, channels),
      bn_a_(name + ".bn_a", channels),
      bn_b_(name + ".bn_b", channels),
      fc1_(name + ".se_fc1", channels, std::max(1, channels / reduction)),
      fc2_(name + ".se_fc2", std::max(1, channels / reduction), channels) {}

void SEResBlock::init(RandomStream& rng) {
    conv_a_.init(rng);
    conv_b_.init(rng);
    fc1_.init(rng);
    fc2_.init(rng);
    bn_b_.zero_init_gamma();  // output equals input at initialization
}

Tensor4 SEResBlock::forward(const Tensor4& x, bool training) {
    x_ = x;
    Tensor4 y1 = relu_a_.forward(bn_a_.forward(conv_a_.forward(x), training));
    y2_ = bn_b_.forward(conv_b_.forward(y1), training);
    // squeeze: global average pool per (b, c)
    int B = x.B;
    pooled_.assign(size_t(B) * c_, 0.0);
    const double spatial = double(x.H) * x.W;
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < c_; ++c) {
            double acc = 0.0;
            for (int h = 0; h < x.H; ++h)
                for (int w = 0; w < x.W; ++w) acc += y2_.at(b, c, h, w);
            pooled_[size_t(b) * c_ + c] = acc / spatial;
        }
    // excitation: FC -> ReLU -> FC -> sigmoid
    mid_ = fc1_.forward(pooled_, B);
    std::vector<double> mid_act = mid_;
    for (double& v : mid_act) v = v > 0 ? v : 0.0;
    std::vector<double> raw = fc2_.forward(mid_act, B);
    gate_.resize(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) gate_[i] = sigmoid(raw[i]);

    Tensor4 out = x;
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < c_; ++c) {
            double s = gate_[size_t(b) * c_ + c];
            for (int h = 0; h < x.H; ++h)
                for (int w = 0; w < x.W; ++w)
                    out.at(b, c, h, w) += s * y2_.at(b, c, h, w);
        }
    return out;
}

Tensor4 SEResBlock::backward(const Tensor4& dy) {
    int B = dy.B;
    // d(out) = dy flows to: skip path, y2 (scaled by gate), and gate
    std::vector<double> dgate(size_t(B) * c_, 0.0);
    Tensor4 dy2(dy.B, dy.C, dy.H, dy.W);
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < c_; ++c) {
            double s = gate_[size_t(b) * c_ + c];
            double acc = 0.0;
            for (int h = 0; h < dy.H; ++h)
                for (int w = 0; w < dy.W; ++w) {
                    double d = dy.at(b, c, h, w);
                    dy2.at(b, c, h, w) = d * s;
                    acc += d * y2_.at(b, c, h, w);
                }
            dgate[size_t(b) * c_ + c] = acc;
        }
    // back through sigmoid gate and the two FC layers
    std::vector<double> draw(dgate.size());
    for (size_t i = 0; i < dgate.size(); ++i)
        draw[i] = dgate[i] * gate_[i] * (1.0 - gate_[i]);
    std::vector<double> dmid_act = fc2_.backward(draw);
    for (size_t i = 0; i < dmid_act.size(); ++i)
        if (mid_[i] <= 0.0) dmid_act[i] = 0.0;
    std::vector<double> dpooled = fc1_.backward(dmid_act);
    // spread pooled gradient back over y2
    const double spatial = double(dy.H) * dy.W;
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < c_; ++c) {
            double d = dpooled[size_t(b) * c_ + c] / spatial;
            for (int h = 0; h < dy.H; ++h)
                for (int w = 0; w < dy.W; ++w) dy2.at(b, c, h, w) += d;
        }
    Tensor4 dx = conv_a_.backward(
        bn_a_.backward(relu_a_.backward(conv_b_.backward(bn_b_.backward(dy2)))));
    // skip connection
    for (size_t i = 0; i < dx.v.size(); ++i) dx.v[i] += dy.v[i];
    return dx;
}

std::vector<Param*> SEResBlock::params() {
    std::vector<Param*> out;
    for (auto* p : conv_a_.params()) out.push_back(p);
    for (auto* p : bn_a_.params()) out.push_back(p);
    for (auto* p : conv_b_.params()) out.push_back(p);
    for (auto* p : bn_b_.params()) out.push_back(p);
    for (auto* p : fc1_.params()) out.push_back(p);
    for (auto* p : fc2_.params()) out.push_back(p);
    return out;
}

std::vector<Param*> SEResBlock::bn_state() {
    return {bn_a_.running_mean(), bn_a_.running_var(), bn_b_.running_mean(),
            bn_b_.running_var()};
}

// ---------- Backbone ----------

Backbone::Backbone(const std::string& name, const ArchDescriptor& arch)
    : arch_(arch),
      conv1_(name + ".conv1", arch.in_c, arch.conv1),
      conv2_(name + ".conv2", arch.conv1, arch.conv2),
      conv3_(name + ".conv3", arch.conv2, arch.conv3),
      bn1_(name + ".bn1", arch.conv1),
      se_(name + ".se", arch.conv1, arch.se_reduction),
      fc1_(name + ".fc1",
           arch.conv3 * ((arch.in_h + 1) / 2) * ((arch.in_w + 1) / 2),
           arch.fc_hidden),
      fc2_(name + ".fc2", arch.fc_hidden, arch.out_dim) {
    flat_dim_ = arch.conv3 * ((arch.in_h + 1) / 2) * ((arch.in_w + 1) / 2);
}

void Backbone::init(RandomStream& rng) {
    conv1_.init(rng);
    conv2_.init(rng);
    conv3_.init(rng);
    se_.init(rng);
    fc1_.init(rng);
    fc2_.init(rng, 1.0);  // linear head, no relu gain
}

std::vector<double> Backbone::forward(const Tensor4& x, bool training) {
    if (x.C != arch_.in_c || x.H != arch_.in_h || x.W != arch_.in_w)
        throw std::invalid_argument("Backbone: input shape mismatch");
    batch_ = x.B;
    Tensor4 t = relu1_.forward(bn1_.forward(conv1_.forward(x), training));
    t = pool_.forward(t);
    t = se_.forward(t, training);
    t = relu2_.forward(conv2_.forward(t));
    t = relu3_.forward(conv3_.forward(t));
    pre_flat_ = t;
    std::vector<double> flat = t.v;  // [B][C*H*W] contiguous already
    std::vector<double> h = relu_fc_.forward_vec(fc1_.forward(flat, batch_));
    return fc2_.forward(h, batch_);
}

void Backbone::backward(const std::vector<double>& dy) {
    std::vector<double> dh = fc2_.backward(dy);
    dh = relu_fc_.backward_vec(dh);
    std::vector<double> dflat = fc1_.backward(dh);
    Tensor4 dt = pre_flat_;
    dt.v = dflat;
    dt = conv2_.backward(relu2_.backward(conv3_.backward(relu3_.backward(dt))));
    dt = se_.backward(dt);
    dt = pool_.backward(dt);
    dt = conv1_.backward(bn1_.backward(relu1_.backward(dt)));
    (void)dt;
}

std::vector<Param*> Backbone::params() {
    std::vector<Param*> out;
    for (auto* p : conv1_.params()) out.push_back(p);
    for (auto* p : bn1_.params()) out.push_back(p);
    for (auto* p : se_.params()) out.push_back(p);
    for (auto* p : conv2_.params()) out.push_back(p);
    for (auto* p : conv3_.params()) out.push_back(p);
    for (auto* p : fc1_.params()) out.push_back(p);
    for (auto* p : fc2_.params()) out.push_back(p);
    return out;
}

std::vector<Param*> Backbone::state_params() {
    std::vector<Param*> out = params();
    out.push_back(bn1_.running_mean());
    out.push_back(bn1_.running_var());
    for (auto* p : se_.bn_state()) out.push_back(p);
    return out;
}

void Backbone::zero_grad() {
    for (Param* p : params()) p->zero_grad();
}

// ---------- Adam ----------

Adam::Adam(std::vector<Param*> params, double lr, double beta1, double beta2,
           double eps)
    : params_(std::move(params)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    for (Param* p : params_) {
        m_.emplace_back(p->w.size(), 0.0);
        v_.emplace_back(p->w.size(), 0.0);
    }
}

void Adam::step() {
    ++t_;
    double bc1 = 1.0 - std::pow(b1_, double(t_));
    double bc2 = 1.0 - std::pow(b2_, double(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
        Param* p = params_[i];
        for (size_t j = 0; j < p->w.size(); ++j) {
            double g = p->g[j];
            m_[i][j] = b1_ * m_[i][j] + (1 - b1_) * g;
            v_[i][j] = b2_ * v_[i][j] + (1 - b2_) * g * g;
            double mhat = m_[i][j] / bc1;
            double vhat = v_[i][j] / bc2;
            p->w[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

} // namespace riso
