#include "relaxations.hpp"

#include <algorithm>
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

double soft_quantize_scalar(double phi, double beta_q) {
    return M_PI * sigmoid(beta_q * (phi - M_PI));
}

double soft_quantize_grad(double phi, double beta_q) {
    double s = sigmoid(beta_q * (phi - M_PI));
    return M_PI * beta_q * s * (1.0 - s);
}

std::vector<double> soft_quantize(const std::vector<double>& phi, double beta_q) {
    if (beta_q <= 0) throw std::invalid_argument("soft_quantize: beta_q must be > 0");
    std::vector<double> out(phi.size());
    for (size_t i = 0; i < phi.size(); ++i)
        out[i] = soft_quantize_scalar(phi[i], beta_q);
    return out;
}

std::vector<double> hard_quantize(const std::vector<double>& phi) {
    std::vector<double> out(phi.size());
    for (size_t i = 0; i < phi.size(); ++i)
        out[i] = phi[i] < M_PI ? 0.0 : M_PI;
    return out;
}

std::vector<double> sample_gumbel(std::size_t count, RandomStream& rng) {
    std::vector<double> g(count);
    for (size_t i = 0; i < count; ++i) {
        double u = std::clamp(rng.uniform(), 1e-12, 1.0 - 1e-12);
        g[i] = -std::log(-std::log(u));
    }
    return g;
}

std::vector<double> gumbel_softmax(const std::vector<double>& logits,
                                   int N, int K, int Q, double tau,
                                   const std::vector<double>& noise) {
    if (tau <= 0) throw std::invalid_argument("gumbel_softmax: tau must be > 0");
    if (logits.size() != size_t(N) * K * Q || noise.size() != logits.size())
        throw std::invalid_argument("gumbel_softmax: shape mismatch");
    std::vector<double> alpha(logits.size());
    for (int n = 0; n < N; ++n)
        for (int q = 0; q < Q; ++q) {
            double mx = -1e300;
            for (int k = 0; k < K; ++k) {
                size_t i = (size_t(n) * K + k) * Q + q;
                mx = std::max(mx, (logits[i] + noise[i]) / tau);
            }
            double denom = 0.0;
            for (int k = 0; k < K; ++k) {
                size_t i = (size_t(n) * K + k) * Q + q;
                double e = std::exp((logits[i] + noise[i]) / tau - mx);
                alpha[i] = e;
                denom += e;
            }
            for (int k = 0; k < K; ++k)
                alpha[(size_t(n) * K + k) * Q + q] /= denom;
        }
    return alpha;
}

std::vector<double> gumbel_softmax_backward(const std::vector<double>& alpha,
                                            const std::vector<double>& dalpha,
                                            int N, int K, int Q, double tau) {
    // softmax jacobian per (n,q) slice: dP_k = (a_k / tau) * (da_k - sum_j a_j da_j)
    std::vector<double> dlogits(alpha.size(), 0.0);
    for (int n = 0; n < N; ++n)
        for (int q = 0; q < Q; ++q) {
            double dot = 0.0;
            for (int k = 0; k < K; ++k) {
                size_t i = (size_t(n) * K + k) * Q + q;
                dot += alpha[i] * dalpha[i];
            }
            for (int k = 0; k < K; ++k) {
                size_t i = (size_t(n) * K + k) * Q + q;
                dlogits[i] = alpha[i] / tau * (dalpha[i] - dot);
            }
        }
    return dlogits;
}

std::vector<double> hard_allocation(const std::vector<double>& logits,
                                    int N, int K, int Q) {
    if (logits.size() != size_t(N) * K * Q)
        throw std::invalid_argument("hard_allocation: shape mismatch");
    std::vector<double> out(logits.size(), 0.0);
    for (int n = 0; n < N; ++n)
        for (int q = 0; q < Q; ++q) {
            int kbest = 0;
            double best = logits[(size_t(n) * K + 0) * Q + q];
            for (int k = 1; k < K; ++k) {
                double v = logits[(size_t(n) * K + k) * Q + q];
                if (v > best) {
                    best = v;
                    kbest = k;
                }
            }
            out[(size_t(n) * K + kbest) * Q + q] = 1.0;
        }
    return out;
}

} // namespace riso
