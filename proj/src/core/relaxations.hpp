#ifndef RISO_RELAXATIONS_HPP
#define RISO_RELAXATIONS_HPP

#include <cstddef>
#include <vector>

#include "rng.hpp"

namespace riso {

// Differentiable surrogates for the discrete constraints, plus the hard
// counterparts used at evaluation time.

// f(phi) = pi * sigmoid(beta_q * (phi - pi)), elementwise; range [0, pi]
std::vector<double> soft_quantize(const std::vector<double>& phi, double beta_q);
double soft_quantize_scalar(double phi, double beta_q);
// derivative of the scalar quantizer
double soft_quantize_grad(double phi, double beta_q);

// phi < pi -> 0, else pi (tie at pi rounds to pi)
std::vector<double> hard_quantize(const std::vector<double>& phi);

// g = -ln(-ln(u)), u uniform on (0,1) clamped away from the endpoints
std::vector<double> sample_gumbel(std::size_t count, RandomStream& rng);

// logits and noise are [N][K][Q] flat with layout (n*K+k)*Q+q; softmax runs
// over the K axis of each (n,q) slice with max-subtraction
std::vector<double> gumbel_softmax(const std::vector<double>& logits,
                                   int N, int K, int Q, double tau,
                                   const std::vector<double>& noise);

// backward through gumbel_softmax: given d(loss)/d(alpha) return
// d(loss)/d(logits); alpha is the forward output
std::vector<double> gumbel_softmax_backward(const std::vector<double>& alpha,
                                            const std::vector<double>& dalpha,
                                            int N, int K, int Q, double tau);

// one-hot at argmax_k per (n,q) slice; ties break toward the smallest index
std::vector<double> hard_allocation(const std::vector<double>& logits,
                                    int N, int K, int Q);

} // namespace riso

#endif
