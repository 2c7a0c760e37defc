#ifndef RISO_OBJECTIVE_HPP
#define RISO_OBJECTIVE_HPP

#include <vector>

#include "beamforming.hpp"
#include "networks.hpp"

namespace riso {

// Loss components. Rates enter in Mbps so lambda1 = 5 and R_qos = 2 Mbps sit
// on comparable scales.
struct LossBreakdown {
    double rate_term = 0.0;  // -sum rate, Mbps
    double qos_term = 0.0;
    double reg_term = 0.0;
    double total() const { return rate_term + qos_term + reg_term; }
};

double rate_loss(const RateReport& report);
double qos_penalty(const RateReport& report, double lambda1, double r_qos_bps);
// gradient of the per-sample loss w.r.t. R_k in bits/s
std::vector<double> loss_rate_gradient(const RateReport& report, double lambda1,
                                       double r_qos_bps);

double reg_penalty(const std::vector<Param*>& params, double lambda2);
void add_reg_gradient(const std::vector<Param*>& params, double lambda2);

// mean over per-sample totals; the regularizer is counted once, not per sample
double batch_loss(const std::vector<LossBreakdown>& samples);

} // namespace riso

#endif
