#include "objective.hpp"

#include <cmath>
#include <stdexcept>

namespace riso {

double rate_loss(const RateReport& report) { return -report.sum_rate / 1e6; }

double qos_penalty(const RateReport& report, double lambda1, double r_qos_bps) {
    double qos_mbps = r_qos_bps / 1e6;
    double acc = 0.0;
    for (double r : report.per_user)
        acc += std::max(qos_mbps - r / 1e6, 0.0);
    return lambda1 * acc;
}

std::vector<double> loss_rate_gradient(const RateReport& report, double lambda1,
                                       double r_qos_bps) {
    // d(rate_term + qos_term)/dR_k with R_k in bits/s
    std::vector<double> g(report.per_user.size());
    for (size_t k = 0; k < g.size(); ++k) {
        double d = -1.0 / 1e6;
        if (report.per_user[k] < r_qos_bps) d += -lambda1 / 1e6;
        g[k] = d;
    }
    return g;
}

double reg_penalty(const std::vector<Param*>& params, double lambda2) {
    double acc = 0.0;
    for (const Param* p : params)
        for (double w : p->w) acc += w * w;
    return lambda2 * acc;
}

void add_reg_gradient(const std::vector<Param*>& params, double lambda2) {
    for (Param* p : params)
        for (size_t i = 0; i < p->w.size(); ++i) p->g[i] += 2.0 * lambda2 * p->w[i];
}

double batch_loss(const std::vector<LossBreakdown>& samples) {
    if (samples.empty())
        throw std::invalid_argument("batch_loss: empty batch");
    double acc = 0.0;
    for (const LossBreakdown& s : samples) acc += s.rate_term + s.qos_term;
    // the regularizer has no per-sample dependence; count it once
    return acc / double(samples.size()) + samples.front().reg_term;
}

} // namespace riso
