#include "training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace riso {

namespace {

Tensor4 stack(const std::vector<Tensor4>& parts) {
    Tensor4 out(int(parts.size()), parts[0].C, parts[0].H, parts[0].W);
    size_t per = parts[0].size();
    for (size_t b = 0; b < parts.size(); ++b)
        std::copy(parts[b].v.begin(), parts[b].v.end(), out.v.begin() + b * per);
    return out;
}

struct ForwardCache {
    std::vector<EffectiveChannel> eff;
    std::vector<BeamformingSolution> sol;
    std::vector<RateReport> rep;
    std::vector<double> theta;  // [B][M*Q]
    std::vector<double> alloc;  // [B][N*K*Q]
};

// soft-mode pipeline over a batch; fills caches needed for the backward pass
std::vector<LossBreakdown> forward_soft(
    const std::vector<const FrequencyChannel*>& batch, ModelParameters& params,
    const ScenarioConfig& cfg, RandomStream& rng, bool training,
    ForwardCache* cache, double reg_term) {
    const int B = int(batch.size());
    std::vector<Tensor4> feats;
    feats.reserve(B);
    for (const FrequencyChannel* fc : batch) feats.push_back(features_beam(*fc));
    std::vector<double> theta =
        params.beamnet->forward(stack(feats), PhaseMode::Soft, training);
    size_t theta_per = size_t(cfg.M) * cfg.Q;

    std::vector<EffectiveChannel> eff(B);
    std::vector<Tensor4> afeats;
    afeats.reserve(B);
    for (int b = 0; b < B; ++b) {
        std::vector<double> th(theta.begin() + b * theta_per,
                               theta.begin() + (b + 1) * theta_per);
        eff[b] = effective_channel(*batch[b], th, cfg.Q);
        afeats.push_back(features_alloc(eff[b]));
    }
    std::vector<double> alloc = params.allocationnet->forward(
        stack(afeats), AllocMode::Soft, cfg.tau, rng, training);
    size_t alloc_per = size_t(cfg.N) * cfg.K * cfg.Q;

    std::vector<LossBreakdown> out(B);
    if (cache) {
        cache->eff = std::move(eff);
        cache->sol.resize(B);
        cache->rep.resize(B);
        cache->theta = theta;
        cache->alloc = alloc;
    }
    for (int b = 0; b < B; ++b) {
        const EffectiveChannel& e = cache ? cache->eff[b] : eff[b];
        std::vector<double> al(alloc.begin() + b * alloc_per,
                               alloc.begin() + (b + 1) * alloc_per);
        BeamformingSolution sol = solve_beamforming(e, al, cfg);
        RateReport rep = compute_rates(e, al, sol, cfg);
        out[b].rate_term = rate_loss(rep);
        out[b].qos_term = qos_penalty(rep, cfg.lambda1, cfg.R_qos);
        out[b].reg_term = reg_term;
        if (cache) {
            cache->sol[b] = std::move(sol);
            cache->rep[b] = std::move(rep);
        }
    }
    return out;
}

std::vector<Param*> target_params(ModelParameters& params, UpdateTarget which) {
    std::vector<Param*> out;
    if (which == UpdateTarget::BeamNet || which == UpdateTarget::Joint)
        for (auto* p : params.beamnet->backbone().params()) out.push_back(p);
    if (which == UpdateTarget::AllocationNet || which == UpdateTarget::Joint)
        for (auto* p : params.allocationnet->backbone().params()) out.push_back(p);
    return out;
}

std::vector<Param*> all_trainable(ModelParameters& params) {
    return target_params(params, UpdateTarget::Joint);
}

} // namespace

PipelineResult train_step(const std::vector<const FrequencyChannel*>& batch,
                          ModelParameters& params, UpdateTarget which,
                          Adam* optimizer, const ScenarioConfig& cfg,
                          RandomStream& rng) {
    const int B = int(batch.size());
    if (B == 0) throw std::invalid_argument("train_step: empty batch");
    double reg = reg_penalty(all_trainable(params), cfg.lambda2);

    ForwardCache cache;
    std::vector<LossBreakdown> per_sample =
        forward_soft(batch, params, cfg, rng, true, &cache, reg);
    double total = batch_loss(per_sample);
    if (!std::isfinite(total)) {
        std::ostringstream msg;
        msg << "train_step: non-finite loss (total=" << total;
        for (int b = 0; b < B; ++b)
            msg << "; sample " << b << " rate=" << per_sample[b].rate_term
                << " qos=" << per_sample[b].qos_term;
        msg << ")";
        throw std::runtime_error(msg.str());
    }

    // gradient of the batch loss w.r.t. phases and soft allocations; the
    // serving decisions, MRT directions and water-filled powers stay fixed
    size_t theta_per = size_t(cfg.M) * cfg.Q;
    size_t alloc_per = size_t(cfg.N) * cfg.K * cfg.Q;
    std::vector<double> dtheta(size_t(B) * theta_per, 0.0);
    std::vector<double> dalloc(size_t(B) * alloc_per, 0.0);
    const double wq = cfg.W / cfg.Q;
    const double inv_b = 1.0 / B;
    for (int b = 0; b < B; ++b) {
        const EffectiveChannel& eff = cache.eff[b];
        const BeamformingSolution& sol = cache.sol[b];
        const RateReport& rep = cache.rep[b];
        std::vector<double> dRk = loss_rate_gradient(rep, cfg.lambda1, cfg.R_qos);
        for (int q = 0; q < cfg.Q; ++q)
            for (int n = 0; n < cfg.N; ++n) {
                double p = sol.power(q, n);
                for (int k = 0; k < cfg.K; ++k) {
                    double gamma = rep.snr[(size_t(q) * cfg.N + n) * cfg.K + k];
                    double a =
                        cache.alloc[b * alloc_per + (size_t(n) * cfg.K + k) * cfg.Q + q];
                    // d(loss)/d(alpha)
                    dalloc[b * alloc_per + (size_t(n) * cfg.K + k) * cfg.Q + q] =
                        inv_b * dRk[k] * wq * std::log2(1.0 + gamma);
                    // d(loss)/d(theta) through gamma
                    if (p > 0.0 && a != 0.0 && cfg.M > 0) {
                        double dgamma =
                            inv_b * dRk[k] * wq * a / ((1.0 + gamma) * std::log(2.0));
                        cd s(0, 0);
                        for (int t = 0; t < cfg.N_t; ++t)
                            s += eff.at(q, n, k, t) * sol.dir(q, n, t);
                        double coef = dgamma * p / cfg.sigma2_mw * 2.0;
                        for (int m = 0; m < cfg.M; ++m) {
                            double th = cache.theta[b * theta_per + size_t(m) * cfg.Q + q];
                            cd phase(std::cos(th), std::sin(th));
                            cd hw(0, 0);
                            for (int t = 0; t < cfg.N_t; ++t)
                                hw += batch[b]->hr(n, k, m, t) * sol.dir(q, n, t);
                            // d|s|^2/dtheta = 2 Re(conj(s) * j e^{j th} * hw)
                            cd ds = cd(0, 1) * phase * hw;
                            dtheta[b * theta_per + size_t(m) * cfg.Q + q] +=
                                coef * (std::conj(s) * ds).real();
                        }
                    }
                }
            }
    }

    params.beamnet->backbone().zero_grad();
    params.allocationnet->backbone().zero_grad();
    if (which == UpdateTarget::BeamNet || which == UpdateTarget::Joint)
        params.beamnet->backward(dtheta);
    if (which == UpdateTarget::AllocationNet || which == UpdateTarget::Joint)
        params.allocationnet->backward(dalloc);
    add_reg_gradient(target_params(params, which), cfg.lambda2);
    if (optimizer) optimizer->step();

    PipelineResult res;
    res.per_sample = std::move(per_sample);
    res.batch_total = total;
    return res;
}

double soft_loss(const std::vector<const FrequencyChannel*>& set,
                 ModelParameters& params, const ScenarioConfig& cfg,
                 RandomStream& rng) {
    double reg = reg_penalty(all_trainable(params), cfg.lambda2);
    std::vector<LossBreakdown> per =
        forward_soft(set, params, cfg, rng, false, nullptr, reg);
    return batch_loss(per);
}

int stage_of_iteration(int it, const ScenarioConfig& cfg) {
    if (it <= cfg.N1) return 1;
    if (it <= cfg.N2) return 2;
    if (it <= cfg.N3) return 3;
    if (it <= cfg.N4) return 4;
    return 5;
}

namespace {

TrainHistory run_training(const Dataset& train_set, const Dataset& val_set,
                          ModelParameters& params, const ScenarioConfig& cfg,
                          RandomStream& rng, bool phased) {
    if (train_set.records.empty() || val_set.records.empty())
        throw std::invalid_argument("training: datasets must be nonempty");
    TrainHistory hist;
    RandomStream batch_rng = rng.substream(0xba7c);
    RandomStream noise_rng = rng.substream(0x90153);
    RandomStream val_rng_root = rng.substream(0x7a1);

    std::vector<const FrequencyChannel*> val_ptrs;
    for (const auto& r : val_set.records) val_ptrs.push_back(&r);

    std::unique_ptr<Adam> opt;
    int current_stage = -1;
    for (int it = 1; it <= cfg.N5; ++it) {
        int stage = phased ? stage_of_iteration(it, cfg) : 0;
        UpdateTarget which;
        double lr;
        if (!phased) {
            which = UpdateTarget::Joint;
            lr = cfg.mu1;
        } else if (stage == 1 || stage == 3) {
            which = UpdateTarget::BeamNet;
            lr = cfg.mu1;
        } else if (stage == 2 || stage == 4) {
            which = UpdateTarget::AllocationNet;
            lr = cfg.mu2;
        } else {
            which = UpdateTarget::Joint;
            lr = cfg.mu3;
        }
        if (stage != current_stage) {
            // fresh optimizer per stage
            opt = std::make_unique<Adam>(target_params(params, which), lr);
            current_stage = stage;
            params.training_stage = stage;
        }
        std::vector<const FrequencyChannel*> batch;
        batch.reserve(cfg.B);
        for (int b = 0; b < cfg.B; ++b) {
            size_t idx = size_t(batch_rng.next_u64() % train_set.records.size());
            batch.push_back(&train_set.records[idx]);
        }
        PipelineResult res;
        try {
            res = train_step(batch, params, which, opt.get(), cfg, noise_rng);
        } catch (const std::exception& e) {
            throw std::runtime_error("iteration " + std::to_string(it) + ": " +
                                     e.what());
        }
        HistoryRecord rec;
        rec.iteration = it;
        rec.stage = stage;
        rec.rate_term = res.per_sample.front().rate_term;
        rec.qos_term = res.per_sample.front().qos_term;
        rec.reg_term = res.per_sample.front().reg_term;
        rec.total = res.batch_total;
        if (it % cfg.val_interval == 0 || it == cfg.N5) {
            RandomStream vr = val_rng_root.substream(std::uint64_t(it));
            rec.val_loss = soft_loss(val_ptrs, params, cfg, vr);
        }
        hist.records.push_back(rec);
    }
    return hist;
}

} // namespace

TrainHistory phased_train(const Dataset& train_set, const Dataset& val_set,
                          ModelParameters& params, const ScenarioConfig& cfg,
                          RandomStream& rng) {
    return run_training(train_set, val_set, params, cfg, rng, true);
}

TrainHistory joint_train(const Dataset& train_set, const Dataset& val_set,
                         ModelParameters& params, const ScenarioConfig& cfg,
                         RandomStream& rng) {
    return run_training(train_set, val_set, params, cfg, rng, false);
}

void TrainHistory::save(const std::string& path) const {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        out << "iteration\tstage\trate_term\tqos_term\treg_term\ttotal\tval_loss\n";
        char buf[256];
        for (const HistoryRecord& r : records) {
            std::snprintf(buf, sizeof(buf), "%d\t%d\t%.12g\t%.12g\t%.12g\t%.12g\t",
                          r.iteration, r.stage, r.rate_term, r.qos_term,
                          r.reg_term, r.total);
            out << buf;
            if (r.val_loss)
                out << *r.val_loss;
            else
                out << "-";
            out << "\n";
        }
    }
    std::remove(path.c_str());
    std::rename(tmp.c_str(), path.c_str());
}

Decision infer_hard(ModelParameters& params, const FrequencyChannel& fc,
                    const ScenarioConfig& cfg) {
    Decision d;
    Tensor4 xb = features_beam(fc);
    d.theta = params.beamnet->forward(xb, PhaseMode::Hard, false);
    EffectiveChannel eff = effective_channel(fc, d.theta, cfg.Q);
    Tensor4 xa = features_alloc(eff);
    RandomStream dummy(0);
    d.alloc = params.allocationnet->forward(xa, AllocMode::Hard, cfg.tau, dummy,
                                            false);
    return d;
}

double percentile_low(std::vector<double> values, double pct) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    // empirical lower quantile: smallest index covering pct of the mass
    size_t idx = size_t(std::ceil(pct / 100.0 * double(values.size())));
    if (idx > 0) --idx;
    if (idx >= values.size()) idx = values.size() - 1;
    return values[idx];
}

EvalMetrics evaluate(ModelParameters& params, const Dataset& dataset,
                     const ScenarioConfig& cfg) {
    EvalMetrics m;
    m.per_user_mbps.assign(cfg.K, 0.0);
    std::vector<double> pooled;
    int qos_ok = 0, qos_total = 0;
    double latency_acc = 0.0;
    for (const FrequencyChannel& fc : dataset.records) {
        auto t0 = std::chrono::steady_clock::now();
        Decision d = infer_hard(params, fc, cfg);
        auto t1 = std::chrono::steady_clock::now();
        latency_acc += std::chrono::duration<double, std::milli>(t1 - t0).count();
        EffectiveChannel eff = effective_channel(fc, d.theta, cfg.Q);
        BeamformingSolution sol = solve_beamforming(eff, d.alloc, cfg);
        RateReport rep = compute_rates(eff, d.alloc, sol, cfg);
        m.sum_rates_mbps.push_back(rep.sum_rate / 1e6);
        for (int k = 0; k < cfg.K; ++k) {
            double r = rep.per_user[k] / 1e6;
            m.per_user_mbps[k] += r;
            pooled.push_back(r);
            ++qos_total;
            if (rep.per_user[k] >= cfg.R_qos) ++qos_ok;
        }
    }
    size_t n = dataset.records.size();
    if (n > 0) {
        for (double& v : m.per_user_mbps) v /= double(n);
        m.mean_sum_rate_mbps = 0.0;
        for (double v : m.sum_rates_mbps) m.mean_sum_rate_mbps += v;
        m.mean_sum_rate_mbps /= double(n);
        m.inference_latency_ms = latency_acc / double(n);
    }
    m.rate_5pct_mbps = percentile_low(pooled, 5.0);
    m.qos_satisfaction = qos_total ? double(qos_ok) / qos_total : 0.0;
    return m;
}

} // namespace riso
