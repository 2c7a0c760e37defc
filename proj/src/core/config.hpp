#ifndef RISO_CONFIG_HPP
#define RISO_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace riso {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// System, channel, geometry and training hyperparameters for one simulated
// drop. Flat key=value text format; unknown keys are rejected.
struct ScenarioConfig {
    // system
    int N_t = 4;   // BS antennas
    int K = 3;     // users
    int M = 64;    // RIS elements (0 = no RIS)
    int N = 16;    // subcarriers
    int Q = 6;     // timeslots per coherence block
    int L0 = 4;    // direct-link taps
    int L1 = 2;    // BS->RIS taps
    int L2 = 3;    // RIS->user taps
    double W = 180e3;          // subcarrier bandwidth, Hz
    double noise_psd = -174.0; // dBm/Hz
    double P_max = 10.0;       // transmit power budget, dBm
    double R_qos = 2e6;        // per-user QoS rate, bits/s
    // channel
    double k_BR = 2.0;  // Rician factor BS->RIS, dB
    double k_RU = 4.0;  // Rician factor RIS->user, dB
    double beta0 = -30.0; // reference gain at d0, dB
    double d0 = 1.0;      // reference distance, m
    double xi0 = 3.8;     // path-loss exponent, direct
    double xi1 = 2.2;     // path-loss exponent, BS->RIS
    double xi2 = 2.4;     // path-loss exponent, RIS->user
    // geometry
    double D1 = 130.0;     // BS distance along x, m
    double D2 = 150.0;     // RIS distance along y, m
    double R_inner = 10.0; // user annulus inner radius, m
    double D3 = 3.0;       // annulus width, m
    // relaxation / loss
    double lambda1 = 5.0;    // QoS penalty weight
    double lambda2 = 5e-5;   // parameter regularization weight
    double tau = 0.5;        // Gumbel-softmax temperature
    double beta_q = 100.0;   // quantizer sharpness
    // training
    double mu1 = 0.001;  // BeamNet stage learning rate
    double mu2 = 0.001;  // AllocationNet stage learning rate
    double mu3 = 0.0005; // joint stage learning rate
    int N1 = 2500, N2 = 5000, N3 = 7000, N4 = 9000, N5 = 15000;
    int B = 32;             // mini-batch size
    int val_interval = 100; // validation cadence, iterations
    std::uint64_t seed = 1;
    // network widths (descriptor-configurable)
    int arch_conv1 = 32;
    int arch_conv2 = 64;
    int arch_conv3 = 64;
    int arch_fc = 512;
    int arch_se_reduction = 16;

    // derived linear-scale quantities, filled by finalize()
    double sigma2_mw = 0.0;  // noise power per subcarrier, mW
    double p_max_mw = 0.0;   // power budget, mW
    double beta0_lin = 0.0;
    double k_br_lin = 0.0;
    double k_ru_lin = 0.0;

    int total_taps() const { return std::max(L0, L1 + L2 - 1); }

    void finalize();  // compute derived fields, then validate
    void validate() const;

    // canonical serialization of the resolved config (stable key order)
    std::string serialize() const;
    std::uint64_t hash() const;  // FNV-1a over serialize()
};

// Parse a flat key=value document. Empty text yields the defaults above.
ScenarioConfig load_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

struct Geometry {
    std::vector<double> user_x, user_y;  // K positions, m
    std::vector<double> d_direct;        // BS-user distances
    double d_br = 0.0;                   // BS-RIS distance
    std::vector<double> d_ru;            // RIS-user distances
};

// Users drawn uniformly over the quarter-annulus sector around the RIS at
// (0, D2); BS sits at (D1, 0).
Geometry sample_geometry(const ScenarioConfig& cfg, RandomStream& rng);

// beta0_lin * (d/d0)^(-xi)
double path_gain(double d, double xi, const ScenarioConfig& cfg);

double db_to_lin(double db);
double dbm_to_mw(double dbm);

} // namespace riso

#endif
