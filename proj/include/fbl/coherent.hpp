#pragma once

#include <vector>

namespace fbl {

// Berry-Esseen constant used in the achievability perturbation term.
inline constexpr double kBerryEsseenC1 = 0.56;

struct BlockMetrics {
    double capacity = 0;   // per-symbol information rate, nats
    double dispersion = 0; // per-symbol dispersion
    double third_abs = 0;  // per-block third absolute central moment
};

// Full analytic rate characterization for one user given per-block inputs.
struct RateReport {
    double mean_capacity = 0;
    double mean_dispersion = 0;
    double perturbation = 0;  // Berry-Esseen correction U
    double q_thres = 0;
    double rate_normal = 0;   // normal-approximation rate, nats/symbol
    double rate_band = 0;     // half-width of the rate uncertainty band
    double eps_beclt = 0;     // error bound including perturbation
    double eps_taylor = 0;    // error estimate without perturbation
    bool condition_ok = true; // normal-approximation applicability check
    double mu_used = 0;
};

// I = ln(1+sinr), V = 2 - 2/(1+sinr); per-symbol pair for a coherent block.
struct CapDisp {
    double capacity;
    double dispersion;
};

CapDisp capacity_dispersion(double sinr);

// Third absolute central moment of the per-block information density for a
// coherent block of length t_c at the given SINR.
double block_third_abs_coherent(double sinr, int t_c);

// Perturbation U for L coherent blocks with per-block dispersions vs.
double perturbation_coherent(const std::vector<double>& vs, int t_c);

// Generic perturbation from per-block dispersions and per-block third moments.
double perturbation_generic(const std::vector<double>& vs,
                            const std::vector<double>& thirds, int t_c);

// Shared tail pipeline: from the averaged moments, the message size (nats),
// the number of blocks, and the slack split mu, produce threshold/rate/error.
RateReport threshold_and_rate(double mean_capacity, double mean_dispersion,
                              double perturbation, double msg_nats, int n_blocks,
                              int t_c, double target_eps, double mu);

// Smallest blocklength n with q_inv(eps)/( (1-eta) C ) * sqrt(V/n) <= ... i.e.
// the normal-approximation blocklength needed to reach a fraction eta of C.
double min_blocklength(double eta, double eps, double capacity,
                       double dispersion);

struct AsymptoticReport {
    double capacity = 0;    // limiting mean capacity (may be +inf)
    double dispersion = 0;  // limiting mean dispersion
    double perturbation = 0;
};

enum class PowerScaling;

// Large-antenna limits for the coherent case under the given power scaling.
// snr_fixed = P * gamma^2 / sigma_n^2 evaluated with the unscaled power.
AsymptoticReport asymptotics_coherent(PowerScaling scaling, double snr_fixed,
                                      int n_blocks, int t_c);

}  // namespace fbl
