#pragma once

#include <cstdint>
#include <vector>

#include "fbl/channel.hpp"
#include "fbl/coherent.hpp"

namespace fbl {

// Matched-Gamma model of the post-combining output and effective noise of a
// pilot-estimated block: v_y ~ Gamma(beta_y, beta_y/(T_c - tau_c)),
// v_n ~ Gamma(beta_n, beta_n/(T_c - tau_c)), correlation rho.
struct GammaMatch {
    double beta_y = 0;
    double beta_n = 0;
    double rho = 0;  // in [0, 1)
    double xi = 0;   // intermediate cross-moment scale; rho = sqrt(by*bn)/xi
};

// Coefficients of the weighted decomposition used by the third-moment
// approximation of |v_y - v_n|.
struct LCoefficients {
    double beta_max = 0, beta_min = 0;
    double l11 = 0, l12 = 0, l21 = 0, l22 = 0, l = 0;
};

GammaMatch gamma_match(const BlockLinkStats& stats, int t_c, int tau_c);

LCoefficients l_coefficients(const GammaMatch& gm, int t_c, int tau_c);

// I = ((T_c-tau_c)/T_c) ln(1+sinr);
// V = ((T_c-tau_c)^2/T_c)(1/b_y + 1/b_n - 2 rho/sqrt(b_y b_n)).
CapDisp capacity_dispersion_noncoherent(const BlockLinkStats& stats,
                                        const GammaMatch& gm, int t_c,
                                        int tau_c);

// Per-block absolute third central moment E|v_y - v_n|^3 under the matched
// Gamma model.
double block_third_abs_noncoherent(const GammaMatch& gm, int t_c, int tau_c);

// U = c1 L^{-1/2} (T_c meanV)^{-3/2} mean(third_abs); per-block thirds come
// from block_third_abs_noncoherent.
double perturbation_noncoherent(const std::vector<double>& vs,
                                const std::vector<double>& thirds, int t_c);

// Large-antenna limits plus the intermediates they are built from.
struct NoncoherentAsymptotics {
    double capacity = 0;  // may be +inf
    double dispersion = 0;
    double perturbation = 0;
    double sinr = 0;  // may be +inf
    double sigma2 = 0;
    double delta = 0;
    double beta_y = 0;
    double beta_n = 0;
    double rho = 0;
};

NoncoherentAsymptotics asymptotics_noncoherent(const SystemConfig& cfg,
                                               Scheme scheme, int k,
                                               int n_blocks);

// Full analytic pipeline for one user over a drawn channel set: per-block
// link stats -> matched Gamma -> (I, V, third moment) -> averaged report.
struct EvaluatedRate {
    RateReport report;
    // per-block intermediates of the last evaluation (user diagnostics)
    std::vector<double> capacities, dispersions, thirds;
    double beta_y = 0, beta_n = 0, rho = 0, delta = 0;  // block-0 values
};

EvaluatedRate evaluate_rate(const ChannelSet& ch, const SystemConfig& cfg,
                            Scheme scheme, Mode mode, int k, double mu);

}  // namespace fbl
