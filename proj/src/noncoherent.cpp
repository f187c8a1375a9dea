#include "fbl/noncoherent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fbl/gamma_moments.hpp"
#include "fbl/specfun.hpp"

namespace fbl {

namespace {

GammaMatch match_from_scalars(double sinr, double err_ratio,
                              double delta_ratio, double t_eff) {
    GammaMatch gm;
    double s1 = 1.0 + sinr;
    gm.xi = t_eff * s1 /
            ((sinr * err_ratio + 1.0) + delta_ratio * (t_eff + 1.0));
    gm.beta_y = s1 * s1 * t_eff /
                (s1 * s1 + (2.0 * sinr * err_ratio + delta_ratio) * (t_eff + 1.0));
    gm.beta_n = t_eff / (1.0 + delta_ratio * (t_eff + 1.0));
    gm.rho = std::sqrt(gm.beta_y * gm.beta_n) / gm.xi;
    return gm;
}

}  // namespace

GammaMatch gamma_match(const BlockLinkStats& stats, int t_c, int tau_c) {
    if (t_c <= tau_c) throw std::invalid_argument("gamma_match: T_c > tau_c");
    double e = stats.err_self / stats.noise_var;
    double d = stats.delta / (stats.noise_var * stats.noise_var);
    return match_from_scalars(stats.sinr, e, d, double(t_c - tau_c));
}

LCoefficients l_coefficients(const GammaMatch& gm, int t_c, int tau_c) {
    double t_eff = double(t_c - tau_c);
    LCoefficients lc;
    lc.beta_max = std::max(gm.beta_y, gm.beta_n);
    lc.beta_min = std::min(gm.beta_y, gm.beta_n);
    lc.l11 = t_eff / std::sqrt(lc.beta_min);
    lc.l12 = std::pow(std::sqrt(lc.beta_max) - gm.rho * std::sqrt(lc.beta_min), 2) /
             (1.0 - gm.rho * gm.rho);
    lc.l21 = gm.rho * t_eff / std::sqrt(lc.beta_max);
    lc.l22 = std::sqrt(1.0 - gm.rho * gm.rho) * t_eff / std::sqrt(lc.beta_max);
    lc.l = lc.l22 * std::sqrt(lc.beta_min) + (lc.l11 - lc.l21) * std::sqrt(lc.l12);
    return lc;
}

CapDisp capacity_dispersion_noncoherent(const BlockLinkStats& stats,
                                        const GammaMatch& gm, int t_c,
                                        int tau_c) {
    double t_eff = double(t_c - tau_c);
    double cap = t_eff / t_c * std::log1p(stats.sinr);
    double disp = t_eff * t_eff / t_c *
                  (1.0 / gm.beta_y + 1.0 / gm.beta_n -
                   2.0 * gm.rho / std::sqrt(gm.beta_y * gm.beta_n));
    return {cap, disp};
}

double block_third_abs_noncoherent(const GammaMatch& gm, int t_c, int tau_c) {
    double t_eff = double(t_c - tau_c);
    CorrGammaPair pair{gm.beta_y, gm.beta_y / t_eff, gm.beta_n,
                       gm.beta_n / t_eff, gm.rho};
    return abs_moment_gamma_diff(pair, 3);
}

double perturbation_noncoherent(const std::vector<double>& vs,
                                const std::vector<double>& thirds, int t_c) {
    return perturbation_generic(vs, thirds, t_c);
}

NoncoherentAsymptotics asymptotics_noncoherent(const SystemConfig& cfg,
                                               Scheme scheme, int k,
                                               int n_blocks) {
    cfg.validate(Mode::noncoherent);
    NoncoherentAsymptotics a;
    const int Ku = cfg.n_users;
    const double t_eff = double(cfg.coherence - cfg.pilot_len);
    const double t_c = double(cfg.coherence);

    if (cfg.power_scaling == PowerScaling::inverse_sqrt_Nb) {
        // scaled powers vanish; the effective SINR limit survives
        double sinr_inf = cfg.pilot_len * cfg.large_scale[k] * cfg.large_scale[k] *
                          cfg.tx_power_data[k] * cfg.tx_power_pilot[k] /
                          (cfg.noise_pilot * cfg.noise_data);
        a.sinr = sinr_inf;
        a.beta_y = t_eff;
        a.beta_n = t_eff;
        a.rho = 1.0 / (1.0 + sinr_inf);
        a.capacity = t_eff / t_c * std::log1p(sinr_inf);
        a.dispersion = t_eff / t_c * (2.0 - 2.0 / (1.0 + sinr_inf));
        // the dispersion dependence cancels in the limit; the constant is the
        // equal-dispersion perturbation over n_blocks blocks of t_eff symbols
        a.perturbation = perturbation_coherent(
            std::vector<double>(std::size_t(n_blocks), 2.0), int(t_eff));
        return a;
    }
    if (cfg.power_scaling != PowerScaling::none)
        throw std::invalid_argument(
            "asymptotics_noncoherent: unsupported power scaling");

    // no power scaling: SINR diverges but the estimation-error floor stays
    std::vector<double> err(Ku);
    for (int m = 0; m < Ku; ++m)
        err[m] = cfg.large_scale[m] - mmse_gain(cfg, m);
    double sigma2, delta;
    if (scheme == Scheme::mrc) {
        sigma2 = cfg.data_power(k) * err[k] + cfg.noise_data;
        delta = 0;
        for (int m = 0; m < Ku; ++m) {
            double pm = cfg.data_power(m);
            if (m == k) {
                delta += pm * pm * err[m] * err[m];
            } else {
                sigma2 += pm * cfg.large_scale[m];
                double phi2 = cfg.large_scale[m] - err[m];
                delta += pm * pm * (cfg.large_scale[m] * cfg.large_scale[m] -
                                    phi2 * phi2);
            }
        }
    } else {
        sigma2 = cfg.noise_data;
        delta = 0;
        for (int m = 0; m < Ku; ++m) {
            double pm = cfg.data_power(m);
            sigma2 += pm * err[m];
            delta += pm * pm * err[m] * err[m];
        }
    }
    a.sigma2 = sigma2;
    a.delta = delta;
    a.sinr = std::numeric_limits<double>::infinity();
    a.capacity = std::numeric_limits<double>::infinity();
    double dr = delta / (sigma2 * sigma2);
    a.beta_y = t_eff;
    a.beta_n = t_eff / (1.0 + dr * (t_eff + 1.0));
    a.rho = cfg.data_power(k) * err[k] /
            std::sqrt(sigma2 * sigma2 + (t_eff + 1.0) * delta);
    a.dispersion = t_eff * t_eff / t_c *
                   (1.0 / a.beta_y + 1.0 / a.beta_n -
                    2.0 * a.rho / std::sqrt(a.beta_y * a.beta_n));
    GammaMatch gm{a.beta_y, a.beta_n, a.rho, 0};
    double third =
        block_third_abs_noncoherent(gm, cfg.coherence, cfg.pilot_len);
    a.perturbation = kBerryEsseenC1 / std::sqrt(double(n_blocks)) *
                     std::pow(t_c * a.dispersion, -1.5) * third;
    return a;
}

EvaluatedRate evaluate_rate(const ChannelSet& ch, const SystemConfig& cfg,
                            Scheme scheme, Mode mode, int k, double mu) {
    EvaluatedRate out;
    const int L = cfg.n_blocks;
    out.capacities.resize(L);
    out.dispersions.resize(L);
    out.thirds.resize(L);
    for (int j = 0; j < L; ++j) {
        BlockLinkStats st = link_stats(ch, cfg, scheme, mode, k, j);
        if (mode == Mode::coherent) {
            CapDisp cd = capacity_dispersion(st.sinr);
            out.capacities[j] = cd.capacity;
            out.dispersions[j] = cd.dispersion;
            out.thirds[j] = block_third_abs_coherent(st.sinr, cfg.coherence);
        } else {
            GammaMatch gm = gamma_match(st, cfg.coherence, cfg.pilot_len);
            CapDisp cd = capacity_dispersion_noncoherent(
                st, gm, cfg.coherence, cfg.pilot_len);
            out.capacities[j] = cd.capacity;
            out.dispersions[j] = cd.dispersion;
            out.thirds[j] =
                block_third_abs_noncoherent(gm, cfg.coherence, cfg.pilot_len);
            if (j == 0) {
                out.beta_y = gm.beta_y;
                out.beta_n = gm.beta_n;
                out.rho = gm.rho;
                out.delta = st.delta;
            }
        }
    }
    double mean_i = 0, mean_v = 0;
    for (int j = 0; j < L; ++j) {
        mean_i += out.capacities[j];
        mean_v += out.dispersions[j];
    }
    mean_i /= L;
    mean_v /= L;
    double u = perturbation_generic(out.dispersions, out.thirds, cfg.coherence);
    out.report = threshold_and_rate(mean_i, mean_v, u, cfg.msg_nats.at(k), L,
                                    cfg.coherence, cfg.target_eps.at(k), mu);
    return out;
}

}  // namespace fbl
