#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbl/channel.hpp"
#include "fbl/config.hpp"
#include "fbl/gamma_moments.hpp"
#include "fbl/noncoherent.hpp"

using namespace fbl;

namespace {
SystemConfig nc_cfg() {
    SystemConfig cfg = default_config();
    cfg.n_antennas = 16;
    cfg.n_users = 3;
    cfg.n_blocks = 5;
    cfg.pilot_len = 5;
    cfg.tx_power_data.assign(3, 10.0);
    cfg.tx_power_pilot.assign(3, 10.0);
    cfg.large_scale.assign(3, 1e-9);
    cfg.msg_nats.assign(3, 100.0);
    cfg.target_eps.assign(3, 1e-5);
    return cfg;
}
}  // namespace

TEST_CASE("gamma_match: error-free limit recovers the scaled chi-squares") {
    BlockLinkStats st;
    st.sinr = 3.0;
    st.delta = 0.0;
    st.err_self = 0.0;
    st.noise_var = 1.0;
    GammaMatch gm = gamma_match(st, 20, 5);
    double t_eff = 15.0;
    CHECK(gm.beta_y == doctest::Approx(t_eff).epsilon(1e-12));
    CHECK(gm.beta_n == doctest::Approx(t_eff).epsilon(1e-12));
    CHECK(gm.rho == doctest::Approx(1.0 / (1.0 + st.sinr)).epsilon(1e-12));
}

TEST_CASE("gamma_match: estimation error shrinks the shape parameters") {
    BlockLinkStats st;
    st.sinr = 3.0;
    st.noise_var = 1.0;
    st.err_self = 0.2;   // normalized by noise_var below anyway
    st.delta = 0.05;
    GammaMatch gm = gamma_match(st, 20, 5);
    CHECK(gm.beta_y < 15.0);
    CHECK(gm.beta_n < 15.0);
    CHECK(gm.rho > 0.0);
    CHECK(gm.rho < 1.0);

    // beta_n depends only on delta: direct formula check
    double d = st.delta / (st.noise_var * st.noise_var);
    CHECK(gm.beta_n == doctest::Approx(15.0 / (1.0 + d * 16.0)).epsilon(1e-12));
}

TEST_CASE("capacity_dispersion_noncoherent and the coherent limit") {
    BlockLinkStats st;
    st.sinr = 3.0;
    st.noise_var = 1.0;
    GammaMatch gm = gamma_match(st, 20, 5);
    CapDisp cd = capacity_dispersion_noncoherent(st, gm, 20, 5);
    CHECK(cd.capacity == doctest::Approx(15.0 / 20.0 * std::log(4.0))
                             .epsilon(1e-12));
    // error-free: V = (T_eff/T_c) * (2 - 2/(1+sinr)) exactly
    double v_coh = 2.0 - 2.0 / (1.0 + st.sinr);
    CHECK(cd.dispersion == doctest::Approx(15.0 / 20.0 * v_coh).epsilon(1e-12));
}

TEST_CASE("l_coefficients internal identities") {
    BlockLinkStats st;
    st.sinr = 2.0;
    st.noise_var = 1.0;
    st.err_self = 0.3;
    st.delta = 0.02;
    GammaMatch gm = gamma_match(st, 20, 5);
    LCoefficients lc = l_coefficients(gm, 20, 5);
    CHECK(lc.beta_max == std::max(gm.beta_y, gm.beta_n));
    CHECK(lc.beta_min == std::min(gm.beta_y, gm.beta_n));
    double t_eff = 15.0;
    CHECK(lc.l11 == doctest::Approx(t_eff / std::sqrt(lc.beta_min)));
    CHECK(lc.l21 ==
          doctest::Approx(gm.rho * t_eff / std::sqrt(lc.beta_max)));
    CHECK(lc.l22 == doctest::Approx(std::sqrt(1.0 - gm.rho * gm.rho) * t_eff /
                                    std::sqrt(lc.beta_max)));
    double l12 = std::pow(std::sqrt(lc.beta_max) -
                              gm.rho * std::sqrt(lc.beta_min),
                          2.0) /
                 (1.0 - gm.rho * gm.rho);
    CHECK(lc.l12 == doctest::Approx(l12).epsilon(1e-12));
}

TEST_CASE("block third moment agrees with the generic Gamma-pair machinery") {
    BlockLinkStats st;
    st.sinr = 2.0;
    st.noise_var = 1.0;
    st.err_self = 0.3;
    st.delta = 0.02;
    GammaMatch gm = gamma_match(st, 20, 5);
    double t_eff = 15.0;
    CorrGammaPair pair{gm.beta_y, gm.beta_y / t_eff, gm.beta_n,
                       gm.beta_n / t_eff, gm.rho};
    CHECK(block_third_abs_noncoherent(gm, 20, 5) ==
          doctest::Approx(abs_moment_gamma_diff(pair, 3)).epsilon(1e-9));
}

TEST_CASE("perturbation_noncoherent matches the generic pipeline") {
    std::vector<double> vs{1.1, 1.3, 0.9};
    std::vector<double> thirds{4.0, 5.5, 3.2};
    CHECK(perturbation_noncoherent(vs, thirds, 20) ==
          doctest::Approx(perturbation_generic(vs, thirds, 20))
              .epsilon(1e-15));
}

TEST_CASE("noncoherent asymptotics, fixed power: MRC intermediates") {
    SystemConfig cfg = nc_cfg();
    NoncoherentAsymptotics as = asymptotics_noncoherent(cfg, Scheme::mrc, 0, 5);
    CHECK(std::isinf(as.sinr));
    CHECK(std::isinf(as.capacity));
    double phi0 = mmse_gain(cfg, 0);
    double s2 = cfg.tx_power_data[0] * (cfg.large_scale[0] - phi0);
    for (int m = 1; m < 3; ++m)
        s2 += cfg.tx_power_data[m] * cfg.large_scale[m];
    s2 += cfg.noise_data;
    CHECK(as.sigma2 == doctest::Approx(s2).epsilon(1e-12));
    double e0 = cfg.tx_power_data[0] * (cfg.large_scale[0] - phi0);
    double dl = e0 * e0;
    for (int m = 1; m < 3; ++m) {
        double phim = mmse_gain(cfg, m);
        dl += cfg.tx_power_data[m] * cfg.tx_power_data[m] *
              (cfg.large_scale[m] * cfg.large_scale[m] - phim * phim);
    }
    CHECK(as.delta == doctest::Approx(dl).epsilon(1e-12));
    CHECK(as.beta_y == doctest::Approx(15.0));
    double rho = e0 / std::sqrt(s2 * s2 + 16.0 * dl);
    CHECK(as.rho == doctest::Approx(rho).epsilon(1e-12));
    CHECK(as.dispersion > 0);
    CHECK(as.perturbation > 0);
}

TEST_CASE("noncoherent asymptotics, fixed power: ZF drops cross terms") {
    SystemConfig cfg = nc_cfg();
    NoncoherentAsymptotics as = asymptotics_noncoherent(cfg, Scheme::zf, 0, 5);
    double s2 = cfg.noise_data, dl = 0;
    for (int m = 0; m < 3; ++m) {
        double phim = mmse_gain(cfg, m);
        double e = cfg.tx_power_data[m] * (cfg.large_scale[m] - phim);
        s2 += e;
        dl += e * e;
    }
    CHECK(as.sigma2 == doctest::Approx(s2).epsilon(1e-12));
    CHECK(as.delta == doctest::Approx(dl).epsilon(1e-12));
}

TEST_CASE("noncoherent asymptotics under 1/sqrt(N_b) scaling") {
    SystemConfig cfg = nc_cfg();
    cfg.power_scaling = PowerScaling::inverse_sqrt_Nb;
    NoncoherentAsymptotics as = asymptotics_noncoherent(cfg, Scheme::mrc, 0, 5);
    double g2 = cfg.large_scale[0];
    double sinr = cfg.pilot_len * g2 * g2 * cfg.tx_power_data[0] *
                  cfg.tx_power_pilot[0] / (cfg.noise_pilot * cfg.noise_data);
    CHECK(as.sinr == doctest::Approx(sinr).epsilon(1e-12));
    CHECK(as.capacity ==
          doctest::Approx(15.0 / 20.0 * std::log1p(sinr)).epsilon(1e-12));
    CHECK(as.beta_y == doctest::Approx(15.0));
    CHECK(as.beta_n == doctest::Approx(15.0));
    CHECK(as.rho == doctest::Approx(1.0 / (1.0 + sinr)).epsilon(1e-12));
    // the limit perturbation is the closed constant at effective length 15
    std::vector<double> equal_v(5, 2.0);
    CHECK(as.perturbation ==
          doctest::Approx(perturbation_coherent(equal_v, 15)).epsilon(1e-12));
}

TEST_CASE("evaluate_rate: coherent path equals hand-assembled pipeline") {
    SystemConfig cfg = nc_cfg();
    cfg.pilot_len = 0;
    ChannelSet ch = draw_channels(cfg, Mode::coherent, 17);
    EvaluatedRate er = evaluate_rate(ch, cfg, Scheme::mrc, Mode::coherent, 0,
                                     0.5);
    std::vector<double> vs, is, th;
    for (int j = 0; j < cfg.n_blocks; ++j) {
        BlockLinkStats st = mrc_coherent_stats(ch, cfg, 0, j);
        CapDisp cd = capacity_dispersion(st.sinr);
        is.push_back(cd.capacity);
        vs.push_back(cd.dispersion);
        th.push_back(block_third_abs_coherent(st.sinr, cfg.coherence));
    }
    double mi = 0, mv = 0;
    for (int j = 0; j < 5; ++j) {
        mi += is[j] / 5;
        mv += vs[j] / 5;
    }
    double u = perturbation_generic(vs, th, cfg.coherence);
    RateReport ref = threshold_and_rate(mi, mv, u, cfg.msg_nats[0],
                                        cfg.n_blocks, cfg.coherence,
                                        cfg.target_eps[0], 0.5);
    CHECK(er.report.rate_normal == doctest::Approx(ref.rate_normal)
                                       .epsilon(1e-12));
    CHECK(er.report.eps_beclt == doctest::Approx(ref.eps_beclt)
                                     .epsilon(1e-12));
    CHECK(er.report.perturbation == doctest::Approx(u).epsilon(1e-12));
}

TEST_CASE("evaluate_rate: noncoherent path exposes block-0 diagnostics") {
    SystemConfig cfg = nc_cfg();
    ChannelSet ch = draw_channels(cfg, Mode::noncoherent, 17);
    EvaluatedRate er = evaluate_rate(ch, cfg, Scheme::mrc, Mode::noncoherent,
                                     1, 0.5);
    BlockLinkStats st = mrc_noncoherent_stats(ch, cfg, 1, 0);
    GammaMatch gm = gamma_match(st, cfg.coherence, cfg.pilot_len);
    CHECK(er.beta_y == doctest::Approx(gm.beta_y).epsilon(1e-12));
    CHECK(er.beta_n == doctest::Approx(gm.beta_n).epsilon(1e-12));
    CHECK(er.rho == doctest::Approx(gm.rho).epsilon(1e-12));
    CHECK(er.capacities.size() == 5);
    CHECK(er.report.mean_dispersion > 0);
}
