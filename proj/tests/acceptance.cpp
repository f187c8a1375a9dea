// End-to-end acceptance suite: one pass/fail line per criterion.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "fbl/channel.hpp"
#include "fbl/coherent.hpp"
#include "fbl/config.hpp"
#include "fbl/gamma_moments.hpp"
#include "fbl/noncoherent.hpp"
#include "fbl/oracles.hpp"
#include "fbl/simkit.hpp"
#include "fbl/specfun.hpp"

using namespace fbl;

namespace {

int g_failures = 0;

void report(int idx, const char* title, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", idx,
                title, detail.empty() ? "" : " — ", detail.c_str());
    if (!ok) ++g_failures;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

SystemConfig defaults_cfg() { return default_config(); }

// ---------------------------------------------------------------- 1
void criterion_dispersion_asymptote() {
    SystemConfig cfg = defaults_cfg();
    cfg.n_antennas = 1024;
    bool ok = true;
    std::string detail;
    for (Scheme scheme : {Scheme::mrc, Scheme::zf}) {
        const long draws = 200;
        std::vector<double> mv(draws, 0);
        parallel_for(draws, [&](long t) {
            ChannelSet ch = draw_channels(cfg, Mode::coherent,
                                          1000 + std::uint64_t(t));
            mv[t] = evaluate_rate(ch, cfg, scheme, Mode::coherent, 0, 0.5)
                        .report.mean_dispersion;
        });
        double mean = 0;
        for (double v : mv) mean += v / double(draws);
        ok = ok && mean >= 1.95 && mean <= 2.0;
        detail += (scheme == Scheme::mrc ? "mrc=" : " zf=") + num(mean);
    }
    report(1, "coherent dispersion at N_b=1024 in [1.95, 2]", ok, detail);
}

// ---------------------------------------------------------------- 2
void criterion_perturbation_constant() {
    // coherent limit constant at L=10, T_c=20, evaluated through the
    // production log-gamma path and cross-checked against the independent
    // Stirling-series oracle
    double u_co = perturbation_coherent(std::vector<double>(10, 2.0), 20);
    double lg = oracles::ln_gamma_ref(21.5) - oracles::ln_gamma_ref(21.0);
    double base = 4.0 * kBerryEsseenC1 / std::sqrt(2.0 * M_PI) /
                  std::sqrt(10.0);
    double u_co_ref =
        base * std::exp(lg - 0.5 * std::log(20.0));
    double bound_co = base * std::sqrt(1.0 + 1.0 / 20.0);
    // non-coherent limit constant at L=10, T_c=20, tau_c=5 (effective
    // length 15) with its bracketing bounds
    double u_non = perturbation_coherent(std::vector<double>(10, 2.0), 15);
    double lower_non = base / std::sqrt(15.0 * 16.5);
    double upper_non = base * std::sqrt(1.0 + 1.0 / 15.0);

    bool oracle_ok = std::abs(u_co - u_co_ref) < 1e-12 * u_co;
    bool bound_ok = u_co <= bound_co && u_non >= lower_non &&
                    u_non <= upper_non;
    bool lit_co = std::abs(u_co - 0.2896) <= 1e-3;
    bool lit_non = std::abs(u_non - 0.2854) <= 1e-3;
    bool ok = oracle_ok && bound_ok && lit_co && lit_non;
    report(2, "limit perturbation constants at L=10, T_c=20 (tau_c=5)", ok,
           "exact coherent=" + num(u_co) + " (bound " + num(bound_co) +
               "), exact pilot-overhead=" + num(u_non) + " (bracket [" +
               num(lower_non) + ", " + num(upper_non) +
               "]); literal targets 0.2896/0.2854 " +
               (lit_co && lit_non ? "met" : "NOT met by the exact values"));
}

// ---------------------------------------------------------------- 3
void criterion_gamma_moment_machinery() {
    bool ok = true;
    std::string detail;
    // m=2: exact variance identity for equal-mean pairs
    double worst2 = 0;
    for (double a : {1.0, 5.0, 20.0}) {
        for (double rho : {0.0, 0.3, 0.8}) {
            CorrGammaPair pair{a, a / 15.0, a, a / 15.0, rho};
            double expect = 2.0 * 225.0 / a * (1.0 - rho);
            double got = abs_moment_gamma_diff(pair, 2);
            worst2 = std::max(worst2, std::abs(got - expect) / expect);
        }
    }
    ok = ok && worst2 < 0.01;
    detail += "m=2 worst rel err " + num(worst2);
    // Laplace point: iid Exp(1) difference has E|z|^3 = 6
    double lap = abs_moment_gamma_diff({1, 1, 1, 1, 0.0}, 3);
    ok = ok && std::abs(lap - 6.0) < 1e-9;
    // m=3 against million-sample MC oracles. The MC construction pins down
    // one specific bivariate-Gamma law; at equal shapes with rho > 0 that
    // law and the decomposition's model differ by construction, so the grid
    // uses rho = 0 (where both coincide) plus unequal-shape correlated
    // points. The sampled-signal third moment is validated end to end in
    // criterion 4.
    double worst3 = 0;
    const CorrGammaPair grid[] = {
        {4.0, 0.4, 4.0, 4.0 / 9.0, 0.0},   {15.0, 1.5, 35.0, 35.0 / 9.0, 0.0},
        {10.0, 1.0, 35.0, 35.0 / 9.0, 0.2}, {15.0, 1.5, 10.0, 10.0 / 9.0, 0.2},
        {15.0, 1.5, 35.0, 35.0 / 9.0, 0.2}};
    for (const CorrGammaPair& pair : grid) {
        double approx = abs_moment_gamma_diff(pair, 3);
        double mc = oracles::mc_abs_moment_gamma_diff(pair, 3, 1000000, 31);
        worst3 = std::max(worst3, std::abs(approx - mc) / mc);
    }
    ok = ok && worst3 < 0.03;
    detail += ", m=3 worst rel err vs MC " + num(worst3);
    report(3, "correlated-Gamma absolute moments (m=2 exact, m=3 vs MC)", ok,
           detail);
}

// ---------------------------------------------------------------- 4
void criterion_info_density_moments() {
    bool ok = true;
    std::string detail;
    const long n = 100000;
    for (Mode mode : {Mode::coherent, Mode::noncoherent}) {
        for (int nb : {10, 20, 40}) {
            SystemConfig cfg = defaults_cfg();
            cfg.n_antennas = nb;
            if (mode == Mode::coherent) cfg.pilot_len = 0;
            ChannelSet ch = draw_channels(cfg, mode, 101);
            auto draws = block_info_density_draws(ch, cfg, Scheme::mrc, mode,
                                                  0, 0, n, 55);
            EvaluatedRate er =
                evaluate_rate(ch, cfg, Scheme::mrc, mode, 0, 0.5);
            double mean_a = er.capacities[0] * cfg.coherence;
            double var_a = er.dispersions[0] * cfg.coherence;
            double third_a = er.thirds[0];
            double m1 = 0;
            for (auto& d : draws) m1 += d.i / double(n);
            double m2 = 0, m3 = 0, m4 = 0;
            for (auto& d : draws) {
                double c = d.i - m1;
                m2 += c * c / double(n);
                m3 += std::abs(c * c * c) / double(n);
                m4 += c * c * c * c / double(n);
            }
            double se_mean = std::sqrt(m2 / double(n));
            double se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / double(n));
            bool mean_ok = std::abs(m1 - mean_a) <= 3 * se_mean;
            bool var_ok = std::abs(m2 - var_a) <= 3 * se_var;
            bool third_ok = std::abs(m3 - third_a) <= 0.05 * third_a;
            if (!(mean_ok && var_ok && third_ok)) {
                ok = false;
                detail += std::string(mode == Mode::coherent ? " co" : " non") +
                          "/N_b=" + num(nb) + (mean_ok ? "" : " mean") +
                          (var_ok ? "" : " var") + (third_ok ? "" : " third");
            }
        }
    }
    report(4, "info-density mean/variance (3 SE) and third moment (5%) at "
              "T_c=20, N_b in {10,20,40}", ok,
           ok ? "all 6 settings within tolerance" : "failed:" + detail);
}

// ---------------------------------------------------------------- 5
void criterion_matched_gamma() {
    SystemConfig cfg = defaults_cfg();
    cfg.coherence = 40;
    cfg.tx_power_data.assign(cfg.n_users, dbm_to_mw(40.0));
    cfg.tx_power_pilot = cfg.tx_power_data;
    ChannelSet ch = draw_channels(cfg, Mode::noncoherent, 7);
    const long n = 20000;
    NormCdfData data = empirical_norm_cdfs(ch, cfg, Scheme::mrc, 0, 0, n, 19);
    BlockLinkStats st = mrc_noncoherent_stats(ch, cfg, 0, 0);
    GammaMatch gm = gamma_match(st, cfg.coherence, cfg.pilot_len);
    double t_eff = double(cfg.coherence - cfg.pilot_len);
    double ks_y = ks_distance_to_gamma(data.v_y, gm.beta_y, gm.beta_y / t_eff);
    double ks_n = ks_distance_to_gamma(data.v_n, gm.beta_n, gm.beta_n / t_eff);
    double se_corr = (1.0 - gm.rho * gm.rho) / std::sqrt(double(n));
    bool ok = ks_y < 0.05 && ks_n < 0.05 &&
              std::abs(data.corr - gm.rho) <= 3 * se_corr;
    report(5, "matched-Gamma fit at N_b=20, T_c=40, P=40 dBm", ok,
           "KS(v_y)=" + num(ks_y) + ", KS(v_n)=" + num(ks_n) + ", corr=" +
               num(data.corr) + " vs rho=" + num(gm.rho));
}

// ---------------------------------------------------------------- 6
void criterion_reduction() {
    SystemConfig cfg = defaults_cfg();
    ChannelSet ch = draw_channels(cfg, Mode::coherent, 12);
    double worst = 0;
    for (int j = 0; j < cfg.n_blocks; ++j) {
        BlockLinkStats st = mrc_coherent_stats(ch, cfg, 0, j);
        st.err_self = 0;
        st.delta = 0;  // perfect estimation: phi^2 = gamma^2
        GammaMatch gm = gamma_match(st, cfg.coherence, cfg.pilot_len);
        double t_eff = double(cfg.coherence - cfg.pilot_len);
        CapDisp nc = capacity_dispersion_noncoherent(st, gm, cfg.coherence,
                                                     cfg.pilot_len);
        CapDisp co = capacity_dispersion(st.sinr);
        double f = t_eff / cfg.coherence;
        worst = std::max(worst, std::abs(nc.capacity - f * co.capacity) /
                                    (f * co.capacity));
        worst = std::max(worst, std::abs(nc.dispersion - f * co.dispersion) /
                                    (f * co.dispersion));
        worst = std::max(worst, std::abs(gm.beta_y - t_eff) / t_eff);
        worst = std::max(worst, std::abs(gm.beta_n - t_eff) / t_eff);
        worst = std::max(worst,
                         std::abs(gm.rho - 1.0 / (1.0 + st.sinr)) /
                             (1.0 / (1.0 + st.sinr)));
    }
    report(6, "perfect-estimation reduction to the pilot-free forms (1e-9)",
           worst < 1e-9, "worst rel err " + num(worst));
}

// ---------------------------------------------------------------- 7
void criterion_rcu_consistency() {
    bool ok = true;
    std::string detail;
    for (Mode mode : {Mode::coherent, Mode::noncoherent}) {
        for (Scheme scheme : {Scheme::mrc, Scheme::zf}) {
            SystemConfig cfg = defaults_cfg();
            cfg.n_blocks = 20;
            if (mode == Mode::coherent) cfg.pilot_len = 0;
            const std::uint64_t seed = 77;
            ChannelSet ch = draw_channels(cfg, mode, seed);
            EvaluatedRate pre = evaluate_rate(ch, cfg, scheme, mode, 0, 0.5);
            double nsym = double(cfg.n_blocks) * cfg.coherence;
            // place the operating point at eps_taylor ~ 5e-2
            cfg.msg_nats.assign(
                cfg.n_users,
                std::log(0.5) + nsym * pre.report.mean_capacity -
                    q_inv(0.05) *
                        std::sqrt(nsym * pre.report.mean_dispersion));
            EvaluatedRate er = evaluate_rate(ch, cfg, scheme, mode, 0, 0.5);
            TrialPlan plan;
            plan.n_signal_draws = 10000;
            plan.master_seed = seed;
            Estimate e = rcu_error_estimate(cfg, scheme, mode, plan, 0);
            bool in_band = er.report.eps_taylor >= 1e-2 &&
                           er.report.eps_taylor <= 1e-1;
            bool taylor_ok =
                std::abs(e.value - er.report.eps_taylor) <= 3 * e.std_err;
            bool beclt_ok = e.value <= er.report.eps_beclt + 3 * e.std_err;
            if (!(in_band && taylor_ok && beclt_ok)) ok = false;
            detail += std::string(detail.empty() ? "" : "; ") +
                      (scheme == Scheme::mrc ? "mrc/" : "zf/") +
                      (mode == Mode::coherent ? "co" : "non") + " hat=" +
                      num(e.value) + " taylor=" + num(er.report.eps_taylor);
        }
    }
    report(7, "RCU estimate vs Taylor (3 SE) and BE-CLT upper bound", ok,
           detail);
}

// ---------------------------------------------------------------- 8
void criterion_block_split() {
    bool ok = true;
    std::string detail;
    for (Scheme scheme : {Scheme::mrc, Scheme::zf}) {
        double means[2] = {0, 0};
        int idx = 0;
        for (auto [L, Tc] : {std::pair{10, 80}, std::pair{40, 20}}) {
            SystemConfig cfg = defaults_cfg();
            cfg.n_blocks = L;
            cfg.coherence = Tc;
            cfg.tx_power_data.assign(cfg.n_users, dbm_to_mw(30.0));
            cfg.tx_power_pilot = cfg.tx_power_data;
            const long draws = 200;
            std::vector<double> r(draws, 0);
            parallel_for(draws, [&](long t) {
                ChannelSet ch = draw_channels(cfg, Mode::noncoherent,
                                              300 + std::uint64_t(t));
                r[t] = evaluate_rate(ch, cfg, scheme, Mode::noncoherent, 0,
                                     0.5)
                           .report.rate_normal;
            });
            for (double v : r) means[idx] += v / double(draws);
            ++idx;
        }
        ok = ok && means[0] > means[1];
        detail += std::string(scheme == Scheme::mrc ? "mrc: " : "; zf: ") +
                  "(L=10,T_c=80)=" + num(means[0]) + " vs (L=40,T_c=20)=" +
                  num(means[1]);
    }
    report(8, "fixed n=800: fewer, longer blocks give higher mean rate", ok,
           detail);
}

// ---------------------------------------------------------------- 9
void criterion_packet_loss_limit() {
    SystemConfig cfg = defaults_cfg();
    cfg.n_antennas = 256;
    cfg.pilot_len = 0;
    cfg.target_eps.assign(cfg.n_users, 0.1);
    TrialPlan plan;
    plan.n_channel_draws = 200;
    plan.master_seed = 5;
    PacketLossResult r =
        packet_loss(cfg, Scheme::mrc, Mode::coherent, 0.8, plan, 0);
    bool ok = std::abs(r.pr_loss.value - 0.1) <= 0.01 &&
              r.outage_infinite.value <= 0.01;
    report(9, "packet loss tends to eps=0.1 at N_b=256 (outage <= 0.01)", ok,
           "pr_loss=" + num(r.pr_loss.value) + ", outage=" +
               num(r.outage_infinite.value));
}

// ---------------------------------------------------------------- 10
void criterion_condition_fraction() {
    bool ok = true;
    std::string detail;
    struct Case {
        Mode mode;
        int nb;
        const char* tag;
    } cases[] = {{Mode::coherent, 10, "coherent N_b=10"},
                 {Mode::noncoherent, 64, "noncoherent N_b=64"}};
    for (const Case& c : cases) {
        SystemConfig cfg = defaults_cfg();
        cfg.n_antennas = c.nb;
        if (c.mode == Mode::coherent) cfg.pilot_len = 0;
        const long draws = 1000;
        std::vector<char> hold(draws, 0);
        parallel_for(draws, [&](long t) {
            ChannelSet ch =
                draw_channels(cfg, c.mode, 700 + std::uint64_t(t));
            hold[t] = evaluate_rate(ch, cfg, Scheme::mrc, c.mode, 0, 0.5)
                          .report.condition_ok
                          ? 1
                          : 0;
        });
        double frac = 0;
        for (char h : hold) frac += h / double(draws);
        ok = ok && frac >= 0.95;
        detail += std::string(detail.empty() ? "" : ", ") + c.tag + ": " +
                  num(100 * frac) + "%";
    }
    report(10, "perturbation <= threshold probability in >= 95% of draws", ok,
           detail);
}

// ---------------------------------------------------------------- 11
void criterion_determinism() {
    SweepSpec spec = parse_sweep_spec(R"({
        "param": "N_b",
        "values": [16, 32],
        "schemes": ["mrc", "zf"],
        "modes": ["noncoherent"],
        "outputs": ["eps", "packet_loss"],
        "n_trials": 2000,
        "n_channel_draws": 50,
        "config": {"K_u": 3, "L": 4}
    })");
    setenv("FBLMIMO_THREADS", "1", 1);
    std::string one = run_sweep_to_string(spec);
    setenv("FBLMIMO_THREADS", "8", 1);
    std::string eight = run_sweep_to_string(spec);
    std::string eight_again = run_sweep_to_string(spec);
    unsetenv("FBLMIMO_THREADS");
    bool ok = one == eight && eight == eight_again && !one.empty();
    report(11, "sweep output byte-identical for 1 and 8 worker threads", ok,
           ok ? num(double(one.size())) + " bytes" : "outputs differ");
}

}  // namespace

int main() {
    criterion_dispersion_asymptote();
    criterion_perturbation_constant();
    criterion_gamma_moment_machinery();
    criterion_info_density_moments();
    criterion_matched_gamma();
    criterion_reduction();
    criterion_rcu_consistency();
    criterion_block_split();
    criterion_packet_loss_limit();
    criterion_condition_fraction();
    criterion_determinism();
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
