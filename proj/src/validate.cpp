#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fbl/config.hpp"
#include "fbl/coherent.hpp"
#include "fbl/gamma_moments.hpp"
#include "fbl/noncoherent.hpp"
#include "fbl/oracles.hpp"
#include "fbl/rng.hpp"
#include "fbl/simkit.hpp"
#include "fbl/specfun.hpp"

namespace fbl {

namespace {

struct Reporter {
    std::ostream& out;
    bool all_ok = true;
    void check(const std::string& name, bool ok, const std::string& detail) {
        all_ok = all_ok && ok;
        out << (ok ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) out << "  (" << detail << ")";
        out << '\n';
    }
    void rel(const std::string& name, double got, double want, double tol) {
        double err = std::abs(got - want) /
                     std::max(std::abs(want), 1e-300);
        std::ostringstream d;
        d << "got " << got << ", want " << want << ", rel err " << err;
        check(name, err <= tol, d.str());
    }
};

SystemConfig tuned_config(Mode mode) {
    SystemConfig cfg = default_config();
    cfg.n_blocks = 20;
    if (mode == Mode::coherent) cfg.pilot_len = 0;
    return cfg;
}

// Choose ln M so that the Taylor error estimate lands near eps_target for
// the channel set drawn from `seed`.
double tune_msg_nats(const SystemConfig& cfg, Scheme scheme, Mode mode,
                     double eps_target, std::uint64_t seed) {
    ChannelSet ch = draw_channels(cfg, mode, seed);
    EvaluatedRate er = evaluate_rate(ch, cfg, scheme, mode, 0, cfg.mu_value);
    double n = double(cfg.n_blocks) * cfg.coherence;
    return std::log(cfg.mu_value) + n * er.report.mean_capacity -
           q_inv(eps_target) * std::sqrt(n * er.report.mean_dispersion);
}

void specfun_checks(Reporter& r) {
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0, 4.0})
        r.rel("q_func(" + std::to_string(x) + ") vs quadrature", q_func(x),
              oracles::q_func_ref(x), 1e-9);
    r.rel("q_inv(1e-5) vs bisection", q_inv(1e-5), oracles::q_inv_ref(1e-5),
          1e-9);
    for (double x : {0.5, 3.0, 21.5, 120.0})
        r.rel("ln_gamma(" + std::to_string(x) + ") vs Stirling", ln_gamma(x),
              oracles::ln_gamma_ref(x), 1e-12);
    r.rel("2F1(1,40.7,12.3;0.6) vs long-double series",
          gauss_2f1(1, 40.7, 12.3, 0.6),
          oracles::gauss_2f1_ref(1, 40.7, 12.3, 0.6), 1e-10);
    r.rel("K_19.5(5) vs integral", bessel_k(19.5, 5.0),
          oracles::bessel_k_ref(19.5, 5.0), 1e-8);
    // gamma_cdf against quadrature of the density; for shape < 1 the
    // density is singular at 0, so substitute t = u^{1/a} which turns the
    // integrand into the smooth e^{-u^{1/a}} / (a Gamma(a))
    for (double a : {0.7, 4.0, 15.0}) {
        double x = a * 1.3;
        double ref;
        if (a < 1.0) {
            auto g = [a](double u) {
                return std::exp(-std::pow(u, 1.0 / a)) / (a * std::tgamma(a));
            };
            ref = oracles::simpson(g, 0.0, std::pow(x, a), 20000);
        } else {
            auto pdf = [a](double t) {
                return std::exp((a - 1) * std::log(t) - t - ln_gamma(a));
            };
            ref = oracles::simpson(pdf, 1e-12, x, 20000);
        }
        r.rel("gamma_cdf(shape " + std::to_string(a) + ")",
              gamma_cdf(a, 1.0, x), ref, 1e-7);
    }
}

void moment_checks(Reporter& r, bool full) {
    long n_mc = full ? 1000000 : 10000;
    double tol = full ? 0.03 : 0.10;
    // exact chi-square difference moment vs MC
    for (double rho : {0.0, 0.4, 0.8}) {
        CorrChiSqPair p{40, rho};
        r.rel("chi-square |diff|^3, rho=" + std::to_string(rho),
              oracles::mc_abs_moment_chisq_diff(p, 3, n_mc, 11),
              abs_moment_chisq_diff(p, 3), tol);
    }
    // Laplace point: a1=a2=1, b=1, rho=0 -> E|z|^3 = 6
    r.rel("Laplace E|z|^3", abs_moment_gamma_diff({1, 1, 1, 1, 0}, 3), 6.0,
          1e-10);
    // equal-mean m=2 identity: E|x-y|^2 = Var x + Var y - 2 rho sd sd
    for (double a : {1.0, 5.0, 20.0})
        for (double rho : {0.0, 0.3, 0.8}) {
            CorrGammaPair p{a, a / 15.0, a, a / 15.0, rho};
            double want = 2 * 15.0 * 15.0 / a * (1 - rho);
            r.rel("gamma-diff m=2 identity a=" + std::to_string(a) +
                      " rho=" + std::to_string(rho),
                  abs_moment_gamma_diff(p, 2), want, 0.01);
        }
    // m=3 vs MC. The MC oracle's shared-component construction fixes one
    // particular bivariate-Gamma law; at equal shapes with rho > 0 it and
    // the decomposition's model genuinely differ by a few percent, so the
    // grid uses rho = 0 (laws coincide) plus unequal-shape correlated
    // points. End-to-end third moments of the sampled signal chain are
    // checked separately against the analytic values.
    const CorrGammaPair m3_grid[] = {{4.0, 4.0 / 15, 4.0, 4.0 / 15, 0.0},
                                     {15.0, 1.0, 35.0, 35.0 / 15, 0.0},
                                     {4.0, 4.0 / 15, 35.0, 35.0 / 15, 0.2},
                                     {15.0, 1.0, 4.0, 4.0 / 15, 0.2},
                                     {15.0, 1.0, 35.0, 35.0 / 15, 0.2}};
    for (const CorrGammaPair& p : m3_grid) {
        r.rel("gamma-diff m=3 MC a=(" + std::to_string(p.a1) + "," +
                  std::to_string(p.a2) + ") rho=" + std::to_string(p.rho),
              abs_moment_gamma_diff(p, 3),
              oracles::mc_abs_moment_gamma_diff(p, 3, n_mc, 7), tol);
    }
    // case dispatch continuity across the l21 = l11 boundary: for the pair
    // (a1,b1)=(16,1), (a2,b2)=(4,2) the regimes swap at rho* = 0.25
    {
        const double rho_star = 0.25;
        for (double d : {-0.002, 0.002}) {
            CorrGammaPair lo{16.0, 1.0, 4.0, 2.0, rho_star - 0.002};
            CorrGammaPair hi{16.0, 1.0, 4.0, 2.0, rho_star + d};
            r.rel("case boundary continuity d=" + std::to_string(d),
                  abs_moment_gamma_diff(hi, 3), abs_moment_gamma_diff(lo, 3),
                  0.005);
        }
    }
}

void reduction_checks(Reporter& r) {
    // zero estimation error: pilot-estimated pipeline must collapse to the
    // coherent forms with the pilot-overhead factor
    BlockLinkStats st;
    st.sinr = 3.7;
    st.noise_var = 1.0;
    st.err_self = 0;
    st.delta = 0;
    int t_c = 20, tau_c = 5;
    GammaMatch gm = gamma_match(st, t_c, tau_c);
    double t_eff = t_c - tau_c;
    r.rel("zero-error beta_y", gm.beta_y, t_eff, 1e-12);
    r.rel("zero-error beta_n", gm.beta_n, t_eff, 1e-12);
    r.rel("zero-error rho", gm.rho, 1.0 / (1.0 + st.sinr), 1e-12);
    CapDisp nc = capacity_dispersion_noncoherent(st, gm, t_c, tau_c);
    CapDisp co = capacity_dispersion(st.sinr);
    r.rel("zero-error capacity reduction", nc.capacity,
          t_eff / t_c * co.capacity, 1e-12);
    r.rel("zero-error dispersion reduction", nc.dispersion,
          t_eff / t_c * co.dispersion, 1e-12);
}

void perturbation_checks(Reporter& r) {
    // frozen reference constants (high-precision external evaluation)
    std::vector<double> vs(10, 1.3);
    r.rel("equal-V perturbation constant L=10 T_c=20",
          perturbation_coherent(vs, 20), 0.287851098774554, 1e-12);
    GammaMatch gm{15.0, 15.0, 0.0, 0};
    double third = block_third_abs_noncoherent(gm, 20, 5);
    std::vector<double> v1(10, 15.0 * 15.0 / 20.0 * (2.0 / 15.0));
    double u = perturbation_noncoherent(v1, std::vector<double>(10, third), 20);
    // independent equal-mean case, where the Gamma-difference moment is exact
    r.rel("equal-beta perturbation L=10 T_c=20 tau_c=5", u,
          0.289587673520772, 1e-9);
    // generic pipeline reproduces the closed coherent constant
    std::vector<double> thirds(10);
    for (int j = 0; j < 10; ++j)
        thirds[j] = block_third_abs_coherent(std::exp(1.3) - 1, 20);
    std::vector<double> vs2(10, 2.0 - 2.0 * std::exp(-1.3));
    double vs_scale = vs2[0] / 1.3;  // scale-invariance of the closed form
    (void)vs_scale;
    r.rel("generic vs closed coherent perturbation",
          perturbation_generic(vs2, thirds, 20),
          perturbation_coherent(vs2, 20), 1e-9);
}

void info_density_checks(Reporter& r, bool full) {
    long n_draws = full ? 100000 : 10000;
    SystemConfig cfg = default_config();
    for (Mode mode : {Mode::coherent, Mode::noncoherent}) {
        if (mode == Mode::coherent) cfg.pilot_len = 0;
        else cfg.pilot_len = 5;
        for (Scheme scheme : {Scheme::mrc, Scheme::zf}) {
            ChannelSet ch = draw_channels(cfg, mode, 42);
            auto samples = block_info_density_draws(ch, cfg, scheme, mode, 0,
                                                    0, n_draws, 43);
            double mean = 0;
            for (const auto& s : samples) mean += s.i;
            mean /= double(n_draws);
            double var = 0, third = 0;
            for (const auto& s : samples) {
                double d = s.i - mean;
                var += d * d;
                third += std::abs(d * d * d);
            }
            var /= double(n_draws);
            third /= double(n_draws);
            BlockLinkStats st = link_stats(ch, cfg, scheme, mode, 0, 0);
            double want_mean, want_var, want_third;
            if (mode == Mode::coherent) {
                CapDisp cd = capacity_dispersion(st.sinr);
                want_mean = cfg.coherence * cd.capacity;
                want_var = cfg.coherence * cd.dispersion;
                want_third = block_third_abs_coherent(st.sinr, cfg.coherence);
            } else {
                GammaMatch gm = gamma_match(st, cfg.coherence, cfg.pilot_len);
                CapDisp cd = capacity_dispersion_noncoherent(
                    st, gm, cfg.coherence, cfg.pilot_len);
                want_mean = cfg.coherence * cd.capacity;
                want_var = cfg.coherence * cd.dispersion;
                want_third =
                    block_third_abs_noncoherent(gm, cfg.coherence,
                                                cfg.pilot_len);
            }
            std::string tag = std::string(" (") +
                              (scheme == Scheme::mrc ? "mrc" : "zf") + "/" +
                              (mode == Mode::coherent ? "coherent"
                                                      : "noncoherent") +
                              ")";
            double se_mean = std::sqrt(want_var / double(n_draws));
            r.check("info density mean" + tag,
                    std::abs(mean - want_mean) <= 3 * se_mean,
                    "got " + format_real(mean) + ", want " +
                        format_real(want_mean));
            r.rel("info density variance" + tag, var, want_var,
                  full ? 0.05 : 0.12);
            r.rel("info density third abs moment" + tag, third, want_third,
                  full ? 0.05 : 0.15);
        }
    }
}

void rcu_checks(Reporter& r) {
    for (Mode mode : {Mode::coherent, Mode::noncoherent}) {
        for (Scheme scheme : {Scheme::mrc, Scheme::zf}) {
            SystemConfig cfg = tuned_config(mode);
            double b = tune_msg_nats(cfg, scheme, mode, 0.05, 77);
            cfg.msg_nats.assign(cfg.n_users, b);
            ChannelSet ch = draw_channels(cfg, mode, 77);
            EvaluatedRate er =
                evaluate_rate(ch, cfg, scheme, mode, 0, cfg.mu_value);
            TrialPlan plan;
            plan.master_seed = 77;
            plan.n_signal_draws = 10000;
            plan.averaging = Averaging::conditional;
            Estimate e = rcu_error_estimate(cfg, scheme, mode, plan, 0);
            std::string tag = std::string(" (") +
                              (scheme == Scheme::mrc ? "mrc" : "zf") + "/" +
                              (mode == Mode::coherent ? "coherent"
                                                      : "noncoherent") +
                              ")";
            double se = std::max(e.std_err, 1e-12);
            r.check("rcu vs Taylor" + tag,
                    std::abs(e.value - er.report.eps_taylor) <= 3 * se,
                    "rcu " + format_real(e.value) + ", taylor " +
                        format_real(er.report.eps_taylor) + ", se " +
                        format_real(se));
            r.check("rcu below BE-CLT bound" + tag,
                    e.value <= er.report.eps_beclt + 3 * se,
                    "rcu " + format_real(e.value) + ", beclt " +
                        format_real(er.report.eps_beclt));
        }
    }
}

void ks_checks(Reporter& r) {
    SystemConfig cfg = default_config();
    cfg.coherence = 40;
    cfg.tx_power_data.assign(cfg.n_users, dbm_to_mw(40.0));
    cfg.tx_power_pilot = cfg.tx_power_data;
    ChannelSet ch = draw_channels(cfg, Mode::noncoherent, 5);
    double t_eff = cfg.coherence - cfg.pilot_len;
    for (Scheme scheme : {Scheme::mrc, Scheme::zf}) {
        NormCdfData d = empirical_norm_cdfs(ch, cfg, scheme, 0, 0, 20000, 6);
        BlockLinkStats st =
            link_stats(ch, cfg, scheme, Mode::noncoherent, 0, 0);
        GammaMatch gm = gamma_match(st, cfg.coherence, cfg.pilot_len);
        double ks_y =
            ks_distance_to_gamma(d.v_y, gm.beta_y, gm.beta_y / t_eff);
        double ks_n =
            ks_distance_to_gamma(d.v_n, gm.beta_n, gm.beta_n / t_eff);
        std::string tag = scheme == Scheme::mrc ? " (mrc)" : " (zf)";
        r.check("matched-Gamma KS v_y" + tag, ks_y < 0.05,
                "ks " + format_real(ks_y));
        r.check("matched-Gamma KS v_n" + tag, ks_n < 0.05,
                "ks " + format_real(ks_n));
        double se_corr = (1 - gm.rho * gm.rho) / std::sqrt(20000.0);
        r.check("empirical corr vs model" + tag,
                std::abs(d.corr - gm.rho) <= 3 * se_corr,
                "corr " + format_real(d.corr) + ", model " +
                    format_real(gm.rho));
    }
}

void determinism_check(Reporter& r) {
    SweepSpec spec;
    spec.param = "N_b";
    spec.values = {8, 16};
    spec.base = default_config();
    spec.base.pilot_len = 5;
    spec.schemes = {Scheme::mrc};
    spec.modes = {Mode::noncoherent};
    spec.outputs = {"eps"};
    spec.n_trials = 500;
    spec.seed = 3;

    auto with_threads = [&](const char* n) {
        setenv("FBLMIMO_THREADS", n, 1);
        std::string s = run_sweep_to_string(spec);
        unsetenv("FBLMIMO_THREADS");
        return s;
    };
    std::string one = with_threads("1"), eight = with_threads("8");
    r.check("sweep determinism across thread counts", one == eight,
            one == eight ? "byte-identical" : "outputs differ");
}

}  // namespace

bool run_validate(const std::string& level, std::ostream& out) {
    if (level != "quick" && level != "full")
        throw ConfigError("validate level must be quick|full");
    bool full = level == "full";
    Reporter r{out};
    specfun_checks(r);
    moment_checks(r, full);
    reduction_checks(r);
    perturbation_checks(r);
    info_density_checks(r, full);
    determinism_check(r);
    if (full) {
        rcu_checks(r);
        ks_checks(r);
    }
    out << (r.all_ok ? "ALL CHECKS PASSED\n" : "CHECK FAILURES PRESENT\n");
    return r.all_ok;
}

}  // namespace fbl
