#include "fbl/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fbl/noncoherent.hpp"
#include "fbl/specfun.hpp"

namespace fbl {

namespace {

// ln(M - 1) from b = ln M, stable for large b.
double ln_m_minus_one(double msg_nats) {
    return msg_nats + std::log1p(-std::exp(-msg_nats));
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t tag,
                         std::uint64_t idx) {
    Rng r(master, tag, idx, ~std::uint64_t{0});
    return r.next_u64();
}

}  // namespace

InfoDensitySample BlockSampler::draw(Rng& rng) const {
    std::vector<std::complex<double>> u(err_var.size());
    for (std::size_t m = 0; m < err_var.size(); ++m)
        u[m] = rng.cnormal(err_var[m]);
    std::complex<double> u_self =
        self_err_var > 0 ? rng.cnormal(self_err_var) : std::complex<double>{};
    double y2 = 0, n2 = 0;
    for (int t = 0; t < t_len; ++t) {
        std::complex<double> xk = rng.cnormal(self_power);
        std::complex<double> noise = rng.cnormal(sigma_n2);
        for (std::size_t m = 0; m < cross.size(); ++m) {
            std::complex<double> coef = cross[m];
            if (!err_var.empty()) coef += u[m];
            noise += coef * rng.cnormal(cross_power[m]);
        }
        noise += u_self * xk;
        std::complex<double> y = gain * xk + noise;
        y2 += std::norm(y);
        n2 += std::norm(noise);
    }
    InfoDensitySample s;
    s.v_y = y2 / (noise_var + pk * gain * gain);
    s.v_n = n2 / noise_var;
    s.i = t_len * std::log1p(sinr) + s.v_y - s.v_n;
    return s;
}

BlockSampler make_block_sampler(const ChannelSet& ch, const SystemConfig& cfg,
                                Scheme scheme, Mode mode, int k, int j) {
    BlockSampler bs;
    bs.t_len = cfg.data_len(mode);
    bs.user = k;
    bs.sigma_n2 = cfg.noise_data;
    bs.pk = cfg.data_power(k);
    bs.self_power = bs.pk;
    BlockLinkStats st = link_stats(ch, cfg, scheme, mode, k, j);
    bs.gain = st.gain;
    bs.noise_var = st.noise_var;
    bs.sinr = st.sinr;
    if (mode == Mode::coherent) {
        if (scheme == Scheme::mrc) {
            const Eigen::MatrixXcd& H = ch.h.at(j);
            Eigen::VectorXcd a = H.col(k) / H.col(k).norm();
            for (int m = 0; m < cfg.n_users; ++m) {
                if (m == k) continue;
                bs.cross.push_back(a.dot(H.col(m)));
                bs.cross_power.push_back(cfg.data_power(m));
            }
        }
        // coherent ZF: interference nulled exactly; noise is thermal only
        return bs;
    }
    bs.self_err_var = cfg.large_scale[k] - ch.est_gain.at(k);
    if (scheme == Scheme::mrc) {
        const Eigen::MatrixXcd& Hh = ch.h_hat.at(j);
        Eigen::VectorXcd a = Hh.col(k) / Hh.col(k).norm();
        for (int m = 0; m < cfg.n_users; ++m) {
            if (m == k) continue;
            bs.cross.push_back(a.dot(Hh.col(m)));
            bs.cross_power.push_back(cfg.data_power(m));
            bs.err_var.push_back(cfg.large_scale[m] - ch.est_gain.at(m));
        }
    } else {
        for (int m = 0; m < cfg.n_users; ++m) {
            if (m == k) continue;
            bs.cross.emplace_back(0.0, 0.0);
            bs.cross_power.push_back(cfg.data_power(m));
            bs.err_var.push_back(cfg.large_scale[m] - ch.est_gain.at(m));
        }
    }
    return bs;
}

std::vector<InfoDensitySample> block_info_density_draws(
    const ChannelSet& ch, const SystemConfig& cfg, Scheme scheme, Mode mode,
    int k, int j, long n_draws, std::uint64_t seed) {
    BlockSampler bs = make_block_sampler(ch, cfg, scheme, mode, k, j);
    std::vector<InfoDensitySample> out(n_draws);
    parallel_for(n_draws, [&](long t) {
        Rng rng(seed, kTagSignal, std::uint64_t(t), std::uint64_t(j));
        out[t] = bs.draw(rng);
    });
    return out;
}

Estimate rcu_error_estimate(const SystemConfig& cfg, Scheme scheme, Mode mode,
                            const TrialPlan& plan, int k) {
    cfg.validate(mode);
    const long n = plan.n_signal_draws;
    if (n < 1) throw std::invalid_argument("rcu: trial count >= 1");
    const double ln_m1 = ln_m_minus_one(cfg.msg_nats.at(k));

    ChannelSet shared;
    std::vector<BlockSampler> shared_bs;
    if (plan.averaging == Averaging::conditional) {
        shared = draw_channels(cfg, mode, plan.master_seed);
        for (int j = 0; j < cfg.n_blocks; ++j)
            shared_bs.push_back(
                make_block_sampler(shared, cfg, scheme, mode, k, j));
    }

    std::vector<char> fail(n, 0);
    parallel_for(n, [&](long t) {
        double mu = plan.mu_value;
        if (plan.mu_policy == MuPolicy::uniform) {
            Rng mr(plan.master_seed, kTagMu, std::uint64_t(t), 0);
            mu = mr.uniform();
        }
        double total = 0;
        Rng rng(plan.master_seed, kTagSignal, std::uint64_t(t), 0);
        if (plan.averaging == Averaging::conditional) {
            for (const BlockSampler& bs : shared_bs) total += bs.draw(rng).i;
        } else {
            ChannelSet ch = draw_channels(
                cfg, mode, child_seed(plan.master_seed, kTagTrial,
                                      std::uint64_t(t)));
            for (int j = 0; j < cfg.n_blocks; ++j) {
                BlockSampler bs = make_block_sampler(ch, cfg, scheme, mode, k, j);
                total += bs.draw(rng).i;
            }
        }
        fail[t] = total <= ln_m1 - std::log(mu) ? 1 : 0;
    });
    long n_fail = 0;
    for (char f : fail) n_fail += f;
    Estimate e;
    e.n_trials = n;
    e.value = double(n_fail) / double(n);
    e.std_err = std::sqrt(std::max(e.value * (1.0 - e.value), 0.0) / double(n));
    return e;
}

NormCdfData empirical_norm_cdfs(const ChannelSet& ch, const SystemConfig& cfg,
                                Scheme scheme, int k, int j, long n_draws,
                                std::uint64_t seed) {
    if (ch.mode != Mode::noncoherent)
        throw std::invalid_argument("empirical_norm_cdfs: pilot-estimated mode only");
    auto samples = block_info_density_draws(ch, cfg, scheme, Mode::noncoherent,
                                            k, j, n_draws, seed);
    NormCdfData d;
    d.v_y.reserve(samples.size());
    d.v_n.reserve(samples.size());
    for (const auto& s : samples) {
        d.v_y.push_back(s.v_y);
        d.v_n.push_back(s.v_n);
    }
    double sy = 0, sn = 0;
    for (std::size_t t = 0; t < d.v_y.size(); ++t) {
        sy += d.v_y[t];
        sn += d.v_n[t];
    }
    d.mean_y = sy / double(n_draws);
    d.mean_n = sn / double(n_draws);
    double cyy = 0, cnn = 0, cyn = 0;
    for (std::size_t t = 0; t < d.v_y.size(); ++t) {
        double dy = d.v_y[t] - d.mean_y, dn = d.v_n[t] - d.mean_n;
        cyy += dy * dy;
        cnn += dn * dn;
        cyn += dy * dn;
    }
    d.corr = cyn / std::sqrt(cyy * cnn);
    return d;
}

double ks_distance_to_gamma(std::vector<double> samples, double shape,
                            double rate) {
    if (samples.empty()) throw std::invalid_argument("ks: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double ks = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = gamma_cdf(shape, rate, samples[i]);
        ks = std::max(ks, std::abs(f - double(i + 1) / n));
        ks = std::max(ks, std::abs(f - double(i) / n));
    }
    return ks;
}

PacketLossResult packet_loss(const SystemConfig& cfg, Scheme scheme, Mode mode,
                             double r_thres, const TrialPlan& plan, int k) {
    cfg.validate(mode);
    const long n = plan.n_channel_draws;
    if (n < 1) throw std::invalid_argument("packet_loss: draw count >= 1");
    const double eps = cfg.target_eps.at(k);
    std::vector<double> loss(n, 0);
    std::vector<char> out_inf(n, 0);
    parallel_for(n, [&](long t) {
        double mu = plan.mu_value;
        if (plan.mu_policy == MuPolicy::uniform) {
            Rng mr(plan.master_seed, kTagMu, std::uint64_t(t), 0);
            mu = mr.uniform();
        }
        ChannelSet ch = draw_channels(
            cfg, mode, child_seed(plan.master_seed, kTagTrial, std::uint64_t(t)));
        EvaluatedRate er = evaluate_rate(ch, cfg, scheme, mode, k, mu);
        loss[t] = er.report.rate_normal < r_thres ? 1.0 : eps;
        out_inf[t] = er.report.mean_capacity < r_thres ? 1 : 0;
    });
    double sl = 0, so = 0;
    for (long t = 0; t < n; ++t) {
        sl += loss[t];
        so += out_inf[t];
    }
    PacketLossResult r;
    r.pr_loss.n_trials = n;
    r.pr_loss.value = sl / double(n);
    double var = 0;
    for (long t = 0; t < n; ++t)
        var += (loss[t] - r.pr_loss.value) * (loss[t] - r.pr_loss.value);
    r.pr_loss.std_err = std::sqrt(var / double(n) / double(n));
    r.outage_infinite.n_trials = n;
    r.outage_infinite.value = so / double(n);
    r.outage_infinite.std_err = std::sqrt(
        std::max(r.outage_infinite.value * (1 - r.outage_infinite.value), 0.0) /
        double(n));
    return r;
}

int default_thread_count() {
    if (const char* env = std::getenv("FBLMIMO_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc >= 1 ? int(hc) : 1;
}

void parallel_for(long n, const std::function<void(long)>& body,
                  int n_threads) {
    if (n <= 0) return;
    int nt = n_threads >= 1 ? n_threads : default_thread_count();
    nt = int(std::min<long>(nt, n));
    if (nt == 1) {
        for (long t = 0; t < n; ++t) body(t);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::exception_ptr err;
    std::mutex err_mu;
    for (int w = 0; w < nt; ++w) {
        long lo = n * w / nt, hi = n * (w + 1) / nt;
        pool.emplace_back([&, lo, hi] {
            try {
                for (long t = lo; t < hi; ++t) body(t);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace fbl
