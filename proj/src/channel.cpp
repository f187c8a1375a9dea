#include "fbl/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "fbl/rng.hpp"

namespace fbl {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double pathloss(double d_m, double shadow_db) {
    if (!(d_m > 0.0)) throw std::domain_error("pathloss: d > 0 required");
    return std::pow(10.0, (-35.3 - 37.6 * std::log10(d_m) + shadow_db) / 10.0);
}

double SystemConfig::data_power(int k) const {
    double p = tx_power_data.at(k);
    switch (power_scaling) {
        case PowerScaling::none: return p;
        case PowerScaling::inverse_Nb: return p / n_antennas;
        case PowerScaling::inverse_sqrt_Nb: return p / std::sqrt(double(n_antennas));
    }
    return p;
}

double SystemConfig::pilot_power(int k) const {
    double p = tx_power_pilot.at(k);
    // only the 1/sqrt(N_b) law scales the pilot phase
    if (power_scaling == PowerScaling::inverse_sqrt_Nb)
        return p / std::sqrt(double(n_antennas));
    return p;
}

void SystemConfig::validate(Mode mode) const {
    auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
    if (n_antennas < 1 || n_users < 1 || n_blocks < 1 || coherence < 1)
        fail("config: counts must be positive");
    if (pilot_len < 0 || pilot_len >= coherence)
        fail("config: pilot_len must satisfy 0 <= tau_c < T_c");
    if (mode == Mode::noncoherent && pilot_len < n_users)
        fail("config: tau_c >= K_u required for orthogonal pilots");
    auto per_user = [&](const std::vector<double>& v, const char* name) {
        if (static_cast<int>(v.size()) != n_users)
            throw std::invalid_argument(std::string("config: ") + name +
                                        " needs one entry per user");
    };
    per_user(tx_power_data, "tx_power_data");
    per_user(large_scale, "large_scale");
    per_user(msg_nats, "msg_nats");
    per_user(target_eps, "target_eps");
    if (mode == Mode::noncoherent) per_user(tx_power_pilot, "tx_power_pilot");
    for (double p : tx_power_data)
        if (!(p > 0)) fail("config: powers must be positive");
    for (double g : large_scale)
        if (!(g > 0)) fail("config: large_scale must be positive");
    for (double e : target_eps)
        if (!(e > 0 && e < 1)) fail("config: target_eps in (0,1)");
    if (!(noise_data > 0) || !(noise_pilot > 0))
        fail("config: noise variances must be positive");
    if (!(mu_value > 0 && mu_value < 1)) fail("config: mu in (0,1)");
}

double mmse_gain(const SystemConfig& cfg, int k) {
    double g2 = cfg.large_scale.at(k);
    double t = cfg.noise_pilot / (cfg.pilot_len * cfg.pilot_power(k));
    return g2 * g2 / (g2 + t);
}

ChannelSet draw_channels(const SystemConfig& cfg, Mode mode,
                         std::uint64_t seed) {
    ChannelSet ch;
    ch.mode = mode;
    const int L = cfg.n_blocks, Nb = cfg.n_antennas, Ku = cfg.n_users;
    ch.h.resize(L);
    if (mode == Mode::noncoherent) {
        ch.h_hat.resize(L);
        ch.h_err.resize(L);
        ch.est_gain.resize(Ku);
        for (int k = 0; k < Ku; ++k) ch.est_gain[k] = mmse_gain(cfg, k);
    }
    for (int j = 0; j < L; ++j) {
        ch.h[j].resize(Nb, Ku);
        if (mode == Mode::noncoherent) {
            ch.h_hat[j].resize(Nb, Ku);
            ch.h_err[j].resize(Nb, Ku);
        }
        for (int k = 0; k < Ku; ++k) {
            double g2 = cfg.large_scale[k];
            if (mode == Mode::coherent) {
                Rng rng(seed, kTagChannel, j, k);
                for (int i = 0; i < Nb; ++i)
                    ch.h[j](i, k) = rng.cnormal(g2);
            } else {
                double phi2 = ch.est_gain[k];
                Rng rng_hat(seed, kTagChannel, j, k);
                Rng rng_err(seed, kTagChannelError, j, k);
                for (int i = 0; i < Nb; ++i) {
                    ch.h_hat[j](i, k) = rng_hat.cnormal(phi2);
                    ch.h_err[j](i, k) = rng_err.cnormal(g2 - phi2);
                    ch.h[j](i, k) = ch.h_hat[j](i, k) + ch.h_err[j](i, k);
                }
            }
        }
    }
    return ch;
}

Eigen::VectorXcd zf_projected_channel(const Eigen::MatrixXcd& columns, int k) {
    const int Ku = static_cast<int>(columns.cols());
    Eigen::VectorXcd hk = columns.col(k);
    if (Ku == 1) return hk;
    Eigen::MatrixXcd Hk(columns.rows(), Ku - 1);
    for (int m = 0, c = 0; m < Ku; ++m)
        if (m != k) Hk.col(c++) = columns.col(m);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(Hk);
    qr.setThreshold(Eigen::NumTraits<double>::epsilon() * columns.rows());
    if (qr.rank() < Ku - 1)
        throw std::runtime_error("zf: interferer matrix is rank deficient");
    Eigen::MatrixXcd Q = qr.householderQ() *
                         Eigen::MatrixXcd::Identity(columns.rows(), Ku - 1);
    return hk - Q * (Q.adjoint() * hk);
}

BlockLinkStats mrc_coherent_stats(const ChannelSet& ch,
                                  const SystemConfig& cfg, int k, int j) {
    const Eigen::MatrixXcd& H = ch.h.at(j);
    double nk2 = H.col(k).squaredNorm();
    if (nk2 <= 0.0)
        throw std::runtime_error("mrc: degenerate zero channel");
    BlockLinkStats s;
    s.gain = std::sqrt(nk2);
    double interf = 0;
    for (int m = 0; m < cfg.n_users; ++m) {
        if (m == k) continue;
        interf += cfg.data_power(m) *
                  std::norm(H.col(k).dot(H.col(m))) / nk2;
    }
    s.noise_var = interf + cfg.noise_data;
    s.sinr = cfg.data_power(k) * nk2 / s.noise_var;
    return s;
}

BlockLinkStats zf_coherent_stats(const ChannelSet& ch, const SystemConfig& cfg,
                                 int k, int j) {
    if (cfg.n_users > cfg.n_antennas)
        throw std::runtime_error("zf: requires K_u <= N_b");
    Eigen::VectorXcd p = zf_projected_channel(ch.h.at(j), k);
    BlockLinkStats s;
    s.gain = p.norm();
    s.noise_var = cfg.noise_data;
    s.sinr = cfg.data_power(k) * p.squaredNorm() / cfg.noise_data;
    return s;
}

BlockLinkStats mrc_noncoherent_stats(const ChannelSet& ch,
                                     const SystemConfig& cfg, int k, int j) {
    const Eigen::MatrixXcd& Hh = ch.h_hat.at(j);
    double nk2 = Hh.col(k).squaredNorm();
    if (nk2 <= 0.0)
        throw std::runtime_error("mrc: degenerate zero channel estimate");
    BlockLinkStats s;
    s.gain = std::sqrt(nk2);
    double err_sum = 0, interf = 0, delta_cross = 0;
    for (int m = 0; m < cfg.n_users; ++m) {
        double em = cfg.large_scale[m] - ch.est_gain.at(m);
        double pm = cfg.data_power(m);
        err_sum += pm * em;
        if (m != k) {
            double c2 = std::norm(Hh.col(k).dot(Hh.col(m))) / nk2;
            interf += pm * c2;
            delta_cross += 2.0 * pm * pm * em * c2;
        }
    }
    s.noise_var = err_sum + interf + cfg.noise_data;
    s.sinr = cfg.data_power(k) * nk2 / s.noise_var;
    double ek = cfg.large_scale[k] - ch.est_gain.at(k);
    s.err_self = cfg.data_power(k) * ek;
    double delta_self = 0;
    for (int m = 0; m < cfg.n_users; ++m) {
        double em = cfg.large_scale[m] - ch.est_gain.at(m);
        double pm = cfg.data_power(m);
        delta_self += pm * pm * em * em;
    }
    s.delta = delta_self + delta_cross;
    return s;
}

BlockLinkStats zf_noncoherent_stats(const ChannelSet& ch,
                                    const SystemConfig& cfg, int k, int j) {
    if (cfg.n_users > cfg.n_antennas)
        throw std::runtime_error("zf: requires K_u <= N_b");
    Eigen::VectorXcd p = zf_projected_channel(ch.h_hat.at(j), k);
    BlockLinkStats s;
    s.gain = p.norm();
    double err_sum = 0, delta = 0;
    for (int m = 0; m < cfg.n_users; ++m) {
        double em = cfg.large_scale[m] - ch.est_gain.at(m);
        double pm = cfg.data_power(m);
        err_sum += pm * em;
        delta += pm * pm * em * em;
    }
    s.noise_var = err_sum + cfg.noise_data;
    s.sinr = cfg.data_power(k) * p.squaredNorm() / s.noise_var;
    s.delta = delta;
    s.err_self = cfg.data_power(k) * (cfg.large_scale[k] - ch.est_gain.at(k));
    return s;
}

BlockLinkStats link_stats(const ChannelSet& ch, const SystemConfig& cfg,
                          Scheme scheme, Mode mode, int k, int j) {
    if (mode == Mode::coherent)
        return scheme == Scheme::mrc ? mrc_coherent_stats(ch, cfg, k, j)
                                     : zf_coherent_stats(ch, cfg, k, j);
    return scheme == Scheme::mrc ? mrc_noncoherent_stats(ch, cfg, k, j)
                                 : zf_noncoherent_stats(ch, cfg, k, j);
}

}  // namespace fbl
