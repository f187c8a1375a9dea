#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fbl {

enum class Scheme { mrc, zf };
enum class Mode { coherent, noncoherent };
enum class PowerScaling { none, inverse_Nb, inverse_sqrt_Nb };
enum class MuPolicy { fixed, uniform };

/// All scalar system parameters. Powers and variances are linear mW;
/// under a power scaling law tx_power_* holds the fixed budget E_k and the
/// applied per-antenna-count power comes from data_power()/pilot_power().
struct SystemConfig {
    int n_antennas = 20;   // N_b
    int n_users = 5;       // K_u
    int n_blocks = 10;     // L
    int coherence = 20;    // T_c, symbols per block
    int pilot_len = 0;     // tau_c, 0 in coherent operation

    std::vector<double> tx_power_data;   // P_k (or E_k under scaling)
    std::vector<double> tx_power_pilot;  // P_k^c (or E_k^c)
    double noise_data = 1e-10;           // sigma_n^2, mW (-100 dBm)
    double noise_pilot = 1e-10;          // sigma_c^2, mW
    std::vector<double> large_scale;     // gamma_k^2
    std::vector<double> msg_nats;        // ln M_k
    std::vector<double> target_eps;      // eps_k

    MuPolicy mu_policy = MuPolicy::fixed;
    double mu_value = 0.5;
    PowerScaling power_scaling = PowerScaling::none;

    double data_power(int k) const;
    double pilot_power(int k) const;
    /// Symbols per block left for data: T_c - tau_c (tau_c = 0 coherent).
    int data_len(Mode mode) const {
        return mode == Mode::coherent ? coherence : coherence - pilot_len;
    }
    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate(Mode mode) const;
};

/// Per-block channel realizations. Coherent operation fills only h;
/// non-coherent fills the estimate/error split with h = h_hat + h_err and
/// the estimated gains phi_k^2.
struct ChannelSet {
    Mode mode = Mode::coherent;
    std::vector<Eigen::MatrixXcd> h;      // L matrices, N_b x K_u
    std::vector<Eigen::MatrixXcd> h_hat;
    std::vector<Eigen::MatrixXcd> h_err;
    std::vector<double> est_gain;         // phi_k^2 per user
};

/// Post-combining scalar description of one (user, block) link.
struct BlockLinkStats {
    double gain = 0;       // effective scalar channel amplitude
    double noise_var = 0;  // effective-noise variance (mW)
    double sinr = 0;
    double delta = 0;      // fourth-order error statistic (mW^2)
    double err_self = 0;   // P_k (gamma_k^2 - phi_k^2) (mW)
};

double dbm_to_mw(double dbm);

/// Large-scale gain from distance (m) and shadow fading (dB):
/// 10^((-35.3 - 37.6 log10 d + shadow)/10).
double pathloss(double d_m, double shadow_db = 0.0);

/// MMSE estimated channel gain phi_k^2 = gamma^4 / (gamma^2 + sc^2/(tau P^c)).
double mmse_gain(const SystemConfig& cfg, int k);

/// Deterministic given (cfg, mode, seed); per-(block,user) substreams.
ChannelSet draw_channels(const SystemConfig& cfg, Mode mode,
                         std::uint64_t seed);

BlockLinkStats mrc_coherent_stats(const ChannelSet& ch,
                                  const SystemConfig& cfg, int k, int j);
BlockLinkStats zf_coherent_stats(const ChannelSet& ch, const SystemConfig& cfg,
                                 int k, int j);
BlockLinkStats mrc_noncoherent_stats(const ChannelSet& ch,
                                     const SystemConfig& cfg, int k, int j);
BlockLinkStats zf_noncoherent_stats(const ChannelSet& ch,
                                    const SystemConfig& cfg, int k, int j);

BlockLinkStats link_stats(const ChannelSet& ch, const SystemConfig& cfg,
                          Scheme scheme, Mode mode, int k, int j);

/// Orthogonal-projection part of the ZF combiner: the component of h_k
/// orthogonal to the span of the other users' columns. Throws
/// std::runtime_error when the interferer matrix is rank deficient.
Eigen::VectorXcd zf_projected_channel(const Eigen::MatrixXcd& columns, int k);

}  // namespace fbl
