#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "fbl/channel.hpp"
#include "fbl/rng.hpp"

namespace fbl {

enum class Averaging { conditional, averaged };

struct TrialPlan {
    long n_channel_draws = 1;
    long n_signal_draws = 10000;
    std::uint64_t master_seed = 1;
    MuPolicy mu_policy = MuPolicy::fixed;
    double mu_value = 0.5;
    Averaging averaging = Averaging::conditional;
};

struct Estimate {
    double value = 0;
    double std_err = 0;
    long n_trials = 0;
};

struct InfoDensitySample {
    double i = 0;    // per-block information density, nats
    double v_y = 0;  // normalized output squared norm
    double v_n = 0;  // normalized effective-noise squared norm
};

// Scalarized single-block signal chain: everything needed to draw information
// densities for user k at block j given a channel realization.
struct BlockSampler {
    int t_len = 0;        // data symbols per block
    double gain = 0;      // effective channel scalar
    double noise_var = 0;
    double sinr = 0;
    double pk = 0;        // intended user's data power
    double sigma_n2 = 0;  // thermal noise variance
    int user = 0;
    std::vector<std::complex<double>> cross;  // fixed interference scalars
    std::vector<double> cross_power;          // data powers matching `cross`
    std::vector<double> err_var;  // per-user estimation-error variances
                                  // (empty in the pilot-free case)
    double self_err_var = 0;
    double self_power = 0;

    InfoDensitySample draw(Rng& rng) const;
};

BlockSampler make_block_sampler(const ChannelSet& ch, const SystemConfig& cfg,
                                Scheme scheme, Mode mode, int k, int j);

// Convenience: n independent information-density draws at one block.
std::vector<InfoDensitySample> block_info_density_draws(
    const ChannelSet& ch, const SystemConfig& cfg, Scheme scheme, Mode mode,
    int k, int j, long n_draws, std::uint64_t seed);

// Fraction of trials where the summed information density falls below
// ln(M_k - 1) - ln(mu); binomial standard error.
Estimate rcu_error_estimate(const SystemConfig& cfg, Scheme scheme, Mode mode,
                            const TrialPlan& plan, int k = 0);

struct NormCdfData {
    std::vector<double> v_y, v_n;  // raw samples
    double corr = 0;
    double mean_y = 0, mean_n = 0;
};

NormCdfData empirical_norm_cdfs(const ChannelSet& ch, const SystemConfig& cfg,
                                Scheme scheme, int k, int j, long n_draws,
                                std::uint64_t seed);

// Kolmogorov-Smirnov distance between a sample and Gamma(shape, rate).
double ks_distance_to_gamma(std::vector<double> samples, double shape,
                            double rate);

struct PacketLossResult {
    Estimate pr_loss;
    Estimate outage_infinite;  // infinite-blocklength baseline
};

PacketLossResult packet_loss(const SystemConfig& cfg, Scheme scheme, Mode mode,
                             double r_thres, const TrialPlan& plan, int k = 0);

// Worker-thread plumbing. Results must not depend on the thread count: work
// items write to disjoint slots and reductions run in index order.
int default_thread_count();
void parallel_for(long n, const std::function<void(long)>& body,
                  int n_threads = 0);

}  // namespace fbl
