#include "fbl/coherent.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fbl/channel.hpp"
#include "fbl/specfun.hpp"

namespace fbl {

namespace {

constexpr double kPi = 3.14159265358979323846;

double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("empty per-block sequence");
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

// 1/sqrt(L) * Gamma(T_c + 3/2) / (sqrt(T_c) Gamma(T_c + 1)) * 4 c1 / sqrt(2 pi)
double perturbation_constant(std::size_t n_blocks, int t_c) {
    double lg = ln_gamma(t_c + 1.5) - ln_gamma(t_c + 1.0);
    return 4.0 * kBerryEsseenC1 / std::sqrt(2.0 * kPi) *
           std::exp(lg - 0.5 * std::log(double(t_c)) -
                    0.5 * std::log(double(n_blocks)));
}

}  // namespace

CapDisp capacity_dispersion(double sinr) {
    if (!(sinr >= 0)) throw std::domain_error("capacity_dispersion: sinr >= 0");
    return {std::log1p(sinr), 2.0 - 2.0 / (1.0 + sinr)};
}

double block_third_abs_coherent(double sinr, int t_c) {
    double v = capacity_dispersion(sinr).dispersion;
    if (v == 0.0) return 0.0;
    double lg = ln_gamma(t_c + 1.5) - ln_gamma(double(t_c));
    return std::exp(std::log(2.0 * std::sqrt(2.0) / std::sqrt(kPi)) +
                    1.5 * std::log(v) + lg);
}

double perturbation_coherent(const std::vector<double>& vs, int t_c) {
    double mean_v = mean_of(vs);
    if (mean_v <= 0.0)
        throw std::domain_error("perturbation: all-zero dispersion sequence");
    double mean_v32 = 0;
    for (double v : vs) {
        if (v < 0) throw std::domain_error("perturbation: negative dispersion");
        mean_v32 += std::pow(v, 1.5);
    }
    mean_v32 /= double(vs.size());
    return perturbation_constant(vs.size(), t_c) * mean_v32 /
           std::pow(mean_v, 1.5);
}

double perturbation_generic(const std::vector<double>& vs,
                            const std::vector<double>& thirds, int t_c) {
    if (vs.size() != thirds.size())
        throw std::invalid_argument("perturbation: length mismatch");
    double mean_v = mean_of(vs);
    if (mean_v <= 0.0)
        throw std::domain_error("perturbation: all-zero dispersion sequence");
    double mean_u = mean_of(thirds);
    return kBerryEsseenC1 / std::sqrt(double(vs.size())) *
           std::pow(double(t_c) * mean_v, -1.5) * mean_u;
}

RateReport threshold_and_rate(double mean_capacity, double mean_dispersion,
                              double perturbation, double msg_nats,
                              int n_blocks, int t_c, double target_eps,
                              double mu) {
    RateReport r;
    r.mean_capacity = mean_capacity;
    r.mean_dispersion = mean_dispersion;
    r.perturbation = perturbation;
    r.mu_used = mu;
    const double n = double(n_blocks) * double(t_c);
    const double gap = msg_nats / n - std::log(mu) / n - mean_capacity;
    double z;
    if (mean_dispersion > 0) {
        z = gap / std::sqrt(mean_dispersion / n);
    } else {
        z = gap < 0 ? -std::numeric_limits<double>::infinity()
                    : (gap > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    r.q_thres = q_func(z);
    r.eps_taylor = q_func(-z);  // equals 1 - q_thres, evaluated without cancellation
    r.eps_beclt = std::min(1.0, r.eps_taylor + perturbation);
    r.condition_ok = perturbation <= r.q_thres;
    r.rate_normal = mean_capacity + std::log(mu) / n -
                    std::sqrt(mean_dispersion / n) * q_inv(target_eps);
    r.rate_band = std::sqrt(mean_dispersion / n) * perturbation;
    return r;
}

double min_blocklength(double eta, double eps, double capacity,
                       double dispersion) {
    if (!(capacity > 0)) throw std::domain_error("min_blocklength: C > 0");
    if (!(eta > 0 && eta < 1))
        throw std::domain_error("min_blocklength: eta in (0,1)");
    double q = q_inv(eps) / (1.0 - eta);
    return std::ceil(q * q * dispersion / (capacity * capacity));
}

AsymptoticReport asymptotics_coherent(PowerScaling scaling, double snr_fixed,
                                      int n_blocks, int t_c) {
    AsymptoticReport a;
    a.perturbation = perturbation_constant(std::size_t(n_blocks), t_c);
    switch (scaling) {
        case PowerScaling::none:
            a.capacity = std::numeric_limits<double>::infinity();
            a.dispersion = 2.0;
            return a;
        case PowerScaling::inverse_Nb: {
            CapDisp cd = capacity_dispersion(snr_fixed);
            a.capacity = cd.capacity;
            a.dispersion = cd.dispersion;
            return a;
        }
        default:
            throw std::invalid_argument(
                "asymptotics_coherent: unsupported power scaling");
    }
}

}  // namespace fbl
