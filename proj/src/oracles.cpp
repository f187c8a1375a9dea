#include "fbl/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "fbl/rng.hpp"

namespace fbl::oracles {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int n_panels) {
    if (n_panels < 1) throw std::invalid_argument("simpson: panels >= 1");
    const double h = (b - a) / (2.0 * n_panels);
    double s = f(a) + f(b);
    for (int i = 1; i < 2 * n_panels; ++i)
        s += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double ln_gamma_ref(double x) {
    if (!(x > 0)) throw std::domain_error("ln_gamma_ref: x > 0");
    double shift = 0;
    while (x < 12.0) {
        shift -= std::log(x);
        x += 1.0;
    }
    // Stirling series with Bernoulli terms up to x^-9
    const double c[5] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680,
                         1.0 / 1188};
    double inv = 1.0 / x, inv2 = inv * inv, series = 0, p = inv;
    for (double ci : c) {
        series += ci * p;
        p *= inv2;
    }
    return shift + (x - 0.5) * std::log(x) - x +
           0.5 * std::log(2.0 * kPi) + series;
}

double q_func_ref(double x) {
    if (x < 0) return 1.0 - q_func_ref(-x);
    const double hi = x + 40.0;
    auto pdf = [](double t) {
        return std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi);
    };
    return simpson(pdf, x, hi, 20000);
}

double q_inv_ref(double p) {
    if (!(p > 0 && p < 1)) throw std::domain_error("q_inv_ref: p in (0,1)");
    double lo = -40, hi = 40;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (q_func_ref(mid) > p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double bessel_k_ref(double nu, double x) {
    if (!(x > 0)) throw std::domain_error("bessel_k_ref: x > 0");
    nu = std::abs(nu);
    // integrand decays like exp(-x cosh t - ...); find a safe upper limit
    double t_max = 2.0;
    while (x * std::cosh(t_max) - nu * t_max < 750.0 && t_max < 700.0)
        t_max += 1.0;
    auto f = [&](double t) {
        double e = -x * std::cosh(t) + std::log(std::cosh(nu * t));
        return e < -745.0 ? 0.0 : std::exp(e);
    };
    return simpson(f, 0.0, t_max, 40000);
}

double gauss_2f1_ref(double a, double b, double c, double z) {
    long double term = 1.0L, sum = 1.0L;
    for (int n = 0; n < 4000000; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0L)) * (long double)z;
        sum += term;
        if (std::abs((double)term) < 1e-17 * std::abs((double)sum)) return (double)sum;
    }
    throw std::runtime_error("gauss_2f1_ref: series did not converge");
}

double gamma_draw(Rng& rng, double shape) {
    if (!(shape > 0)) throw std::domain_error("gamma_draw: shape > 0");
    if (shape == 0.0) return 0.0;
    double boost = 1.0;
    if (shape < 1.0) {
        boost = std::pow(rng.uniform(), 1.0 / shape);
        shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double cc = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double xn, v;
        do {
            xn = rng.normal();
            v = 1.0 + cc * xn;
        } while (v <= 0.0);
        v = v * v * v;
        double u = rng.uniform();
        if (u < 1.0 - 0.0331 * xn * xn * xn * xn) return boost * d * v;
        if (std::log(u) < 0.5 * xn * xn + d * (1.0 - v + std::log(v)))
            return boost * d * v;
    }
}

double mc_abs_moment_gamma_diff(const CorrGammaPair& pair, int m,
                                long n_samples, std::uint64_t seed) {
    const double c = pair.rho * std::sqrt(pair.a1 * pair.a2);
    const double r1 = pair.a1 - c, r2 = pair.a2 - c;
    if (r1 < -1e-12 || r2 < -1e-12)
        throw std::domain_error(
            "mc oracle: rho > sqrt(a_min/a_max) is not constructible");
    double acc = 0;
    Rng rng(seed, kTagOracle, 0, 0);
    for (long t = 0; t < n_samples; ++t) {
        double s = c > 0 ? gamma_draw(rng, c) : 0.0;
        double x = (s + (r1 > 1e-12 ? gamma_draw(rng, r1) : 0.0)) / pair.b1;
        double y = (s + (r2 > 1e-12 ? gamma_draw(rng, r2) : 0.0)) / pair.b2;
        acc += std::pow(std::abs(x - y), m);
    }
    return acc / double(n_samples);
}

double mc_abs_moment_chisq_diff(const CorrChiSqPair& pair, int m,
                                long n_samples, std::uint64_t seed) {
    const double r = std::sqrt(pair.rho);
    const double q = std::sqrt(1.0 - pair.rho);
    double acc = 0;
    Rng rng(seed, kTagOracle, 1, 0);
    for (long t = 0; t < n_samples; ++t) {
        double x = 0, y = 0;
        for (int i = 0; i < pair.dof; ++i) {
            double g = rng.normal();
            double h = r * g + q * rng.normal();
            x += g * g;
            y += h * h;
        }
        acc += std::pow(std::abs(x - y), m);
    }
    return acc / double(n_samples);
}

}  // namespace fbl::oracles
