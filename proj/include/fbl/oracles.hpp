#pragma once

#include <cstdint>
#include <functional>

#include "fbl/gamma_moments.hpp"

namespace fbl {
class Rng;
}

namespace fbl::oracles {

// Independent reference implementations used only for cross-checking the
// production code paths. Deliberately slow and simple.

double simpson(const std::function<double(double)>& f, double a, double b,
               int n_panels);

// Stirling-series log-gamma with upward recursion below x = 12.
double ln_gamma_ref(double x);

// Upper-tail Gaussian probability by quadrature of the density.
double q_func_ref(double x);

// Inverse of q_func_ref by bisection.
double q_inv_ref(double p);

// Modified Bessel K via the integral representation
// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.
double bessel_k_ref(double nu, double x);

// Gauss hypergeometric series summed in long double.
double gauss_2f1_ref(double a, double b, double c, double z);

// Monte Carlo E|x-y|^m for a correlated Gamma pair built by the
// shared-plus-private construction; requires rho <= sqrt(min(a)/max(a)).
double mc_abs_moment_gamma_diff(const CorrGammaPair& pair, int m,
                                long n_samples, std::uint64_t seed);

// Monte Carlo E|x-y|^m for correlated chi-squares via jointly normal draws.
double mc_abs_moment_chisq_diff(const CorrChiSqPair& pair, int m,
                                long n_samples, std::uint64_t seed);

// Gamma(shape, 1) sampler (Marsaglia-Tsang), exposed for the MC oracles.
double gamma_draw(Rng& rng, double shape);

}  // namespace fbl::oracles
