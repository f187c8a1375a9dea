#pragma once

namespace fbl {

/// Convergence control for series evaluations.
struct Tolerance {
    double rel_eps = 1e-12;
    long max_terms = 1000000;
};

/// Gaussian upper-tail probability Q(x) = P{N(0,1) > x}.
double q_func(double x);

/// Inverse of q_func on (0,1). Throws std::domain_error outside (0,1).
double q_inv(double p);

/// log Gamma(x) for x > 0. Throws std::domain_error for x <= 0.
double ln_gamma(double x);

/// Gauss hypergeometric 2F1(a,b;c;z) by direct power series, z in [0,1).
/// Throws std::runtime_error if max_terms is exhausted before convergence.
double gauss_2f1(double a, double b, double c, double z, Tolerance tol = {});

/// Modified Bessel function of the second kind K_nu(x), x > 0.
double bessel_k(double nu, double x);

/// Regularized lower incomplete gamma P(shape, rate*x), i.e. the CDF of
/// Gamma(shape, rate) at x.
double gamma_cdf(double shape, double rate, double x);

/// Standard normal density.
double normal_pdf(double x);

}  // namespace fbl
