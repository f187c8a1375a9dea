#pragma once

#include "fbl/specfun.hpp"

namespace fbl {

/// Two correlated Gamma(a_i, b_i) variables (shape/rate) with correlation
/// coefficient rho in [0,1).
struct CorrGammaPair {
    double a1, b1;
    double a2, b2;
    double rho;
};

/// Two correlated chi-square variables with N degrees of freedom each and
/// correlation rho in [0,1).
struct CorrChiSqPair {
    int dof;
    double rho;
};

/// Density of z = x - y for a correlated chi-square pair (variance-gamma).
double variance_gamma_pdf(const CorrChiSqPair& pair, double z);

/// Absolute moment E|x - y|^m, m in {1,2,3}, for a correlated Gamma pair.
/// Approximation built from a weighted decomposition into two independent
/// Gammas; exact when the pair is independent with equal means. Throws
/// std::overflow_error if a log-domain intermediate leaves double range.
double abs_moment_gamma_diff(const CorrGammaPair& pair, int m,
                             Tolerance tol = {});

/// Exact absolute moment E|x - y|^m for a correlated chi-square pair,
/// m >= 1:  (1-rho)^{m/2} 4^m Gamma((N+m)/2) Gamma((m+1)/2) /
///          (sqrt(pi) Gamma(N/2)).
double abs_moment_chisq_diff(const CorrChiSqPair& pair, int m);

namespace detail {

/// Weighted decomposition parameters of a correlated Gamma pair:
/// z = x - y is modelled as l22*W2 - (l11 - l21)*W1 with independent
/// W1 ~ Gamma(a1w, b1w), W2 ~ Gamma(a2w, b2w).
struct GammaDiffDecomp {
    double l11, l21, l22;
    double a1w, b1w, a2w, b2w;
};

GammaDiffDecomp gamma_diff_decomp(const CorrGammaPair& pair);

/// Regime l21 >= l11: |z| is a positive combination; plain binomial sum.
double abs_moment_case_i(const GammaDiffDecomp& d, int m);

/// Regime l21 < l11: signed difference. Algebraically the alternating
/// double-2F1 form, evaluated here through an equivalent positive-term
/// series to avoid catastrophic cancellation at large shapes.
double abs_moment_case_ii(const GammaDiffDecomp& d, int m, Tolerance tol);

}  // namespace detail

}  // namespace fbl
