#pragma once

#include <cstdint>

namespace tandem::dist {

// Special functions backing the statistical tests. All implemented locally
// (series / continued fractions) with relative accuracy well inside 1e-10;
// no external statistics dependency.

/// Regularized lower incomplete gamma P(a, x).
double reg_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double reg_gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double reg_beta(double x, double a, double b);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi2_sf(double x, double dof);
/// Two-sided p-value for a Student t statistic with `dof` degrees of freedom.
double t_two_sided_p(double t, double dof);
/// Upper tail of the F distribution with (d1, d2) degrees of freedom.
double f_sf(double x, double d1, double d2);

/// P(X <= k) for X ~ Binomial(n, 1/2), summed exactly in log space.
double binom_half_cdf(std::int64_t k, std::int64_t n);

}  // namespace tandem::dist
