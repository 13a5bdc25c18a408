#pragma once

namespace msnm {

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
///
/// Series expansion for x < a + 1, modified-Lentz continued fraction for
/// the upper tail otherwise; relative accuracy near machine epsilon.
double regularized_gamma_p(double a, double x);

/// Complement Q(a, x) = 1 - P(a, x), computed without cancellation.
double regularized_gamma_q(double a, double x);

/// CDF of the chi-squared distribution with `dof` degrees of freedom.
double chi2_cdf(double x, int dof);

/// Inverse CDF of chi-squared(dof) at probability p in (0, 1).
///
/// Brackets the root, then alternates safeguarded Newton steps with
/// bisection until the bracket is narrower than 1e-12 (relative to the
/// quantile) or the CDF matches p to 1e-15.
double chi2_quantile(double p, int dof);

}  // namespace msnm
