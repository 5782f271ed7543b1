#pragma once

namespace layerlens::stats {

/// Regularized incomplete beta I_x(a, b), evaluated by Lentz's continued
/// fraction on whichever side of the mean converges faster.
double incomplete_beta(double a, double b, double x);

/// Student t cumulative distribution. Symmetric by construction:
/// cdf(-t) == 1 - cdf(t) exactly.
double student_t_cdf(double t, double df);

/// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

/// Inverse CDF by bisection; prob in (0, 1).
double student_t_quantile(double prob, double df);

}  // namespace layerlens::stats
