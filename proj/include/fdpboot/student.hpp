#pragma once

namespace fdpboot {

// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

// CDF of the Student t distribution with dof degrees of freedom.
double student_cdf(double t, int dof);

// Upper tail P(T > t). Equals student_cdf(-t, dof) but is evaluated
// directly so small tails keep full precision.
double student_sf(double t, int dof);

// Two-sided p-value 2 * P(T > |t|), clamped to [0, 1].
double student_p_two_sided(double t, int dof);

// One-sided p-value P(T > t), clamped to [0, 1].
double student_p_one_sided(double t, int dof);

}  // namespace fdpboot
