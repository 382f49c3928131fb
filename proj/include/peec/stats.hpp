#pragma once
#include <vector>

namespace peec {

struct MannWhitneyResult {
  double u = 0.0;  // U of the first sample
  double p = 1.0;  // two-sided, normal approximation
};

// Mid-ranks for ties, tie-corrected variance, 0.5 continuity correction.
// With every pooled value tied the variance is zero and p is 1 by definition.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

struct OlsResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double p = 1.0;  // two-sided for slope != 0, t with n-2 dof
};

// Least squares y ~ slope*x + intercept. Throws std::invalid_argument on
// fewer than 3 points or zero x-variance. Perfect fits report p = 0 for a
// nonzero slope and p = 1 for a zero one; constant y gives r2 = 0.
OlsResult ols_fit(const std::vector<double>& x, const std::vector<double>& y);

// Standard step-up procedure at level q; flags returned in input order.
std::vector<bool> benjamini_hochberg(const std::vector<double>& p_values, double q);

// Rank correlation with mid-ranks.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

double binomial_se(double p, int n);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double reg_inc_beta(double a, double b, double x);

// P(|T| > t) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace peec
