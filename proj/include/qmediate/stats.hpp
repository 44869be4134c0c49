#pragma once

#include <cstddef>
#include <vector>

namespace qmediate {

double mean_of(const std::vector<double>& v);

/// n-1 denominator.
double sample_sd(const std::vector<double>& v);

/// n denominator, matching the standardizer contract.
double population_sd(const std::vector<double>& v);

/// Linear-interpolation quantile (the common "type 7" rule) on a sorted
/// vector, p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

double normal_cdf(double z);

/// Inverse normal CDF, Acklam's rational approximation (~1e-9 absolute).
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b) via continued fraction.
double incomplete_beta(double a, double b, double x);

/// Upper tail of the F(d1, d2) distribution.
double f_survival(double f, double d1, double d2);

/// Two-sided p-value of a t statistic with dof degrees of freedom.
double t_two_sided_p(double t, double dof);

} // namespace qmediate
