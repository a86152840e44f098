#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace hfa::stats {

/// P(X > x) for X ~ chi-square(dof). dof == 0 is the point mass at zero.
double chi_squared_sf(double x, double dof);
double chi_squared_cdf(double x, double dof);

double normal_cdf(double x);
double normal_quantile(double p);
double t_quantile(double p, double dof);

/// Two-sided p-value of a standard normal z statistic.
double two_sided_normal_p(double z);

double mean(std::span<const double> values);
/// Sample variance (n - 1 denominator); 0 for fewer than two values.
double variance(std::span<const double> values);
double median(std::vector<double> values);
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

struct TTest {
  double t = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Two-sided one-sample t-test against `mu0`. Empty when fewer than two values
/// or the sample has zero variance.
std::optional<TTest> one_sample_t_test(std::span<const double> values, double mu0);

struct KsTest {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// asymptotic Kolmogorov distribution and Stephens' small-sample correction.
KsTest ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Upper tail of the Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x);

}  // namespace hfa::stats
