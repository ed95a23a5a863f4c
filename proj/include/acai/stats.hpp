#pragma once

#include <cstddef>
#include <vector>

namespace acai::stats {

double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);  // sample (n-1) denominator

// Rank correlation with average ranks for ties. Returns 0 when either input
// is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);
double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Two-sample Kolmogorov-Smirnov statistic (max CDF distance).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS statistic against Uniform(lo, hi).
double ks_uniform(std::vector<double> sample, double lo, double hi);

// Pearson chi-square independence test p-value for a contingency table
// (rows x cols counts). Cells with zero expected count are skipped.
double chi2_independence_p(const std::vector<std::vector<double>>& table);

// Regularized upper incomplete gamma Q(a, x); exposed for testing.
double gamma_q(double a, double x);

}  // namespace acai::stats
