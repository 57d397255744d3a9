#pragma once

#include "andlab/rng.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace andlab {

double normal_cdf(double x);
double poisson_pmf(int k, double lambda);

// sup_x |F_hat(x) - F(x)| for a sorted sample.
double ks_distance_sorted(const std::vector<double>& sorted,
                          const std::function<double(double)>& cdf);
double ks_to_exponential(std::vector<double> values); // Exp(1)
double ks_to_standard_normal(std::vector<double> values);

// Total variation between the empirical law of integer counts and
// Poisson(lambda).
double tv_distance_poisson(const std::vector<std::int64_t>& counts, double lambda);
// Pearson chi-square against Poisson(lambda), adjacent bins pooled until the
// expected count is >= 5. Returns the statistic and the bin count used.
std::pair<double, int> chi_square_poisson(const std::vector<std::int64_t>& counts,
                                          double lambda);

// Survival-curve distance sup_x |#{s >= x}/n - e^{-x}|.
double dls_sup_distance(std::vector<double> spacings);

struct MomentSummary {
    double mean = 0.0;
    double sd = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};
MomentSummary moment_summary(const std::vector<double>& values);

// Null-calibrated thresholds (99th percentile unless stated otherwise),
// simulated at the same sample size as the data.
double null_tv_poisson_threshold(double lambda, std::int64_t n_draws, int reps,
                                 std::uint64_t seed, double pct = 0.99);

struct SpacingNull {
    double ks_exp_threshold = 0.0;
    double dls_threshold = 0.0;
};
// Null = independent Poisson processes of intensity 1 on a window of length
// window_len, one per realization; spacings pooled exactly like the data
// pipeline (interior spacings only).
SpacingNull null_spacing_thresholds(std::int64_t n_realizations, double window_len,
                                    int reps, std::uint64_t seed,
                                    double pct = 0.99);

std::int64_t sample_poisson(double lambda, rng::SplitMix64& gen);

} // namespace andlab
