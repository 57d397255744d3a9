#include "andlab/goodness.hpp"

#include "andlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace andlab {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double poisson_pmf(int k, double lambda) {
    if (k < 0) return 0.0;
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

double ks_distance_sorted(const std::vector<double>& sorted,
                          const std::function<double(double)>& cdf) {
    if (sorted.empty()) throw std::invalid_argument("ks_distance: empty sample");
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double F = cdf(sorted[i]);
        d = std::max(d, std::abs((i + 1) / n - F));
        d = std::max(d, std::abs(i / n - F));
    }
    return d;
}

double ks_to_exponential(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return ks_distance_sorted(values,
                              [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); });
}

double ks_to_standard_normal(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return ks_distance_sorted(values, [](double x) { return normal_cdf(x); });
}

double tv_distance_poisson(const std::vector<std::int64_t>& counts, double lambda) {
    if (counts.empty()) throw std::invalid_argument("tv_distance: empty sample");
    if (lambda < 0.0) throw std::invalid_argument("tv_distance: lambda < 0");
    std::int64_t max_c = 0;
    for (auto c : counts) {
        if (c < 0) throw std::invalid_argument("tv_distance: negative count");
        max_c = std::max(max_c, c);
    }
    int K = static_cast<int>(std::max<double>(
        static_cast<double>(max_c), std::ceil(lambda + 12.0 * std::sqrt(lambda) + 25.0)));
    std::vector<double> emp(K + 1, 0.0);
    const double n = static_cast<double>(counts.size());
    for (auto c : counts) emp[static_cast<std::size_t>(c)] += 1.0 / n;
    double tv = 0.0, model_mass = 0.0;
    for (int k = 0; k <= K; ++k) {
        double p = poisson_pmf(k, lambda);
        model_mass += p;
        tv += std::abs(emp[k] - p);
    }
    // remaining Poisson tail has no empirical mass
    tv += std::max(0.0, 1.0 - model_mass);
    return 0.5 * tv;
}

std::pair<double, int> chi_square_poisson(const std::vector<std::int64_t>& counts,
                                          double lambda) {
    if (counts.empty()) throw std::invalid_argument("chi_square: empty sample");
    std::int64_t max_c = 0;
    for (auto c : counts) max_c = std::max(max_c, c);
    int K = static_cast<int>(std::max<double>(
        static_cast<double>(max_c), std::ceil(lambda + 8.0 * std::sqrt(lambda) + 10.0)));
    const double n = static_cast<double>(counts.size());
    std::vector<double> obs(K + 2, 0.0), exp_(K + 2, 0.0);
    for (auto c : counts) obs[static_cast<std::size_t>(c)] += 1.0;
    double mass = 0.0;
    for (int k = 0; k <= K; ++k) {
        exp_[k] = n * poisson_pmf(k, lambda);
        mass += poisson_pmf(k, lambda);
    }
    exp_[K + 1] = n * std::max(0.0, 1.0 - mass); // tail bin
    // pool adjacent bins left-to-right until each pooled bin expects >= 5
    double stat = 0.0;
    int bins = 0;
    double o_acc = 0.0, e_acc = 0.0;
    for (int k = 0; k <= K + 1; ++k) {
        o_acc += obs[k];
        e_acc += exp_[k];
        bool last = (k == K + 1);
        if (e_acc >= 5.0 || last) {
            if (e_acc > 0.0) {
                stat += (o_acc - e_acc) * (o_acc - e_acc) / e_acc;
                ++bins;
            }
            o_acc = e_acc = 0.0;
        }
    }
    return {stat, bins};
}

double dls_sup_distance(std::vector<double> spacings) {
    if (spacings.empty()) throw std::invalid_argument("dls: empty spacing pool");
    std::sort(spacings.begin(), spacings.end());
    const double n = static_cast<double>(spacings.size());
    double d = std::abs(1.0 - std::exp(-spacings.front())); // curve = 1 before first atom
    for (std::size_t i = 0; i < spacings.size(); ++i) {
        double x = spacings[i];
        double surv_at = (n - i) / n;       // #{s >= x}/n, ties below i already gone
        double surv_after = (n - i - 1) / n;
        double e = std::exp(-x);
        d = std::max(d, std::abs(surv_at - e));
        d = std::max(d, std::abs(surv_after - e));
    }
    return d;
}

MomentSummary moment_summary(const std::vector<double>& values) {
    if (values.size() < 2) throw std::invalid_argument("moment_summary: need >= 2 values");
    MomentSummary m;
    const double n = static_cast<double>(values.size());
    for (double v : values) m.mean += v;
    m.mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        double d = v - m.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n; m3 /= n; m4 /= n;
    m.sd = std::sqrt(m2 * n / (n - 1.0));
    if (m2 > 0.0) {
        m.skewness = m3 / std::pow(m2, 1.5);
        m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return m;
}

std::int64_t sample_poisson(double lambda, rng::SplitMix64& gen) {
    if (lambda < 0.0) throw std::invalid_argument("sample_poisson: lambda < 0");
    // inversion by sequential search; split large lambda into chunks to keep
    // the running product away from underflow
    std::int64_t total = 0;
    while (lambda > 0.0) {
        double chunk = std::min(lambda, 15.0);
        lambda -= chunk;
        double u = gen.next_uniform01();
        double p = std::exp(-chunk), c = p;
        std::int64_t k = 0;
        while (u > c && k < 4000) {
            ++k;
            p *= chunk / static_cast<double>(k);
            c += p;
        }
        total += k;
    }
    return total;
}

namespace {

double percentile(std::vector<double>& v, double pct) {
    std::sort(v.begin(), v.end());
    double idx = pct * (static_cast<double>(v.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(idx);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double t = idx - static_cast<double>(lo);
    return v[lo] + t * (v[hi] - v[lo]);
}

} // namespace

double null_tv_poisson_threshold(double lambda, std::int64_t n_draws, int reps,
                                 std::uint64_t seed, double pct) {
    if (reps < 2 || n_draws < 1)
        throw std::invalid_argument("null_tv_poisson_threshold: bad sizes");
    std::vector<double> stats;
    stats.reserve(reps);
    rng::SplitMix64 gen(seed);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_draws));
    for (int r = 0; r < reps; ++r) {
        for (auto& c : counts) c = sample_poisson(lambda, gen);
        stats.push_back(tv_distance_poisson(counts, lambda));
    }
    return percentile(stats, pct);
}

SpacingNull null_spacing_thresholds(std::int64_t n_realizations, double window_len,
                                    int reps, std::uint64_t seed, double pct) {
    if (reps < 2 || n_realizations < 1 || window_len <= 0.0)
        throw std::invalid_argument("null_spacing_thresholds: bad sizes");
    std::vector<double> ks_stats, dls_stats;
    ks_stats.reserve(reps);
    dls_stats.reserve(reps);
    rng::SplitMix64 gen(seed);
    std::vector<double> pool, atoms;
    for (int r = 0; r < reps; ++r) {
        pool.clear();
        for (std::int64_t i = 0; i < n_realizations; ++i) {
            std::int64_t k = sample_poisson(window_len, gen);
            atoms.clear();
            for (std::int64_t j = 0; j < k; ++j)
                atoms.push_back(window_len * gen.next_uniform01());
            std::sort(atoms.begin(), atoms.end());
            for (std::size_t j = 1; j < atoms.size(); ++j)
                pool.push_back(atoms[j] - atoms[j - 1]);
        }
        if (pool.empty()) { --r; continue; }
        ks_stats.push_back(ks_to_exponential(pool));
        dls_stats.push_back(dls_sup_distance(pool));
    }
    SpacingNull out;
    out.ks_exp_threshold = percentile(ks_stats, pct);
    out.dls_threshold = percentile(dls_stats, pct);
    return out;
}

} // namespace andlab
