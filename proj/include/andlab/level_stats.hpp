#pragma once

#include "andlab/goodness.hpp"
#include "andlab/ids.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace andlab {

// One realization's eigenvalues pushed through the unfolding map
// xi = |Lambda| (N(E) - N(E0)), restricted to the window [lo, hi].
struct UnfoldedSample {
    double anchor_energy = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> atoms; // sorted
    Provenance provenance;
};

// Requires that the realization was NOT pooled into `table`: unfolding must
// use an independent reference measure.
UnfoldedSample unfold(const std::vector<double>& eigenvalues,
                      std::int64_t site_count, const Provenance& provenance,
                      const IDSTable& table, double anchor_energy, double lo,
                      double hi);
UnfoldedSample unfold(const SpectrumSample& sample, const IDSTable& table,
                      double anchor_energy, double lo, double hi);

struct PointProcessBatch {
    double anchor_energy = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::vector<double>> atoms; // one vector per realization

    double window_length() const { return hi - lo; }
    std::int64_t realization_count() const {
        return static_cast<std::int64_t>(atoms.size());
    }
    std::int64_t total_atoms() const;
    double intensity() const; // atoms per unit unfolded length per realization
};

// Groups samples sharing anchor and window; rejects mixed anchors, duplicate
// realizations, or an empty input.
PointProcessBatch collect_point_process(const std::vector<UnfoldedSample>& samples);

// Alternative rescaling t -> |Lambda| N([a, t]) mapping the interval process
// onto [0, |Lambda| N([a,b])]; atoms of a stationary limit become uniform.
std::vector<double> rescaled_uniform_atoms(const std::vector<double>& eigenvalues,
                                           std::int64_t site_count,
                                           const IDSTable& table, double a,
                                           double b);

struct SpacingsReport {
    std::vector<double> spacings;   // pooled interior spacings, per realization
    std::int64_t eligible = 0;      // spacing count = survival normalizer
    std::int64_t realizations = 0;
    std::int64_t occupied = 0;      // realizations contributing >= 2 atoms
};
SpacingsReport pooled_spacings(const PointProcessBatch& batch);

// Survival curve x -> #{spacings >= x} / eligible.
struct DlsCurve {
    std::vector<double> sorted;
    double evaluate(double x) const;
    double sup_exp_distance() const; // sup_x |curve - e^{-x}|
};
DlsCurve dls_curve(const SpacingsReport& report);

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    std::int64_t sample_size = 0;
    bool pass = false;
    std::string detail;
};

// TV between per-realization counts in [sub_lo, sub_hi] and Poisson of mean
// (sub_hi - sub_lo); threshold simulated under the matching null.
TestReport poisson_count_test(const PointProcessBatch& batch, double sub_lo,
                              double sub_hi, int null_reps,
                              std::uint64_t null_seed, double pct = 0.99);

struct SpacingTests {
    TestReport ks_exponential;
    TestReport dls;
};
SpacingTests run_spacing_tests(const PointProcessBatch& batch, int null_reps,
                               std::uint64_t null_seed, double pct = 0.99);

// Edge diagnostics: no unfolded mass may sit below -tolerance.
TestReport half_line_check(const PointProcessBatch& batch, double tolerance);

struct CountReport {
    double target_mean = 0.0; // N(I) |Lambda|
    std::vector<std::int64_t> counts;
    std::vector<double> normalized() const; // (c - target)/sqrt(target)
};
TestReport clt_normal_test(const CountReport& report, double ks_threshold);
MomentSummary clt_moments(const CountReport& report);

struct DeviationRow {
    double gamma = 0.0;
    double cutoff = 0.0;   // target^gamma
    double fraction = 0.0; // fraction of realizations beyond the cutoff
};
std::vector<DeviationRow> deviation_profile(const CountReport& report,
                                            const std::vector<double>& gammas);

} // namespace andlab
