#pragma once

#include "andlab/eig.hpp"
#include "andlab/ids.hpp"
#include "andlab/lattice.hpp"

#include <cstdint>
#include <vector>

namespace andlab {

// Regular grid of pairwise-disjoint subcubes of side `ell`, separated by at
// least `buffer` in the periodic metric; pitch ell + buffer per axis.
struct BoxDecomposition {
    LatticeGeometry parent{1, 8};
    int ell = 0;
    int buffer = 0;
    int per_axis = 0; // boxes per axis
    std::vector<std::vector<int>> origins;
    std::vector<std::int64_t> leftover; // parent site indices in no box

    std::int64_t box_count() const {
        return static_cast<std::int64_t>(origins.size());
    }
    // Box containing a parent site, or -1 for the leftover region.
    std::int64_t box_of_site(std::int64_t site) const;
    double leftover_fraction() const;
    // Halo width used when diagonalizing a box: half the buffer per side,
    // so enlarged boxes stay pairwise disjoint.
    int halo() const { return buffer / 2; }
    int diag_side() const { return ell + 2 * halo(); }
    std::int64_t diag_volume() const;
};

BoxDecomposition decompose(const LatticeGeometry& parent, int ell, int buffer);

// Default scale selection: ell = ceil(c1 log L), buffer = ceil(c2 log L).
std::pair<int, int> log_scales(int side, double c1, double c2);

struct VectorLocalization {
    double eigenvalue = 0.0;
    std::int64_t center = 0;  // site of maximal squared amplitude (ties: lowest)
    double decay_rate = 0.0;  // xi-hat = -slope/2 of log mass vs distance
    double log_prefactor = 0.0;
    double residual = 0.0;
    int fit_points = 0;
    bool point_mass = false;  // too few usable sites, fit skipped
};

struct LocalizationReport {
    std::vector<VectorLocalization> vectors;
    double median_decay_rate() const; // over non-point-mass vectors
};

// Centers and decay fits for every eigenvector with eigenvalue in [a, b].
// The fit uses sites at periodic distance >= 2 from the center with
// amplitude above 1e-14.
LocalizationReport localization_centers(const EigenPairs& pairs, double a,
                                        double b);

// Per-box spectra restricted to [a, b]. Each box Hamiltonian lives on the
// box enlarged by a halo of buffer/2 per side (enlarged boxes remain
// pairwise disjoint, so boxes stay independent), reusing the parent's
// disorder values; every center inside the core box then sits at distance
// >= buffer/2 from the truncation boundary. Periodic wrap on the enlarged
// subcube by default, plain truncation when truncated_bc is set.
std::vector<std::vector<double>> local_spectra(const HoppingKernel& kernel,
                                               const std::vector<double>& disorder,
                                               const BoxDecomposition& dec,
                                               double a, double b,
                                               bool truncated_bc = false);

struct MatchedPair {
    std::int64_t box = 0;
    double global_eigenvalue = 0.0;
    double local_eigenvalue = 0.0;
    double error = 0.0;
};

struct ReductionReport {
    std::vector<MatchedPair> matches;
    std::int64_t window_eigenvalues = 0; // global eigenvalues in [a, b]
    std::int64_t leftover_centers = 0;   // centers outside every box
    std::int64_t unmatched = 0;          // in a box but no local level left
    std::int64_t crowded_boxes = 0;      // boxes with >= 2 local levels in I

    double error_quantile(double q) const;
    double median_error() const { return error_quantile(0.5); }
};

// Greedy matching in ascending global order; each local eigenvalue used at
// most once.
ReductionReport match_eigenvalues(const LocalizationReport& localization,
                                  const std::vector<std::vector<double>>& locals,
                                  const BoxDecomposition& dec, double a, double b);

struct BernoulliReport {
    std::int64_t samples = 0; // (box, realization) pairs
    std::int64_t ones = 0;    // exactly one local eigenvalue in the interval
    std::int64_t multi = 0;   // two or more
    double p_hat = 0.0;
    double ci_halfwidth = 0.0; // 95% normal-approximation binomial interval
    double expected = 0.0;     // N(I) |box|
    double ratio = 0.0;        // p_hat / expected
    std::vector<double> positions; // rescaled (E - a)/|I| for the X=1 samples
};

// Requires the small-probability regime N(I)|box| <= 0.1 and at least
// min_samples (box, realization) pairs.
BernoulliReport bernoulli_sample(
    const std::vector<std::vector<std::vector<double>>>& batches, double a,
    double b, double box_volume, const IDSTable& table,
    std::int64_t min_samples = 10000);

struct IncrementCheck {
    double x = 0.0;
    double y = 0.0;
    double empirical = 0.0; // fraction of samples landing in (a+y|I|, a+x|I|]
    double predicted = 0.0; // [N(a+x|I|) - N(a+y|I|)] |box|
    double binomial_err = 0.0; // 3 sigma at the sample count
    bool pass = false;
};

std::vector<IncrementCheck> increment_checks(
    const BernoulliReport& report, const IDSTable& table, double a, double b,
    double box_volume, const std::vector<std::pair<double, double>>& yx_pairs);

} // namespace andlab
