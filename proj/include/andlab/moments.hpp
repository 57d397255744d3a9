#pragma once

#include "andlab/ids.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace andlab {

// Monte Carlo estimate of a spectral moment together with the bound it is
// checked against; pass means estimate + 2 se <= bound.
struct MomentReport {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    std::int64_t realizations = 0;
    bool pass = false;
};

std::int64_t count_in_interval(const SpectrumSample& s, double a, double b);

// E[#eigenvalues in I] vs the classical bound density_sup |I| |Lambda| and
// the refinement 2 N(I) |Lambda| (N from an independent pooled table).
// density_sup is the sup of the density of the scaled potential.
struct WegnerReports {
    MomentReport classical;
    MomentReport refined;
    double discrepancy = 0.0; // |mean - N(I)|Lambda|| / (N(I)|Lambda|)
};
WegnerReports wegner_estimate(const std::vector<std::int64_t>& counts,
                              double interval_len, double volume,
                              double density_sup, double ids_mass);
WegnerReports wegner_estimate(const std::vector<SpectrumSample>& batch, double a,
                              double b, const IDSTable& table,
                              double density_sup);

// E[k(k-1)] vs the classical bound C (density_sup |I| |Lambda|)^2 with
// C = pi^2 by default, and the refinement 2 N(I) |I| |Lambda|^2.
struct MinamiReports {
    MomentReport classical;
    MomentReport refined;
};
MinamiReports minami_estimate(const std::vector<std::int64_t>& counts,
                              double interval_len, double volume,
                              double density_sup, double ids_mass,
                              double classical_constant = 9.869604401089358);
MinamiReports minami_estimate(const std::vector<SpectrumSample>& batch, double a,
                              double b, const IDSTable& table, double density_sup,
                              double classical_constant = 9.869604401089358);

// Factorial-moment-type quantity E[prod_k (count_k - k + 1)] over nested
// intervals I_1 <= ... <= I_n (negative factors kept as-is) vs the bound
// 2 (prod_{k<n} density_sup |I_k| |Lambda|) N(I_n) |Lambda|.
// counts[r][k] is the count of realization r in interval k.
MomentReport high_order_moment(const std::vector<std::vector<std::int64_t>>& counts,
                               const std::vector<double>& interval_lens,
                               double volume, double density_sup,
                               double ids_mass_last);
MomentReport high_order_moment(const std::vector<SpectrumSample>& batch,
                               const std::vector<std::pair<double, double>>& nested,
                               const IDSTable& table, double density_sup);

// Convergence of mean counts toward the reference mass as L grows.
struct WcontrolRow {
    int side = 0;
    double volume = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    double target = 0.0;   // reference mass density x volume
    double abs_gap = 0.0;  // |mean - target|
    bool resolvable = false; // gap exceeds 2 se
};
// reference_mass_density = N(I) from a much larger pooled table.
std::vector<WcontrolRow> wcontrol_decay(
    const std::vector<int>& sides, const std::vector<double>& volumes,
    const std::vector<std::vector<std::int64_t>>& counts_per_side,
    double reference_mass_density);

} // namespace andlab
