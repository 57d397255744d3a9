#pragma once

#include "andlab/lattice.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace andlab {

// Experiment description parsed from the key = value config format. Unknown
// keys are rejected; see docs/config-example.cfg for the schema.
struct ExperimentConfig {
    std::string model_id = "anderson-nn-1d";
    int dimension = 1;
    bool kernel_zero = false;
    std::vector<std::pair<std::vector<int>, double>> kernel_terms = {{{1}, 1.0}};
    DisorderSpec disorder = DisorderSpec::uniform(0.0, 1.0, 3.0);

    // reference-measure pool (IDS) and the statistics pool; realization index
    // ranges [lo, hi) must be disjoint
    int ids_side = 512;
    std::int64_t ids_lo = 0;
    std::int64_t ids_hi = 2000;
    std::optional<double> ids_truncate; // tail pool: keep eigenvalues <= cutoff

    int stats_side = 1000;
    std::int64_t stats_lo = 100000;
    std::int64_t stats_hi = 101000;

    std::string anchor_kind = "bulk"; // bulk | lower_edge | upper_edge
    double anchor_energy = 0.0;       // bulk only
    double window_mass = 8.0;         // target N(window) |Lambda|
    double count_mass = 4.0;          // counting sub-window mass
    double edge_margin = 0.05;        // half-line tolerance (unfolded units)

    double moment_mass = 4.0;     // N(I)|Lambda| for Wegner/Minami interval
    double minami_constant = 9.869604401089358;
    std::vector<int> wcontrol_sides = {128, 256, 512};
    std::int64_t wcontrol_realizations = 400;

    double clt_mass = 100.0;
    std::vector<double> deviation_gammas = {0.55, 0.65, 0.75, 0.85, 1.0};

    double reduction_c1 = 8.0;
    double reduction_c2 = 3.0;
    bool keep_vectors = false;
    double bernoulli_mass = 0.05; // N(I)|box| target for the Bernoulli study
    std::vector<double> lifshitz_offsets = {0.04, 0.06, 0.09, 0.13, 0.2, 0.3};

    int null_reps = 300;
    int threads = 1;
    std::uint64_t master_seed = 1;
    std::string out_dir = ".";
    std::map<std::string, std::string> labels; // free-form report annotations

    HoppingKernel kernel() const;
    void validate() const; // throws with a field-level message
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

} // namespace andlab
