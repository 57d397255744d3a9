#pragma once

#include "andlab/eig.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace andlab {

struct LifshitzFit {
    double exponent = 0.0;   // rho-hat
    double intercept = 0.0;
    double residual_norm = 0.0;
    int used_offsets = 0;
    std::vector<double> skipped_offsets; // zero-mass offsets
};

// Pooled empirical integrated density of states. Samples are accumulated
// lazily; queries finalize the pool. A table may be truncated: built from
// spectra recorded only up to a cutoff energy, valid for queries below it.
class IDSTable {
  public:
    IDSTable() = default;
    explicit IDSTable(std::string model_id) : model_id_(std::move(model_id)) {}

    void accumulate(const SpectrumSample& s);
    // Tail pools: `values` holds every eigenvalue <= cutoff of a realization
    // whose full spectrum has `site_count` levels.
    void accumulate_truncated(const std::vector<double>& values,
                              std::int64_t site_count, double cutoff,
                              const Provenance& provenance);
    void merge(const IDSTable& other);

    bool empty() const { return pooled_sites_ == 0; }
    std::int64_t pooled_sites() const { return pooled_sites_; }
    std::int64_t realization_count() const { return realization_count_; }
    const std::string& model_id() const { return model_id_; }
    std::uint64_t seed() const { return seed_; }
    std::int64_t realization_min() const { return realization_min_; }
    std::int64_t realization_max() const { return realization_max_; }
    std::optional<double> truncation() const { return truncation_; }

    // True when `realization` under `seed` was pooled into this table; used
    // to enforce the unfolding independence discipline.
    bool contains_realization(std::uint64_t seed, std::int64_t realization) const;

    double evaluate(double E) const;           // N(E), monotone piecewise linear
    double interval_mass(double a, double b) const; // N([a,b])
    double quantile(double q) const;           // leftmost E with N(E) = q
    // Interval around the anchor carrying IDS mass target_mass / volume.
    enum class Edge { Interior, Lower, Upper };
    std::pair<double, double> interval_for_mass(Edge edge, double anchor_energy,
                                                double target_mass,
                                                double volume) const;

    // Least-squares slope of log(-log N(edge+a)) vs log a; rho-hat = -slope.
    LifshitzFit lifshitz_exponent_fit(double edge,
                                      const std::vector<double>& offsets) const;

    void save(std::ostream& out) const;
    static IDSTable load(std::istream& in);
    void save_file(const std::string& path) const;
    static IDSTable load_file(const std::string& path);

    const std::vector<double>& knots() const;
    double fraction_at_knot(std::size_t i) const;

  private:
    void finalize() const;
    void unfinalize() const;
    void note_provenance(const Provenance& p);

    std::string model_id_;
    std::uint64_t seed_ = 0;
    bool seed_set_ = false;
    std::int64_t realization_min_ = std::numeric_limits<std::int64_t>::max();
    std::int64_t realization_max_ = std::numeric_limits<std::int64_t>::min();
    std::int64_t realization_count_ = 0;
    std::int64_t pooled_sites_ = 0;
    std::optional<double> truncation_;

    mutable std::vector<double> pending_;
    mutable std::vector<double> knots_;
    mutable std::vector<std::int64_t> cumulative_;
};

} // namespace andlab
