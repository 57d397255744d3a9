#include "andlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace andlab {

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::int64_t n = 0;
};

MeanSe mean_se(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("empty moment batch");
    MeanSe m;
    m.n = static_cast<std::int64_t>(values.size());
    for (double v : values) m.mean += v;
    m.mean /= static_cast<double>(m.n);
    if (m.n > 1) {
        double ss = 0.0;
        for (double v : values) {
            double d = v - m.mean;
            ss += d * d;
        }
        m.se = std::sqrt(ss / (static_cast<double>(m.n) * (m.n - 1.0)));
    }
    return m;
}

MomentReport make_report(std::string name, const MeanSe& m, double bound) {
    MomentReport r;
    r.name = std::move(name);
    r.estimate = m.mean;
    r.std_error = m.se;
    r.bound = bound;
    r.realizations = m.n;
    r.pass = m.mean + 2.0 * m.se <= bound;
    return r;
}

void check_independent(const std::vector<SpectrumSample>& batch,
                       const IDSTable& table) {
    for (const auto& s : batch)
        if (table.contains_realization(s.provenance.seed, s.provenance.realization))
            throw std::invalid_argument(
                "moment batch overlaps the reference IDS table");
}

} // namespace

std::int64_t count_in_interval(const SpectrumSample& s, double a, double b) {
    auto lo = std::lower_bound(s.eigenvalues.begin(), s.eigenvalues.end(), a);
    auto hi = std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), b);
    return hi - lo;
}

WegnerReports wegner_estimate(const std::vector<std::int64_t>& counts,
                              double interval_len, double volume,
                              double density_sup, double ids_mass) {
    if (interval_len <= 0.0 || volume <= 0.0)
        throw std::invalid_argument("wegner_estimate: bad interval or volume");
    std::vector<double> vals(counts.begin(), counts.end());
    auto m = mean_se(vals);
    WegnerReports out;
    out.classical = make_report("W", m, density_sup * interval_len * volume);
    double target = ids_mass * volume;
    out.refined = make_report("W", m, 2.0 * target);
    if (target > 0.0) out.discrepancy = std::abs(m.mean - target) / target;
    return out;
}

WegnerReports wegner_estimate(const std::vector<SpectrumSample>& batch, double a,
                              double b, const IDSTable& table,
                              double density_sup) {
    check_independent(batch, table);
    std::vector<std::int64_t> counts;
    counts.reserve(batch.size());
    double volume = 0.0;
    for (const auto& s : batch) {
        counts.push_back(count_in_interval(s, a, b));
        volume = static_cast<double>(s.site_count);
    }
    return wegner_estimate(counts, b - a, volume, density_sup,
                           table.interval_mass(a, b));
}

MinamiReports minami_estimate(const std::vector<std::int64_t>& counts,
                              double interval_len, double volume,
                              double density_sup, double ids_mass,
                              double classical_constant) {
    if (interval_len <= 0.0 || volume <= 0.0)
        throw std::invalid_argument("minami_estimate: bad interval or volume");
    std::vector<double> vals;
    vals.reserve(counts.size());
    for (auto k : counts)
        vals.push_back(static_cast<double>(k) * (static_cast<double>(k) - 1.0));
    auto m = mean_se(vals);
    MinamiReports out;
    double li = density_sup * interval_len * volume;
    out.classical = make_report("M", m, classical_constant * li * li);
    out.refined = make_report("M", m, 2.0 * ids_mass * interval_len * volume * volume);
    return out;
}

MinamiReports minami_estimate(const std::vector<SpectrumSample>& batch, double a,
                              double b, const IDSTable& table, double density_sup,
                              double classical_constant) {
    check_independent(batch, table);
    std::vector<std::int64_t> counts;
    counts.reserve(batch.size());
    double volume = 0.0;
    for (const auto& s : batch) {
        counts.push_back(count_in_interval(s, a, b));
        volume = static_cast<double>(s.site_count);
    }
    return minami_estimate(counts, b - a, volume, density_sup,
                           table.interval_mass(a, b), classical_constant);
}

MomentReport high_order_moment(const std::vector<std::vector<std::int64_t>>& counts,
                               const std::vector<double>& interval_lens,
                               double volume, double density_sup,
                               double ids_mass_last) {
    const std::size_t n = interval_lens.size();
    if (n < 2) throw std::invalid_argument("high_order_moment: need n >= 2");
    std::vector<double> vals;
    vals.reserve(counts.size());
    for (const auto& row : counts) {
        if (row.size() != n)
            throw std::invalid_argument("high_order_moment: ragged count rows");
        double prod = 1.0;
        for (std::size_t k = 0; k < n; ++k)
            prod *= static_cast<double>(row[k]) - static_cast<double>(k);
        vals.push_back(prod);
    }
    auto m = mean_se(vals);
    double bound = 2.0 * ids_mass_last * volume;
    for (std::size_t k = 0; k + 1 < n; ++k)
        bound *= density_sup * interval_lens[k] * volume;
    return make_report("HOM(" + std::to_string(n) + ")", m, bound);
}

MomentReport high_order_moment(const std::vector<SpectrumSample>& batch,
                               const std::vector<std::pair<double, double>>& nested,
                               const IDSTable& table, double density_sup) {
    if (nested.size() < 2)
        throw std::invalid_argument("high_order_moment: need n >= 2 intervals");
    for (std::size_t k = 1; k < nested.size(); ++k)
        if (nested[k].first > nested[k - 1].first ||
            nested[k].second < nested[k - 1].second)
            throw std::invalid_argument("high_order_moment: intervals not nested");
    check_independent(batch, table);
    std::vector<std::vector<std::int64_t>> counts;
    counts.reserve(batch.size());
    std::vector<double> lens;
    for (const auto& [a, b] : nested) lens.push_back(b - a);
    double volume = 0.0;
    for (const auto& s : batch) {
        std::vector<std::int64_t> row;
        for (const auto& [a, b] : nested) row.push_back(count_in_interval(s, a, b));
        counts.push_back(std::move(row));
        volume = static_cast<double>(s.site_count);
    }
    auto [a_n, b_n] = nested.back();
    return high_order_moment(counts, lens, volume, density_sup,
                             table.interval_mass(a_n, b_n));
}

std::vector<WcontrolRow> wcontrol_decay(
    const std::vector<int>& sides, const std::vector<double>& volumes,
    const std::vector<std::vector<std::int64_t>>& counts_per_side,
    double reference_mass_density) {
    if (sides.size() < 3)
        throw std::invalid_argument("wcontrol_decay: need at least 3 sizes");
    if (volumes.size() != sides.size() || counts_per_side.size() != sides.size())
        throw std::invalid_argument("wcontrol_decay: size mismatch");
    std::vector<WcontrolRow> rows;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        std::vector<double> vals(counts_per_side[i].begin(),
                                 counts_per_side[i].end());
        auto m = mean_se(vals);
        WcontrolRow row;
        row.side = sides[i];
        row.volume = volumes[i];
        row.mean = m.mean;
        row.std_error = m.se;
        row.target = reference_mass_density * volumes[i];
        row.abs_gap = std::abs(m.mean - row.target);
        row.resolvable = row.abs_gap > 2.0 * m.se;
        rows.push_back(row);
    }
    return rows;
}

} // namespace andlab
