#include "andlab/level_stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace andlab {

UnfoldedSample unfold(const std::vector<double>& eigenvalues,
                      std::int64_t site_count, const Provenance& provenance,
                      const IDSTable& table, double anchor_energy, double lo,
                      double hi) {
    if (table.empty()) throw std::invalid_argument("unfold: empty IDS table");
    if (lo >= hi) throw std::invalid_argument("unfold: empty window");
    if (site_count <= 0) throw std::invalid_argument("unfold: site_count <= 0");
    if (table.contains_realization(provenance.seed, provenance.realization))
        throw std::invalid_argument(
            "unfold: realization was pooled into the reference table");
    const double n0 = table.evaluate(anchor_energy);
    const double vol = static_cast<double>(site_count);
    UnfoldedSample out;
    out.anchor_energy = anchor_energy;
    out.lo = lo;
    out.hi = hi;
    out.provenance = provenance;
    auto trunc = table.truncation();
    for (double E : eigenvalues) {
        if (trunc && E > *trunc) {
            // acceptable only when the cutoff already maps past the window
            if (vol * (table.evaluate(*trunc) - n0) >= hi) continue;
            throw std::domain_error("unfold: eigenvalue beyond table validity");
        }
        double xi = vol * (table.evaluate(E) - n0);
        if (xi >= lo && xi <= hi) out.atoms.push_back(xi);
    }
    std::sort(out.atoms.begin(), out.atoms.end());
    return out;
}

UnfoldedSample unfold(const SpectrumSample& sample, const IDSTable& table,
                      double anchor_energy, double lo, double hi) {
    return unfold(sample.eigenvalues, sample.site_count, sample.provenance, table,
                  anchor_energy, lo, hi);
}

std::int64_t PointProcessBatch::total_atoms() const {
    std::int64_t n = 0;
    for (const auto& a : atoms) n += static_cast<std::int64_t>(a.size());
    return n;
}

double PointProcessBatch::intensity() const {
    if (atoms.empty()) throw std::logic_error("intensity of empty batch");
    return static_cast<double>(total_atoms()) /
           (static_cast<double>(atoms.size()) * window_length());
}

PointProcessBatch collect_point_process(const std::vector<UnfoldedSample>& samples) {
    if (samples.empty())
        throw std::invalid_argument("collect_point_process: no samples");
    PointProcessBatch b;
    b.anchor_energy = samples.front().anchor_energy;
    b.lo = samples.front().lo;
    b.hi = samples.front().hi;
    std::set<std::pair<std::uint64_t, std::int64_t>> seen;
    for (const auto& s : samples) {
        if (s.anchor_energy != b.anchor_energy || s.lo != b.lo || s.hi != b.hi)
            throw std::invalid_argument(
                "collect_point_process: mixed anchors or windows");
        auto key = std::make_pair(s.provenance.seed, s.provenance.realization);
        if (!seen.insert(key).second)
            throw std::invalid_argument(
                "collect_point_process: duplicate realization");
        b.atoms.push_back(s.atoms);
    }
    return b;
}

std::vector<double> rescaled_uniform_atoms(const std::vector<double>& eigenvalues,
                                           std::int64_t site_count,
                                           const IDSTable& table, double a,
                                           double b) {
    if (a >= b) throw std::invalid_argument("rescaled_uniform_atoms: empty interval");
    const double vol = static_cast<double>(site_count);
    const double na = table.evaluate(a);
    std::vector<double> out;
    for (double E : eigenvalues)
        if (E >= a && E <= b) out.push_back(vol * (table.evaluate(E) - na));
    std::sort(out.begin(), out.end());
    return out;
}

SpacingsReport pooled_spacings(const PointProcessBatch& batch) {
    SpacingsReport rep;
    rep.realizations = batch.realization_count();
    for (const auto& a : batch.atoms) {
        if (a.size() >= 2) ++rep.occupied;
        for (std::size_t i = 1; i < a.size(); ++i)
            rep.spacings.push_back(a[i] - a[i - 1]);
    }
    rep.eligible = static_cast<std::int64_t>(rep.spacings.size());
    return rep;
}

double DlsCurve::evaluate(double x) const {
    if (sorted.empty()) throw std::logic_error("empty survival curve");
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(sorted.end() - it) /
           static_cast<double>(sorted.size());
}

double DlsCurve::sup_exp_distance() const {
    return dls_sup_distance(sorted);
}

DlsCurve dls_curve(const SpacingsReport& report) {
    if (report.spacings.empty())
        throw std::invalid_argument("dls_curve: no spacings");
    DlsCurve c;
    c.sorted = report.spacings;
    std::sort(c.sorted.begin(), c.sorted.end());
    return c;
}

TestReport poisson_count_test(const PointProcessBatch& batch, double sub_lo,
                              double sub_hi, int null_reps,
                              std::uint64_t null_seed, double pct) {
    if (sub_lo < batch.lo || sub_hi > batch.hi || sub_lo >= sub_hi)
        throw std::invalid_argument("poisson_count_test: bad sub-window");
    std::vector<std::int64_t> counts;
    counts.reserve(batch.atoms.size());
    for (const auto& a : batch.atoms) {
        auto lo_it = std::lower_bound(a.begin(), a.end(), sub_lo);
        auto hi_it = std::upper_bound(a.begin(), a.end(), sub_hi);
        counts.push_back(static_cast<std::int64_t>(hi_it - lo_it));
    }
    const double lambda = sub_hi - sub_lo;
    TestReport r;
    r.name = "counts-vs-poisson";
    r.sample_size = static_cast<std::int64_t>(counts.size());
    r.statistic = tv_distance_poisson(counts, lambda);
    r.threshold =
        null_tv_poisson_threshold(lambda, r.sample_size, null_reps, null_seed, pct);
    r.pass = r.statistic <= r.threshold;
    auto [chi2, bins] = chi_square_poisson(counts, lambda);
    std::ostringstream d;
    d << "lambda=" << lambda << " chi2=" << chi2 << " bins=" << bins;
    r.detail = d.str();
    return r;
}

SpacingTests run_spacing_tests(const PointProcessBatch& batch, int null_reps,
                               std::uint64_t null_seed, double pct) {
    auto rep = pooled_spacings(batch);
    if (rep.spacings.empty())
        throw std::invalid_argument("run_spacing_tests: no spacings collected");
    auto null = null_spacing_thresholds(batch.realization_count(),
                                        batch.window_length(), null_reps,
                                        null_seed, pct);
    SpacingTests out;
    out.ks_exponential.name = "spacings-vs-exp";
    out.ks_exponential.statistic = ks_to_exponential(rep.spacings);
    out.ks_exponential.threshold = null.ks_exp_threshold;
    out.ks_exponential.sample_size = rep.eligible;
    out.ks_exponential.pass =
        out.ks_exponential.statistic <= out.ks_exponential.threshold;

    out.dls.name = "dls-vs-exp-survival";
    out.dls.statistic = dls_curve(rep).sup_exp_distance();
    out.dls.threshold = null.dls_threshold;
    out.dls.sample_size = rep.eligible;
    out.dls.pass = out.dls.statistic <= out.dls.threshold;
    return out;
}

TestReport half_line_check(const PointProcessBatch& batch, double tolerance) {
    if (tolerance < 0.0) throw std::invalid_argument("half_line_check: tolerance < 0");
    std::int64_t below = 0;
    std::int64_t total = batch.total_atoms();
    for (const auto& a : batch.atoms)
        for (double x : a)
            if (x < -tolerance) ++below;
    TestReport r;
    r.name = "edge-half-line";
    r.sample_size = total;
    r.statistic = total > 0 ? static_cast<double>(below) / static_cast<double>(total)
                            : 0.0;
    r.threshold = 0.0;
    r.pass = below == 0;
    std::ostringstream d;
    d << "atoms_below=" << below;
    r.detail = d.str();
    return r;
}

std::vector<double> CountReport::normalized() const {
    if (target_mean <= 0.0)
        throw std::logic_error("CountReport: target mean must be positive");
    std::vector<double> out;
    out.reserve(counts.size());
    const double s = std::sqrt(target_mean);
    for (auto c : counts)
        out.push_back((static_cast<double>(c) - target_mean) / s);
    return out;
}

TestReport clt_normal_test(const CountReport& report, double ks_threshold) {
    TestReport r;
    r.name = "counting-function-clt";
    r.sample_size = static_cast<std::int64_t>(report.counts.size());
    r.statistic = ks_to_standard_normal(report.normalized());
    r.threshold = ks_threshold;
    r.pass = r.statistic <= r.threshold;
    return r;
}

MomentSummary clt_moments(const CountReport& report) {
    return moment_summary(report.normalized());
}

std::vector<DeviationRow> deviation_profile(const CountReport& report,
                                            const std::vector<double>& gammas) {
    if (report.counts.empty())
        throw std::invalid_argument("deviation_profile: no counts");
    std::vector<DeviationRow> rows;
    const double n = static_cast<double>(report.counts.size());
    for (double g : gammas) {
        DeviationRow row;
        row.gamma = g;
        row.cutoff = std::pow(report.target_mean, g);
        std::int64_t beyond = 0;
        for (auto c : report.counts)
            if (std::abs(static_cast<double>(c) - report.target_mean) > row.cutoff)
                ++beyond;
        row.fraction = static_cast<double>(beyond) / n;
        rows.push_back(row);
    }
    return rows;
}

} // namespace andlab
