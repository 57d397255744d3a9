#include "andlab/ids.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace andlab {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

// Move any finalized knots back into the raw pool before appending.
void IDSTable::unfinalize() const {
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        std::int64_t c = cumulative_[i] - prev;
        prev = cumulative_[i];
        for (std::int64_t k = 0; k < c; ++k) pending_.push_back(knots_[i]);
    }
    knots_.clear();
    cumulative_.clear();
}

void IDSTable::note_provenance(const Provenance& p) {
    if (model_id_.empty()) model_id_ = p.model_id;
    else if (!p.model_id.empty() && p.model_id != model_id_)
        throw std::invalid_argument("IDSTable: model id mismatch: " + p.model_id +
                                    " vs " + model_id_);
    if (!seed_set_) { seed_ = p.seed; seed_set_ = true; }
    if (p.realization >= 0) {
        realization_min_ = std::min(realization_min_, p.realization);
        realization_max_ = std::max(realization_max_, p.realization);
    }
    ++realization_count_;
}

void IDSTable::accumulate(const SpectrumSample& s) {
    if (s.eigenvalues.empty()) throw std::invalid_argument("empty spectrum sample");
    if (truncation_)
        throw std::invalid_argument("cannot mix full spectra into a truncated table");
    note_provenance(s.provenance);
    unfinalize();
    pooled_sites_ += s.site_count;
    pending_.insert(pending_.end(), s.eigenvalues.begin(), s.eigenvalues.end());
}

void IDSTable::accumulate_truncated(const std::vector<double>& values,
                                    std::int64_t site_count, double cutoff,
                                    const Provenance& provenance) {
    if (!truncation_ && pooled_sites_ > 0)
        throw std::invalid_argument("cannot mix truncated spectra into a full table");
    for (double v : values)
        if (v > cutoff) throw std::invalid_argument("value above truncation cutoff");
    note_provenance(provenance);
    unfinalize();
    truncation_ = truncation_ ? std::min(*truncation_, cutoff) : cutoff;
    pooled_sites_ += site_count;
    pending_.insert(pending_.end(), values.begin(), values.end());
}

void IDSTable::merge(const IDSTable& other) {
    if (other.empty()) return;
    if (empty()) { *this = other; return; }
    if (other.model_id_ != model_id_)
        throw std::invalid_argument("IDSTable merge: model id mismatch");
    if (truncation_.has_value() != other.truncation_.has_value())
        throw std::invalid_argument("IDSTable merge: truncation mismatch");
    if (other.truncation_)
        truncation_ = std::min(*truncation_, *other.truncation_);
    unfinalize();
    other.finalize();
    // Rebuild the pending pool from the other table's per-knot counts.
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < other.knots_.size(); ++i) {
        std::int64_t c = other.cumulative_[i] - prev;
        prev = other.cumulative_[i];
        for (std::int64_t k = 0; k < c; ++k) pending_.push_back(other.knots_[i]);
    }
    pending_.insert(pending_.end(), other.pending_.begin(), other.pending_.end());
    pooled_sites_ += other.pooled_sites_;
    realization_count_ += other.realization_count_;
    realization_min_ = std::min(realization_min_, other.realization_min_);
    realization_max_ = std::max(realization_max_, other.realization_max_);
    if (!seed_set_ && other.seed_set_) { seed_ = other.seed_; seed_set_ = true; }
}

void IDSTable::finalize() const {
    if (pending_.empty()) return;
    unfinalize();
    std::sort(pending_.begin(), pending_.end());
    std::int64_t running = 0;
    for (std::size_t i = 0; i < pending_.size();) {
        std::size_t j = i;
        while (j < pending_.size() && pending_[j] == pending_[i]) ++j;
        running += static_cast<std::int64_t>(j - i);
        knots_.push_back(pending_[i]);
        cumulative_.push_back(running);
        i = j;
    }
    pending_.clear();
    pending_.shrink_to_fit();
}

bool IDSTable::contains_realization(std::uint64_t seed,
                                    std::int64_t realization) const {
    return seed_set_ && seed == seed_ && realization >= realization_min_ &&
           realization <= realization_max_;
}

const std::vector<double>& IDSTable::knots() const {
    finalize();
    return knots_;
}

double IDSTable::fraction_at_knot(std::size_t i) const {
    finalize();
    return static_cast<double>(cumulative_[i]) / static_cast<double>(pooled_sites_);
}

double IDSTable::evaluate(double E) const {
    if (empty()) throw std::logic_error("evaluate on empty IDS table");
    finalize();
    if (truncation_ && E > *truncation_)
        throw std::domain_error("query above the truncation cutoff");
    if (E < knots_.front()) return 0.0;
    if (E >= knots_.back())
        return static_cast<double>(cumulative_.back()) / pooled_sites_;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), E);
    std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
    std::size_t lo = hi - 1;
    double f_lo = static_cast<double>(cumulative_[lo]) / pooled_sites_;
    double f_hi = static_cast<double>(cumulative_[hi]) / pooled_sites_;
    double t = (E - knots_[lo]) / (knots_[hi] - knots_[lo]);
    return f_lo + t * (f_hi - f_lo);
}

double IDSTable::interval_mass(double a, double b) const {
    if (a > b) throw std::invalid_argument("interval_mass: inverted interval");
    return evaluate(b) - evaluate(a);
}

double IDSTable::quantile(double q) const {
    if (empty()) throw std::logic_error("quantile on empty IDS table");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0,1]");
    finalize();
    double f_first = static_cast<double>(cumulative_.front()) / pooled_sites_;
    if (q <= f_first) return knots_.front();
    // fractions are strictly increasing across distinct knots
    std::size_t lo = 0, hi = knots_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        double f = static_cast<double>(cumulative_[mid]) / pooled_sites_;
        if (f >= q) hi = mid; else lo = mid;
    }
    double f_lo = static_cast<double>(cumulative_[lo]) / pooled_sites_;
    double f_hi = static_cast<double>(cumulative_[hi]) / pooled_sites_;
    if (q >= f_hi) return knots_[hi];
    double t = (q - f_lo) / (f_hi - f_lo);
    return knots_[lo] + t * (knots_[hi] - knots_[lo]);
}

std::pair<double, double> IDSTable::interval_for_mass(Edge edge,
                                                      double anchor_energy,
                                                      double target_mass,
                                                      double volume) const {
    if (volume <= 0.0) throw std::invalid_argument("interval_for_mass: volume <= 0");
    double q = target_mass / volume;
    if (q > 1.0) throw std::invalid_argument("interval_for_mass: mass exceeds pool");
    switch (edge) {
        case Edge::Interior: {
            double center = evaluate(anchor_energy);
            if (center - q / 2 < 0.0 || center + q / 2 > 1.0)
                throw std::invalid_argument(
                    "interval_for_mass: requested mass exceeds available side mass");
            if (q == 0.0) return {anchor_energy, anchor_energy};
            return {quantile(center - q / 2), quantile(center + q / 2)};
        }
        case Edge::Lower:
            return {anchor_energy, quantile(q)};
        case Edge::Upper:
            return {quantile(1.0 - q), anchor_energy};
    }
    throw std::logic_error("unreachable");
}

LifshitzFit IDSTable::lifshitz_exponent_fit(
    double edge, const std::vector<double>& offsets) const {
    LifshitzFit fit;
    std::vector<double> xs, ys;
    for (double a : offsets) {
        if (a <= 0.0) throw std::invalid_argument("lifshitz fit: offsets must be > 0");
        double N = evaluate(edge + a);
        if (N <= 0.0 || N >= 1.0) {
            fit.skipped_offsets.push_back(a);
            continue;
        }
        xs.push_back(std::log(a));
        ys.push_back(std::log(-std::log(N)));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("lifshitz fit: fewer than 3 usable offsets");
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (slope * xs[i] + intercept);
        rss += r * r;
    }
    fit.exponent = -slope;
    fit.intercept = intercept;
    fit.residual_norm = std::sqrt(rss);
    fit.used_offsets = static_cast<int>(xs.size());
    return fit;
}

void IDSTable::save(std::ostream& out) const {
    finalize();
    out << "# andlab-ids 1\n";
    out << "# model " << model_id_ << "\n";
    out << "# seed " << seed_ << "\n";
    out << "# realizations " << realization_count_ << " " << realization_min_
        << " " << realization_max_ << "\n";
    out << "# sites " << pooled_sites_ << "\n";
    out << "# truncated " << (truncation_ ? fmt17(*truncation_) : "none") << "\n";
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        double frac = static_cast<double>(cumulative_[i]) / pooled_sites_;
        out << fmt17(knots_[i]) << "\t" << fmt17(frac) << "\n";
    }
}

IDSTable IDSTable::load(std::istream& in) {
    IDSTable t;
    std::string line;
    if (!std::getline(in, line) || line != "# andlab-ids 1")
        throw std::runtime_error("IDS table: bad magic line");
    auto header = [&](const std::string& tag) {
        if (!std::getline(in, line) || line.rfind("# " + tag, 0) != 0)
            throw std::runtime_error("IDS table: missing header " + tag);
        return line.substr(tag.size() + 3);
    };
    t.model_id_ = header("model");
    t.seed_ = std::stoull(header("seed"));
    t.seed_set_ = true;
    {
        std::istringstream ss(header("realizations"));
        ss >> t.realization_count_ >> t.realization_min_ >> t.realization_max_;
    }
    t.pooled_sites_ = std::stoll(header("sites"));
    {
        std::string tr = header("truncated");
        if (tr != "none") t.truncation_ = std::stod(tr);
    }
    double prev_frac = -1.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double e, frac;
        if (!(ss >> e >> frac)) throw std::runtime_error("IDS table: bad row");
        if (frac < prev_frac) throw std::runtime_error("IDS table: fractions decrease");
        prev_frac = frac;
        t.knots_.push_back(e);
        t.cumulative_.push_back(
            std::llround(frac * static_cast<double>(t.pooled_sites_)));
    }
    return t;
}

void IDSTable::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    save(out);
}

IDSTable IDSTable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    return load(in);
}

} // namespace andlab
