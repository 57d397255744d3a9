#include "andlab/box_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace andlab {

std::int64_t BoxDecomposition::box_of_site(std::int64_t site) const {
    auto coords = parent.site_coords(site);
    const int pitch = ell + buffer;
    std::int64_t box = 0;
    for (int ax = static_cast<int>(coords.size()) - 1; ax >= 0; --ax) {
        int c = coords[static_cast<std::size_t>(ax)];
        int j = c / pitch;
        if (j >= per_axis || c % pitch >= ell) return -1;
        box = box * per_axis + j;
    }
    return box;
}

std::int64_t BoxDecomposition::diag_volume() const {
    std::int64_t v = 1;
    for (int ax = 0; ax < parent.dimension(); ++ax) v *= diag_side();
    return v;
}

double BoxDecomposition::leftover_fraction() const {
    return static_cast<double>(leftover.size()) /
           static_cast<double>(parent.site_count());
}

BoxDecomposition decompose(const LatticeGeometry& parent, int ell, int buffer) {
    if (ell < 1 || buffer < 1)
        throw std::invalid_argument("decompose: ell and buffer must be >= 1");
    if (ell + buffer > parent.side_length())
        throw std::invalid_argument("decompose: ell + buffer exceeds the side");
    BoxDecomposition dec;
    dec.parent = parent;
    dec.ell = ell;
    dec.buffer = buffer;
    dec.per_axis = parent.side_length() / (ell + buffer);
    const int d = parent.dimension();
    std::int64_t count = 1;
    for (int ax = 0; ax < d; ++ax) count *= dec.per_axis;
    dec.origins.reserve(static_cast<std::size_t>(count));
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (std::int64_t b = 0; b < count; ++b) {
        std::vector<int> origin(static_cast<std::size_t>(d));
        for (int ax = 0; ax < d; ++ax)
            origin[static_cast<std::size_t>(ax)] =
                idx[static_cast<std::size_t>(ax)] * (ell + buffer);
        dec.origins.push_back(std::move(origin));
        for (int ax = 0; ax < d; ++ax) {
            if (++idx[static_cast<std::size_t>(ax)] < dec.per_axis) break;
            idx[static_cast<std::size_t>(ax)] = 0;
        }
    }
    for (std::int64_t s = 0; s < parent.site_count(); ++s)
        if (dec.box_of_site(s) < 0) dec.leftover.push_back(s);
    return dec;
}

std::pair<int, int> log_scales(int side, double c1, double c2) {
    if (side < 3) throw std::invalid_argument("log_scales: side too small");
    double lg = std::log(static_cast<double>(side));
    return {static_cast<int>(std::ceil(c1 * lg)),
            static_cast<int>(std::ceil(c2 * lg))};
}

double LocalizationReport::median_decay_rate() const {
    std::vector<double> rates;
    for (const auto& v : vectors)
        if (!v.point_mass) rates.push_back(v.decay_rate);
    if (rates.empty())
        throw std::logic_error("median_decay_rate: no fitted vectors");
    std::sort(rates.begin(), rates.end());
    std::size_t n = rates.size();
    return n % 2 ? rates[n / 2] : 0.5 * (rates[n / 2 - 1] + rates[n / 2]);
}

LocalizationReport localization_centers(const EigenPairs& pairs, double a,
                                        double b) {
    if (pairs.vectors.empty())
        throw std::invalid_argument("localization_centers: eigenvectors required");
    LocalizationReport rep;
    LatticeGeometry geo(pairs.spectrum.dimension, pairs.spectrum.side_length);
    const std::int64_t n = geo.site_count();
    for (std::size_t j = 0; j < pairs.spectrum.eigenvalues.size(); ++j) {
        double E = pairs.spectrum.eigenvalues[j];
        if (E < a || E > b) continue;
        const double* v = pairs.vectors.data() + static_cast<std::size_t>(n) * j;
        VectorLocalization loc;
        loc.eigenvalue = E;
        double best = -1.0;
        for (std::int64_t x = 0; x < n; ++x) {
            double m = v[x] * v[x];
            if (m > best) {
                best = m;
                loc.center = x;
            }
        }
        // least squares of log mass against periodic distance from the center
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (std::int64_t x = 0; x < n; ++x) {
            int dist = geo.periodic_distance(x, loc.center);
            if (dist < 2 || std::abs(v[x]) <= 1e-14) continue;
            double lx = static_cast<double>(dist);
            double ly = std::log(v[x] * v[x]);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++cnt;
        }
        loc.fit_points = cnt;
        if (cnt < 2) {
            loc.point_mass = true;
        } else {
            double nn = static_cast<double>(cnt);
            double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
            loc.log_prefactor = (sy - slope * sx) / nn;
            loc.decay_rate = -slope / 2.0;
            double rss = 0.0;
            for (std::int64_t x = 0; x < n; ++x) {
                int dist = geo.periodic_distance(x, loc.center);
                if (dist < 2 || std::abs(v[x]) <= 1e-14) continue;
                double r = std::log(v[x] * v[x]) -
                           (slope * dist + loc.log_prefactor);
                rss += r * r;
            }
            loc.residual = std::sqrt(rss / nn);
        }
        rep.vectors.push_back(std::move(loc));
    }
    return rep;
}

std::vector<std::vector<double>> local_spectra(const HoppingKernel& kernel,
                                               const std::vector<double>& disorder,
                                               const BoxDecomposition& dec,
                                               double a, double b,
                                               bool truncated_bc) {
    const auto& parent = dec.parent;
    if (static_cast<std::int64_t>(disorder.size()) != parent.site_count())
        throw std::invalid_argument("local_spectra: disorder size mismatch");
    const int d = parent.dimension();
    const int L = parent.side_length();
    const int halo = dec.halo();
    const int side = dec.diag_side();
    LatticeGeometry box_geo(d, side);
    std::vector<std::vector<double>> out;
    out.reserve(dec.origins.size());
    for (const auto& origin : dec.origins) {
        // parent disorder restricted to the enlarged box, in box site order
        std::vector<double> w(static_cast<std::size_t>(box_geo.site_count()));
        for (std::int64_t s = 0; s < box_geo.site_count(); ++s) {
            auto c = box_geo.site_coords(s);
            std::vector<int> pc(static_cast<std::size_t>(d));
            for (int ax = 0; ax < d; ++ax)
                pc[static_cast<std::size_t>(ax)] =
                    (origin[static_cast<std::size_t>(ax)] - halo +
                     c[static_cast<std::size_t>(ax)] + L) % L;
            w[static_cast<std::size_t>(s)] =
                disorder[static_cast<std::size_t>(parent.site_index(pc))];
        }
        std::vector<double> eigs;
        if (!truncated_bc) {
            auto H = build_hamiltonian(kernel, box_geo, std::move(w));
            eigs = eigenvalues_symmetric(H).eigenvalues;
        } else {
            // plain restriction: kernel entries without any wrap inside the box
            const std::int64_t nb = box_geo.site_count();
            std::vector<double> A(static_cast<std::size_t>(nb * nb), 0.0);
            for (std::int64_t x = 0; x < nb; ++x) {
                A[static_cast<std::size_t>(x + nb * x)] =
                    kernel.at(std::vector<int>(static_cast<std::size_t>(d), 0)) +
                    w[static_cast<std::size_t>(x)];
                auto cx = box_geo.site_coords(x);
                for (const auto& [off, hv] : kernel.coefficients()) {
                    bool inside = true;
                    std::vector<int> cy(cx);
                    for (int ax = 0; ax < d; ++ax) {
                        int c = cx[static_cast<std::size_t>(ax)] +
                                off[static_cast<std::size_t>(ax)];
                        if (c < 0 || c >= side) { inside = false; break; }
                        cy[static_cast<std::size_t>(ax)] = c;
                    }
                    bool zero = std::all_of(off.begin(), off.end(),
                                            [](int o) { return o == 0; });
                    if (!inside || zero) continue;
                    std::int64_t y = box_geo.site_index(cy);
                    A[static_cast<std::size_t>(x + nb * y)] = hv;
                }
            }
            eigs = dense_symmetric_eigenvalues(A, nb);
        }
        std::vector<double> in_window;
        for (double e : eigs)
            if (e >= a && e <= b) in_window.push_back(e);
        out.push_back(std::move(in_window));
    }
    return out;
}

double ReductionReport::error_quantile(double q) const {
    if (matches.empty()) throw std::logic_error("error_quantile: no matches");
    std::vector<double> errs;
    errs.reserve(matches.size());
    for (const auto& m : matches) errs.push_back(m.error);
    std::sort(errs.begin(), errs.end());
    double idx = q * (static_cast<double>(errs.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(idx);
    std::size_t hi = std::min(lo + 1, errs.size() - 1);
    double t = idx - static_cast<double>(lo);
    return errs[lo] + t * (errs[hi] - errs[lo]);
}

ReductionReport match_eigenvalues(const LocalizationReport& localization,
                                  const std::vector<std::vector<double>>& locals,
                                  const BoxDecomposition& dec, double a,
                                  double b) {
    if (static_cast<std::int64_t>(locals.size()) != dec.box_count())
        throw std::invalid_argument("match_eigenvalues: box count mismatch");
    ReductionReport rep;
    for (const auto& lv : locals)
        if (lv.size() >= 2) ++rep.crowded_boxes;
    std::vector<std::vector<bool>> used(locals.size());
    for (std::size_t j = 0; j < locals.size(); ++j)
        used[j].assign(locals[j].size(), false);
    for (const auto& v : localization.vectors) {
        if (v.eigenvalue < a || v.eigenvalue > b) continue;
        ++rep.window_eigenvalues;
        std::int64_t box = dec.box_of_site(v.center);
        if (box < 0) {
            ++rep.leftover_centers;
            continue;
        }
        const auto& cand = locals[static_cast<std::size_t>(box)];
        std::size_t best = cand.size();
        double best_err = 0.0;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (used[static_cast<std::size_t>(box)][i]) continue;
            double err = std::abs(cand[i] - v.eigenvalue);
            if (best == cand.size() || err < best_err) {
                best = i;
                best_err = err;
            }
        }
        if (best == cand.size()) {
            ++rep.unmatched;
            continue;
        }
        used[static_cast<std::size_t>(box)][best] = true;
        rep.matches.push_back({box, v.eigenvalue, cand[best], best_err});
    }
    return rep;
}

BernoulliReport bernoulli_sample(
    const std::vector<std::vector<std::vector<double>>>& batches, double a,
    double b, double box_volume, const IDSTable& table,
    std::int64_t min_samples) {
    BernoulliReport rep;
    rep.expected = table.interval_mass(a, b) * box_volume;
    if (rep.expected > 0.1)
        throw std::invalid_argument(
            "bernoulli_sample: N(I)|box| > 0.1, outside the small regime");
    for (const auto& realization : batches) {
        for (const auto& box : realization) {
            ++rep.samples;
            std::int64_t k = 0;
            double value = 0.0;
            for (double e : box)
                if (e >= a && e <= b) { ++k; value = e; }
            if (k == 1) {
                ++rep.ones;
                rep.positions.push_back((value - a) / (b - a));
            } else if (k >= 2) {
                ++rep.multi;
            }
        }
    }
    if (rep.samples < min_samples)
        throw std::invalid_argument("bernoulli_sample: too few box samples");
    rep.p_hat = static_cast<double>(rep.ones) / static_cast<double>(rep.samples);
    rep.ci_halfwidth = 1.96 * std::sqrt(rep.p_hat * (1.0 - rep.p_hat) /
                                        static_cast<double>(rep.samples));
    rep.ratio = rep.expected > 0.0 ? rep.p_hat / rep.expected : 0.0;
    return rep;
}

std::vector<IncrementCheck> increment_checks(
    const BernoulliReport& report, const IDSTable& table, double a, double b,
    double box_volume, const std::vector<std::pair<double, double>>& yx_pairs) {
    std::vector<IncrementCheck> out;
    const double len = b - a;
    for (auto [y, x] : yx_pairs) {
        if (!(0.0 <= y && y < x && x <= 1.0))
            throw std::invalid_argument("increment_checks: need 0 <= y < x <= 1");
        IncrementCheck c;
        c.y = y;
        c.x = x;
        std::int64_t hits = 0;
        for (double p : report.positions)
            if (p > y && p <= x) ++hits;
        c.empirical = static_cast<double>(hits) /
                      static_cast<double>(report.samples);
        c.predicted = table.interval_mass(a + y * len, a + x * len) * box_volume;
        c.binomial_err = 3.0 * std::sqrt(std::max(c.predicted, 1e-12) *
                                         (1.0 - c.predicted) /
                                         static_cast<double>(report.samples));
        c.pass = std::abs(c.empirical - c.predicted) <= c.binomial_err;
        out.push_back(c);
    }
    return out;
}

} // namespace andlab
