// Acceptance suite: one line per criterion, exit 0 iff all pass.
// Exact oracles where the answer is analytic, null-calibrated statistical
// tests elsewhere; every tolerance is pinned here.

#include "andlab/box_reduction.hpp"
#include "andlab/config.hpp"
#include "andlab/eig.hpp"
#include "andlab/goodness.hpp"
#include "andlab/harness.hpp"
#include "andlab/ids.hpp"
#include "andlab/lattice.hpp"
#include "andlab/level_stats.hpp"
#include "andlab/moments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

using namespace andlab;

namespace {

struct Criterion {
    bool pass = false;
    std::string detail;
};

Criterion results[15]; // 1-based

void set(int n, bool pass, const std::string& detail) {
    results[n].pass = pass;
    results[n].detail = detail;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

void progress(const std::string& msg) {
    std::fprintf(stderr, "[%8.1fs] %s\n", now_seconds(), msg.c_str());
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

// ---- standard 1D model shared by most criteria -----------------------------

// Strong disorder keeps the localization length at ~1 site, so unit-scale
// spectral windows at L=1000 are already deep in the Poisson regime (weaker
// disorder leaves a measurable sub-Poisson variance deficit at this size).
const char* kModelId = "accept-nn-1d";
const std::uint64_t kSeed = 101;
const double kLambda = 12.0;
const double kDensitySup = 1.0 / 12.0; // sup density of lambda * uniform[0,1]
const double kBulkAnchor = 1.0;

HoppingKernel std_kernel() { return HoppingKernel::nearest_neighbor_1d(); }
DisorderSpec std_disorder() { return DisorderSpec::uniform(0.0, 1.0, kLambda); }

HamiltonianMatrix std_hamiltonian(int L, std::int64_t r) {
    LatticeGeometry g(1, L);
    auto w = sample_disorder(std_disorder(), g, kSeed, r);
    return build_hamiltonian(std_kernel(), g, std::move(w), {kModelId, kSeed, r});
}

// ---- criterion 1: eigensolver exactness ------------------------------------

void criterion_1() {
    using clock = std::chrono::steady_clock;
    LatticeGeometry g(1, 256);
    auto H0 = build_hamiltonian(std_kernel(), g, std::vector<double>(256, 0.0));
    auto t0 = clock::now();
    auto free_spec = eigenvalues_symmetric(H0);
    double dt_free = std::chrono::duration<double>(clock::now() - t0).count();
    std::vector<double> ref;
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < 256; ++k) ref.push_back(2.0 * std::cos(2.0 * pi * k / 256.0));
    std::sort(ref.begin(), ref.end());
    double free_err = 0.0;
    for (int i = 0; i < 256; ++i)
        free_err = std::max(free_err, std::abs(free_spec.eigenvalues[i] - ref[i]));

    auto H = std_hamiltonian(200, 7);
    t0 = clock::now();
    auto pairs = eigenpairs_symmetric(H);
    double dt_rand = std::chrono::duration<double>(clock::now() - t0).count();
    const auto& A = H.dense();
    const int n = 200;
    double resid = 0.0, orth = 0.0;
    for (int j = 0; j < n; ++j) {
        const double* v = pairs.vectors.data() + static_cast<std::size_t>(n) * j;
        double lam = pairs.spectrum.eigenvalues[static_cast<std::size_t>(j)];
        for (int x = 0; x < n; ++x) {
            double hv = 0.0;
            for (int y = 0; y < n; ++y)
                hv += A[static_cast<std::size_t>(x + n * y)] * v[y];
            resid = std::max(resid, std::abs(hv - lam * v[x]));
        }
        for (int j2 = j; j2 < n; ++j2) {
            const double* u = pairs.vectors.data() + static_cast<std::size_t>(n) * j2;
            double dot = 0.0;
            for (int x = 0; x < n; ++x) dot += v[x] * u[x];
            orth = std::max(orth, std::abs(dot - (j == j2 ? 1.0 : 0.0)));
        }
    }
    bool pass = free_err < 1e-10 && resid < 1e-9 && orth < 1e-9 &&
                dt_free < 1.0 && dt_rand < 1.0;
    set(1, pass,
        "free-lattice sup err " + fmt(free_err) + " (<1e-10), residual " +
            fmt(resid) + ", orthonormality " + fmt(orth) + " (<1e-9), times " +
            fmt(dt_free) + "s/" + fmt(dt_rand) + "s (<1s)");
}

// ---- criterion 2: inertia count vs full diagonalization --------------------

void criterion_2() {
    std::int64_t checked = 0, agreed = 0;
    for (int i = 0; i < 100; ++i) {
        const int L = 60;
        LatticeGeometry g(1, L);
        auto kern = HoppingKernel::nearest_neighbor_1d();
        if (i % 5 == 0) kern.set({2}, 0.3); // exercise the wider-band path
        auto spec = DisorderSpec::uniform(0.0, 1.0, 1.0 + i % 4);
        auto w = sample_disorder(spec, g, 202, i);
        auto H = build_hamiltonian(kern, g, std::move(w));
        auto full = eigenvalues_symmetric(H).eigenvalues; // oracle
        for (int j = 0; j < 10; ++j) {
            int idx = j * 6 + 2;
            double e = 0.5 * (full[static_cast<std::size_t>(idx)] +
                              full[static_cast<std::size_t>(idx + 1)]);
            ++checked;
            if (count_below(H, e) == idx + 1) ++agreed;
        }
    }
    set(2, agreed == checked,
        std::to_string(agreed) + "/" + std::to_string(checked) +
            " inertia counts equal the full-diagonalization count");
}

// ---- criterion 3: zero-hopping IDS vs the uniform CDF ----------------------

void criterion_3() {
    IDSTable t("diag-accept");
    LatticeGeometry g(1, 100);
    auto spec = DisorderSpec::uniform(0.0, 1.0);
    for (int r = 0; r < 100; ++r) {
        auto v = sample_disorder(spec, g, 303, r);
        std::sort(v.begin(), v.end());
        t.accumulate({std::move(v), 1, 100, 100, {"diag-accept", 303, r}});
    }
    double sup = 0.0;
    for (double e = 0.0; e <= 1.0; e += 0.001)
        sup = std::max(sup, std::abs(t.evaluate(e) - e));
    set(3, sup < 0.03,
        "sup |N - uniform CDF| = " + fmt(sup) + " over 10^4 pooled values (<0.03)");
}

// ---- shared pools ----------------------------------------------------------

IDSTable build_shared_table() {
    IDSTable t(kModelId);
    for (std::int64_t r = 0; r < 1500; ++r) {
        auto H = std_hamiltonian(512, r);
        t.accumulate(eigenvalues_symmetric(H));
        if (r % 300 == 299) progress("ids pool " + std::to_string(r + 1) + "/1500");
    }
    return t;
}

struct StatsBatch {
    // nested bulk intervals around the anchor, masses 2/4/8
    std::pair<double, double> I1, I2, I3;
    double len1 = 0, len2 = 0, len3 = 0;
    double mass1 = 0, mass2 = 0, mass3 = 0;
    std::vector<std::vector<std::int64_t>> nested_counts; // per realization
    PointProcessBatch bulk, edge;
};

StatsBatch run_stats_batch(const IDSTable& table) {
    StatsBatch b;
    const double V = 1000.0;
    b.I1 = table.interval_for_mass(IDSTable::Edge::Interior, kBulkAnchor, 2.0, V);
    b.I2 = table.interval_for_mass(IDSTable::Edge::Interior, kBulkAnchor, 4.0, V);
    b.I3 = table.interval_for_mass(IDSTable::Edge::Interior, kBulkAnchor, 8.0, V);
    b.len1 = b.I1.second - b.I1.first;
    b.len2 = b.I2.second - b.I2.first;
    b.len3 = b.I3.second - b.I3.first;
    b.mass1 = table.interval_mass(b.I1.first, b.I1.second);
    b.mass2 = table.interval_mass(b.I2.first, b.I2.second);
    b.mass3 = table.interval_mass(b.I3.first, b.I3.second);

    // bulk energy window: unfolded [-4,4] plus slack mass 2 per side
    const double n0 = table.evaluate(kBulkAnchor);
    const double bulk_lo_E = table.quantile(n0 - 6.0 / V);
    const double bulk_hi_E = table.quantile(n0 + 6.0 / V);
    // edge energy window: [inf spectrum, quantile of mass (4+2)/V]
    const double edge_anchor = -2.0; // min of the hopping symbol + min disorder
    const double edge_hi_E = table.quantile(6.0 / V);

    std::vector<UnfoldedSample> bulk_samples, edge_samples;
    for (std::int64_t r = 100000; r < 105000; ++r) {
        auto H = std_hamiltonian(1000, r);
        Provenance prov{kModelId, kSeed, r};
        auto bulk_vals = eigenvalues_in_interval(H, bulk_lo_E, bulk_hi_E);
        bulk_samples.push_back(
            unfold(bulk_vals, 1000, prov, table, kBulkAnchor, -4.0, 4.0));
        auto edge_vals = eigenvalues_in_interval(H, -2.0000001, edge_hi_E);
        edge_samples.push_back(
            unfold(edge_vals, 1000, prov, table, edge_anchor, -1.0, 4.0));
        std::int64_t c_lo1 = count_below(H, b.I1.first);
        b.nested_counts.push_back({count_below(H, b.I1.second) - c_lo1,
                                   count_below(H, b.I2.second) -
                                       count_below(H, b.I2.first),
                                   count_below(H, b.I3.second) -
                                       count_below(H, b.I3.first)});
        if (r % 1000 == 999)
            progress("stats pool " + std::to_string(r - 100000 + 1) + "/5000");
    }
    b.bulk = collect_point_process(bulk_samples);
    b.edge = collect_point_process(edge_samples);
    return b;
}

// ---- criterion 4: classical Wegner ----------------------------------------

void criterion_4(const StatsBatch& sb) {
    // zero-hopping multiplication operator saturates density_sup |I| |Lambda|
    LatticeGeometry g(1, 100);
    auto spec = DisorderSpec::uniform(0.0, 1.0);
    std::vector<std::int64_t> counts;
    for (int r = 0; r < 800; ++r) {
        auto v = sample_disorder(spec, g, 304, r);
        std::int64_t c = 0;
        for (double x : v)
            if (x >= 0.2 && x <= 0.3) ++c;
        counts.push_back(c);
    }
    auto sat = wegner_estimate(counts, 0.1, 100.0, 1.0, 0.1);
    bool saturated =
        std::abs(sat.classical.estimate - sat.classical.bound) <=
        2.0 * sat.classical.std_error;

    // 1D Anderson bulk: classical bound holds at every tested interval
    std::vector<std::int64_t> c1, c2, c3;
    for (const auto& row : sb.nested_counts) {
        c1.push_back(row[0]);
        c2.push_back(row[1]);
        c3.push_back(row[2]);
    }
    auto w1 = wegner_estimate(c1, sb.len1, 1000.0, kDensitySup, sb.mass1);
    auto w2 = wegner_estimate(c2, sb.len2, 1000.0, kDensitySup, sb.mass2);
    auto w3 = wegner_estimate(c3, sb.len3, 1000.0, kDensitySup, sb.mass3);
    bool anderson = w1.classical.pass && w2.classical.pass && w3.classical.pass;
    set(4, saturated && anderson,
        "zero-hopping mean " + fmt(sat.classical.estimate) + " vs bound " +
            fmt(sat.classical.bound) + " (+-" + fmt(2 * sat.classical.std_error) +
            "); Anderson classical bound holds at 3 nested intervals (" +
            fmt(w1.classical.estimate) + "<=" + fmt(w1.classical.bound) + ", " +
            fmt(w2.classical.estimate) + "<=" + fmt(w2.classical.bound) + ", " +
            fmt(w3.classical.estimate) + "<=" + fmt(w3.classical.bound) + ")");
}

// ---- criteria 5 + 6: enhanced Wegner / Minami / HOM ------------------------

void criterion_5(const StatsBatch& sb, const IDSTable& table) {
    std::vector<std::int64_t> c2;
    for (const auto& row : sb.nested_counts) c2.push_back(row[1]);
    auto w = wegner_estimate(c2, sb.len2, 1000.0, kDensitySup, sb.mass2);
    double ratio = w.classical.estimate / (sb.mass2 * 1000.0);
    bool ratio_ok = ratio >= 0.9 && ratio <= 1.1;

    // wcontrol: fresh realizations per side, counts in the same interval
    std::vector<int> sides = {128, 256, 512};
    std::vector<double> vols = {128.0, 256.0, 512.0};
    std::vector<std::vector<std::int64_t>> per_side;
    for (std::size_t si = 0; si < sides.size(); ++si) {
        std::vector<std::int64_t> counts;
        std::int64_t base = 200000 + static_cast<std::int64_t>(si) * 10000;
        for (std::int64_t r = base; r < base + 2000; ++r) {
            auto H = std_hamiltonian(sides[si], r);
            counts.push_back(count_below(H, sb.I2.second) -
                             count_below(H, sb.I2.first));
        }
        per_side.push_back(std::move(counts));
    }
    auto rows = wcontrol_decay(sides, vols, per_side, sb.mass2);
    bool wc_ok = true;
    std::string wc_detail;
    for (const auto& row : rows) {
        wc_ok = wc_ok && !row.resolvable;
        wc_detail += " L=" + std::to_string(row.side) + " gap " +
                     fmt(row.abs_gap) + "/2se " + fmt(2 * row.std_error);
    }
    (void)table;
    set(5, ratio_ok && wc_ok,
        "mean-count/(N(I)|Lambda|) = " + fmt(ratio) +
            " (in [0.9,1.1]); wcontrol gaps within 2se:" + wc_detail);
}

void criterion_6(const StatsBatch& sb) {
    std::vector<std::int64_t> c2;
    for (const auto& row : sb.nested_counts) c2.push_back(row[1]);
    auto m = minami_estimate(c2, sb.len2, 1000.0, kDensitySup, sb.mass2);
    std::vector<double> lens = {sb.len1, sb.len2, sb.len3};
    auto hom = high_order_moment(sb.nested_counts, lens, 1000.0, kDensitySup,
                                 sb.mass3);
    set(6, m.refined.pass && hom.pass,
        "E[k(k-1)] " + fmt(m.refined.estimate) + " + 2se " +
            fmt(2 * m.refined.std_error) + " <= " + fmt(m.refined.bound) +
            "; n=3 HOM " + fmt(hom.estimate) + " + 2se " +
            fmt(2 * hom.std_error) + " <= " + fmt(hom.bound));
}

// ---- criteria 7, 8, 10: point-process statistics ---------------------------

void criterion_7(const StatsBatch& sb) {
    auto count = poisson_count_test(sb.bulk, -2.0, 2.0, 300, 424242);
    auto spacing = run_spacing_tests(sb.bulk, 300, 515151);
    double intensity = sb.bulk.intensity();
    bool intensity_ok = intensity >= 0.95 && intensity <= 1.05;
    set(7, count.pass && spacing.ks_exponential.pass && intensity_ok,
        "count TV " + fmt(count.statistic) + " < null-99% " +
            fmt(count.threshold) + "; spacing KS " +
            fmt(spacing.ks_exponential.statistic) + " < " +
            fmt(spacing.ks_exponential.threshold) + "; intensity " +
            fmt(intensity) + " (in [0.95,1.05])");
}

void criterion_8(const StatsBatch& sb) {
    auto half = half_line_check(sb.edge, 0.05);
    auto count = poisson_count_test(sb.edge, 0.0, 4.0, 300, 636363);
    bool half_ok = half.statistic < 0.01;
    set(8, half_ok && count.pass,
        "half-line violation fraction " + fmt(half.statistic) +
            " (<0.01, margin 0.05); edge count TV " + fmt(count.statistic) +
            " < null-99% " + fmt(count.threshold) + " at " +
            std::to_string(sb.edge.realization_count()) + " realizations");
}

void criterion_10(const StatsBatch& sb) {
    auto rep = pooled_spacings(sb.bulk);
    auto curve = dls_curve(rep);
    auto spacing = run_spacing_tests(sb.bulk, 300, 515151);
    bool enough = rep.eligible >= 10000;
    set(10, spacing.dls.pass && enough,
        "sup |DLS - e^{-x}| = " + fmt(curve.sup_exp_distance()) +
            " < null-99% " + fmt(spacing.dls.threshold) + " on " +
            std::to_string(rep.eligible) + " pooled spacings (>=10^4)");
}

// ---- criterion 11: CLT of the counting function ----------------------------

// The counting variance only matches the mean once the window is narrow on
// the scale of one localization volume's level spacing; mass 100 therefore
// needs a large volume. Counts come from inertia (no diagonalization), so
// L = 10^4 is cheap. The target mean is estimated from an independent
// realization pool at the same L: the normalization (c - t)/sqrt(t) needs t
// to ~0.3% where the pooled-CDF table only delivers ~1%.
void criterion_11(const IDSTable& table) {
    const int L = 10000;
    const double V = static_cast<double>(L);
    auto I = table.interval_for_mass(IDSTable::Edge::Interior, kBulkAnchor,
                                     100.0, V);
    auto count_one = [&](std::int64_t r) {
        auto H = std_hamiltonian(L, r);
        return count_below(H, I.second) - count_below(H, I.first);
    };
    double target = 0.0;
    for (std::int64_t r = 500000; r < 502000; ++r)
        target += static_cast<double>(count_one(r));
    target /= 2000.0;
    CountReport rep;
    rep.target_mean = target;
    for (std::int64_t r = 400000; r < 402000; ++r)
        rep.counts.push_back(count_one(r));
    auto ks = clt_normal_test(rep, 0.05);
    auto m = clt_moments(rep);
    auto rows = deviation_profile(rep, {0.55, 0.7, 0.85, 1.0});
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        monotone = monotone && rows[i].fraction <= rows[i - 1].fraction;
    bool skew_ok = std::abs(m.skewness) < 0.15;
    set(11, ks.pass && skew_ok && monotone,
        "target N(I)|Lambda| = " + fmt(target) +
            "; KS to normal " + fmt(ks.statistic) + " (<0.05), skewness " +
            fmt(m.skewness) + " (<0.15), deviation fractions " +
            fmt(rows[0].fraction) + ">=" + fmt(rows[1].fraction) + ">=" +
            fmt(rows[2].fraction) + ">=" + fmt(rows[3].fraction));
}

// ---- criterion 9: Lifshitz exponent ----------------------------------------

// Model with an atom of mass 1/2 at the bottom of the disorder support: for
// such laws the tail is the pure Lifshitz form N(a) ~ exp(-c a^{-1/2}) and
// the exponent is reachable by sampling. (For laws with a vanishing density
// at the bottom, e.g. uniform, the tail carries an extra log(1/a) factor
// that only dies in the double-log limit: the fitted slope at any samplable
// depth sits near 1, not 1/2.)
void criterion_9() {
    DisorderSpec spec;
    spec.family = DisorderFamily::TabulatedInverseCdf;
    spec.icdf_u = {0.0, 0.5, 1.0};
    spec.icdf_q = {0.0, 0.0, 1.0};
    spec.lambda = 3.0;
    auto kern = std_kernel();
    LatticeGeometry g(1, 2048);
    const double edge = -2.0, cutoff = -1.7;
    IDSTable tail("accept-atom-1d");
    for (std::int64_t r = 0; r < 3000; ++r) {
        auto w = sample_disorder(spec, g, 606, r);
        auto H = build_hamiltonian(kern, g, std::move(w), {"accept-atom-1d", 606, r});
        auto vals = eigenvalues_in_interval(H, edge - 1e-7, cutoff);
        tail.accumulate_truncated(vals, 2048, cutoff, {"accept-atom-1d", 606, r});
        if (r % 1000 == 999)
            progress("tail pool " + std::to_string(r + 1) + "/3000");
    }
    // offsets chosen from tail quantiles so each carries resolvable mass
    std::vector<double> offsets;
    for (double m : {5e-6, 2e-5, 8e-5, 3e-4, 1e-3})
        offsets.push_back(tail.quantile(m) - edge);
    std::sort(offsets.begin(), offsets.end());
    auto fit = tail.lifshitz_exponent_fit(edge, offsets);
    bool pass = fit.exponent >= 0.35 && fit.exponent <= 0.65 &&
                fit.used_offsets >= 3;
    std::string offs;
    for (double a : offsets) offs += " " + fmt(a);
    set(9, pass,
        "fitted exponent " + fmt(fit.exponent) + " (in [0.35,0.65]), residual " +
            fmt(fit.residual_norm) + ", offsets" + offs + " (" +
            std::to_string(fit.used_offsets) + " used)");
}

// ---- criterion 12: box reduction -------------------------------------------

void criterion_12() {
    const int L = 1000;
    const double a = 2.0, b = 2.5;
    auto kern = std_kernel();
    auto spec = DisorderSpec::uniform(0.0, 1.0, 5.0); // strongly localized
    LatticeGeometry g(1, L);
    const int ell = log_scales(L, 8.0, 3.0).first; // 56
    std::vector<int> buffers;
    for (double c2 : {2.0, 3.0, 4.0})
        buffers.push_back(log_scales(L, 8.0, c2).second); // 14, 21, 28

    std::vector<double> decay_rates;
    std::vector<std::vector<double>> errors(buffers.size());
    std::int64_t in_box_default = 0, matched_default = 0;
    for (std::int64_t r = 0; r < 30; ++r) {
        auto w = sample_disorder(spec, g, 404, r);
        auto H = build_hamiltonian(kern, g, w, {"accept-red-1d", 404, r});
        auto pairs = eigenpairs_symmetric(H);
        auto loc = localization_centers(pairs, a, b);
        for (const auto& v : loc.vectors)
            if (!v.point_mass) decay_rates.push_back(v.decay_rate);
        for (std::size_t bi = 0; bi < buffers.size(); ++bi) {
            auto dec = decompose(g, ell, buffers[bi]);
            auto locals = local_spectra(kern, w, dec, a, b);
            auto rep = match_eigenvalues(loc, locals, dec, a, b);
            for (const auto& mp : rep.matches)
                errors[bi].push_back(mp.error);
            if (buffers[bi] == 21) { // the c2 = 3 default
                in_box_default += rep.window_eigenvalues - rep.leftover_centers;
                matched_default += static_cast<std::int64_t>(rep.matches.size());
            }
        }
        if (r % 10 == 9) progress("reduction " + std::to_string(r + 1) + "/30");
    }
    std::sort(decay_rates.begin(), decay_rates.end());
    double xi_hat = decay_rates[decay_rates.size() / 2];
    std::vector<double> medians;
    for (auto& e : errors) {
        std::sort(e.begin(), e.end());
        medians.push_back(e[e.size() / 2]);
    }
    double frac = static_cast<double>(matched_default) /
                  static_cast<double>(in_box_default);
    double tol = 10.0 * std::exp(-xi_hat * 21.0 / 2.0);
    bool monotone = medians[1] <= medians[0] && medians[2] <= medians[1];
    set(12, frac >= 0.9 && medians[1] < tol && monotone,
        "matched fraction " + fmt(frac) + " (>=0.9); median error " +
            fmt(medians[1]) + " < 10 e^{-xi l'/2} = " + fmt(tol) +
            " (xi-hat " + fmt(xi_hat) + "); medians over l' {14,21,28}: " +
            fmt(medians[0]) + " >= " + fmt(medians[1]) + " >= " + fmt(medians[2]));
}

// ---- criterion 13: single-level box probability ----------------------------

void criterion_13(const IDSTable& table) {
    const int L = 1000;
    LatticeGeometry g(1, L);
    auto dec = decompose(g, 56, 21);
    const double box_vol = static_cast<double>(dec.diag_volume());
    auto I = table.interval_for_mass(IDSTable::Edge::Interior, kBulkAnchor,
                                     0.05, box_vol);
    auto kern = std_kernel();
    auto spec = std_disorder();
    std::vector<std::vector<std::vector<double>>> batches;
    for (std::int64_t r = 300000; r < 303000; ++r) {
        auto w = sample_disorder(spec, g, kSeed, r);
        batches.push_back(local_spectra(kern, w, dec, I.first, I.second));
        if (r % 1000 == 999)
            progress("box samples " + std::to_string(r - 300000 + 1) + "/3000");
    }
    auto rep = bernoulli_sample(batches, I.first, I.second, box_vol, table);
    bool ratio_ok = rep.ratio >= 0.9 && rep.ratio <= 1.1;
    auto incs = increment_checks(rep, table, I.first, I.second, box_vol,
                                 {{0.0, 1.0 / 3.0},
                                  {1.0 / 3.0, 2.0 / 3.0},
                                  {2.0 / 3.0, 1.0}});
    bool incs_ok = true;
    std::string inc_detail;
    for (const auto& c : incs) {
        incs_ok = incs_ok && c.pass;
        inc_detail += " |" + fmt(c.empirical) + "-" + fmt(c.predicted) +
                      "|<=" + fmt(c.binomial_err);
    }
    set(13, ratio_ok && incs_ok,
        "P(X=1)/(N(I)|box|) = " + fmt(rep.ratio) + " (in [0.9,1.1]) on " +
            std::to_string(rep.samples) + " box samples (>=10^4); increments:" +
            inc_detail);
}

// ---- criterion 14: reproducibility -----------------------------------------

void criterion_14() {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "andlab-acceptance-repro";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::istringstream in(R"(
model.id = accept-smoke
model.kernel = 1:1.0
model.disorder = uniform 0 1
model.lambda = 4
ids.side = 32
ids.realization_lo = 0
ids.realization_hi = 40
stats.side = 32
stats.realization_lo = 1000
stats.realization_hi = 1100
anchor.kind = bulk
anchor.energy = 0.5
window.mass = 4
window.count_mass = 2
moments.mass = 3
wcontrol.sides = 16 24 32
wcontrol.realizations = 30
clt.mass = 8
null.reps = 40
seed = 5
threads = 1
)");
    auto cfg = parse_config(in);
    cfg.out_dir = dir.string();

    auto checks = [](const RunManifest& x, const RunManifest& y) {
        if (x.files.size() != y.files.size()) return false;
        for (std::size_t i = 0; i < x.files.size(); ++i)
            if (x.files[i].second != y.files[i].second) return false;
        return true;
    };
    auto ids1 = run_ids_build(cfg);
    auto bulk1 = run_bulk_stats(cfg);
    auto mom1 = run_wegner_minami(cfg);
    auto ids2 = run_ids_build(cfg);
    auto bulk2 = run_bulk_stats(cfg);
    auto mom2 = run_wegner_minami(cfg);
    bool rerun_ok = checks(ids1, ids2) && checks(bulk1, bulk2) && checks(mom1, mom2);
    cfg.threads = 3;
    auto ids3 = run_ids_build(cfg);
    auto bulk3 = run_bulk_stats(cfg);
    auto mom3 = run_wegner_minami(cfg);
    bool threads_ok = checks(ids1, ids3) && checks(bulk1, bulk3) && checks(mom1, mom3);
    fs::remove_all(dir);
    set(14, rerun_ok && threads_ok,
        std::string("rerun checksums identical: ") + (rerun_ok ? "yes" : "NO") +
            "; thread-count invariant: " + (threads_ok ? "yes" : "NO"));
}

} // namespace

int main() {
    progress("criteria 1-3");
    criterion_1();
    criterion_2();
    criterion_3();

    progress("building shared IDS pool (L=512 x 1500)");
    auto table = build_shared_table();
    progress("stats batch (L=1000 x 5000)");
    auto sb = run_stats_batch(table);

    criterion_4(sb);
    progress("wcontrol sweep");
    criterion_5(sb, table);
    criterion_6(sb);
    progress("point-process tests");
    criterion_7(sb);
    criterion_8(sb);
    progress("tail pool (L=2048 x 3000)");
    criterion_9();
    criterion_10(sb);
    progress("counting-function pools (L=10^4 x 4000)");
    criterion_11(table);
    progress("box reduction (L=1000 x 30 with eigenvectors)");
    criterion_12();
    progress("box sampling (L=1000 x 3000)");
    criterion_13(table);
    progress("reproducibility reruns");
    criterion_14();

    bool all = true;
    for (int n = 1; n <= 14; ++n) {
        std::printf("criterion %d: %s - %s\n", n,
                    results[n].pass ? "PASS" : "FAIL",
                    results[n].detail.c_str());
        all = all && results[n].pass;
    }
    std::printf("acceptance: %s (%d/14)\n", all ? "PASS" : "FAIL",
                [] {
                    int c = 0;
                    for (int n = 1; n <= 14; ++n)
                        if (results[n].pass) ++c;
                    return c;
                }());
    return all ? 0 : 1;
}
