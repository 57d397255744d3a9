#include "doctest.h"

#include "andlab/eig.hpp"
#include "andlab/lattice.hpp"
#include "andlab/rng.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numeric>

using namespace andlab;

namespace {

HamiltonianMatrix random_anderson_1d(int L, double lambda, std::uint64_t seed,
                                     std::int64_t realization, int radius = 1) {
    HoppingKernel k(1);
    k.set({1}, 1.0);
    if (radius >= 2) k.set({2}, 0.3);
    if (radius >= 3) k.set({3}, -0.1);
    LatticeGeometry g(1, L);
    auto spec = DisorderSpec::uniform(0.0, 1.0, lambda);
    return build_hamiltonian(k, g, sample_disorder(spec, g, seed, realization),
                             {"test", seed, realization});
}

std::vector<double> free_field_reference(int L) {
    std::vector<double> ref(L);
    const double pi = 3.14159265358979323846;
    for (int j = 0; j < L; ++j) ref[j] = 2.0 * std::cos(2.0 * pi * j / L);
    std::sort(ref.begin(), ref.end());
    return ref;
}

} // namespace

TEST_CASE("eigenvalues: diagonal matrix sorts") {
    auto k = HoppingKernel::zero(1);
    LatticeGeometry g(1, 3);
    auto H = build_hamiltonian(k, g, {3.0, 1.0, 2.0});
    auto s = eigenvalues_symmetric(H);
    CHECK(s.eigenvalues == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("eigenvalues: 1D free Laplacian L=8 circulant reference") {
    auto k = HoppingKernel::nearest_neighbor_1d();
    LatticeGeometry g(1, 8);
    auto H = build_hamiltonian(k, g, std::vector<double>(8, 0.0));
    auto s = eigenvalues_symmetric(H);
    auto ref = free_field_reference(8);
    for (int i = 0; i < 8; ++i)
        CHECK(s.eigenvalues[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("free-field check holds for a longer-range kernel (any circulant)") {
    HoppingKernel k(1);
    k.set({1}, 1.0);
    k.set({2}, 0.25);
    LatticeGeometry g(1, 12);
    auto H = build_hamiltonian(k, g, std::vector<double>(12, 0.0));
    auto s = eigenvalues_symmetric(H);
    std::vector<double> ref(12);
    const double pi = 3.14159265358979323846;
    for (int j = 0; j < 12; ++j)
        ref[j] = symbol_eval(k, {2.0 * pi * j / 12});
    std::sort(ref.begin(), ref.end());
    for (int i = 0; i < 12; ++i)
        CHECK(s.eigenvalues[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("eigenvalues: random symmetric 5x5 vs characteristic-polynomial roots") {
    rng::SplitMix64 gen(77);
    std::vector<double> a(25, 0.0);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i <= j; ++i) {
            double v = 2.0 * gen.next_uniform01() - 1.0;
            a[i + 5 * j] = v;
            a[j + 5 * i] = v;
        }
    auto w = dense_symmetric_eigenvalues(a, 5);
    auto roots = oracle::char_poly_roots(a, 5, -5.0, 5.0);
    REQUIRE(roots.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(w[i] == doctest::Approx(roots[i]).epsilon(1e-8));
}

TEST_CASE("eigenpairs: identity and rank-one projector") {
    auto k = HoppingKernel::zero(1);
    LatticeGeometry g(1, 4);
    auto H = build_hamiltonian(k, g, {1.0, 1.0, 1.0, 1.0});
    auto p = eigenpairs_symmetric(H);
    for (double v : p.spectrum.eigenvalues) CHECK(v == doctest::Approx(1.0));

    // rank-1 projector uu^T, order 6
    const int n = 6;
    std::vector<double> u(n);
    double norm = 0.0;
    rng::SplitMix64 gen(5);
    for (auto& x : u) { x = gen.next_uniform01() - 0.5; norm += x * x; }
    norm = std::sqrt(norm);
    for (auto& x : u) x /= norm;
    std::vector<double> a(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a[i + n * j] = u[i] * u[j];
    auto w = dense_symmetric_eigenvalues(a, n);
    for (int i = 0; i < n - 1; ++i) CHECK(std::abs(w[i]) < 1e-12);
    CHECK(w[n - 1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenpairs: invariant suite on Anderson 1D L=200") {
    auto H = random_anderson_1d(200, 1.0, 123, 0);
    auto p = eigenpairs_symmetric(H);
    const int n = 200;
    const auto& V = p.vectors;
    // orthonormality
    double max_dev = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i) {
            double dot = 0.0;
            for (int r = 0; r < n; ++r) dot += V[r + n * i] * V[r + n * j];
            max_dev = std::max(max_dev, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    CHECK(max_dev <= 1e-9);
    // residuals
    const auto& A = H.dense();
    double frob = H.frobenius_norm();
    for (int j = 0; j < n; j += 17) {
        double res = 0.0;
        for (int r = 0; r < n; ++r) {
            double hv = 0.0;
            for (int c = 0; c < n; ++c) hv += A[r + n * c] * V[c + n * j];
            double diff = hv - p.spectrum.eigenvalues[j] * V[r + n * j];
            res += diff * diff;
        }
        CHECK(std::sqrt(res) <= 1e-9 * frob);
    }
    // trace conservation
    double trace = 0.0, esum = 0.0;
    for (int i = 0; i < n; ++i) trace += A[i + n * i];
    for (double v : p.spectrum.eigenvalues) esum += v;
    CHECK(esum == doctest::Approx(trace).epsilon(1e-8));
    // Gershgorin containment
    auto [lo, hi] = H.gershgorin_interval();
    CHECK(p.spectrum.eigenvalues.front() >= lo - 1e-10);
    CHECK(p.spectrum.eigenvalues.back() <= hi + 1e-10);
}

TEST_CASE("count_below: Gershgorin extremes") {
    auto H = random_anderson_1d(50, 1.0, 4, 2);
    auto [lo, hi] = H.gershgorin_interval();
    CHECK(count_below(H, lo - 0.1) == 0);
    CHECK(count_below(H, hi + 0.1) == 50);
}

TEST_CASE("count_below: exact agreement with full diagonalization") {
    // 100 random instances x 10 energies, mixed kernel radii exercise the
    // banded-plus-corner path and the dense path.
    rng::SplitMix64 gen(2024);
    for (int inst = 0; inst < 100; ++inst) {
        int L = 20 + inst % 60;
        int radius = 1 + inst % 3;
        auto H = random_anderson_1d(L, 1.0 + (inst % 4), 1000 + inst, inst, radius);
        auto s = eigenvalues_symmetric(H);
        auto [lo, hi] = H.gershgorin_interval();
        for (int e = 0; e < 10; ++e) {
            double E = lo + (hi - lo) * gen.next_uniform01();
            auto exact = std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), E) -
                         s.eigenvalues.begin();
            CHECK(count_below(H, E) == exact);
        }
    }
}

TEST_CASE("count_below: monotone in E and interval counts match") {
    auto H = random_anderson_1d(80, 2.0, 8, 1);
    auto s = eigenvalues_symmetric(H);
    std::int64_t prev = 0;
    for (double E = -3.0; E <= 4.0; E += 0.21) {
        auto c = count_below(H, E);
        CHECK(c >= prev);
        prev = c;
    }
    double a = 0.3, b = 1.7;
    auto in_ab = std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(),
                               [&](double v) { return v > a && v <= b; });
    CHECK(count_below(H, b) - count_below(H, a) == in_ab);
}

TEST_CASE("count_below: dense path on 2D geometry agrees") {
    auto k = HoppingKernel::nearest_neighbor(2);
    LatticeGeometry g(2, 6);
    auto spec = DisorderSpec::uniform(0.0, 1.0, 2.0);
    auto H = build_hamiltonian(k, g, sample_disorder(spec, g, 91, 0));
    auto s = eigenvalues_symmetric(H);
    for (double E : {-2.0, 0.0, 1.0, 2.5, 5.0}) {
        auto exact = std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), E) -
                     s.eigenvalues.begin();
        CHECK(count_below(H, E) == exact);
    }
}

TEST_CASE("eigenvalues_in_interval matches the full solve inside the window") {
    for (int inst = 0; inst < 20; ++inst) {
        auto H = random_anderson_1d(120, 3.0, 55 + inst, inst, 1 + inst % 2);
        auto s = eigenvalues_symmetric(H);
        double a = 0.8, b = 2.2;
        auto win = eigenvalues_in_interval(H, a, b);
        std::vector<double> ref;
        for (double v : s.eigenvalues)
            if (v > a && v <= b) ref.push_back(v);
        REQUIRE(win.size() == ref.size());
        for (std::size_t i = 0; i < win.size(); ++i)
            CHECK(win[i] == doctest::Approx(ref[i]).epsilon(1e-8));
    }
}

TEST_CASE("permutation covariance: translated disorder leaves spectrum unchanged") {
    auto H = random_anderson_1d(64, 1.5, 31, 0);
    auto s1 = eigenvalues_symmetric(H);
    // translate sites by 5
    std::vector<double> w = H.disorder();
    std::vector<double> wt(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) wt[(i + 5) % w.size()] = w[i];
    HoppingKernel k(1);
    k.set({1}, 1.0);
    auto Ht = build_hamiltonian(k, H.geometry(), wt);
    auto s2 = eigenvalues_symmetric(Ht);
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(s1.eigenvalues[i] == doctest::Approx(s2.eigenvalues[i]).epsilon(1e-10));
}
