#include "andlab/eig.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

extern "C" void openblas_set_num_threads(int);

namespace andlab {

namespace {

std::once_flag blas_once;

void pin_blas_threads() {
    // Results must not depend on BLAS threading; everything runs
    // single-threaded inside one decomposition.
    std::call_once(blas_once, [] { openblas_set_num_threads(1); });
}

SpectrumSample make_sample(const HamiltonianMatrix& H, std::vector<double> w) {
    SpectrumSample s;
    s.eigenvalues = std::move(w);
    s.dimension = H.geometry().dimension();
    s.side_length = H.geometry().side_length();
    s.site_count = H.geometry().site_count();
    s.provenance = H.provenance();
    return s;
}

constexpr double kPivotRel = 1e-12;
constexpr int kMaxRetries = 20;

struct TinyPivot {};

// Inertia of the dense symmetric matrix a - E*Id by unpivoted LDL^T.
// Throws TinyPivot when a pivot falls under the threshold.
std::int64_t dense_inertia(std::vector<double> a, int n, double E,
                           double pivot_floor) {
    for (int i = 0; i < n; ++i) a[i + std::size_t(i) * n] -= E;
    std::int64_t negatives = 0;
    for (int j = 0; j < n; ++j) {
        double p = a[j + std::size_t(j) * n];
        if (std::abs(p) < pivot_floor) throw TinyPivot{};
        if (p < 0.0) ++negatives;
        double f = 1.0 / p;
        for (int k = j + 1; k < n; ++k) {
            double t = a[k + std::size_t(j) * n] * f;
            if (t == 0.0) continue;
            double* colk = &a[std::size_t(k) * n];
            const double* colj = &a[std::size_t(j) * n];
            for (int m = k; m < n; ++m) colk[m] -= t * colj[m];
        }
    }
    return negatives;
}

// Banded-plus-corner inertia for 1D periodic Hamiltonians: half-bandwidth R
// band, corner block folded into the last R rows. O(n R^2).
std::int64_t banded_inertia_1d(const HamiltonianMatrix& H, double E,
                               double pivot_floor) {
    const std::int64_t n = H.order();
    const int R = H.kernel_radius();
    std::vector<double> w(R + 1, 0.0);
    for (int k = 0; k <= R; ++k) w[k] = H.wrapped_value_1d(k);

    const std::vector<double>& omega = H.disorder();
    std::vector<double> d(n);
    for (std::int64_t i = 0; i < n; ++i) d[i] = w[0] + omega[i] - E;

    if (R == 0) {
        std::int64_t negatives = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            if (std::abs(d[i]) < pivot_floor) throw TinyPivot{};
            if (d[i] < 0.0) ++negatives;
        }
        return negatives;
    }

    // band[k][i] = A[i+k+1][i] for rows below the border region;
    // border[r][i] = A[n-R+r][i]; B = strictly lower part of the border
    // rows' mutual block.
    const std::int64_t nb = n - R; // first border row
    std::vector<std::vector<double>> band(R, std::vector<double>(nb, 0.0));
    std::vector<std::vector<double>> border(R, std::vector<double>(nb, 0.0));
    std::vector<std::vector<double>> B(R, std::vector<double>(R, 0.0));

    for (int k = 0; k < R; ++k)
        for (std::int64_t i = 0; i + k + 1 < nb; ++i) band[k][i] = w[k + 1];
    for (int r = 0; r < R; ++r) {
        std::int64_t row = nb + r;
        for (std::int64_t i = 0; i < nb; ++i) {
            std::int64_t fwd = row - i;       // down the column
            std::int64_t wrap = n - fwd;      // around the corner
            if (fwd <= R)
                border[r][i] = w[fwd];
            else if (wrap <= R)
                border[r][i] = w[wrap];
        }
        for (int r2 = 0; r2 < r; ++r2) B[r][r2] = w[r - r2];
    }

    std::int64_t negatives = 0;
    const std::int64_t split = n - 2 * R;
    std::vector<double> bvals(R), cvals(R);
    for (std::int64_t i = 0; i < split; ++i) {
        double p = d[i];
        if (std::abs(p) < pivot_floor) throw TinyPivot{};
        if (p < 0.0) ++negatives;
        double f = 1.0 / p;
        for (int k = 0; k < R; ++k) bvals[k] = band[k][i];
        for (int r = 0; r < R; ++r) cvals[r] = border[r][i];
        for (int k2 = 0; k2 < R; ++k2) {
            if (bvals[k2] == 0.0) continue;
            std::int64_t j2 = i + 1 + k2;
            for (int k1 = 0; k1 <= k2; ++k1) {
                std::int64_t j1 = i + 1 + k1;
                double upd = bvals[k2] * bvals[k1] * f;
                if (k1 == k2)
                    d[j1] -= upd;
                else
                    band[j2 - j1 - 1][j1] -= upd;
            }
        }
        for (int r = 0; r < R; ++r) {
            if (cvals[r] == 0.0) continue;
            for (int k1 = 0; k1 < R; ++k1)
                border[r][i + 1 + k1] -= cvals[r] * bvals[k1] * f;
            for (int r2 = 0; r2 < r; ++r2)
                B[r][r2] -= cvals[r] * cvals[r2] * f;
            d[nb + r] -= cvals[r] * cvals[r] * f;
        }
    }

    // Remaining 2R x 2R block, eliminated densely.
    const int m = 2 * R;
    std::vector<double> M(std::size_t(m) * m, 0.0);
    for (int a = 0; a < m; ++a) {
        std::int64_t ga = split + a;
        M[a + std::size_t(a) * m] = d[ga];
        for (int b = a + 1; b < m; ++b) {
            std::int64_t gb = split + b;
            double v = 0.0;
            if (gb < nb) {
                std::int64_t off = gb - ga;
                v = off <= R ? band[off - 1][ga] : 0.0;
            } else if (ga < nb) {
                v = border[gb - nb][ga];
            } else {
                v = B[gb - nb][ga - nb];
            }
            M[b + std::size_t(a) * m] = v;
            M[a + std::size_t(b) * m] = v;
        }
    }
    negatives += dense_inertia(std::move(M), m, 0.0, pivot_floor);
    return negatives;
}

} // namespace

SpectrumSample eigenvalues_symmetric(const HamiltonianMatrix& H) {
    pin_blas_threads();
    const int n = static_cast<int>(H.order());
    std::vector<double> a = H.dense();
    std::vector<double> w(n);
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
    if (info != 0)
        throw std::runtime_error("dsyevd failed to converge, info=" + std::to_string(info));
    return make_sample(H, std::move(w));
}

EigenPairs eigenpairs_symmetric(const HamiltonianMatrix& H) {
    pin_blas_threads();
    const int n = static_cast<int>(H.order());
    std::vector<double> a = H.dense();
    std::vector<double> w(n);
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
    if (info != 0)
        throw std::runtime_error("dsyevd failed to converge, info=" + std::to_string(info));
    EigenPairs p;
    p.spectrum = make_sample(H, std::move(w));
    p.vectors = std::move(a);
    return p;
}

std::vector<double> dense_symmetric_eigenvalues(std::vector<double> a, int n) {
    pin_blas_threads();
    std::vector<double> w(n);
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
    if (info != 0)
        throw std::runtime_error("dsyevd failed to converge, info=" + std::to_string(info));
    return w;
}

std::int64_t count_below(const HamiltonianMatrix& H, double E) {
    if (!std::isfinite(E)) throw std::invalid_argument("count_below: E must be finite");
    const double pivot_floor = kPivotRel * H.frobenius_norm();
    const std::int64_t n = H.order();
    const bool banded = H.geometry().dimension() == 1 &&
                        n >= 4 * std::int64_t(H.kernel_radius()) + 4;
    const double escale = std::max(1.0, std::abs(E));
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
        double Ep = E + attempt * 1e-10 * escale;
        try {
            if (banded) return banded_inertia_1d(H, Ep, pivot_floor);
            return dense_inertia(H.dense(), static_cast<int>(n), Ep, pivot_floor);
        } catch (const TinyPivot&) {
            continue;
        }
    }
    throw std::runtime_error("count_below: pivot retry cap exceeded");
}

std::int64_t count_below_dense(const std::vector<double>& a, int n, double E,
                               double scale) {
    const double pivot_floor = kPivotRel * scale;
    const double escale = std::max(1.0, std::abs(E));
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
        try {
            return dense_inertia(a, n, E + attempt * 1e-10 * escale, pivot_floor);
        } catch (const TinyPivot&) {
            continue;
        }
    }
    throw std::runtime_error("count_below_dense: pivot retry cap exceeded");
}

std::vector<double> eigenvalues_in_interval(const HamiltonianMatrix& H,
                                            double lo, double hi, double tol) {
    if (!(lo <= hi)) throw std::invalid_argument("eigenvalues_in_interval: lo > hi");
    auto [glo, ghi] = H.gershgorin_interval();
    if (tol <= 0.0)
        tol = 1e-11 * std::max({1.0, std::abs(glo), std::abs(ghi)});
    std::vector<double> out;
    struct Seg { double a, b; std::int64_t na, nb; };
    std::vector<Seg> stack;
    std::int64_t na = count_below(H, lo);
    std::int64_t nb = count_below(H, hi);
    stack.push_back({lo, hi, na, nb});
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        std::int64_t k = s.nb - s.na;
        if (k <= 0) continue;
        if (s.b - s.a <= tol) {
            double mid = 0.5 * (s.a + s.b);
            for (std::int64_t i = 0; i < k; ++i) out.push_back(mid);
            continue;
        }
        double m = 0.5 * (s.a + s.b);
        std::int64_t nm = std::clamp(count_below(H, m), s.na, s.nb);
        stack.push_back({s.a, m, s.na, nm});
        stack.push_back({m, s.b, nm, s.nb});
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace andlab
