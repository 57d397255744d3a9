#include "andlab/lattice.hpp"

#include "andlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace andlab {

namespace {

int max_norm(const std::vector<int>& k) {
    int m = 0;
    for (int c : k) m = std::max(m, std::abs(c));
    return m;
}

bool is_zero_offset(const std::vector<int>& k) {
    return std::all_of(k.begin(), k.end(), [](int c) { return c == 0; });
}

} // namespace

HoppingKernel::HoppingKernel(int dimension) : dimension_(dimension) {
    if (dimension < 1) throw std::invalid_argument("kernel dimension must be >= 1");
}

void HoppingKernel::set(const std::vector<int>& offset, double amplitude) {
    if (static_cast<int>(offset.size()) != dimension_)
        throw std::invalid_argument("offset dimension mismatch");
    std::vector<int> neg(offset.size());
    for (std::size_t i = 0; i < offset.size(); ++i) neg[i] = -offset[i];
    coefficients_[offset] = amplitude;
    coefficients_[neg] = amplitude;
    support_radius_ = std::max(support_radius_, max_norm(offset));
}

double HoppingKernel::at(const std::vector<int>& offset) const {
    auto it = coefficients_.find(offset);
    return it == coefficients_.end() ? 0.0 : it->second;
}

void HoppingKernel::require_nontrivial() const {
    if (allow_trivial_) return;
    for (const auto& [k, v] : coefficients_)
        if (!is_zero_offset(k) && v != 0.0) return;
    throw std::invalid_argument("hopping kernel is trivial: no k != 0 with h_k != 0");
}

HoppingKernel HoppingKernel::nearest_neighbor_1d(double amplitude) {
    return nearest_neighbor(1, amplitude);
}

HoppingKernel HoppingKernel::nearest_neighbor(int dimension, double amplitude) {
    HoppingKernel k(dimension);
    for (int axis = 0; axis < dimension; ++axis) {
        std::vector<int> off(dimension, 0);
        off[axis] = 1;
        k.set(off, amplitude);
    }
    return k;
}

HoppingKernel HoppingKernel::zero(int dimension) {
    HoppingKernel k(dimension);
    k.set(std::vector<int>(dimension, 0), 0.0);
    k.allow_trivial_ = true;
    return k;
}

double symbol_eval(const HoppingKernel& kernel, const std::vector<double>& theta) {
    if (static_cast<int>(theta.size()) != kernel.dimension())
        throw std::invalid_argument("theta dimension mismatch");
    double sum = 0.0;
    for (const auto& [k, v] : kernel.coefficients()) {
        double phase = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) phase += k[i] * theta[i];
        sum += v * std::cos(phase);
    }
    return sum;
}

void DisorderSpec::validate() const {
    if (lambda <= 0.0) throw std::invalid_argument("disorder lambda must be > 0");
    if (family == DisorderFamily::Uniform) {
        if (!(uniform_a < uniform_b))
            throw std::invalid_argument("uniform disorder requires a < b");
    } else {
        if (icdf_u.size() < 2 || icdf_u.size() != icdf_q.size())
            throw std::invalid_argument("tabulated inverse CDF needs >= 2 knots");
        if (icdf_u.front() != 0.0 || icdf_u.back() != 1.0)
            throw std::invalid_argument("inverse CDF u-knots must span [0,1]");
        for (std::size_t i = 1; i < icdf_u.size(); ++i) {
            if (!(icdf_u[i] > icdf_u[i - 1]))
                throw std::invalid_argument("inverse CDF u-knots must be increasing");
            if (icdf_q[i] < icdf_q[i - 1])
                throw std::invalid_argument("inverse CDF q-knots must be nondecreasing");
        }
        if (!(icdf_q.back() > icdf_q.front()))
            throw std::invalid_argument("degenerate disorder law");
    }
}

double DisorderSpec::support_min() const {
    return lambda * (family == DisorderFamily::Uniform ? uniform_a : icdf_q.front());
}

double DisorderSpec::support_max() const {
    return lambda * (family == DisorderFamily::Uniform ? uniform_b : icdf_q.back());
}

double DisorderSpec::density_sup() const {
    if (family == DisorderFamily::Uniform)
        return 1.0 / (lambda * (uniform_b - uniform_a));
    // The density of the base law on segment i is du/dq; the lambda scaling
    // divides it once more.
    double sup = 0.0;
    for (std::size_t i = 1; i < icdf_u.size(); ++i) {
        double dq = icdf_q[i] - icdf_q[i - 1];
        double du = icdf_u[i] - icdf_u[i - 1];
        if (dq > 0.0) sup = std::max(sup, du / dq);
    }
    return sup / lambda;
}

double DisorderSpec::inverse_cdf(double u) const {
    if (family == DisorderFamily::Uniform)
        return uniform_a + u * (uniform_b - uniform_a);
    auto it = std::upper_bound(icdf_u.begin(), icdf_u.end(), u);
    std::size_t hi = std::min<std::size_t>(icdf_u.size() - 1,
                                           std::max<std::size_t>(1, it - icdf_u.begin()));
    std::size_t lo = hi - 1;
    double du = icdf_u[hi] - icdf_u[lo];
    double t = du > 0.0 ? (u - icdf_u[lo]) / du : 0.0;
    return icdf_q[lo] + t * (icdf_q[hi] - icdf_q[lo]);
}

DisorderSpec DisorderSpec::uniform(double a, double b, double lambda) {
    DisorderSpec s;
    s.family = DisorderFamily::Uniform;
    s.uniform_a = a;
    s.uniform_b = b;
    s.lambda = lambda;
    s.validate();
    return s;
}

LatticeGeometry::LatticeGeometry(int dimension, int side_length)
    : dimension_(dimension), side_length_(side_length) {
    if (dimension < 1) throw std::invalid_argument("lattice dimension must be >= 1");
    if (side_length < 1) throw std::invalid_argument("side length must be >= 1");
    site_count_ = 1;
    for (int i = 0; i < dimension; ++i) {
        if (site_count_ > (int64_t(1) << 40) / side_length)
            throw std::invalid_argument("lattice too large");
        site_count_ *= side_length;
    }
}

std::int64_t LatticeGeometry::site_index(const std::vector<int>& coords) const {
    if (static_cast<int>(coords.size()) != dimension_)
        throw std::invalid_argument("coordinate dimension mismatch");
    std::int64_t idx = 0;
    std::int64_t stride = 1;
    for (int i = 0; i < dimension_; ++i) {
        int c = coords[i];
        if (c < 0 || c >= side_length_)
            throw std::out_of_range("coordinate outside cube");
        idx += stride * c;
        stride *= side_length_;
    }
    return idx;
}

std::vector<int> LatticeGeometry::site_coords(std::int64_t index) const {
    if (index < 0 || index >= site_count_) throw std::out_of_range("site index");
    std::vector<int> coords(dimension_);
    for (int i = 0; i < dimension_; ++i) {
        coords[i] = static_cast<int>(index % side_length_);
        index /= side_length_;
    }
    return coords;
}

int LatticeGeometry::periodic_distance(std::int64_t a, std::int64_t b) const {
    auto ca = site_coords(a);
    auto cb = site_coords(b);
    int dist = 0;
    for (int i = 0; i < dimension_; ++i) {
        int d = std::abs(ca[i] - cb[i]);
        d = std::min(d, side_length_ - d);
        dist = std::max(dist, d);
    }
    return dist;
}

std::vector<double> sample_disorder(const DisorderSpec& spec,
                                    const LatticeGeometry& geometry,
                                    std::uint64_t seed,
                                    std::int64_t realization) {
    if (realization < 0) throw std::invalid_argument("realization must be >= 0");
    spec.validate();
    std::vector<double> omega(geometry.site_count());
    for (std::int64_t x = 0; x < geometry.site_count(); ++x) {
        double u = rng::uniform01(seed, static_cast<std::uint64_t>(realization),
                                  static_cast<std::uint64_t>(x));
        omega[x] = spec.lambda * spec.inverse_cdf(u);
    }
    return omega;
}

HamiltonianMatrix::HamiltonianMatrix(const HoppingKernel& kernel,
                                     const LatticeGeometry& geometry,
                                     std::vector<double> disorder,
                                     Provenance provenance)
    : geometry_(geometry),
      disorder_(std::move(disorder)),
      provenance_(std::move(provenance)),
      kernel_radius_(kernel.support_radius()) {
    if (kernel.dimension() != geometry.dimension())
        throw std::invalid_argument("kernel/geometry dimension mismatch");
    if (static_cast<std::int64_t>(disorder_.size()) != geometry.site_count())
        throw std::invalid_argument("disorder vector length != site count");
    if (geometry.side_length() < 2)
        throw std::invalid_argument("side length must be >= 2");
    kernel.require_nontrivial();

    const int L = geometry.side_length();
    // Fully wrapped sum: every kernel offset contributes at its reduced
    // position, so the periodic matrix is exact even when 2R >= L.
    std::map<std::vector<int>, double> wrapped;
    for (const auto& [k, v] : kernel.coefficients()) {
        if (v == 0.0) continue;
        std::vector<int> r(k.size());
        for (std::size_t i = 0; i < k.size(); ++i)
            r[i] = ((k[i] % L) + L) % L;
        wrapped[r] += v;
    }
    for (auto& [r, v] : wrapped) {
        if (is_zero_offset(r)) {
            wrapped_diag_ = v;
        } else {
            wrapped_offsets_.emplace_back(r, v);
        }
    }
    // Both directions of a reduced offset pair must carry the same stored
    // value so the dense matrix is symmetric to the last bit. Copy the
    // canonical (lexicographically smaller) one onto its mirror.
    for (auto& [r, v] : wrapped_offsets_) {
        std::vector<int> mirror(r.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            mirror[i] = (L - r[i]) % L;
        if (mirror < r) v = wrapped.at(mirror);
    }
}

double HamiltonianMatrix::wrapped_value(const std::vector<int>& reduced) const {
    if (is_zero_offset(reduced)) return wrapped_diag_;
    for (const auto& [r, v] : wrapped_offsets_)
        if (r == reduced) return v;
    return 0.0;
}

double HamiltonianMatrix::wrapped_value_1d(std::int64_t r) const {
    return wrapped_value({static_cast<int>(r)});
}

double HamiltonianMatrix::entry(std::int64_t x, std::int64_t y) const {
    if (x == y) return diagonal(x);
    const int L = geometry_.side_length();
    auto cx = geometry_.site_coords(x);
    auto cy = geometry_.site_coords(y);
    std::vector<int> r(cx.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = ((cy[i] - cx[i]) % L + L) % L;
    return wrapped_value(r);
}

const std::vector<double>& HamiltonianMatrix::dense() const {
    std::call_once(dense_once_, [this] {
        const std::int64_t n = geometry_.site_count();
        if (n > 8192)
            throw std::length_error("dense materialization capped at order 8192");
        dense_.assign(static_cast<std::size_t>(n) * n, 0.0);
        const int L = geometry_.side_length();
        const int d = geometry_.dimension();
        for (const auto& [r, v] : wrapped_offsets_) {
            // y = x + r (mod L) axis-wise; one directed reduced offset per
            // ordered pair, so this writes each entry exactly once.
            for (std::int64_t x = 0; x < n; ++x) {
                std::int64_t y = 0;
                std::int64_t stride = 1;
                std::int64_t rest = x;
                for (int i = 0; i < d; ++i) {
                    int c = static_cast<int>(rest % L);
                    rest /= L;
                    y += stride * ((c + r[i]) % L);
                    stride *= L;
                }
                dense_[x + y * n] = v;
            }
        }
        for (std::int64_t x = 0; x < n; ++x)
            dense_[x + x * n] = wrapped_diag_ + disorder_[x];
    });
    return dense_;
}

double HamiltonianMatrix::frobenius_norm() const {
    const std::int64_t n = geometry_.site_count();
    double offdiag_sq = 0.0;
    for (const auto& [r, v] : wrapped_offsets_) offdiag_sq += v * v;
    double sum = offdiag_sq * static_cast<double>(n);
    for (std::int64_t x = 0; x < n; ++x) {
        double dxx = wrapped_diag_ + disorder_[x];
        sum += dxx * dxx;
    }
    return std::sqrt(sum);
}

std::pair<double, double> HamiltonianMatrix::gershgorin_interval() const {
    double row_abs = 0.0;
    for (const auto& [r, v] : wrapped_offsets_) row_abs += std::abs(v);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (double w : disorder_) {
        double dxx = wrapped_diag_ + w;
        if (first || dxx - row_abs < lo) lo = dxx - row_abs;
        if (first || dxx + row_abs > hi) hi = dxx + row_abs;
        first = false;
    }
    return {lo, hi};
}

HamiltonianMatrix build_hamiltonian(const HoppingKernel& kernel,
                                    const LatticeGeometry& geometry,
                                    std::vector<double> disorder,
                                    Provenance provenance) {
    return HamiltonianMatrix(kernel, geometry, std::move(disorder),
                             std::move(provenance));
}

std::pair<double, double> symbol_range(const HoppingKernel& kernel) {
    kernel.require_nontrivial();
    const int d = kernel.dimension();
    const double pi = 3.14159265358979323846;
    int grid = d == 1 ? 2048 : (d == 2 ? 128 : 32);

    std::vector<double> theta(d, 0.0);
    std::vector<int> idx(d, 0);
    double lo = 0.0, hi = 0.0;
    std::vector<double> arg_lo(d, 0.0), arg_hi(d, 0.0);
    bool first = true;
    while (true) {
        for (int i = 0; i < d; ++i) theta[i] = -pi + 2.0 * pi * idx[i] / grid;
        double v = symbol_eval(kernel, theta);
        if (first || v < lo) { lo = v; arg_lo = theta; }
        if (first || v > hi) { hi = v; arg_hi = theta; }
        first = false;
        int axis = 0;
        while (axis < d && ++idx[axis] == grid) idx[axis++] = 0;
        if (axis == d) break;
    }

    // Local refinement: shrink a window around the best grid point.
    auto refine = [&](std::vector<double> center, int sign) {
        double width = 2.0 * pi / grid;
        double best = sign * symbol_eval(kernel, center);
        for (int round = 0; round < 60; ++round) {
            bool improved = false;
            for (int axis = 0; axis < d; ++axis) {
                for (double step : {-width, width}) {
                    auto cand = center;
                    cand[axis] += step;
                    double v = sign * symbol_eval(kernel, cand);
                    if (v < best) { best = v; center = cand; improved = true; }
                }
            }
            if (!improved) width *= 0.5;
            if (width < 1e-14) break;
        }
        return sign * best;
    };
    return {refine(arg_lo, +1), refine(arg_hi, -1)};
}

std::pair<double, double> almost_sure_spectrum(const HoppingKernel& kernel,
                                               const DisorderSpec& disorder) {
    disorder.validate();
    auto [hlo, hhi] = symbol_range(kernel);
    return {hlo + disorder.support_min(), hhi + disorder.support_max()};
}

} // namespace andlab
