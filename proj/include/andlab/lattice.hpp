#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace andlab {

// Translation-invariant hopping part of the Hamiltonian: a finite real
// symmetric convolution kernel on Z^d. Offsets are stored explicitly for both
// signs; set() writes k and -k together so the symmetry h_{-k} = h_k is exact.
class HoppingKernel {
  public:
    explicit HoppingKernel(int dimension);

    void set(const std::vector<int>& offset, double amplitude);

    int dimension() const { return dimension_; }
    int support_radius() const { return support_radius_; }
    const std::map<std::vector<int>, double>& coefficients() const {
        return coefficients_;
    }
    double at(const std::vector<int>& offset) const; // 0 if absent

    // Throws unless some k != 0 has h_k != 0.
    void require_nontrivial() const;

    // Convenience constructors for the standard models.
    static HoppingKernel nearest_neighbor_1d(double amplitude = 1.0);
    static HoppingKernel nearest_neighbor(int dimension, double amplitude = 1.0);
    // Diagnostic multiplication-operator model (H = diag(omega)). Opts out of
    // the nontriviality requirement; everything else treats it normally.
    static HoppingKernel zero(int dimension);

  private:
    int dimension_;
    int support_radius_ = 0;
    bool allow_trivial_ = false;
    std::map<std::vector<int>, double> coefficients_;
};

// h(theta) = sum_k h_k cos(k.theta); real by the symmetry invariant.
double symbol_eval(const HoppingKernel& kernel, const std::vector<double>& theta);

enum class DisorderFamily { Uniform, TabulatedInverseCdf };

// Law of one site potential omega_x. Samples are lambda * Q(u) with u uniform
// on [0,1) and Q the inverse CDF of the base law mu.
struct DisorderSpec {
    DisorderFamily family = DisorderFamily::Uniform;
    double uniform_a = 0.0;
    double uniform_b = 1.0;
    // Inverse CDF table for the tabulated family: u ascending from 0 to 1,
    // q nondecreasing.
    std::vector<double> icdf_u;
    std::vector<double> icdf_q;
    double lambda = 1.0;

    void validate() const;
    double support_min() const; // includes the lambda factor
    double support_max() const;
    double density_sup() const; // sup of the density of lambda*mu
    double inverse_cdf(double u) const; // base law, lambda applied by caller

    static DisorderSpec uniform(double a, double b, double lambda = 1.0);
};

// Cube [0,L)^d with sites indexed lexicographically, axis 0 fastest.
class LatticeGeometry {
  public:
    LatticeGeometry(int dimension, int side_length);

    int dimension() const { return dimension_; }
    int side_length() const { return side_length_; }
    std::int64_t site_count() const { return site_count_; }

    std::int64_t site_index(const std::vector<int>& coords) const;
    std::vector<int> site_coords(std::int64_t index) const;

    // Periodic (torus) distance in the max norm.
    int periodic_distance(std::int64_t a, std::int64_t b) const;

  private:
    int dimension_;
    int side_length_;
    std::int64_t site_count_;
};

struct Provenance {
    std::string model_id;
    std::uint64_t seed = 0;
    std::int64_t realization = -1;
};

// Deterministic disorder vector: entry x is a pure function of
// (seed, realization, x).
std::vector<double> sample_disorder(const DisorderSpec& spec,
                                    const LatticeGeometry& geometry,
                                    std::uint64_t seed,
                                    std::int64_t realization);

// Finite-volume Anderson Hamiltonian with periodic boundary conditions.
// Off-diagonal entries come from the fully wrapped kernel sum
// sum_beta h_{r + L beta}, so the zero-disorder operator is exactly covariant.
// The dense matrix is materialized lazily; structure-aware consumers
// (inertia counting) never touch it.
class HamiltonianMatrix {
  public:
    HamiltonianMatrix(const HoppingKernel& kernel,
                      const LatticeGeometry& geometry,
                      std::vector<double> disorder,
                      Provenance provenance = {});

    const LatticeGeometry& geometry() const { return geometry_; }
    std::int64_t order() const { return geometry_.site_count(); }
    const std::vector<double>& disorder() const { return disorder_; }
    const Provenance& provenance() const { return provenance_; }
    int kernel_radius() const { return kernel_radius_; }

    // Wrapped kernel value for a reduced offset (each component in [0,L)).
    double wrapped_value(const std::vector<int>& reduced_offset) const;
    // 1D fast path: wrapped value for reduced offset r in [0,L).
    double wrapped_value_1d(std::int64_t r) const;

    double entry(std::int64_t x, std::int64_t y) const;
    double diagonal(std::int64_t x) const { return wrapped_diag_ + disorder_[x]; }

    // Column-major dense matrix, materialized on first use (thread-safe).
    const std::vector<double>& dense() const;

    double frobenius_norm() const;
    // [min_x (H_xx - offdiag row sum), max_x (H_xx + offdiag row sum)]
    std::pair<double, double> gershgorin_interval() const;

    // Nonzero reduced offsets with their wrapped values (excluding 0).
    const std::vector<std::pair<std::vector<int>, double>>& wrapped_offsets()
        const {
        return wrapped_offsets_;
    }

  private:
    LatticeGeometry geometry_;
    std::vector<double> disorder_;
    Provenance provenance_;
    int kernel_radius_;
    double wrapped_diag_ = 0.0; // wrapped value at offset 0, without disorder
    std::vector<std::pair<std::vector<int>, double>> wrapped_offsets_;
    mutable std::vector<double> dense_;
    mutable std::once_flag dense_once_;
};

HamiltonianMatrix build_hamiltonian(const HoppingKernel& kernel,
                                    const LatticeGeometry& geometry,
                                    std::vector<double> disorder,
                                    Provenance provenance = {});

// Almost sure spectrum [min h + lambda a, max h + lambda b]; the extrema of
// the symbol are located by dense grid search plus window refinement.
std::pair<double, double> almost_sure_spectrum(const HoppingKernel& kernel,
                                               const DisorderSpec& disorder);

// Range of the symbol h over the torus.
std::pair<double, double> symbol_range(const HoppingKernel& kernel);

} // namespace andlab
