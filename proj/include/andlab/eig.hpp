#pragma once

#include "andlab/lattice.hpp"

#include <cstdint>
#include <vector>

namespace andlab {

// Sorted eigenvalues of one disorder realization.
struct SpectrumSample {
    std::vector<double> eigenvalues; // ascending, length |Lambda|
    int dimension = 1;
    int side_length = 0;
    std::int64_t site_count = 0;
    Provenance provenance;
};

struct EigenPairs {
    SpectrumSample spectrum;
    // Column-major |Lambda| x |Lambda|; column j is the eigenvector of
    // eigenvalues[j], normalized.
    std::vector<double> vectors;
};

// Full symmetric eigendecomposition (LAPACK dsyevd behind the contract).
SpectrumSample eigenvalues_symmetric(const HamiltonianMatrix& H);
EigenPairs eigenpairs_symmetric(const HamiltonianMatrix& H);

// Raw dense helpers for matrices that are not Hamiltonians (tests, oracles).
// a is column-major order n and is overwritten.
std::vector<double> dense_symmetric_eigenvalues(std::vector<double> a, int n);

// Number of eigenvalues <= E by LDL^T inertia (Sylvester). Uses an O(n R^2)
// banded-plus-corner factorization for 1D Hamiltonians, dense elimination
// otherwise. A pivot with magnitude below 1e-12 * ||H||_F triggers a retry
// with E perturbed by 1e-10 relative; the retry count is capped.
std::int64_t count_below(const HamiltonianMatrix& H, double E);

// Dense-path inertia on an arbitrary symmetric matrix (column-major), mainly
// for tests; same pivot fallback contract, scale passed explicitly.
std::int64_t count_below_dense(const std::vector<double>& a, int n, double E,
                               double scale);

// All eigenvalues in (lo, hi], with multiplicity, located by inertia
// bisection to absolute tolerance tol. Ascending.
std::vector<double> eigenvalues_in_interval(const HamiltonianMatrix& H,
                                            double lo, double hi,
                                            double tol = 0.0);

} // namespace andlab
