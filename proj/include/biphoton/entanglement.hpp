#pragma once

// Schmidt decomposition of a joint amplitude and functions of its
// spectrum. The decomposition is a quadrature-weighted SVD: the samples are
// scaled by sqrt(w_i dt) sqrt(w_j dt) (trapezoid weights) so the singular
// values approximate the continuum Schmidt coefficients and the mode
// functions are orthonormal in the trapezoid inner product.

#include <vector>

#include "biphoton/grid.hpp"

namespace biphoton {

struct SchmidtSpectrum {
    std::vector<double> coeffs;   // all singular values, descending
    std::vector<Field1D> modes_1;  // φ_j for j < rank
    std::vector<Field1D> modes_2;  // χ_j for j < rank
    std::size_t rank = 0;          // coefficients above threshold
    double threshold = 1e-10;
};

/// A(t1, t2) = Σ_j c_j φ_j(t1) χ_j(t2). Each φ_j is rotated so that its
/// largest-magnitude sample is real and positive; χ_j absorbs the phase.
SchmidtSpectrum schmidt_decompose(const JointAmplitude& a, double threshold = 1e-10);

/// Σ_{j < terms} c_j φ_j ⊗ χ_j; terms defaults to the full rank.
JointAmplitude schmidt_reconstruct(const SchmidtSpectrum& s, const TimeGrid& grid, std::size_t terms = SIZE_MAX);

/// ρ1 = tr_2 |Ψ⟩⟨Ψ| in the time basis; same matrix as g1_reduced().rho.
ComplexMatrix reduced_density(const JointAmplitude& a);

/// Eigenvalues of ρ1 as an operator on L²(trapezoid), descending. Computed
/// by a Hermitian eigensolve, independent of the SVD route.
std::vector<double> reduced_density_eigenvalues(const JointAmplitude& a);

/// tr ρ1² with the trapezoid measure.
double reduced_purity(const JointAmplitude& a);

struct EntanglementMetrics {
    double entropy = 0.0;  // bits
    double purity = 1.0;
    double schmidt_number = 1.0;
};

EntanglementMetrics entanglement_metrics(const SchmidtSpectrum& s);
EntanglementMetrics entanglement_metrics(const std::vector<double>& coeffs);

}  // namespace biphoton
