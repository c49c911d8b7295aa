#include "biphoton/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace biphoton {

namespace {

Eigen::VectorXd sqrt_quadrature_weights(const TimeGrid& g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::VectorXd d(n);
    for (Eigen::Index k = 0; k < n; ++k) d(k) = std::sqrt(g.trapezoid_weight(static_cast<std::size_t>(k)) * g.dt());
    return d;
}

// Hermitian D ρ1 D, whose eigenvalues are those of ρ1 on L²(trapezoid).
ComplexMatrix weighted_reduced(const JointAmplitude& a) {
    const Eigen::VectorXd d = sqrt_quadrature_weights(a.grid());
    const ComplexMatrix b = d.asDiagonal() * a.values() * d.asDiagonal();
    return b * b.adjoint();
}

double first_sample_phase(const Field1D& f) {
    const double peak = f.values.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < f.values.size(); ++k) {
        if (std::abs(f.values(k)) > 1e-12 * peak) return std::arg(f.values(k));
    }
    return 0.0;
}

}  // namespace

SchmidtSpectrum schmidt_decompose(const JointAmplitude& a, double threshold) {
    if (!(a.max_abs() > 0.0)) throw Error(ErrorKind::ZeroAmplitude, "cannot decompose a zero amplitude");
    const auto& g = a.grid();
    const Eigen::VectorXd d = sqrt_quadrature_weights(g);
    const ComplexMatrix b = d.asDiagonal() * a.values() * d.asDiagonal();

    Eigen::BDCSVD<ComplexMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw Error(ErrorKind::ConvergenceFailure, "singular value decomposition did not converge");
    }
    const Eigen::VectorXd& s = svd.singularValues();
    const ComplexMatrix& u = svd.matrixU();
    const ComplexMatrix& v = svd.matrixV();

    SchmidtSpectrum out;
    out.threshold = threshold;
    out.coeffs.assign(s.data(), s.data() + s.size());
    while (out.rank < out.coeffs.size() && out.coeffs[out.rank] > threshold) ++out.rank;

    std::vector<Field1D> phi, chi;
    for (std::size_t j = 0; j < out.rank; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        ComplexVector f = u.col(col).cwiseQuotient(d.cast<Complex>());
        ComplexVector h = v.col(col).conjugate().cwiseQuotient(d.cast<Complex>());
        Eigen::Index peak = 0;
        f.cwiseAbs().maxCoeff(&peak);
        const Complex rot = std::polar(1.0, -std::arg(f(peak)));
        f *= rot;
        h /= rot;
        phi.emplace_back(g, std::move(f));
        chi.emplace_back(g, std::move(h));
    }

    // Degenerate coefficients: order by the phase of the first significant
    // sample of φ_j. Convention only.
    std::vector<std::size_t> order(out.rank);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double cx = out.coeffs[x], cy = out.coeffs[y];
        if (std::abs(cx - cy) > 1e-14 * std::max(1.0, cx)) return cx > cy;
        return first_sample_phase(phi[x]) < first_sample_phase(phi[y]);
    });
    std::vector<double> sorted_coeffs = out.coeffs;
    for (std::size_t j = 0; j < out.rank; ++j) {
        sorted_coeffs[j] = out.coeffs[order[j]];
        out.modes_1.push_back(phi[order[j]]);
        out.modes_2.push_back(chi[order[j]]);
    }
    out.coeffs = std::move(sorted_coeffs);
    return out;
}

JointAmplitude schmidt_reconstruct(const SchmidtSpectrum& s, const TimeGrid& grid, std::size_t terms) {
    terms = std::min(terms, s.rank);
    JointAmplitude out(grid);
    for (std::size_t j = 0; j < terms; ++j) {
        out.values().noalias() += s.coeffs[j] * (s.modes_1[j].values * s.modes_2[j].values.transpose());
    }
    return out;
}

ComplexMatrix reduced_density(const JointAmplitude& a) {
    const auto& g = a.grid();
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::VectorXd w(n);
    for (Eigen::Index k = 0; k < n; ++k) w(k) = g.trapezoid_weight(static_cast<std::size_t>(k)) * g.dt();
    return a.values() * w.asDiagonal() * a.values().adjoint();
}

std::vector<double> reduced_density_eigenvalues(const JointAmplitude& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(weighted_reduced(a), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorKind::ConvergenceFailure, "eigen decomposition of the reduced state did not converge");
    }
    std::vector<double> vals(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
    std::sort(vals.begin(), vals.end(), std::greater<>());
    return vals;
}

double reduced_purity(const JointAmplitude& a) {
    const ComplexMatrix r = weighted_reduced(a);
    return (r * r).trace().real();
}

EntanglementMetrics entanglement_metrics(const std::vector<double>& coeffs) {
    EntanglementMetrics m;
    double entropy = 0.0, purity = 0.0;
    for (double c : coeffs) {
        const double p = c * c;
        if (p <= 0.0) continue;
        entropy -= p * std::log2(p);
        purity += p * p;
    }
    m.entropy = entropy > 0.0 ? entropy : 0.0;
    m.purity = purity;
    m.schmidt_number = purity > 0.0 ? 1.0 / purity : 0.0;
    return m;
}

EntanglementMetrics entanglement_metrics(const SchmidtSpectrum& s) { return entanglement_metrics(s.coeffs); }

}  // namespace biphoton
