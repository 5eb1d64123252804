#include "membrane/material.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace membrane {

ElasticMatrix::ElasticMatrix(const Mat6& d) : d_(d) {
    if (!d_.allFinite()) throw MaterialError("elastic matrix has non-finite entries");
    for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) {
            if (d_(i, j) != d_(j, i)) {
                std::ostringstream msg;
                msg << "elastic matrix is not symmetric at (" << i + 1 << ", " << j + 1 << ")";
                throw MaterialError(msg.str());
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat6> eig(d_, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    const double largest = ev.cwiseAbs().maxCoeff();
    if (!(ev.minCoeff() > kDefinitenessRatio * largest)) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "elastic matrix is not positive definite: eigenvalue " << ev.minCoeff()
            << " vs largest " << largest;
        throw MaterialError(msg.str());
    }
}

ElasticMatrix isotropic(double E, double nu) {
    if (!(E > 0.0) || !std::isfinite(E)) throw MaterialError("Young's modulus must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw MaterialError("Poisson ratio must lie in (-1, 0.5)");
    const double f = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    Mat6 d = Mat6::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) d(i, j) = f * (i == j ? 1.0 - nu : nu);
        d(3 + i, 3 + i) = f * (1.0 - 2.0 * nu) / 2.0;
    }
    return ElasticMatrix(d);
}

ElasticMatrix anisotropic(std::span<const double, 21> upper) {
    Mat6 d = Mat6::Zero();
    int k = 0;
    for (int i = 0; i < 6; ++i) {
        for (int j = i; j < 6; ++j) {
            d(i, j) = upper[k];
            d(j, i) = upper[k];
            ++k;
        }
    }
    return ElasticMatrix(d);
}

ElasticMatrix anisotropic_from_entries(std::span<const ModulusEntry> entries, double scale) {
    Mat6 d = Mat6::Zero();
    Eigen::Matrix<bool, 6, 6> set = Eigen::Matrix<bool, 6, 6>::Constant(false);
    for (const ModulusEntry& e : entries) {
        if (e.i < 1 || e.i > 6 || e.j < 1 || e.j > 6) {
            throw MaterialError("modulus index out of range: c" + std::to_string(e.i) +
                                std::to_string(e.j));
        }
        const int i = std::min(e.i, e.j) - 1;
        const int j = std::max(e.i, e.j) - 1;
        if (set(i, j)) {
            throw MaterialError("modulus c" + std::to_string(i + 1) + std::to_string(j + 1) +
                                " given twice");
        }
        set(i, j) = true;
        d(i, j) = e.value * scale;
        d(j, i) = e.value * scale;
    }
    return ElasticMatrix(d);
}

ElasticMatrix reference_composite() {
    constexpr double GPa = 1e9;
    const ModulusEntry entries[] = {
        {1, 1, 150}, {1, 2, 40}, {1, 3, 10}, {2, 2, 150}, {2, 3, 80},
        {3, 3, 150}, {4, 4, 80}, {5, 5, 20}, {6, 6, 30},
    };
    return anisotropic_from_entries(entries, GPa);
}

void MaterialParams::validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw MaterialError("density rho must be positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw MaterialError("thickness h must be positive");
    if (strain_threshold && !(*strain_threshold > 0.0)) {
        throw MaterialError("strain_threshold must be positive");
    }
    if (stress_threshold && !(*stress_threshold > 0.0)) {
        throw MaterialError("stress_threshold must be positive");
    }
}

double MaterialParams::max_wave_speed() const { return std::sqrt(D.max_diagonal() / rho); }

}  // namespace membrane
