#pragma once

#include "membrane/common.hpp"

#include <optional>
#include <span>
#include <tuple>

namespace membrane {

// 6x6 stiffness matrix in Voigt order (xx, yy, zz, xy, yz, xz), sigma = D * eps.
// Some literature calls this the "compliance matrix"; it is the stiffness.
// Construction guarantees exact symmetry and positive definiteness.
class ElasticMatrix {
public:
    // Symmetric positive definite check: smallest eigenvalue > 1e-9 * largest.
    static constexpr double kDefinitenessRatio = 1e-9;

    explicit ElasticMatrix(const Mat6& d);

    const Mat6& matrix() const { return d_; }
    double operator()(int i, int j) const { return d_(i, j); }
    ElasticMatrix scaled(double s) const { return ElasticMatrix(s * d_); }
    // Largest diagonal modulus; sets the fastest wave speed with rho.
    double max_diagonal() const { return d_.diagonal().maxCoeff(); }

private:
    Mat6 d_;
};

ElasticMatrix isotropic(double E, double nu);

// 21 moduli filling the upper triangle row by row: c11..c16, c22..c26, ..., c66.
ElasticMatrix anisotropic(std::span<const double, 21> upper);

// Sparse entry list with 1-based (i, j), i <= j or j <= i; unspecified entries are zero.
struct ModulusEntry {
    int i;
    int j;
    double value;
};
ElasticMatrix anisotropic_from_entries(std::span<const ModulusEntry> entries, double scale = 1.0);

// Table of non-zero moduli of the reference orthotropic composite (GPa):
// c11 = c22 = c33 = 150, c12 = 40, c13 = 10, c23 = 80, c44 = 80, c55 = 20, c66 = 30.
ElasticMatrix reference_composite();

struct MaterialParams {
    double rho = 0.0;  // kg/m^3
    double h = 0.0;    // m
    ElasticMatrix D = ElasticMatrix(Mat6::Identity());
    std::optional<double> strain_threshold;
    std::optional<double> stress_threshold;  // Pa

    // rho > 0 and h > 0; throws MaterialError.
    void validate() const;
    // sqrt(max diag(D) / rho).
    double max_wave_speed() const;
};

}  // namespace membrane
