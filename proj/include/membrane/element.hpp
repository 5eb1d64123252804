#pragma once

#include "membrane/common.hpp"
#include "membrane/material.hpp"

namespace membrane {

// Linear shape functions N_i = alpha_i + beta_i x + gamma_i y on one triangle.
struct ShapeCoeffs {
    std::array<double, 3> alpha{};
    std::array<double, 3> beta{};   // dN_i/dx
    std::array<double, 3> gamma{};  // dN_i/dy
    double Se = 0.0;                // det[[1,x,y],...] = twice the signed area

    double area() const { return 0.5 * Se; }
    double eval(int i, double x, double y) const { return alpha[i] + beta[i] * x + gamma[i] * y; }
};

// Degenerate means |Se| <= kDegenerateRatio * (longest edge)^2.
constexpr double kDegenerateRatio = 1e-14;

// Throws ElementError (carrying `element_id`) for degenerate triangles.
ShapeCoeffs shape_coefficients(const std::array<Vec2, 3>& coords, int element_id = -1);

// 6x9 strain-displacement matrix; columns grouped (u, v, w) per vertex.
Mat69 strain_displacement(const ShapeCoeffs& sc);

// h * area * B^T D B; exact for linear triangles.
Mat9 element_stiffness(const Mat69& B, const ElasticMatrix& D, double h, double area);

// Consistent mass, vertex blocks rho*h*area/12 * (2 on the diagonal, 1 off) * I3.
Mat9 element_mass(double rho, double h, double area);

// -(h*area/3) * (b, b, b) for a force density b uniform over the element.
Vec9 element_load(const Vec3& b, double h, double area);

struct StressStrain {
    Vec6 strain = Vec6::Zero();
    Vec6 stress = Vec6::Zero();
};

StressStrain recover_stress_strain(const ShapeCoeffs& sc, const ElasticMatrix& D, const Vec9& a_e);

struct ThresholdFlags {
    bool strain = false;
    bool stress = false;
};

// Componentwise |.| > threshold; an unset threshold never flags.
ThresholdFlags check_thresholds(const StressStrain& ss, const MaterialParams& material);

// Fictive nodal forces q_e = Me*addot + Ke*a + fe of one element. They cancel
// when summed over the mesh for a state satisfying the global equation.
Vec9 element_residual(const Mat9& Ke, const Mat9& Me, const Vec9& fe, const Vec9& a_e,
                      const Vec9& addot_e);

}  // namespace membrane
