#include "membrane/element.hpp"

#include <algorithm>
#include <cmath>

namespace membrane {

ShapeCoeffs shape_coefficients(const std::array<Vec2, 3>& coords, int element_id) {
    ShapeCoeffs sc;
    const auto& p = coords;
    sc.Se = (p[1].x() * p[2].y() - p[2].x() * p[1].y()) - (p[0].x() * p[2].y() - p[2].x() * p[0].y()) +
            (p[0].x() * p[1].y() - p[1].x() * p[0].y());
    double longest2 = 0.0;
    for (int k = 0; k < 3; ++k) longest2 = std::max(longest2, (p[(k + 1) % 3] - p[k]).squaredNorm());
    if (!(std::abs(sc.Se) > kDegenerateRatio * longest2)) {
        throw ElementError("degenerate triangle", element_id);
    }
    for (int i = 0; i < 3; ++i) {
        const Vec2& pj = p[(i + 1) % 3];
        const Vec2& pk = p[(i + 2) % 3];
        sc.alpha[i] = (pj.x() * pk.y() - pk.x() * pj.y()) / sc.Se;
        sc.beta[i] = -(pk.y() - pj.y()) / sc.Se;
        sc.gamma[i] = (pk.x() - pj.x()) / sc.Se;
    }
    return sc;
}

Mat69 strain_displacement(const ShapeCoeffs& sc) {
    Mat69 B = Mat69::Zero();
    for (int i = 0; i < 3; ++i) {
        const int u = 3 * i, v = 3 * i + 1, w = 3 * i + 2;
        const double b = sc.beta[i], g = sc.gamma[i];
        B(kXX, u) = b;
        B(kYY, v) = g;
        // kZZ row stays zero: fields do not vary through the thickness.
        B(kXY, u) = g;
        B(kXY, v) = b;
        B(kYZ, w) = g;
        B(kXZ, w) = b;
    }
    return B;
}

Mat9 element_stiffness(const Mat69& B, const ElasticMatrix& D, double h, double area) {
    const Mat69 DB = D.matrix() * B;
    Mat9 K = (h * area) * (B.transpose() * DB);
    // B^T (D B) is symmetric in exact arithmetic; average away the roundoff.
    return 0.5 * (K + K.transpose());
}

Mat9 element_mass(double rho, double h, double area) {
    const double m = rho * h * area / 12.0;
    Mat9 M = Mat9::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double f = (i == j ? 2.0 : 1.0) * m;
            for (int c = 0; c < 3; ++c) M(3 * i + c, 3 * j + c) = f;
        }
    }
    return M;
}

Vec9 element_load(const Vec3& b, double h, double area) {
    Vec9 f;
    const Vec3 nodal = -(h * area / 3.0) * b;
    for (int i = 0; i < 3; ++i) f.segment<3>(3 * i) = nodal;
    return f;
}

StressStrain recover_stress_strain(const ShapeCoeffs& sc, const ElasticMatrix& D, const Vec9& a_e) {
    StressStrain out;
    out.strain = strain_displacement(sc) * a_e;
    out.stress = D.matrix() * out.strain;
    return out;
}

ThresholdFlags check_thresholds(const StressStrain& ss, const MaterialParams& material) {
    ThresholdFlags flags;
    if (material.strain_threshold) {
        flags.strain = ss.strain.cwiseAbs().maxCoeff() > *material.strain_threshold;
    }
    if (material.stress_threshold) {
        flags.stress = ss.stress.cwiseAbs().maxCoeff() > *material.stress_threshold;
    }
    return flags;
}

Vec9 element_residual(const Mat9& Ke, const Mat9& Me, const Vec9& fe, const Vec9& a_e,
                      const Vec9& addot_e) {
    return Me * addot_e + Ke * a_e + fe;
}

}  // namespace membrane
