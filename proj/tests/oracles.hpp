#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the code paths it is used to check.

#include "membrane/common.hpp"
#include "membrane/mesh.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace oracle {

using membrane::Mesh;
using membrane::Vec2;

inline double shoelace(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * (a.x() * b.y() - b.x() * a.y() + b.x() * c.y() - c.x() * b.y() + c.x() * a.y() - a.x() * c.y());
}

// Minimal MSH 2.2 ASCII emitter; node tags start at 101 so the reader must remap.
inline void write_msh(std::ostream& out, const Mesh& mesh) {
    out.precision(17);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n" << mesh.num_nodes() << "\n";
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        out << 101 + i << ' ' << mesh.node(i).x() << ' ' << mesh.node(i).y() << " 0\n";
    }
    out << "$EndNodes\n$Elements\n" << mesh.num_triangles() + 1 << "\n";
    out << "1 15 2 0 1 101\n";  // a point element, skipped by the reader
    for (int e = 0; e < mesh.num_triangles(); ++e) {
        const auto& t = mesh.triangle(e);
        out << e + 2 << " 2 2 0 1 " << 101 + t[0] << ' ' << 101 + t[1] << ' ' << 101 + t[2] << "\n";
    }
    out << "$EndElements\n";
}

// Random non-degenerate triangle, CCW, with coordinates in [-scale, scale].
inline std::array<Vec2, 3> random_triangle(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    for (;;) {
        std::array<Vec2, 3> p{Vec2(d(rng), d(rng)), Vec2(d(rng), d(rng)), Vec2(d(rng), d(rng))};
        const double a = shoelace(p[0], p[1], p[2]);
        double longest = 0.0;
        for (int k = 0; k < 3; ++k) longest = std::max(longest, (p[(k + 1) % 3] - p[k]).squaredNorm());
        if (std::abs(a) < 1e-3 * longest) continue;
        if (a < 0) std::swap(p[1], p[2]);
        return p;
    }
}

// Random symmetric positive definite 6x6 matrix with entries of order `scale`.
inline membrane::Mat6 random_spd(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    membrane::Mat6 G;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) G(i, j) = d(rng);
    membrane::Mat6 S = G * G.transpose() + 0.5 * membrane::Mat6::Identity();
    S = 0.5 * (S + S.transpose());
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) S(j, i) = S(i, j);
    return scale * S;
}

}  // namespace oracle
