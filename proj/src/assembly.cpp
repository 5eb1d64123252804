#include "membrane/assembly.hpp"

#include "membrane/element.hpp"
#include "membrane/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace membrane {

std::vector<int> GlobalSystem::constrained_nodes() const {
    std::vector<int> out;
    out.reserve(constraints.size());
    for (const Constraint& c : constraints) out.push_back(c.node);
    return out;
}

namespace {

const MaterialParams& material_of(std::span<const MaterialParams> materials, int e) {
    return materials.size() == 1 ? materials[0] : materials[e];
}

}  // namespace

GlobalSystem assemble(const Mesh& mesh, std::span<const MaterialParams> materials,
                      std::span<const Vec3> element_b) {
    const int ne = mesh.num_triangles();
    const int ndof = mesh.num_dofs();
    if (materials.empty() || (materials.size() != 1 && materials.size() != static_cast<std::size_t>(ne))) {
        throw Error("assembly: expected 1 or " + std::to_string(ne) + " materials, got " +
                    std::to_string(materials.size()));
    }
    if (!element_b.empty() && element_b.size() != static_cast<std::size_t>(ne)) {
        throw Error("assembly: expected " + std::to_string(ne) + " element loads, got " +
                    std::to_string(element_b.size()));
    }

    struct Chunk {
        std::vector<Triplet> k, m;
        std::vector<std::pair<int, double>> f;
    };
    std::vector<Chunk> chunks(kAssemblyChunks);
    parallel::for_chunks(ne, kAssemblyChunks, [&](std::size_t c, std::size_t begin, std::size_t end) {
        Chunk& out = chunks[c];
        out.k.reserve((end - begin) * 81);
        out.m.reserve((end - begin) * 27);
        for (std::size_t e = begin; e < end; ++e) {
            const int id = static_cast<int>(e);
            const MaterialParams& mat = material_of(materials, id);
            const ShapeCoeffs sc = shape_coefficients(mesh.triangle_coords(id), id);
            const double area = sc.area();
            const Mat9 Ke = element_stiffness(strain_displacement(sc), mat.D, mat.h, area);
            const Mat9 Me = element_mass(mat.rho, mat.h, area);
            const Triangle& tri = mesh.triangle(id);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    for (int a = 0; a < 3; ++a) {
                        for (int b = 0; b < 3; ++b) {
                            const int row = dof(tri[i], a), col = dof(tri[j], b);
                            const double kv = Ke(3 * i + a, 3 * j + b);
                            if (kv != 0.0) out.k.emplace_back(row, col, kv);
                            const double mv = Me(3 * i + a, 3 * j + b);
                            if (mv != 0.0) out.m.emplace_back(row, col, mv);
                        }
                    }
                }
            }
            if (!element_b.empty()) {
                const Vec9 fe = element_load(element_b[id], mat.h, area);
                for (int i = 0; i < 3; ++i) {
                    for (int a = 0; a < 3; ++a) out.f.emplace_back(dof(tri[i], a), fe(3 * i + a));
                }
            }
        }
    });

    // Merge in chunk order: the concatenation equals element order.
    std::size_t nk = 0, nm = 0;
    for (const Chunk& c : chunks) {
        nk += c.k.size();
        nm += c.m.size();
    }
    std::vector<Triplet> kt, mt;
    kt.reserve(nk);
    mt.reserve(nm);
    GlobalSystem sys;
    sys.f = VectorX::Zero(ndof);
    for (const Chunk& c : chunks) {
        kt.insert(kt.end(), c.k.begin(), c.k.end());
        mt.insert(mt.end(), c.m.begin(), c.m.end());
        for (const auto& [row, v] : c.f) sys.f[row] += v;
    }
    sys.K.resize(ndof, ndof);
    sys.M.resize(ndof, ndof);
    sys.K.setFromTriplets(kt.begin(), kt.end());
    sys.M.setFromTriplets(mt.begin(), mt.end());
    sys.K.makeCompressed();
    sys.M.makeCompressed();
    return sys;
}

GlobalSystem assemble(const Mesh& mesh, const MaterialParams& material, std::span<const Vec3> element_b) {
    return assemble(mesh, std::span<const MaterialParams>(&material, 1), element_b);
}

GlobalSystem apply_constraints(const GlobalSystem& system, std::vector<Constraint> constraints) {
    const int nnodes = system.num_dofs() / kDofsPerNode;
    std::sort(constraints.begin(), constraints.end(),
              [](const Constraint& a, const Constraint& b) { return a.node < b.node; });
    std::vector<char> is_fixed(system.num_dofs(), 0);
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        const Constraint& c = constraints[k];
        if (c.node < 0 || c.node >= nnodes) {
            throw ConfigError("constraint on missing node " + std::to_string(c.node));
        }
        if (k > 0 && constraints[k - 1].node == c.node) {
            throw ConfigError("duplicate constraint on node " + std::to_string(c.node));
        }
        if (!c.v_fix.allFinite()) {
            throw ConfigError("constraint velocity on node " + std::to_string(c.node) + " is not finite");
        }
        for (int a = 0; a < 3; ++a) is_fixed[dof(c.node, a)] = 1;
    }
    // Merge with constraints already present.
    for (const Constraint& c : system.constraints) {
        if (std::binary_search(constraints.begin(), constraints.end(), c,
                               [](const Constraint& a, const Constraint& b) { return a.node < b.node; })) {
            throw ConfigError("duplicate constraint on node " + std::to_string(c.node));
        }
        for (int a = 0; a < 3; ++a) is_fixed[dof(c.node, a)] = 1;
    }

    GlobalSystem out = system;
    auto zero_rows = [&](SparseMatrix& A) {
        for (int col = 0; col < A.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
                if (is_fixed[it.row()]) it.valueRef() = 0.0;
            }
        }
    };
    zero_rows(out.K);
    zero_rows(out.M);
    for (int i = 0; i < out.num_dofs(); ++i) {
        if (is_fixed[i]) {
            out.M.coeffRef(i, i) = 1.0;
            out.f[i] = 0.0;
        }
    }
    out.K.prune(0.0);
    out.M.prune(0.0);
    out.K.makeCompressed();
    out.M.makeCompressed();

    out.constraints.insert(out.constraints.end(), constraints.begin(), constraints.end());
    std::sort(out.constraints.begin(), out.constraints.end(),
              [](const Constraint& a, const Constraint& b) { return a.node < b.node; });
    return out;
}

void zero_constrained(VectorX& f, std::span<const Constraint> constraints) {
    for (const Constraint& c : constraints) f.segment<3>(dof(c.node, 0)).setZero();
}

namespace {

bool near_edge(double t, double edge, double scale) {
    return std::abs(t - edge) <= 1e-9 * std::max({std::abs(edge), scale, 1e-300});
}

}  // namespace

void TimeWindow::validate() const {
    if (!std::isfinite(start) || !std::isfinite(end) || end < start) {
        throw ConfigError("load window must satisfy start <= end");
    }
}

double TimeWindow::weight(double t) const {
    const double span = end - start;
    if (span <= 0.0) return 0.0;
    const bool at_start = near_edge(t, start, span);
    const bool at_end = near_edge(t, end, span);
    if (at_end) return 0.5;
    if (at_start) return start <= 0.0 ? 1.0 : 0.5;
    return (t > start && t < end) ? 1.0 : 0.0;
}

LoadModel::LoadModel(const Mesh& mesh, std::span<const MaterialParams> materials, std::vector<LoadTerm> terms)
    : terms_(std::move(terms)) {
    const int ndof = mesh.num_dofs();
    nodal_.reserve(terms_.size());
    for (const LoadTerm& term : terms_) {
        term.window.validate();
        VectorX f = VectorX::Zero(ndof);
        for (const auto& [e, b] : term.element_b) {
            if (e < 0 || e >= mesh.num_triangles()) {
                throw ConfigError("load targets missing element " + std::to_string(e));
            }
            const MaterialParams& mat = material_of(materials, e);
            const double area = mesh.signed_area(e);
            const Vec9 fe = element_load(b, mat.h, area);
            const Triangle& tri = mesh.triangle(e);
            for (int i = 0; i < 3; ++i) f.segment<3>(dof(tri[i], 0)) += fe.segment<3>(3 * i);
        }
        nodal_.push_back(std::move(f));
    }
}

LoadModel::LoadModel(const Mesh& mesh, const MaterialParams& material, std::vector<LoadTerm> terms)
    : LoadModel(mesh, std::span<const MaterialParams>(&material, 1), std::move(terms)) {}

VectorX LoadModel::evaluate(double t, int num_dofs) const {
    VectorX f = VectorX::Zero(num_dofs);
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const double w = terms_[k].window.weight(t);
        if (w != 0.0) f += w * nodal_[k];
    }
    return f;
}

std::vector<double> LoadModel::window_edges() const {
    std::vector<double> edges;
    for (const LoadTerm& term : terms_) {
        if (term.window.start > 0.0) edges.push_back(term.window.start);
        edges.push_back(term.window.end);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

VectorX update_load(const GlobalSystem& system, double t, const LoadModel& model) {
    VectorX f = model.evaluate(t, system.num_dofs());
    zero_constrained(f, system.constraints);
    return f;
}

}  // namespace membrane
