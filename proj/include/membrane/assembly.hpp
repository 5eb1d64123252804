#pragma once

#include "membrane/common.hpp"
#include "membrane/material.hpp"
#include "membrane/mesh.hpp"

#include <span>

namespace membrane {

// Node i owns global DOFs 3i (u), 3i+1 (v), 3i+2 (w).
inline int dof(int node, int component) { return kDofsPerNode * node + component; }

// Holds the velocity of `node` at v_fix for all time (zero for a clamped node).
struct Constraint {
    int node = -1;
    Vec3 v_fix = Vec3::Zero();
};

// Discrete equation M*addot + K*a + f = 0 over 3N DOFs.
struct GlobalSystem {
    SparseMatrix K;
    SparseMatrix M;
    VectorX f;
    std::vector<Constraint> constraints;  // sorted by node once applied

    int num_dofs() const { return static_cast<int>(f.size()); }
    bool constrained() const { return !constraints.empty(); }
    std::vector<int> constrained_nodes() const;
};

// Number of element chunks used by the scatter; fixed so that the merge order,
// and therefore the floating-point result, is independent of the thread count.
constexpr std::size_t kAssemblyChunks = 64;

// Element loads are force densities (N/m^3), one per triangle, or empty for none.
// `materials` holds either one entry for the whole mesh or one per triangle.
GlobalSystem assemble(const Mesh& mesh, std::span<const MaterialParams> materials,
                      std::span<const Vec3> element_b = {});
GlobalSystem assemble(const Mesh& mesh, const MaterialParams& material,
                      std::span<const Vec3> element_b = {});

// Row replacement: for each constrained node i, K block-row i and f_i become
// zero, M block-row i becomes [0 .. I3 .. 0]. Columns are left untouched, so
// the result is in general not symmetric. Throws ConfigError on a duplicate
// or out-of-range node.
GlobalSystem apply_constraints(const GlobalSystem& system, std::vector<Constraint> constraints);

// Zero the DOFs of constrained nodes in a load vector.
void zero_constrained(VectorX& f, std::span<const Constraint> constraints);

// Load active on [start, end]. At an interior jump (start > 0, or end) the
// load takes half its value, the mean of the one-sided limits; a window that
// opens at or before t = 0 is fully on at t = 0.
struct TimeWindow {
    double start = 0.0;
    double end = 0.0;

    double weight(double t) const;
    void validate() const;
};

// A set of per-element force densities switched on over one time window.
struct LoadTerm {
    std::vector<std::pair<int, Vec3>> element_b;
    TimeWindow window;
};

// Time-dependent load f(t) = sum of active terms; nodal vectors are built once.
class LoadModel {
public:
    LoadModel() = default;
    LoadModel(const Mesh& mesh, std::span<const MaterialParams> materials, std::vector<LoadTerm> terms);
    LoadModel(const Mesh& mesh, const MaterialParams& material, std::vector<LoadTerm> terms);

    // Unconstrained global load at time t.
    VectorX evaluate(double t, int num_dofs) const;
    const std::vector<LoadTerm>& terms() const { return terms_; }
    // Window edges in increasing order, for aligning time steps with load jumps.
    std::vector<double> window_edges() const;

private:
    std::vector<LoadTerm> terms_;
    std::vector<VectorX> nodal_;
};

// f(t) for `system`: loads active at t with constrained entries zeroed.
VectorX update_load(const GlobalSystem& system, double t, const LoadModel& model);

}  // namespace membrane
