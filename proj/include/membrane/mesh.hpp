#pragma once

#include "membrane/common.hpp"

#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>

namespace membrane {

using Triangle = std::array<int, 3>;

// Regular rectangle grid, every rectangle split lower-left -> upper-right.
struct StructuredSpec {
    double Lx = 1.0;
    double Ly = 1.0;
    int nx = 1;
    int ny = 1;

    void validate() const;
    double hx() const { return Lx / nx; }
    double hy() const { return Ly / ny; }
    int node_count() const { return (nx + 1) * (ny + 1); }
    int triangle_count() const { return 2 * nx * ny; }
    int node_index(int i, int j) const { return j * (nx + 1) + i; }
};

// Planar triangulation in material coordinates (x0, y0). Immutable once built.
class Mesh {
public:
    Mesh() = default;
    // Validates ids, orientation and duplicates; throws MeshError.
    Mesh(std::vector<Vec2> nodes, std::vector<Triangle> triangles,
         std::optional<StructuredSpec> structure = std::nullopt);

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_dofs() const { return kDofsPerNode * num_nodes(); }

    const Vec2& node(int id) const { return nodes_[id]; }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    const Triangle& triangle(int id) const { return triangles_[id]; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::optional<StructuredSpec>& structure() const { return structure_; }

    std::array<Vec2, 3> triangle_coords(int id) const;
    Vec2 centroid(int id) const;
    // Half the shoelace determinant; positive for CCW triangles.
    double signed_area(int id) const;
    double total_area() const;
    // Shortest edge over all triangles.
    double min_edge_length() const;
    // Largest coordinate extent of the node cloud.
    double extent() const;

private:
    void check_edge_connected() const;

    std::vector<Vec2> nodes_;
    std::vector<Triangle> triangles_;
    std::optional<StructuredSpec> structure_;
};

Mesh generate_structured(const StructuredSpec& spec);

// Doubles nx and ny; every coarse node position survives in the refined grid.
StructuredSpec refine(const StructuredSpec& spec);

// Gmsh MSH 2.2 ASCII. Only 3-node triangles are imported; points and lines
// are skipped, anything else is rejected. Node ids are remapped to 0..N-1 in
// file order and nodes unused by any triangle are dropped.
Mesh read_msh(std::istream& in);
Mesh read_msh_file(const std::string& path);

// Smallest id among the nodes closest to `point`.
int nearest_node(const Mesh& mesh, const Vec2& point);

// The two triangles of rectangle (floor(nx/2), floor(ny/2)).
std::pair<int, int> central_element_pair(const Mesh& mesh);

// Nodes on an edge owned by exactly one triangle, sorted ascending.
std::vector<int> boundary_nodes(const Mesh& mesh);

// Triangles incident to each node.
std::vector<std::vector<int>> node_to_triangles(const Mesh& mesh);

// Position lookup of `targets` among the nodes of `mesh` with an absolute
// tolerance; throws MeshError if any target is missing.
std::vector<int> match_positions(const Mesh& mesh, const std::vector<Vec2>& targets, double tol);

}  // namespace membrane
