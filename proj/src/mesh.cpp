#include "membrane/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace membrane {

void StructuredSpec::validate() const {
    if (nx < 1 || ny < 1) {
        throw MeshError("structured grid needs nx, ny >= 1");
    }
    if (!(Lx > 0.0) || !(Ly > 0.0) || !std::isfinite(Lx) || !std::isfinite(Ly)) {
        throw MeshError("structured grid needs positive finite Lx, Ly");
    }
}

Mesh::Mesh(std::vector<Vec2> nodes, std::vector<Triangle> triangles,
           std::optional<StructuredSpec> structure)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), structure_(structure) {
    const int n = num_nodes();
    for (int i = 0; i < n; ++i) {
        if (!nodes_[i].allFinite()) {
            throw MeshError("node " + std::to_string(i) + " has non-finite coordinates");
        }
    }
    std::set<Triangle> seen;
    for (int e = 0; e < num_triangles(); ++e) {
        const Triangle& t = triangles_[e];
        for (int v : t) {
            if (v < 0 || v >= n) {
                throw MeshError("triangle " + std::to_string(e) + " references missing node " +
                                std::to_string(v));
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw MeshError("triangle " + std::to_string(e) + " repeats a vertex");
        }
        if (!(signed_area(e) > 0.0)) {
            throw MeshError("triangle " + std::to_string(e) + " is not counter-clockwise");
        }
        Triangle key = t;
        std::sort(key.begin(), key.end());
        if (!seen.insert(key).second) {
            throw MeshError("triangle " + std::to_string(e) + " is a duplicate");
        }
    }
    check_edge_connected();
}

void Mesh::check_edge_connected() const {
    if (triangles_.empty()) return;
    std::map<std::pair<int, int>, std::vector<int>> edge_owners;
    for (int e = 0; e < num_triangles(); ++e) {
        const Triangle& t = triangles_[e];
        for (int k = 0; k < 3; ++k) {
            edge_owners[std::minmax(t[k], t[(k + 1) % 3])].push_back(e);
        }
    }
    std::vector<std::vector<int>> adj(num_triangles());
    for (const auto& [edge, owners] : edge_owners) {
        for (std::size_t a = 0; a < owners.size(); ++a) {
            for (std::size_t b = a + 1; b < owners.size(); ++b) {
                adj[owners[a]].push_back(owners[b]);
                adj[owners[b]].push_back(owners[a]);
            }
        }
    }
    std::vector<char> seen(num_triangles(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int e = stack.back();
        stack.pop_back();
        for (int nb : adj[e]) {
            if (!seen[nb]) {
                seen[nb] = 1;
                ++reached;
                stack.push_back(nb);
            }
        }
    }
    if (reached != num_triangles()) throw MeshError("mesh is not edge-connected");
}

std::array<Vec2, 3> Mesh::triangle_coords(int id) const {
    const Triangle& t = triangles_[id];
    return {nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]};
}

Vec2 Mesh::centroid(int id) const {
    const auto c = triangle_coords(id);
    return (c[0] + c[1] + c[2]) / 3.0;
}

double Mesh::signed_area(int id) const {
    const auto c = triangle_coords(id);
    return 0.5 * ((c[1].x() - c[0].x()) * (c[2].y() - c[0].y()) -
                  (c[2].x() - c[0].x()) * (c[1].y() - c[0].y()));
}

double Mesh::total_area() const {
    double sum = 0.0;
    for (int e = 0; e < num_triangles(); ++e) sum += signed_area(e);
    return sum;
}

double Mesh::min_edge_length() const {
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < num_triangles(); ++e) {
        const auto c = triangle_coords(e);
        for (int k = 0; k < 3; ++k) best = std::min(best, (c[(k + 1) % 3] - c[k]).norm());
    }
    return best;
}

double Mesh::extent() const {
    if (nodes_.empty()) return 0.0;
    Vec2 lo = nodes_.front(), hi = nodes_.front();
    for (const Vec2& p : nodes_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).maxCoeff();
}

Mesh generate_structured(const StructuredSpec& spec) {
    spec.validate();
    std::vector<Vec2> nodes;
    nodes.reserve(spec.node_count());
    for (int j = 0; j <= spec.ny; ++j) {
        for (int i = 0; i <= spec.nx; ++i) {
            // i*L/n rather than i*h keeps coarse positions bitwise identical after refinement
            // whenever L/n is exact.
            nodes.emplace_back(i * spec.Lx / spec.nx, j * spec.Ly / spec.ny);
        }
    }
    std::vector<Triangle> tris;
    tris.reserve(spec.triangle_count());
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            const int ll = spec.node_index(i, j);
            const int lr = spec.node_index(i + 1, j);
            const int ul = spec.node_index(i, j + 1);
            const int ur = spec.node_index(i + 1, j + 1);
            tris.push_back({ll, lr, ur});  // below the diagonal
            tris.push_back({ll, ur, ul});  // above the diagonal
        }
    }
    return Mesh(std::move(nodes), std::move(tris), spec);
}

StructuredSpec refine(const StructuredSpec& spec) {
    spec.validate();
    StructuredSpec fine = spec;
    fine.nx *= 2;
    fine.ny *= 2;
    return fine;
}

namespace {

struct LineReader {
    std::istream& in;
    std::size_t line_no = 0;

    bool next(std::string& line) {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    std::string expect_line(const char* context) {
        std::string line;
        if (!next(line)) throw ParseError(std::string("unexpected end of file in ") + context, line_no);
        return line;
    }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

void skip_section(LineReader& reader, const std::string& name) {
    const std::string end = "$End" + name.substr(1);
    std::string line;
    while (reader.next(line)) {
        if (trim(line) == end) return;
    }
    throw ParseError("missing " + end, reader.line_no);
}

}  // namespace

Mesh read_msh(std::istream& in) {
    LineReader reader{in};
    std::string line;
    bool have_format = false;
    bool have_nodes = false;
    bool have_elements = false;
    std::vector<long> node_tags;
    std::vector<Eigen::Vector3d> raw_nodes;
    std::vector<std::array<long, 3>> raw_tris;

    while (reader.next(line)) {
        const std::string header = trim(line);
        if (header.empty()) continue;
        if (header[0] != '$') {
            throw ParseError("expected section header, got '" + header + "'", reader.line_no);
        }
        if (header == "$MeshFormat") {
            std::istringstream fmt(reader.expect_line("$MeshFormat"));
            std::string version;
            int file_type = -1, data_size = 0;
            if (!(fmt >> version >> file_type >> data_size)) {
                throw ParseError("malformed $MeshFormat line", reader.line_no);
            }
            if (file_type != 0) {
                throw ParseError("unsupported binary MSH format", reader.line_no);
            }
            if (version.rfind("2.", 0) != 0) {
                throw ParseError("unsupported MSH version " + version + " (need 2.2)", reader.line_no);
            }
            if (trim(reader.expect_line("$MeshFormat")) != "$EndMeshFormat") {
                throw ParseError("missing $EndMeshFormat", reader.line_no);
            }
            have_format = true;
        } else if (header == "$Nodes") {
            std::istringstream cnt(reader.expect_line("$Nodes"));
            long count = -1;
            if (!(cnt >> count) || count < 0) throw ParseError("malformed node count", reader.line_no);
            node_tags.reserve(count);
            raw_nodes.reserve(count);
            for (long k = 0; k < count; ++k) {
                std::istringstream row(reader.expect_line("$Nodes"));
                long tag;
                double x, y, z;
                if (!(row >> tag >> x >> y >> z)) throw ParseError("malformed node line", reader.line_no);
                node_tags.push_back(tag);
                raw_nodes.emplace_back(x, y, z);
            }
            if (trim(reader.expect_line("$Nodes")) != "$EndNodes") {
                throw ParseError("missing $EndNodes", reader.line_no);
            }
            have_nodes = true;
        } else if (header == "$Elements") {
            std::istringstream cnt(reader.expect_line("$Elements"));
            long count = -1;
            if (!(cnt >> count) || count < 0) {
                throw ParseError("malformed element count", reader.line_no);
            }
            for (long k = 0; k < count; ++k) {
                std::istringstream row(reader.expect_line("$Elements"));
                long tag;
                int type, ntags;
                if (!(row >> tag >> type >> ntags) || ntags < 0) {
                    throw ParseError("malformed element line", reader.line_no);
                }
                for (int t = 0; t < ntags; ++t) {
                    long dummy;
                    if (!(row >> dummy)) throw ParseError("malformed element tags", reader.line_no);
                }
                if (type == 15 || type == 1) continue;  // point, 2-node line
                if (type != 2) {
                    throw ParseError("unsupported element type " + std::to_string(type),
                                     reader.line_no);
                }
                std::array<long, 3> v{};
                if (!(row >> v[0] >> v[1] >> v[2])) {
                    throw ParseError("malformed triangle connectivity", reader.line_no);
                }
                raw_tris.push_back(v);
            }
            if (trim(reader.expect_line("$Elements")) != "$EndElements") {
                throw ParseError("missing $EndElements", reader.line_no);
            }
            have_elements = true;
        } else {
            skip_section(reader, header);
        }
    }
    if (!have_format) throw ParseError("missing $MeshFormat section", reader.line_no);
    if (!have_nodes) throw ParseError("missing $Nodes section", reader.line_no);
    if (!have_elements) throw ParseError("missing $Elements section", reader.line_no);

    double extent = 0.0;
    for (const auto& p : raw_nodes) extent = std::max(extent, p.cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < raw_nodes.size(); ++k) {
        if (std::abs(raw_nodes[k].z()) >= 1e-9 * std::max(extent, 1e-300)) {
            throw MeshError("non-planar mesh: node " + std::to_string(node_tags[k]) +
                            " has z = " + std::to_string(raw_nodes[k].z()));
        }
    }

    std::unordered_map<long, std::size_t> tag_to_raw;
    for (std::size_t k = 0; k < node_tags.size(); ++k) {
        if (!tag_to_raw.emplace(node_tags[k], k).second) {
            throw MeshError("duplicate node tag " + std::to_string(node_tags[k]));
        }
    }
    // Dense ids for nodes used by triangles, in file order.
    std::vector<char> used(raw_nodes.size(), 0);
    for (const auto& t : raw_tris) {
        for (long tag : t) {
            auto it = tag_to_raw.find(tag);
            if (it == tag_to_raw.end()) throw MeshError("triangle references unknown node " + std::to_string(tag));
            used[it->second] = 1;
        }
    }
    std::vector<int> dense(raw_nodes.size(), -1);
    std::vector<Vec2> nodes;
    for (std::size_t k = 0; k < raw_nodes.size(); ++k) {
        if (!used[k]) continue;
        dense[k] = static_cast<int>(nodes.size());
        nodes.emplace_back(raw_nodes[k].x(), raw_nodes[k].y());
    }
    std::vector<Triangle> tris;
    tris.reserve(raw_tris.size());
    for (const auto& t : raw_tris) {
        Triangle tri{dense[tag_to_raw[t[0]]], dense[tag_to_raw[t[1]]], dense[tag_to_raw[t[2]]]};
        const Vec2 &a = nodes[tri[0]], &b = nodes[tri[1]], &c = nodes[tri[2]];
        const double twice_area = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
        if (twice_area < 0.0) std::swap(tri[1], tri[2]);  // gmsh orientation follows the surface normal
        tris.push_back(tri);
    }
    return Mesh(std::move(nodes), std::move(tris));
}

Mesh read_msh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file " + path);
    return read_msh(in);
}

int nearest_node(const Mesh& mesh, const Vec2& point) {
    if (mesh.num_nodes() == 0) throw MeshError("nearest_node on an empty mesh");
    int best = 0;
    double best_d2 = (mesh.node(0) - point).squaredNorm();
    for (int i = 1; i < mesh.num_nodes(); ++i) {
        const double d2 = (mesh.node(i) - point).squaredNorm();
        if (d2 < best_d2) {
            best = i;
            best_d2 = d2;
        }
    }
    return best;
}

std::pair<int, int> central_element_pair(const Mesh& mesh) {
    if (!mesh.structure()) throw MeshError("central_element_pair requires structured metadata");
    const StructuredSpec& s = *mesh.structure();
    const int i = s.nx / 2;
    const int j = s.ny / 2;
    const int rect = j * s.nx + i;
    return {2 * rect, 2 * rect + 1};
}

std::vector<int> boundary_nodes(const Mesh& mesh) {
    std::map<std::pair<int, int>, int> edge_count;
    for (const Triangle& t : mesh.triangles()) {
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    std::set<int> out;
    for (const auto& [edge, count] : edge_count) {
        if (count == 1) {
            out.insert(edge.first);
            out.insert(edge.second);
        }
    }
    return {out.begin(), out.end()};
}

std::vector<std::vector<int>> node_to_triangles(const Mesh& mesh) {
    std::vector<std::vector<int>> adj(mesh.num_nodes());
    for (int e = 0; e < mesh.num_triangles(); ++e) {
        for (int v : mesh.triangle(e)) adj[v].push_back(e);
    }
    return adj;
}

std::vector<int> match_positions(const Mesh& mesh, const std::vector<Vec2>& targets, double tol) {
    if (!(tol > 0.0)) throw MeshError("match_positions needs a positive tolerance");
    // Bucket size 2*tol guarantees a match lives in the target's bucket or a neighbour.
    const double cell = 2.0 * tol;
    auto key = [cell](const Vec2& p) {
        return std::pair<long long, long long>(static_cast<long long>(std::floor(p.x() / cell)),
                                               static_cast<long long>(std::floor(p.y() / cell)));
    };
    std::map<std::pair<long long, long long>, std::vector<int>> buckets;
    for (int i = 0; i < mesh.num_nodes(); ++i) buckets[key(mesh.node(i))].push_back(i);

    std::vector<int> out;
    out.reserve(targets.size());
    for (const Vec2& p : targets) {
        const auto [kx, ky] = key(p);
        int found = -1;
        double best = std::numeric_limits<double>::infinity();
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = buckets.find({kx + dx, ky + dy});
                if (it == buckets.end()) continue;
                for (int i : it->second) {
                    const double d = (mesh.node(i) - p).norm();
                    if (d > tol) continue;
                    if (d < best || (d == best && i < found)) {
                        found = i;
                        best = d;
                    }
                }
            }
        }
        if (found < 0) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "no node within " << tol << " of (" << p.x() << ", " << p.y() << ")";
            throw MeshError(msg.str());
        }
        out.push_back(found);
    }
    return out;
}

}  // namespace membrane
