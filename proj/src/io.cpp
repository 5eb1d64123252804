#include "membrane/io.hpp"

#include "membrane/element.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace membrane::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError("missing key '" + where + (where.empty() ? "" : ".") + key + "'");
    }
    return j.at(key);
}

double number(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) throw ConfigError("key '" + where + "." + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

Vec3 vec3(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("key '" + key + "' must be a 3-vector");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) throw ConfigError("key '" + key + "' must be a 3-vector");
        v[i] = j[i].get<double>();
    }
    return v;
}

Mesh parse_mesh(const json& j, const fs::path& base_dir) {
    if (j.contains("msh_path")) {
        fs::path p = j.at("msh_path").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        return read_msh_file(p.string());
    }
    StructuredSpec s;
    s.Lx = number(j, "Lx", "mesh");
    s.Ly = number(j, "Ly", "mesh");
    const json& nx = require(j, "nx", "mesh");
    const json& ny = require(j, "ny", "mesh");
    if (!nx.is_number_integer() || !ny.is_number_integer()) throw ConfigError("mesh.nx and mesh.ny must be integers");
    s.nx = nx.get<int>();
    s.ny = ny.get<int>();
    try {
        return generate_structured(s);
    } catch (const MeshError& e) {
        throw ConfigError(std::string("mesh: ") + e.what());
    }
}

Border parse_border(const json& j) {
    if (!j.contains("border")) return Border::Free;
    const std::string b = j.at("border").get<std::string>();
    if (b == "free") return Border::Free;
    if (b == "fixed") return Border::Fixed;
    throw ConfigError("border must be \"free\" or \"fixed\", got \"" + b + "\"");
}

TimeWindow parse_window(const json& j, double T, double fraction) {
    if (!j.contains("window")) return {0.0, fraction * T};
    const json& w = j.at("window");
    if (!w.is_array() || w.size() != 2) throw ConfigError("key 'window' must be [start, end]");
    return {w[0].get<double>(), w[1].get<double>()};
}

}  // namespace

MaterialParams parse_material(const json& j) {
    if (!j.is_object()) throw ConfigError("missing key 'material'");
    MaterialParams m;
    const std::string type = require(j, "type", "material").get<std::string>();
    try {
        if (type == "isotropic") {
            m.D = isotropic(number(j, "E", "material"), number(j, "nu", "material"));
        } else if (type == "anisotropic") {
            const json& list = require(j, "moduli", "material");
            if (!list.is_array()) throw ConfigError("key 'material.moduli' must be a list of [i, j, GPa]");
            std::vector<ModulusEntry> entries;
            for (const json& e : list) {
                if (!e.is_array() || e.size() != 3) {
                    throw ConfigError("key 'material.moduli' entries must be [i, j, GPa]");
                }
                entries.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
            }
            m.D = anisotropic_from_entries(entries, 1e9);
        } else {
            throw ConfigError("material.type must be \"isotropic\" or \"anisotropic\"");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("material: ") + e.what());
    }
    m.rho = number(j, "rho", "material");
    m.h = number(j, "h", "material");
    if (j.contains("strain_threshold")) m.strain_threshold = number(j, "strain_threshold", "material");
    if (j.contains("stress_threshold")) m.stress_threshold = number(j, "stress_threshold", "material");
    // "unchecked": true lets degenerate densities reach the solver (diagnostic runs).
    if (!j.value("unchecked", false)) m.validate();
    return m;
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
    RunConfig rc;
    rc.raw = j;
    try {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        const Mesh mesh = parse_mesh(require(j, "mesh", ""), base_dir);
        const MaterialParams material = parse_material(require(j, "material", ""));
        const double T = number(j, "T", "");
        const Border border = parse_border(j);
        std::optional<double> tau;
        if (j.contains("tau") && !j.at("tau").is_null()) tau = number(j, "tau", "");
        int every = 0;
        if (j.contains("output")) {
            const json& out = j.at("output");
            every = out.value("every_n_steps", 0);
            rc.output_dir = out.value("directory", std::string("out"));
        }
        const json& c = require(j, "case", "");
        const json& nm = j.contains("newmark") ? j.at("newmark") : json::object();

        if (c.contains("id")) {
            CaseParams p;
            p.mesh = mesh;
            p.material = material;
            p.border = border;
            p.T = T;
            p.tau = tau;
            p.b0 = number_or(c, "b0", 0.0, "case");
            p.speed = number_or(c, "speed", 0.0, "case");
            p.window_fraction = number_or(c, "window_fraction", 0.1, "case");
            if (c.contains("support")) p.support = number(c, "support", "case");
            p.every_n_steps = every;
            p.check_material = !j.at("material").value("unchecked", false);
            rc.case_id = c.at("id").get<int>();
            rc.scenario = build_case(rc.case_id, p);
        } else {
            ScenarioConfig& s = rc.scenario;
            s.mesh = mesh;
            s.material = material;
            s.border = border;
            s.T = T;
            s.tau = tau;
            s.every_n_steps = every;
            if (c.contains("load")) {
                const json& l = c.at("load");
                LoadSpec load;
                const std::string kind = require(l, "kind", "case.load").get<std::string>();
                if (kind == "element-uniform") {
                    load.kind = LoadKind::ElementUniform;
                    const json& targets = require(l, "elements", "case.load");
                    if (targets.is_string() && targets.get<std::string>() == "central-pair") {
                        const auto [e0, e1] = central_element_pair(mesh);
                        load.targets = {e0, e1};
                    } else {
                        load.targets = targets.get<std::vector<int>>();
                    }
                } else if (kind == "distributed-cos2") {
                    load.kind = LoadKind::DistributedCos2;
                    load.L = number_or(l, "L", mesh.extent(), "case.load");
                    if (l.contains("support")) load.support = number(l, "support", "case.load");
                } else {
                    throw ConfigError("case.load.kind must be \"element-uniform\" or \"distributed-cos2\"");
                }
                load.direction = l.contains("direction") ? vec3(l.at("direction"), "case.load.direction")
                                                         : Vec3::UnitZ();
                load.b0 = number(l, "b0", "case.load");
                load.window = parse_window(l, T, 0.1);
                s.loads.push_back(load);
            }
            if (c.contains("strike")) {
                const json& st = c.at("strike");
                StrikeSpec strike;
                const json& node = require(st, "node", "case.strike");
                if (node.is_string() && node.get<std::string>() == "center") {
                    Vec2 lo = mesh.node(0), hi = mesh.node(0);
                    for (const Vec2& p : mesh.nodes()) {
                        lo = lo.cwiseMin(p);
                        hi = hi.cwiseMax(p);
                    }
                    strike.node = nearest_node(mesh, 0.5 * (lo + hi));
                } else {
                    strike.node = node.get<int>();
                }
                strike.speed = number(st, "speed", "case.strike");
                strike.angle_to_normal = number_or(st, "angle_to_normal", 0.0, "case.strike");
                s.strike = strike;
            }
            if (s.loads.empty() && !s.strike) throw ConfigError("case needs 'id', 'load' or 'strike'");
        }
        rc.scenario.beta1 = number_or(nm, "beta1", 0.5, "newmark");
        rc.scenario.beta2 = number_or(nm, "beta2", 0.5, "newmark");
        rc.scenario.check_material = !j.at("material").value("unchecked", false);
        rc.scenario.validate();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const MeshError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return rc;
}

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
    return parse_run_config(read_json(path), path.parent_path());
}

StudyConfig parse_study_config(const json& j) {
    StudyConfig sc;
    sc.raw = j;
    // Validates the scenario once on the base grid.
    const RunConfig base = parse_run_config(j);
    if (base.case_id == 0) throw ConfigError("convergence study needs a numbered case ('case.id')");
    const auto& structure = base.scenario.mesh.structure();
    if (!structure) throw ConfigError("convergence study needs a structured mesh {Lx, Ly, nx, ny}");
    const json& study = require(j, "study", "");
    try {
        sc.spec.base = *structure;
        sc.spec.k_max = require(study, "k_max", "study").get<int>();
        sc.spec.T = base.scenario.T;
        if (study.contains("tau0")) sc.spec.tau0 = number(study, "tau0", "study");
        else if (base.scenario.tau) sc.spec.tau0 = base.scenario.tau;
        sc.spec.concurrent_levels = study.value("concurrent_levels", true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("study: ") + e.what());
    }
    if (j.contains("output")) sc.output_dir = j.at("output").value("directory", std::string("out"));

    // Re-derive the case on each level mesh.
    const json& c = j.at("case");
    CaseParams p;
    p.material = base.scenario.material;
    p.border = base.scenario.border;
    p.T = base.scenario.T;
    p.b0 = number_or(c, "b0", 0.0, "case");
    p.speed = number_or(c, "speed", 0.0, "case");
    p.window_fraction = number_or(c, "window_fraction", 0.1, "case");
    if (c.contains("support")) p.support = number(c, "support", "case");
    const int id = base.case_id;
    const double beta1 = base.scenario.beta1, beta2 = base.scenario.beta2;
    sc.spec.scenario = [p, id, beta1, beta2](const Mesh& mesh) {
        CaseParams level = p;
        level.mesh = mesh;
        ScenarioConfig cfg = build_case(id, level);
        cfg.beta1 = beta1;
        cfg.beta2 = beta2;
        return cfg;
    };
    sc.spec.validate();
    return sc;
}

StudyConfig load_study_config(const fs::path& path) { return parse_study_config(read_json(path)); }

void write_snapshot_csv(std::ostream& out, const Mesh& mesh, const State& state) {
    out << kSnapshotHeader << '\n';
    const std::string t = format_double(state.t);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const Vec3 u = state.a.segment<3>(dof(i, 0));
        const Vec3 v = state.adot.segment<3>(dof(i, 0));
        out << t << ',' << i << ',' << format_double(mesh.node(i).x()) << ',' << format_double(mesh.node(i).y());
        for (int c = 0; c < 3; ++c) out << ',' << format_double(u[c]);
        for (int c = 0; c < 3; ++c) out << ',' << format_double(v[c]);
        out << ',' << format_double(v.norm()) << '\n';
    }
}

void write_element_csv(std::ostream& out, const Mesh& mesh, const MaterialParams& material, const State& state) {
    out << kElementHeader << '\n';
    const std::string t = format_double(state.t);
    for (int e = 0; e < mesh.num_triangles(); ++e) {
        const ShapeCoeffs sc = shape_coefficients(mesh.triangle_coords(e), e);
        Vec9 ae;
        const Triangle& tri = mesh.triangle(e);
        for (int i = 0; i < 3; ++i) ae.segment<3>(3 * i) = state.a.segment<3>(dof(tri[i], 0));
        const StressStrain ss = recover_stress_strain(sc, material.D, ae);
        const ThresholdFlags flags = check_thresholds(ss, material);
        out << t << ',' << e;
        for (int c = 0; c < 6; ++c) out << ',' << format_double(ss.strain[c]);
        for (int c = 0; c < 6; ++c) out << ',' << format_double(ss.stress[c]);
        out << ',' << int(flags.strain) << ',' << int(flags.stress) << '\n';
    }
}

void write_vtk(std::ostream& out, const Mesh& mesh, const State& state) {
    const int n = mesh.num_nodes();
    const int ne = mesh.num_triangles();
    out << "# vtk DataFile Version 3.0\n";
    out << "membrane t=" << format_double(state.t) << '\n';
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << n << " double\n";
    for (int i = 0; i < n; ++i) {
        const Vec3 u = state.a.segment<3>(dof(i, 0));
        out << format_double(mesh.node(i).x() + u.x()) << ' ' << format_double(mesh.node(i).y() + u.y()) << ' '
            << format_double(u.z()) << '\n';
    }
    out << "CELLS " << ne << ' ' << 4 * ne << '\n';
    for (const Triangle& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << ne << '\n';
    for (int e = 0; e < ne; ++e) out << "5\n";
    out << "POINT_DATA " << n << '\n';
    out << "SCALARS vmag double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) out << format_double(state.adot.segment<3>(dof(i, 0)).norm()) << '\n';
    out << "VECTORS velocity double\n";
    for (int i = 0; i < n; ++i) {
        out << format_double(state.adot[dof(i, 0)]) << ' ' << format_double(state.adot[dof(i, 1)]) << ' '
            << format_double(state.adot[dof(i, 2)]) << '\n';
    }
    out << "VECTORS displacement double\n";
    for (int i = 0; i < n; ++i) {
        out << format_double(state.a[dof(i, 0)]) << ' ' << format_double(state.a[dof(i, 1)]) << ' '
            << format_double(state.a[dof(i, 2)]) << '\n';
    }
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

}  // namespace

std::vector<fs::path> write_snapshot(const fs::path& dir, const Mesh& mesh, const MaterialParams& material,
                                     const State& state) {
    ensure_directory(dir);
    char stem[32];
    std::snprintf(stem, sizeof stem, "%08ld", state.step);
    const fs::path csv = dir / ("snapshot_" + std::string(stem) + ".csv");
    const fs::path ecsv = dir / ("elements_" + std::string(stem) + ".csv");
    const fs::path vtk = dir / ("snapshot_" + std::string(stem) + ".vtk");
    {
        auto out = open_out(csv);
        write_snapshot_csv(out, mesh, state);
    }
    {
        auto out = open_out(ecsv);
        write_element_csv(out, mesh, material, state);
    }
    {
        auto out = open_out(vtk);
        write_vtk(out, mesh, state);
    }
    return {csv, ecsv, vtk};
}

void write_manifest(const fs::path& path, const RunManifest& m) {
    json j;
    j["config"] = m.config;
    j["version"] = kVersion;
    j["tau"] = m.tau;
    j["steps"] = m.steps;
    j["wall_seconds"] = m.wall_seconds;
    j["snapshots"] = m.snapshots;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace membrane::io
