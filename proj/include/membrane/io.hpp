#pragma once

#include "membrane/convergence.hpp"
#include "membrane/scenarios.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace membrane::io {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSnapshotHeader = "t,node,x0,y0,u,v,w,vx,vy,vz,vmag";
inline constexpr const char* kElementHeader =
    "t,element,exx,eyy,ezz,gxy,gyz,gxz,sxx,syy,szz,sxy,syz,sxz,strain_flag,stress_flag";

// Material block: {"type": "isotropic", "E", "nu"} or
// {"type": "anisotropic", "moduli": [[i, j, GPa], ...]}, plus "rho", "h",
// optional "strain_threshold", "stress_threshold". Throws ConfigError naming the key.
MaterialParams parse_material(const json& j);

struct RunConfig {
    ScenarioConfig scenario;
    std::filesystem::path output_dir = "out";
    int case_id = 0;  // 0 for explicit load/strike configs
    json raw;
};

// Relative msh paths resolve against `base_dir`.
RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

struct StudyConfig {
    StudySpec spec;
    std::filesystem::path output_dir = "out";
    json raw;
};

// A run config with a structured mesh and a numbered case, plus
// "study": {"k_max", optional "tau0", optional "concurrent_levels"}.
StudyConfig parse_study_config(const json& j);
StudyConfig load_study_config(const std::filesystem::path& path);

// One row per node, header kSnapshotHeader, 17 significant digits.
void write_snapshot_csv(std::ostream& out, const Mesh& mesh, const State& state);
// One row per element with recovered strain/stress and threshold flags.
void write_element_csv(std::ostream& out, const Mesh& mesh, const MaterialParams& material, const State& state);
// Legacy VTK ASCII unstructured grid on the deformed positions (x0+u, y0+v, w).
void write_vtk(std::ostream& out, const Mesh& mesh, const State& state);

// Writes snapshot_<step>.csv, elements_<step>.csv and snapshot_<step>.vtk into `dir`.
std::vector<std::filesystem::path> write_snapshot(const std::filesystem::path& dir, const Mesh& mesh,
                                                  const MaterialParams& material, const State& state);

struct RunManifest {
    json config;
    double tau = 0.0;
    long steps = 0;
    double wall_seconds = 0.0;
    int snapshots = 0;
};
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

// Creates `dir` if needed; throws IoError if it cannot be written.
void ensure_directory(const std::filesystem::path& dir);

std::string format_double(double v);

}  // namespace membrane::io
