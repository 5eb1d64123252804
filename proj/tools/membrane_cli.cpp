#include "membrane/convergence.hpp"
#include "membrane/io.hpp"
#include "membrane/mesh.hpp"
#include "membrane/scenarios.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace membrane;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int every, double tau) {
    const auto start = std::chrono::steady_clock::now();
    io::RunConfig rc = io::load_run_config(config_path);
    if (!out_dir.empty()) rc.output_dir = out_dir;
    if (every >= 0) rc.scenario.every_n_steps = every;
    if (tau > 0.0) rc.scenario.tau = tau;

    const Simulation sim(rc.scenario);
    io::ensure_directory(rc.output_dir);
    int snapshots = 0;
    const State final_state = sim.run([&](const State& s) {
        io::write_snapshot(rc.output_dir, rc.scenario.mesh, rc.scenario.material, s);
        ++snapshots;
    });

    io::RunManifest manifest;
    manifest.config = rc.raw;
    manifest.tau = sim.params().tau;
    manifest.steps = final_state.step;
    manifest.snapshots = snapshots;
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    io::write_manifest(rc.output_dir / "manifest.json", manifest);
    std::cout << "steps " << final_state.step << ", tau " << io::format_double(sim.params().tau) << ", "
              << snapshots << " snapshots in " << rc.output_dir.string() << '\n';
    return kExitOk;
}

int cmd_convergence(const std::string& config_path, const std::string& out_dir) {
    io::StudyConfig sc = io::load_study_config(config_path);
    if (!out_dir.empty()) sc.output_dir = out_dir;
    const StudyResult result = run_study(sc.spec);
    io::ensure_directory(sc.output_dir);
    const fs::path csv = sc.output_dir / "study.csv";
    {
        std::ofstream out(csv);
        if (!out) throw IoError("cannot write " + csv.string());
        write_study_csv(out, result);
    }
    static const char* names[] = {"L1", "L2", "Linf"};
    for (int n = 0; n < 3; ++n) {
        std::cout << "rate " << names[n] << ' ' << io::format_double(result.joint_rates[n].rate) << '\n';
        for (const std::string& w : result.joint_rates[n].warnings) std::cerr << "warning: " << w << '\n';
    }
    std::cout << "wrote " << csv.string() << '\n';
    return kExitOk;
}

int cmd_mesh_info(const std::string& path) {
    Mesh mesh;
    try {
        mesh = read_msh_file(path);
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    } catch (const MeshError& e) {
        throw ConfigError(e.what());
    }
    std::cout << "nodes " << mesh.num_nodes() << '\n'
              << "triangles " << mesh.num_triangles() << '\n'
              << "boundary_nodes " << boundary_nodes(mesh).size() << '\n'
              << "total_area " << io::format_double(mesh.total_area()) << '\n'
              << "min_edge " << io::format_double(mesh.min_edge_length()) << '\n'
              << "extent " << io::format_double(mesh.extent()) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-element dynamics of thin anisotropic membranes"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int every = -1;
    double tau = 0.0;
    auto* run = app.add_subcommand("run", "Simulate one scenario and write snapshots");
    run->add_option("config", config_path, "Scenario config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--every", every, "Snapshot every N steps");
    run->add_option("--tau", tau, "Time step override (s)");

    std::string study_path, study_out;
    auto* conv = app.add_subcommand("convergence", "Run a mesh-refinement convergence study");
    conv->add_option("study", study_path, "Study config (JSON)")->required();
    conv->add_option("--out", study_out, "Output directory");

    std::string msh_path;
    auto* info = app.add_subcommand("mesh-info", "Summarise a Gmsh MSH 2.2 file");
    info->add_option("file", msh_path, "Mesh file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*run) return guarded([&] { return cmd_run(config_path, out_dir, every, tau); });
    if (*conv) return guarded([&] { return cmd_convergence(study_path, study_out); });
    if (*info) return guarded([&] { return cmd_mesh_info(msh_path); });
    return kExitFailure;
}
