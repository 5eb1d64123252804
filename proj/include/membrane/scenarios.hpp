#pragma once

#include "membrane/assembly.hpp"
#include "membrane/integrator.hpp"

#include <functional>
#include <optional>

namespace membrane {

enum class LoadKind { ElementUniform, DistributedCos2 };
enum class Border { Free, Fixed };

// A force density with fixed direction switched on over `window`.
struct LoadSpec {
    LoadKind kind = LoadKind::ElementUniform;
    Vec3 direction = Vec3::UnitZ();  // unit length
    double b0 = 0.0;                 // N/m^3
    TimeWindow window;
    std::vector<int> targets;  // ElementUniform only
    // DistributedCos2 only: membrane size L and the support bound on the
    // dimensionless radius (defaults to L when unset).
    double L = 1.0;
    std::optional<double> support;

    void validate() const;
};

// Point strike: the node moves at `speed` along the direction tilted by
// `angle_to_normal` from +z towards +x.
struct StrikeSpec {
    int node = -1;
    double speed = 0.0;            // m/s
    double angle_to_normal = 0.0;  // rad

    Vec3 direction() const;
    Vec3 velocity() const { return speed * direction(); }
};

struct ScenarioConfig {
    Mesh mesh;
    MaterialParams material;
    std::vector<LoadSpec> loads;
    std::optional<StrikeSpec> strike;
    Border border = Border::Free;
    std::vector<Constraint> extra_constraints;
    std::vector<Vec3> initial_velocity;  // per node, empty for rest
    double T = 0.0;                      // s
    std::optional<double> tau;           // s; default rule when unset
    double beta1 = 0.5;
    double beta2 = 0.5;
    int every_n_steps = 0;  // 0 writes only the first and last states
    // false skips the rho > 0, h > 0 checks so degenerate inputs reach the solver.
    bool check_material = true;

    void validate() const;
};

// Shared inputs of the five reference test cases.
struct CaseParams {
    Mesh mesh;
    MaterialParams material;
    Border border = Border::Fixed;
    double T = 0.0;
    std::optional<double> tau;
    double b0 = 0.0;                // N/m^3, cases 1, 2, 5
    double speed = 0.0;             // m/s, cases 3, 4
    double window_fraction = 0.1;   // load window [0, fraction*T]
    std::optional<double> support;  // case 5 support bound on r
    int every_n_steps = 0;
    bool check_material = true;
};

constexpr double kObliqueAngle = 3.14159265358979323846 / 6.0;

// 1: normal load on the central element pair; 2: same, tilted pi/6 in the x-z
// plane; 3: normal velocity at the node nearest the centre; 4: same, tilted;
// 5: distributed cos^2 normal load. Throws ConfigError for n outside 1..5.
ScenarioConfig build_case(int n, const CaseParams& params);

// b0 cos^2(r) for r <= support, else 0, with r = pi/(2L) * |(x, y) - (L/2, L/2)|.
double distributed_b(double x, double y, double b0, double L);
double distributed_b(double x, double y, double b0, double L, double support);

// Force density per element from a scalar field evaluated at the centroid.
std::vector<double> elementwise_load(const Mesh& mesh, const std::function<double(double, double)>& field);

// Load terms of a config, in element form.
std::vector<LoadTerm> load_terms(const ScenarioConfig& config);

// Steps from T/tau rounded up so that every load window edge lands on a step.
struct TimeGrid {
    double tau = 0.0;
    long steps = 0;
};
TimeGrid resolve_time_grid(double T, double tau_target, const std::vector<double>& edges);

struct Snapshot {
    double t = 0.0;
    long step = 0;
    VectorX a;
    VectorX adot;
};

struct RunResult {
    State final_state;
    double tau = 0.0;
    long steps = 0;
    std::vector<Snapshot> snapshots;
};

using SnapshotObserver = std::function<void(const State&)>;

// Fully prepared simulation: constrained system, load model, factorization.
class Simulation {
public:
    explicit Simulation(const ScenarioConfig& config);

    const ScenarioConfig& config() const { return config_; }
    const GlobalSystem& unconstrained() const { return raw_; }
    const GlobalSystem& system() const { return constrained_; }
    const LoadModel& loads() const { return loads_; }
    const NewmarkParams& params() const { return params_; }
    long total_steps() const { return steps_; }

    State initial_state() const;
    State advance(const State& s) const;
    // Integrates to T, calling `observer` on the initial state, every
    // every_n_steps steps, and on the final state.
    State run(const SnapshotObserver& observer = {}) const;

private:
    ScenarioConfig config_;
    GlobalSystem raw_;
    GlobalSystem constrained_;
    LoadModel loads_;
    NewmarkParams params_;
    long steps_ = 0;
    std::unique_ptr<NewmarkFactorization> factor_;
};

// Runs the scenario, keeping every emitted snapshot.
RunResult run(const ScenarioConfig& config);

// Per-node |(udot, vdot, wdot)|.
VectorX velocity_magnitude(const VectorX& adot);

}  // namespace membrane
