#include "membrane/scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace membrane {

void LoadSpec::validate() const {
    if (!direction.allFinite() || std::abs(direction.norm() - 1.0) > 1e-12) {
        throw ConfigError("load direction must be a unit vector");
    }
    if (!std::isfinite(b0)) throw ConfigError("load magnitude b0 must be finite");
    window.validate();
    if (kind == LoadKind::ElementUniform && targets.empty()) {
        throw ConfigError("element-uniform load needs target elements");
    }
    if (kind == LoadKind::DistributedCos2) {
        if (!(L > 0.0)) throw ConfigError("distributed load needs membrane size L > 0");
        if (support && !(*support >= 0.0)) throw ConfigError("distributed load support must be >= 0");
    }
}

Vec3 StrikeSpec::direction() const {
    return {std::sin(angle_to_normal), 0.0, std::cos(angle_to_normal)};
}

void ScenarioConfig::validate() const {
    if (check_material) material.validate();
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("total time T must be positive");
    if (tau && (!(*tau > 0.0) || !std::isfinite(*tau))) throw ConfigError("tau must be positive");
    if (every_n_steps < 0) throw ConfigError("every_n_steps must be >= 0");
    for (const LoadSpec& l : loads) {
        l.validate();
        for (int e : l.targets) {
            if (e < 0 || e >= mesh.num_triangles()) {
                throw ConfigError("load targets missing element " + std::to_string(e));
            }
        }
    }
    if (strike) {
        if (strike->node < 0 || strike->node >= mesh.num_nodes()) {
            throw ConfigError("strike node " + std::to_string(strike->node) + " does not exist");
        }
        if (!(strike->speed >= 0.0)) throw ConfigError("strike speed must be >= 0");
    }
    if (!initial_velocity.empty() && static_cast<int>(initial_velocity.size()) != mesh.num_nodes()) {
        throw ConfigError("initial_velocity must have one entry per node");
    }
}

namespace {

Vec2 bbox_center(const Mesh& mesh) {
    Vec2 lo = mesh.node(0), hi = mesh.node(0);
    for (const Vec2& p : mesh.nodes()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return 0.5 * (lo + hi);
}

Vec3 tilted(double angle) { return {std::sin(angle), 0.0, std::cos(angle)}; }

}  // namespace

ScenarioConfig build_case(int n, const CaseParams& p) {
    if (n < 1 || n > 5) throw ConfigError("test case must be 1..5, got " + std::to_string(n));
    ScenarioConfig c;
    c.mesh = p.mesh;
    c.material = p.material;
    c.border = p.border;
    c.T = p.T;
    c.tau = p.tau;
    c.every_n_steps = p.every_n_steps;
    c.check_material = p.check_material;
    const TimeWindow window{0.0, p.window_fraction * p.T};

    switch (n) {
        case 1:
        case 2: {
            const auto [e0, e1] = central_element_pair(p.mesh);
            LoadSpec load;
            load.kind = LoadKind::ElementUniform;
            load.direction = n == 1 ? Vec3::UnitZ() : tilted(kObliqueAngle);
            load.b0 = p.b0;
            load.window = window;
            load.targets = {e0, e1};
            c.loads.push_back(load);
            break;
        }
        case 3:
        case 4: {
            StrikeSpec strike;
            strike.node = nearest_node(p.mesh, bbox_center(p.mesh));
            strike.speed = p.speed;
            strike.angle_to_normal = n == 3 ? 0.0 : kObliqueAngle;
            c.strike = strike;
            break;
        }
        case 5: {
            LoadSpec load;
            load.kind = LoadKind::DistributedCos2;
            load.direction = Vec3::UnitZ();
            load.b0 = p.b0;
            load.window = window;
            load.L = p.mesh.extent();
            load.support = p.support;
            c.loads.push_back(load);
            break;
        }
    }
    c.validate();
    return c;
}

double distributed_b(double x, double y, double b0, double L, double support) {
    const double pi = 3.14159265358979323846;
    const double r = pi / (2.0 * L) * std::hypot(x - 0.5 * L, y - 0.5 * L);
    if (r > support) return 0.0;
    const double c = std::cos(r);
    return b0 * c * c;
}

double distributed_b(double x, double y, double b0, double L) { return distributed_b(x, y, b0, L, L); }

std::vector<double> elementwise_load(const Mesh& mesh, const std::function<double(double, double)>& field) {
    std::vector<double> out(mesh.num_triangles());
    for (int e = 0; e < mesh.num_triangles(); ++e) {
        const Vec2 c = mesh.centroid(e);
        out[e] = field(c.x(), c.y());
    }
    return out;
}

std::vector<LoadTerm> load_terms(const ScenarioConfig& config) {
    std::vector<LoadTerm> terms;
    for (const LoadSpec& l : config.loads) {
        LoadTerm term;
        term.window = l.window;
        if (l.kind == LoadKind::ElementUniform) {
            for (int e : l.targets) term.element_b.emplace_back(e, l.b0 * l.direction);
        } else {
            const double support = l.support.value_or(l.L);
            const auto values = elementwise_load(config.mesh, [&](double x, double y) {
                return distributed_b(x, y, l.b0, l.L, support);
            });
            for (int e = 0; e < config.mesh.num_triangles(); ++e) {
                if (values[e] != 0.0) term.element_b.emplace_back(e, values[e] * l.direction);
            }
        }
        terms.push_back(std::move(term));
    }
    return terms;
}

TimeGrid resolve_time_grid(double T, double tau_target, const std::vector<double>& edges) {
    if (!(T > 0.0) || !(tau_target > 0.0)) throw ConfigError("time grid needs T > 0 and tau > 0");
    const long base = std::max(1L, static_cast<long>(std::ceil(T / tau_target - 1e-9)));
    auto aligned = [&](long n) {
        for (double e : edges) {
            if (e <= 0.0 || e >= T) continue;
            const double k = n * e / T;
            if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) return false;
        }
        return true;
    };
    for (long n = base; n < 2 * base + 16; ++n) {
        if (aligned(n)) return {T / static_cast<double>(n), n};
    }
    return {T / static_cast<double>(base), base};
}

Simulation::Simulation(const ScenarioConfig& config) : config_(config) {
    config_.validate();
    raw_ = assemble(config_.mesh, config_.material);

    std::vector<Constraint> constraints = config_.extra_constraints;
    if (config_.border == Border::Fixed) {
        for (int node : boundary_nodes(config_.mesh)) {
            if (config_.strike && config_.strike->node == node) continue;
            constraints.push_back({node, Vec3::Zero()});
        }
    }
    if (config_.strike) constraints.push_back({config_.strike->node, config_.strike->velocity()});
    constrained_ = apply_constraints(raw_, std::move(constraints));

    loads_ = LoadModel(config_.mesh, config_.material, load_terms(config_));

    params_.beta1 = config_.beta1;
    params_.beta2 = config_.beta2;
    if (config_.tau) {
        params_.tau = *config_.tau;
        steps_ = std::max(1L, static_cast<long>(std::ceil(config_.T / *config_.tau - 1e-9)));
    } else {
        const TimeGrid grid = resolve_time_grid(config_.T, default_timestep(config_.mesh, config_.material),
                                                loads_.window_edges());
        params_.tau = grid.tau;
        steps_ = grid.steps;
    }
    factor_ = std::make_unique<NewmarkFactorization>(constrained_, params_);
}

State Simulation::initial_state() const {
    const int n = constrained_.num_dofs();
    VectorX v0 = VectorX::Zero(n);
    for (std::size_t i = 0; i < config_.initial_velocity.size(); ++i) {
        v0.segment<3>(dof(static_cast<int>(i), 0)) = config_.initial_velocity[i];
    }
    return init_state(constrained_, VectorX::Zero(n), v0, update_load(constrained_, 0.0, loads_));
}

State Simulation::advance(const State& s) const {
    const double t_next = static_cast<double>(s.step + 1) * params_.tau;
    return step(s, constrained_, params_, *factor_, update_load(constrained_, t_next, loads_));
}

State Simulation::run(const SnapshotObserver& observer) const {
    State s = initial_state();
    if (observer) observer(s);
    for (long k = 0; k < steps_; ++k) {
        s = advance(s);
        const bool last = s.step == steps_;
        const bool cadence = config_.every_n_steps > 0 && s.step % config_.every_n_steps == 0;
        if (observer && (last || cadence)) observer(s);
    }
    return s;
}

RunResult run(const ScenarioConfig& config) {
    const Simulation sim(config);
    RunResult result;
    result.tau = sim.params().tau;
    result.steps = sim.total_steps();
    result.final_state = sim.run([&](const State& s) { result.snapshots.push_back({s.t, s.step, s.a, s.adot}); });
    return result;
}

VectorX velocity_magnitude(const VectorX& adot) {
    const int n = static_cast<int>(adot.size()) / kDofsPerNode;
    VectorX out(n);
    for (int i = 0; i < n; ++i) out[i] = adot.segment<3>(dof(i, 0)).norm();
    return out;
}

}  // namespace membrane
