#include "membrane/convergence.hpp"

#include "membrane/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace membrane {

double norm(std::span<const double> d, NormKind which) {
    if (d.empty()) throw Error("norm of an empty vector");
    double acc = 0.0;
    switch (which) {
        case NormKind::L1:
            for (double x : d) acc += std::abs(x);
            return acc / static_cast<double>(d.size());
        case NormKind::L2:
            for (double x : d) acc += x * x;
            return std::sqrt(acc / static_cast<double>(d.size()));
        case NormKind::Linf:
            for (double x : d) acc = std::max(acc, std::abs(x));
            return acc;
    }
    return acc;
}

double norm(const VectorX& d, NormKind which) {
    return norm(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())), which);
}

RateFit fit_rate(std::span<const double> norms) {
    RateFit fit;
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < norms.size(); ++k) {
        if (!(norms[k] > 0.0) || !std::isfinite(norms[k])) {
            fit.excluded.push_back(static_cast<int>(k));
            fit.warnings.push_back("level " + std::to_string(k) + " excluded: norm is zero or not finite");
            continue;
        }
        xs.push_back(static_cast<double>(k));
        ys.push_back(std::log2(norms[k]));
    }
    if (xs.size() < 2) throw NumericalError("rate fit needs at least two non-zero norms");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    fit.rate = -sxy / sxx;
    return fit;
}

void StudySpec::validate() const {
    base.validate();
    if (k_max < 2) throw ConfigError("convergence study needs k_max >= 2 (need >= 2 levels of differences)");
    if (!(T > 0.0)) throw ConfigError("convergence study needs T > 0");
    if (tau0 && !(*tau0 > 0.0)) throw ConfigError("convergence study tau0 must be positive");
    if (!scenario) throw ConfigError("convergence study has no scenario");
}

namespace {

struct LevelSolution {
    VectorX sample;  // 6 values per baseline node: u, v, w, udot, vdot, wdot
    double tau = 0.0;
    int n_nodes = 0;
};

std::array<double, 3> all_norms(const VectorX& d) {
    return {norm(d, NormKind::L1), norm(d, NormKind::L2), norm(d, NormKind::Linf)};
}

}  // namespace

StudyResult run_study(const StudySpec& spec) {
    spec.validate();
    const Mesh base_mesh = generate_structured(spec.base);
    const std::vector<Vec2>& baseline = base_mesh.nodes();

    // Step count from the base scenario so every level shares one time grid, halved per level.
    long steps0 = 0;
    {
        ScenarioConfig cfg = spec.scenario(base_mesh);
        cfg.T = spec.T;
        cfg.tau.reset();
        const LoadModel loads(cfg.mesh, cfg.material, load_terms(cfg));
        const double target = spec.tau0 ? *spec.tau0 : default_timestep(cfg.mesh, cfg.material);
        const TimeGrid grid = resolve_time_grid(spec.T, target, loads.window_edges());
        steps0 = grid.steps;
    }

    const int levels = spec.k_max + 1;
    std::vector<LevelSolution> solutions(levels);
    auto solve_level = [&](std::size_t k) {
        StructuredSpec s = spec.base;
        for (std::size_t r = 0; r < k; ++r) s = refine(s);
        const Mesh mesh = generate_structured(s);
        ScenarioConfig cfg = spec.scenario(mesh);
        cfg.T = spec.T;
        const long steps = steps0 << k;
        cfg.tau = spec.T / static_cast<double>(steps);
        const Simulation sim(cfg);
        const State final_state = sim.run();

        const double tol = 1e-12 * std::min(s.hx(), s.hy());
        const std::vector<int> ids = match_positions(mesh, baseline, tol);
        LevelSolution& out = solutions[k];
        out.sample.resize(6 * static_cast<Eigen::Index>(ids.size()));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            out.sample.segment<3>(6 * i) = final_state.a.segment<3>(dof(ids[i], 0));
            out.sample.segment<3>(6 * i + 3) = final_state.adot.segment<3>(dof(ids[i], 0));
        }
        out.tau = *cfg.tau;
        out.n_nodes = mesh.num_nodes();
    };
    if (spec.concurrent_levels) {
        parallel::for_each_index(levels, solve_level);
    } else {
        for (int k = 0; k < levels; ++k) solve_level(k);
    }

    StudyResult result;
    for (const LevelSolution& s : solutions) {
        result.level_tau.push_back(s.tau);
        result.level_nodes.push_back(s.n_nodes);
    }
    const Eigen::Index nb = static_cast<Eigen::Index>(baseline.size());
    for (int k = 0; k < spec.k_max; ++k) {
        const VectorX d = solutions[k + 1].sample - solutions[k].sample;
        VectorX disp(3 * nb), vel(3 * nb);
        for (Eigen::Index i = 0; i < nb; ++i) {
            disp.segment<3>(3 * i) = d.segment<3>(6 * i);
            vel.segment<3>(3 * i) = d.segment<3>(6 * i + 3);
        }
        LevelNorms ln;
        ln.level = k;
        ln.n_nodes = solutions[k + 1].n_nodes;
        ln.tau = solutions[k + 1].tau;
        ln.joint = all_norms(d);
        ln.displacement = all_norms(disp);
        ln.velocity = all_norms(vel);
        result.levels.push_back(ln);
    }
    auto rates = [&](auto member) {
        std::array<RateFit, 3> out;
        for (int n = 0; n < 3; ++n) {
            std::vector<double> values;
            for (const LevelNorms& ln : result.levels) values.push_back((ln.*member)[n]);
            try {
                out[n] = fit_rate(values);
            } catch (const NumericalError& e) {
                out[n].rate = std::numeric_limits<double>::quiet_NaN();
                out[n].warnings.push_back(e.what());
            }
        }
        return out;
    };
    result.joint_rates = rates(&LevelNorms::joint);
    result.displacement_rates = rates(&LevelNorms::displacement);
    result.velocity_rates = rates(&LevelNorms::velocity);
    return result;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string log2_or_empty(double v) { return v > 0.0 ? fmt(std::log2(v)) : std::string(); }

}  // namespace

void write_study_csv(std::ostream& out, const StudyResult& result) {
    out << "level,n_nodes,tau,L1,L2,Linf,log2_L1,log2_L2,log2_Linf,"
           "disp_L1,disp_L2,disp_Linf,vel_L1,vel_L2,vel_Linf\n";
    for (const LevelNorms& ln : result.levels) {
        out << ln.level << ',' << ln.n_nodes << ',' << fmt(ln.tau);
        for (double v : ln.joint) out << ',' << fmt(v);
        for (double v : ln.joint) out << ',' << log2_or_empty(v);
        for (double v : ln.displacement) out << ',' << fmt(v);
        for (double v : ln.velocity) out << ',' << fmt(v);
        out << '\n';
    }
    out << "rate,,";
    for (const RateFit& r : result.joint_rates) out << ',' << fmt(r.rate);
    out << ",,,";
    for (const RateFit& r : result.displacement_rates) out << ',' << fmt(r.rate);
    for (const RateFit& r : result.velocity_rates) out << ',' << fmt(r.rate);
    out << '\n';
}

}  // namespace membrane
