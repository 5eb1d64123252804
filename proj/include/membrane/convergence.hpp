#pragma once

#include "membrane/scenarios.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>

namespace membrane {

enum class NormKind { L1, L2, Linf };

// Mean-based discrete norms: L1 = mean|d|, L2 = sqrt(mean d^2), Linf = max|d|.
double norm(std::span<const double> d, NormKind which);
double norm(const VectorX& d, NormKind which);

struct RateFit {
    double rate = 0.0;           // minus the least-squares slope of log2(norm) vs level
    std::vector<int> excluded;   // levels dropped because the norm was zero
    std::vector<std::string> warnings;
};

// Least-squares slope over levels 0..n-1. Zero norms are excluded with a
// warning; throws NumericalError if fewer than two levels remain.
RateFit fit_rate(std::span<const double> norms);

struct StudySpec {
    StructuredSpec base;
    int k_max = 2;  // refinements; k_max differences
    double T = 0.0;
    std::optional<double> tau0;  // default rule on the base grid when unset
    // Builds the scenario on a given level mesh; T and tau are overwritten by the study.
    std::function<ScenarioConfig(const Mesh&)> scenario;
    bool concurrent_levels = true;

    void validate() const;
};

struct LevelNorms {
    int level = 0;  // difference index k: solution k+1 minus solution k
    int n_nodes = 0;  // nodes of the finer grid k+1
    double tau = 0.0;  // time step of the finer grid k+1
    std::array<double, 3> joint{};  // L1, L2, Linf over (u, v, w, udot, vdot, wdot)
    std::array<double, 3> displacement{};
    std::array<double, 3> velocity{};
};

struct StudyResult {
    std::vector<LevelNorms> levels;
    std::array<RateFit, 3> joint_rates;
    std::array<RateFit, 3> displacement_rates;
    std::array<RateFit, 3> velocity_rates;
    std::vector<double> level_tau;  // per solved grid, 0..k_max
    std::vector<int> level_nodes;
};

// Solves level k on the 2^k-refined grid with tau0/2^k up to T, samples
// (u, v, w, udot, vdot, wdot) at the base-grid node positions and fits
// convergence rates to the norms of consecutive differences.
StudyResult run_study(const StudySpec& spec);

// level,n_nodes,tau,L1,L2,Linf,log2_L1,log2_L2,log2_Linf,<per-field columns>,
// then one row with level "rate". Floats use 17 significant digits.
void write_study_csv(std::ostream& out, const StudyResult& result);

}  // namespace membrane
