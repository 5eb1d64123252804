#include "membrane/integrator.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace membrane {

void NewmarkParams::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("time step tau must be positive");
    if (!std::isfinite(beta1) || !std::isfinite(beta2)) throw ConfigError("Newmark betas must be finite");
}

namespace {

double norm1(const SparseMatrix& A) {
    double best = 0.0;
    for (int col = 0; col < A.outerSize(); ++col) {
        double sum = 0.0;
        for (SparseMatrix::InnerIterator it(A, col); it; ++it) sum += std::abs(it.value());
        best = std::max(best, sum);
    }
    return best;
}

}  // namespace

NewmarkFactorization::NewmarkFactorization(const GlobalSystem& system, const NewmarkParams& params)
    : lu_(std::make_unique<Solver>()),
      tau_(params.tau),
      beta2_(params.beta2),
      constrained_nodes_(system.constrained_nodes()) {
    params.validate();
    A_ = system.M + (0.5 * params.tau * params.tau * params.beta2) * system.K;
    A_.makeCompressed();
    lu_->analyzePattern(A_);
    lu_->factorize(A_);
    if (lu_->info() != Eigen::Success) {
        throw NumericalError("factorization of the Newmark matrix failed: " + lu_->lastErrorMessage());
    }
    // Lower bound on cond_1(A) from a few solves with fixed pseudo-random right-hand sides.
    const double a_norm = norm1(A_);
    std::mt19937_64 rng(20240521);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        VectorX b(A_.rows());
        for (int i = 0; i < b.size(); ++i) b[i] = dist(rng);
        const VectorX x = lu_->solve(b);
        const double est = x.allFinite() ? a_norm * x.lpNorm<1>() / b.lpNorm<1>()
                                         : std::numeric_limits<double>::infinity();
        condition_ = std::max(condition_, est);
    }
    if (!(condition_ <= kMaxCondition)) {
        std::ostringstream msg;
        msg.precision(3);
        msg << "Newmark matrix is singular to working precision (condition estimate " << condition_ << ")";
        throw NumericalError(msg.str());
    }
}

NewmarkFactorization::~NewmarkFactorization() = default;
NewmarkFactorization::NewmarkFactorization(NewmarkFactorization&&) noexcept = default;
NewmarkFactorization& NewmarkFactorization::operator=(NewmarkFactorization&&) noexcept = default;

VectorX NewmarkFactorization::solve(const VectorX& rhs) const { return lu_->solve(rhs); }

void NewmarkFactorization::check_compatible(const GlobalSystem& system, const NewmarkParams& params) const {
    if (params.tau != tau_ || params.beta2 != beta2_) {
        throw StaleFactorizationError("factorization was built for a different tau or beta2; refactor");
    }
    if (system.constrained_nodes() != constrained_nodes_ || system.num_dofs() != A_.rows()) {
        throw StaleFactorizationError("factorization was built for a different constraint set; refactor");
    }
}

State init_state(const GlobalSystem& system, const VectorX& a0, const VectorX& v0, const VectorX& f0) {
    const int n = system.num_dofs();
    if (a0.size() != n || v0.size() != n || f0.size() != n) {
        throw Error("init_state: vector sizes do not match the system");
    }
    State s;
    s.a = a0;
    s.adot = v0;
    for (const Constraint& c : system.constraints) s.adot.segment<3>(dof(c.node, 0)) = c.v_fix;

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> mass;
    mass.compute(system.M);
    if (mass.info() != Eigen::Success) {
        throw NumericalError("mass matrix is singular: " + mass.lastErrorMessage());
    }
    VectorX rhs = -(system.K * a0) - f0;
    zero_constrained(rhs, system.constraints);
    s.addot = mass.solve(rhs);
    if (!s.addot.allFinite()) throw NumericalError("initial acceleration is not finite");
    return s;
}

State step(const State& state, const GlobalSystem& system, const NewmarkParams& params,
           const NewmarkFactorization& factorization, const VectorX& f_next) {
    factorization.check_compatible(system, params);
    const double tau = params.tau;
    const VectorX vel_pred = state.adot + (tau * (1.0 - params.beta1)) * state.addot;
    const VectorX disp_pred = state.a + tau * state.adot + (0.5 * tau * tau * (1.0 - params.beta2)) * state.addot;

    State next;
    VectorX rhs = -(f_next + system.K * disp_pred);
    zero_constrained(rhs, system.constraints);
    next.addot = factorization.solve(rhs);
    if (!next.addot.allFinite()) {
        throw NumericalError("non-finite acceleration at step " + std::to_string(state.step + 1));
    }
    next.adot = vel_pred + (params.beta1 * tau) * next.addot;
    next.a = disp_pred + (0.5 * tau * tau * params.beta2) * next.addot;
    next.step = state.step + 1;
    next.t = static_cast<double>(next.step) * tau;
    return next;
}

Energy energy(const State& state, const SparseMatrix& K, const SparseMatrix& M) {
    return {0.5 * state.adot.dot(M * state.adot), 0.5 * state.a.dot(K * state.a)};
}

double default_timestep(const Mesh& mesh, const MaterialParams& material) {
    return mesh.min_edge_length() / (10.0 * material.max_wave_speed());
}

}  // namespace membrane
