#pragma once

#include "membrane/assembly.hpp"

#include <Eigen/SparseLU>

#include <memory>

namespace membrane {

// Newmark parameters: beta1 weights the new acceleration in the velocity
// update, beta2 in the displacement update.
struct NewmarkParams {
    double beta1 = 0.5;
    double beta2 = 0.5;
    double tau = 0.0;  // s

    void validate() const;
    // beta2 >= beta1 >= 1/2.
    bool unconditionally_stable() const { return beta2 >= beta1 && beta1 >= 0.5; }
};

struct State {
    VectorX a;      // m
    VectorX adot;   // m/s
    VectorX addot;  // m/s^2
    double t = 0.0;
    long step = 0;
};

class StaleFactorizationError : public Error {
public:
    using Error::Error;
};

// LU factors of the iteration matrix A = M + tau^2 beta2 K / 2 of a constrained
// system. A is constant while tau and the constraints are, so it is factored once.
class NewmarkFactorization {
public:
    // Throws NumericalError if A is singular or its condition estimate exceeds kMaxCondition.
    NewmarkFactorization(const GlobalSystem& system, const NewmarkParams& params);
    ~NewmarkFactorization();
    NewmarkFactorization(NewmarkFactorization&&) noexcept;
    NewmarkFactorization& operator=(NewmarkFactorization&&) noexcept;

    static constexpr double kMaxCondition = 1e13;

    VectorX solve(const VectorX& rhs) const;
    // Throws StaleFactorizationError if tau, beta2, or the constraint set changed.
    void check_compatible(const GlobalSystem& system, const NewmarkParams& params) const;

    const SparseMatrix& matrix() const { return A_; }
    double condition_estimate() const { return condition_; }

private:
    using Solver = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
    std::unique_ptr<Solver> lu_;
    SparseMatrix A_;
    double tau_ = 0.0;
    double beta2_ = 0.0;
    std::vector<int> constrained_nodes_;
    double condition_ = 0.0;
};

// Initial acceleration from the momentum balance M addot0 = -K a0 - f0; the
// velocities of constrained nodes are overwritten with v_fix.
State init_state(const GlobalSystem& system, const VectorX& a0, const VectorX& v0, const VectorX& f0);

// One Newmark step to t + tau with load f_next = f(t + tau).
State step(const State& state, const GlobalSystem& system, const NewmarkParams& params,
           const NewmarkFactorization& factorization, const VectorX& f_next);

struct Energy {
    double kinetic = 0.0;  // 0.5 adot^T M adot
    double strain = 0.0;   // 0.5 a^T K a
    double total() const { return kinetic + strain; }
};

// Expects the unconstrained (symmetric) K and M.
Energy energy(const State& state, const SparseMatrix& K, const SparseMatrix& M);

// h_min / (10 c_max) with c_max = sqrt(max diag(D) / rho).
double default_timestep(const Mesh& mesh, const MaterialParams& material);

}  // namespace membrane
