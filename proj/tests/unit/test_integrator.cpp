#include <gtest/gtest.h>

#include "membrane/integrator.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace membrane;

namespace {

constexpr double kPi = 3.14159265358979323846;

GlobalSystem oscillator(double m, double k) {
    GlobalSystem s;
    s.K.resize(1, 1);
    s.M.resize(1, 1);
    s.K.insert(0, 0) = k;
    s.M.insert(0, 0) = m;
    s.f = VectorX::Zero(1);
    return s;
}

// |a(T) - cos(omega T)| for a unit-amplitude oscillator started at rest.
double oscillator_error(double beta1, double beta2, int steps) {
    const double omega = 2.0 * kPi, T = 1.125;  // ends away from a peak so phase error enters linearly
    const GlobalSystem s = oscillator(1.0, omega * omega);
    const NewmarkParams p{beta1, beta2, T / steps};
    const NewmarkFactorization lu(s, p);
    State st = init_state(s, VectorX::Constant(1, 1.0), VectorX::Zero(1), VectorX::Zero(1));
    for (int n = 0; n < steps; ++n) st = step(st, s, p, lu, VectorX::Zero(1));
    return std::abs(st.a[0] - std::cos(omega * T));
}

double observed_order(double beta1, double beta2) {
    const double e1 = oscillator_error(beta1, beta2, 400);
    const double e2 = oscillator_error(beta1, beta2, 800);
    return std::log2(e1 / e2);
}

MaterialParams material() {
    MaterialParams m;
    m.rho = 1600;
    m.h = 1e-3;
    m.D = isotropic(70e9, 0.3);
    return m;
}

}  // namespace

TEST(Newmark, TrapezoidalIsSecondOrderOnOscillator) {
    EXPECT_NEAR(observed_order(0.5, 0.5), 2.0, 0.1);
}

TEST(Newmark, DampedVariantDropsToFirstOrder) {
    EXPECT_LT(observed_order(0.6, 0.6), 1.5);
}

TEST(Newmark, StepMatchesHandFormulas) {
    const GlobalSystem s = oscillator(2.0, 8.0);
    const NewmarkParams p{0.6, 0.7, 0.1};
    const NewmarkFactorization lu(s, p);
    State st = init_state(s, VectorX::Constant(1, 0.3), VectorX::Constant(1, -0.2), VectorX::Zero(1));
    EXPECT_NEAR(st.addot[0], -8.0 * 0.3 / 2.0, 1e-15);
    const double f1 = 0.5;
    const State nx = step(st, s, p, lu, VectorX::Constant(1, f1));
    const double tau = 0.1;
    const double vp = -0.2 + tau * 0.4 * st.addot[0];
    const double ap = 0.3 + tau * -0.2 + 0.5 * tau * tau * 0.3 * st.addot[0];
    const double acc = -(f1 + 8.0 * ap) / (2.0 + 0.5 * tau * tau * 0.7 * 8.0);
    EXPECT_NEAR(nx.addot[0], acc, 1e-14);
    EXPECT_NEAR(nx.adot[0], vp + 0.6 * tau * acc, 1e-14);
    EXPECT_NEAR(nx.a[0], ap + 0.5 * tau * tau * 0.7 * acc, 1e-14);
    EXPECT_EQ(nx.step, 1);
    EXPECT_DOUBLE_EQ(nx.t, tau);
}

TEST(Newmark, TrapezoidalConservesEnergyOnMembrane) {
    const Mesh mesh = generate_structured({1.0, 1.0, 8, 8});
    const GlobalSystem sys = assemble(mesh, material());
    const NewmarkParams p{0.5, 0.5, 5 * default_timestep(mesh, material())};
    const NewmarkFactorization lu(sys, p);
    VectorX a0 = VectorX::Zero(sys.num_dofs()), v0 = VectorX::Zero(sys.num_dofs());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const Vec2 x = mesh.node(i);
        v0[dof(i, 2)] = std::sin(kPi * x.x()) * std::sin(kPi * x.y());
        v0[dof(i, 0)] = 0.1 * x.y();
    }
    State st = init_state(sys, a0, v0, VectorX::Zero(sys.num_dofs()));
    const double e0 = energy(st, sys.K, sys.M).total();
    for (int n = 0; n < 500; ++n) st = step(st, sys, p, lu, VectorX::Zero(sys.num_dofs()));
    EXPECT_NEAR(energy(st, sys.K, sys.M).total(), e0, 1e-10 * e0);
}

TEST(Newmark, ConstrainedNodeFollowsPrescribedVelocity) {
    const Mesh mesh = generate_structured({1.0, 1.0, 4, 4});
    const GlobalSystem raw = assemble(mesh, material());
    const Vec3 v(0.5, 0.0, 1.0);
    const GlobalSystem sys = apply_constraints(raw, {{12, v}, {0, Vec3::Zero()}});
    const NewmarkParams p{0.5, 0.5, default_timestep(mesh, material())};
    const NewmarkFactorization lu(sys, p);
    const VectorX z = VectorX::Zero(sys.num_dofs());
    State st = init_state(sys, z, z, z);
    for (int n = 0; n < 300; ++n) {
        st = step(st, sys, p, lu, z);
        ASSERT_LE((st.adot.segment<3>(dof(12, 0)) - v).norm(), 1e-12 * v.norm());
        ASSERT_LE(st.adot.segment<3>(dof(0, 0)).norm(), 1e-15);
    }
    EXPECT_LE((st.a.segment<3>(dof(12, 0)) - st.t * v).norm(), 1e-10 * st.t);
    EXPECT_GT(st.adot.norm(), v.norm());  // motion spread to free nodes
}

TEST(Newmark, StaleFactorizationIsDetected) {
    const Mesh mesh = generate_structured({1.0, 1.0, 2, 2});
    const GlobalSystem sys = assemble(mesh, material());
    const NewmarkParams p{0.5, 0.5, 1e-6};
    const NewmarkFactorization lu(sys, p);
    const VectorX z = VectorX::Zero(sys.num_dofs());
    const State st = init_state(sys, z, z, z);
    NewmarkParams other = p;
    other.tau = 2e-6;
    EXPECT_THROW(step(st, sys, other, lu, z), StaleFactorizationError);
    const GlobalSystem constrained = apply_constraints(sys, {{0, Vec3::Zero()}});
    EXPECT_THROW(step(st, constrained, p, lu, z), StaleFactorizationError);
}

TEST(Newmark, SingularMatrixRaisesNumericalError) {
    const Mesh mesh = generate_structured({1.0, 1.0, 2, 2});
    MaterialParams m = material();
    m.rho = 0.0;
    const GlobalSystem sys = assemble(mesh, m);
    EXPECT_THROW(NewmarkFactorization(sys, NewmarkParams{0.5, 0.5, 1e-6}), NumericalError);
}

TEST(Newmark, ParameterValidation) {
    EXPECT_THROW((NewmarkParams{0.5, 0.5, 0.0}.validate()), ConfigError);
    EXPECT_TRUE((NewmarkParams{0.5, 0.5, 1.0}.unconditionally_stable()));
    EXPECT_TRUE((NewmarkParams{0.6, 0.7, 1.0}.unconditionally_stable()));
    EXPECT_FALSE((NewmarkParams{0.5, 0.0, 1.0}.unconditionally_stable()));
}

TEST(DefaultTimestep, EdgeOverTenWaveSpeeds) {
    const Mesh mesh = generate_structured({1.0, 2.0, 4, 4});
    const MaterialParams m = material();
    EXPECT_NEAR(default_timestep(mesh, m), 0.25 / (10.0 * std::sqrt(m.D(0, 0) / m.rho)), 1e-18);
}
