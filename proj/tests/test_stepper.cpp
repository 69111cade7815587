#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "manufactured.hpp"
#include "viscowave/functionals.hpp"

using namespace viscowave;

namespace {

ModelConfig base_config(int nodes) {
    ModelConfig config;
    config.nodes_x = nodes;
    config.p = 4.0;
    config.m = 3.0;
    config.alpha = 0.1;
    config.kappa = 1.0;
    config.kernel.terms = {{0.5, 1.0}};
    return config;
}

double discrete_wave_energy(const DiscreteModel& model, const State& state) {
    return 0.5 * (model.mass.array() * state.v.array().square()).sum() +
           0.5 * grad_norm_sq(model, state.u);
}

}  // namespace

TEST_CASE("zero initial data is a fixed point, bit for bit") {
    const DiscreteModel model = build_model(base_config(41));
    Stepper stepper(model);
    State state;
    state.u = Eigen::VectorXd::Zero(model.size());
    state.v = Eigen::VectorXd::Zero(model.size());
    MemoryState mem = make_memory(model, state.u);
    for (int n = 0; n < 200; ++n) stepper.step(state, mem, 1e-3);
    CHECK(state.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conservative reduction: midpoint preserves the wave energy") {
    ModelConfig config = base_config(101);
    config.alpha = 0.0;
    config.kappa = 0.0;
    config.kernel.terms.clear();
    config.source_enabled = false;
    const DiscreteModel model = build_model(config);

    InitialSpec init;
    init.profile = Profile::Sine;
    init.amplitude = 1.0;
    State state = initial_data(model, init);
    MemoryState mem = make_memory(model, state.u);
    Stepper stepper(model);

    const double E0 = discrete_wave_energy(model, state);
    const double dt = 1e-3;
    for (int n = 0; n < 1000; ++n) stepper.step(state, mem, dt);  // one time unit
    const double drift = std::abs(discrete_wave_energy(model, state) - E0);
    CHECK(drift <= 1e-6 * E0);
    CHECK(drift <= 1e-10 * E0);  // the midpoint rule conserves quadratic invariants
}

TEST_CASE("dissipative run: per-step energy increments stay within tolerance") {
    const DiscreteModel model = build_model(base_config(81));
    InitialSpec init;
    init.profile = Profile::Sine;
    init.amplitude = 0.4;
    init.velocity_profile = Profile::Bump;
    init.velocity_amplitude = 0.3;
    State state = initial_data(model, init);
    MemoryState mem = make_memory(model, state.u);
    Stepper stepper(model);

    double previous = energy_E(state, mem, model);
    const double budget = 1e-6 * std::max(1.0, std::abs(previous));
    const double dt = 1e-3;
    for (int n = 0; n < 2000; ++n) {
        stepper.step(state, mem, dt);
        const double current = energy_E(state, mem, model);
        CHECK(current - previous <= budget);
        previous = current;
    }
    CHECK(previous < energy_E(initial_data(model, init),
                              make_memory(model, initial_data(model, init).u), model));
}

TEST_CASE("manufactured solution converges at second order in space-time") {
    double prev_error = 0.0;
    for (int level = 0; level < 3; ++level) {
        const auto problem = testing::ManufacturedProblem::make(25 * (1 << level) + 1, 0.1);
        const double error = problem.error_at(0.5, 8e-3 / (1 << level));
        if (level > 0) {
            const double order = std::log2(prev_error / error);
            CHECK(order >= 1.8);
        }
        prev_error = error;
    }
}

TEST_CASE("backward euler fallback runs and dissipates") {
    ModelConfig config = base_config(51);
    config.source_enabled = false;
    const DiscreteModel model = build_model(config);
    InitialSpec init;
    init.profile = Profile::Sine;
    init.amplitude = 1.0;
    State state = initial_data(model, init);
    MemoryState mem = make_memory(model, state.u);
    StepperOptions opts;
    opts.scheme = Scheme::BackwardEuler;
    Stepper stepper(model, opts);
    const double E0 = energy_E(state, mem, model);
    for (int n = 0; n < 500; ++n) stepper.step(state, mem, 2e-3);
    CHECK(energy_E(state, mem, model) < E0);
    CHECK(state.u.allFinite());
}

TEST_CASE("backward euler is first-order accurate on the manufactured problem") {
    const auto problem = testing::ManufacturedProblem::make(201, 0.1);
    const double coarse = problem.error_at(0.25, 4e-3, Scheme::BackwardEuler);
    const double fine = problem.error_at(0.25, 2e-3, Scheme::BackwardEuler);
    const double order = std::log2(coarse / fine);
    CHECK(order > 0.7);
    CHECK(order < 1.5);
}

TEST_CASE("corrector failure carries the residual and signals dt too large") {
    ModelConfig config = base_config(31);
    config.p = 6.0;
    const DiscreteModel model = build_model(config);
    InitialSpec init;
    init.profile = Profile::Sine;
    init.amplitude = 50.0;  // far outside the contraction region at this dt
    State state = initial_data(model, init);
    MemoryState mem = make_memory(model, state.u);
    Stepper stepper(model);
    try {
        for (int n = 0; n < 50; ++n) stepper.step(state, mem, 0.5);
        // escape to non-finite values is also an acceptable outcome here
        CHECK_FALSE(state.u.allFinite());
    } catch (const CorrectorError& error) {
        CHECK(error.residual > 0.0);
        CHECK(error.iterations == 50);
    }
}

TEST_CASE("initial data: named profiles and determinism") {
    const DiscreteModel model = build_model(base_config(51));

    InitialSpec zero;
    zero.profile = Profile::Sine;
    zero.amplitude = 0.0;
    const State nothing = initial_data(model, zero);
    CHECK(nothing.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(nothing.v.cwiseAbs().maxCoeff() == 0.0);

    InitialSpec sine;
    sine.profile = Profile::Sine;
    sine.amplitude = 1.0;
    const State wave = initial_data(model, sine);
    for (Eigen::Index i = 0; i < model.size(); ++i)
        CHECK(wave.u[i] == doctest::Approx(std::sin(M_PI * model.x[i] / 2.0)).epsilon(1e-15));

    InitialSpec random_field;
    random_field.profile = Profile::Random;
    random_field.amplitude = 2.0;
    random_field.seed = 123456;
    const State first = initial_data(model, random_field);
    const State second = initial_data(model, random_field);
    CHECK(first.u == second.u);  // bit-identical
    CHECK(first.u.cwiseAbs().maxCoeff() > 0.0);

    random_field.seed = 654321;
    CHECK(initial_data(model, random_field).u != first.u);

    // bump vanishes on the clamped edge and is positive inside
    InitialSpec bump;
    bump.profile = Profile::Bump;
    bump.amplitude = 1.0;
    const State lump = initial_data(model, bump);
    CHECK(lump.u.minCoeff() >= 0.0);
    CHECK(lump.u.maxCoeff() == doctest::Approx(1.0).epsilon(0.01));
    CHECK(lump.u[0] == 0.0);
}

TEST_CASE("step argument validation") {
    const DiscreteModel model = build_model(base_config(31));
    Stepper stepper(model);
    State state;
    state.u = Eigen::VectorXd::Zero(model.size());
    state.v = Eigen::VectorXd::Zero(model.size());
    MemoryState mem = make_memory(model, state.u);
    CHECK_THROWS_AS(stepper.step(state, mem, 0.0), std::domain_error);
    State bad;
    bad.u = Eigen::VectorXd::Zero(3);
    bad.v = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(stepper.step(bad, mem, 1e-3), std::invalid_argument);
}
