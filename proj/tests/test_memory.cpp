#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <random>

#include "viscowave/memory.hpp"

using namespace viscowave;

namespace {

DiscreteModel small_model(KernelSpec kernel, int nodes = 21) {
    ModelConfig config;
    config.nodes_x = nodes;
    config.kernel = std::move(kernel);
    return build_model(config);
}

// Smooth seeded trajectory: fixed spatial modes with oscillatory amplitudes.
std::function<Eigen::VectorXd(double)> random_trajectory(const DiscreteModel& model,
                                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    struct Mode {
        Eigen::VectorXd shape;
        double omega, phase;
    };
    auto modes = std::make_shared<std::vector<Mode>>();
    for (int j = 1; j <= 4; ++j) {
        Mode mode;
        mode.shape.resize(model.size());
        for (Eigen::Index i = 0; i < model.size(); ++i)
            mode.shape[i] = coeff(rng) / (j * j) * std::sin((j - 0.5) * M_PI * model.x[i]);
        mode.omega = freq(rng);
        mode.phase = coeff(rng) * M_PI;
        modes->push_back(std::move(mode));
    }
    return [modes, n = model.size()](double t) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        for (const auto& mode : *modes) u += std::sin(mode.omega * t + mode.phase) * mode.shape;
        return u;
    };
}

}  // namespace

TEST_CASE("zero history stays zero") {
    const DiscreteModel model = small_model(KernelSpec{{{0.5, 1.0}}});
    MemoryState mem = make_memory(model, Eigen::VectorXd::Zero(model.size()));
    CHECK(memory_force(mem, model).norm() == 0.0);
    memory_advance(mem, model, Eigen::VectorXd::Zero(model.size()), 0.1);
    CHECK(mem.psi[0].norm() == 0.0);
    CHECK(memory_force(mem, model).norm() == 0.0);
    CHECK(g_diamond_u(mem, Eigen::VectorXd::Zero(model.size()), model) == 0.0);
}

TEST_CASE("empty kernel produces no force at any time") {
    const DiscreteModel model = small_model(KernelSpec{});
    const auto u_of_t = random_trajectory(model, 3);
    MemoryState mem = make_memory(model, u_of_t(0.0));
    for (int n = 1; n <= 20; ++n) memory_advance(mem, model, u_of_t(0.05 * n), 0.05);
    CHECK(memory_force(mem, model).norm() == 0.0);
    CHECK(g_diamond_u(mem, u_of_t(1.0), model) == 0.0);
}

TEST_CASE("constant field: psi approaches the closed-form saturation") {
    const double a = 0.7, b = 2.0;
    const DiscreteModel model = small_model(KernelSpec{{{a, b}}});
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(model.size(), 1.3);
    MemoryState mem = make_memory(model, c);
    const double dt = 5e-4;
    const double t_end = 3.0 / b;
    const int steps = static_cast<int>(std::round(t_end / dt));
    for (int n = 0; n < steps; ++n) memory_advance(mem, model, c, dt);
    const Eigen::VectorXd expected = a / b * (1.0 - std::exp(-b * t_end)) * c;
    CHECK((mem.psi[0] - expected).norm() / expected.norm() < 1e-6);
}

TEST_CASE("frozen field force approaches (1 - l) K u0") {
    const KernelSpec kernel{{{0.25, 1.0}, {0.5, 2.0}}};  // l = 0.5
    const DiscreteModel model = small_model(kernel);
    Eigen::VectorXd u0(model.size());
    for (Eigen::Index i = 0; i < model.size(); ++i) u0[i] = std::sin(M_PI * model.x[i] / 2.0);
    MemoryState mem = make_memory(model, u0);
    const double dt = 2e-3;
    for (double t = 0.0; t < 40.0; t += dt) memory_advance(mem, model, u0, dt);
    const Eigen::VectorXd expected = (1.0 - model.l) * (model.stiffness * u0);
    CHECK((memory_force(mem, model) - expected).norm() / expected.norm() < 1e-5);
}

TEST_CASE("recursion force matches the direct-history trapezoid oracle") {
    const KernelSpec kernel{{{0.4, 1.0}, {0.3, 3.0}}};
    const DiscreteModel model = small_model(kernel);
    const auto u_of_t = random_trajectory(model, 20240812);

    auto max_relative_gap = [&](double dt, int steps) {
        MemoryState fast = make_memory(model, u_of_t(0.0), MemoryMode::Recursion);
        MemoryState slow = make_memory(model, u_of_t(0.0), MemoryMode::History);
        double worst = 0.0;
        for (int n = 1; n <= steps; ++n) {
            const Eigen::VectorXd u = u_of_t(n * dt);
            memory_advance(fast, model, u, dt);
            memory_advance(slow, model, u, dt);
            const Eigen::VectorXd f_fast = memory_force(fast, model);
            const Eigen::VectorXd f_slow = memory_force(slow, model);
            const double scale = std::max(f_slow.norm(), 1e-30);
            worst = std::max(worst, (f_fast - f_slow).norm() / scale);
        }
        return worst;
    };

    const double gap_coarse = max_relative_gap(1e-3, 100);
    CHECK(gap_coarse < 1e-6);
    const double gap_fine = max_relative_gap(5e-4, 200);
    CHECK(gap_coarse / gap_fine > 3.0);  // second-order agreement
}

TEST_CASE("diamond functional is nonnegative along random trajectories") {
    const KernelSpec kernel{{{0.4, 1.5}, {0.2, 0.7}}};
    const DiscreteModel model = small_model(kernel);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto u_of_t = random_trajectory(model, seed);
        MemoryState fast = make_memory(model, u_of_t(0.0), MemoryMode::Recursion);
        MemoryState slow = make_memory(model, u_of_t(0.0), MemoryMode::History);
        const double dt = 2e-3;
        for (int n = 1; n <= 150; ++n) {
            const Eigen::VectorXd u = u_of_t(n * dt);
            memory_advance(fast, model, u, dt);
            memory_advance(slow, model, u, dt);
            CHECK(g_diamond_u(fast, u, model) >= 0.0);
            CHECK(g_diamond_u(slow, u, model) >= 0.0);
            CHECK(g_prime_diamond_u(fast, u, model) <= 0.0);
            // the two realizations agree at quadrature accuracy
            CHECK(g_diamond_u(fast, u, model) ==
                  doctest::Approx(g_diamond_u(slow, u, model)).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("diamond is exactly zero on a time-constant trajectory") {
    const DiscreteModel model = small_model(KernelSpec{{{0.5, 1.0}}});
    Eigen::VectorXd u0(model.size());
    for (Eigen::Index i = 0; i < model.size(); ++i) u0[i] = model.x[i] * (2.0 - model.x[i]);
    MemoryState fast = make_memory(model, u0, MemoryMode::Recursion);
    MemoryState slow = make_memory(model, u0, MemoryMode::History);
    for (int n = 0; n < 50; ++n) {
        memory_advance(fast, model, u0, 0.01);
        memory_advance(slow, model, u0, 0.01);
    }
    CHECK(g_diamond_u(fast, u0, model) == 0.0);
    CHECK(g_diamond_u(slow, u0, model) == 0.0);
}

TEST_CASE("two-step history diamond equals the hand trapezoid sum") {
    const KernelSpec kernel{{{0.6, 1.1}}};
    const DiscreteModel model = small_model(kernel, 7);
    const auto u_of_t = random_trajectory(model, 99);
    const double dt = 0.3;
    MemoryState mem = make_memory(model, u_of_t(0.0), MemoryMode::History);
    memory_advance(mem, model, u_of_t(dt), dt);
    memory_advance(mem, model, u_of_t(2 * dt), dt);

    const Eigen::VectorXd u_now = u_of_t(2 * dt);
    double by_hand = 0.0;
    const double times[3] = {0.0, dt, 2 * dt};
    const double weights[3] = {dt / 2, dt, dt / 2};
    for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXd dev = u_of_t(times[k]) - u_now;
        by_hand += weights[k] * eval_g(kernel, 2 * dt - times[k]) * dev.dot(model.stiffness * dev);
    }
    CHECK(g_diamond_u(mem, u_now, model) == doctest::Approx(by_hand).epsilon(1e-14));
}

TEST_CASE("discrete derivative identity of the convolution term") {
    // force . u_t = (g' diamond u)/2 + d/dt{|grad u|^2 int g}/2 - g(t)|grad u|^2/2
    //               - d/dt(g diamond u)/2, with backward differences; the
    //               residual shrinks at first order under dt halving
    const KernelSpec kernel{{{0.5, 1.0}}};
    const DiscreteModel model = small_model(kernel);
    const auto u_of_t = random_trajectory(model, 4242);
    auto u_t_of_t = [&](double t) {
        const double eps = 1e-7;
        return ((u_of_t(t + eps) - u_of_t(t - eps)) / (2.0 * eps)).eval();
    };

    auto max_residual = [&](double dt) {
        MemoryState mem = make_memory(model, u_of_t(0.0), MemoryMode::Recursion);
        double prev_weighted_grad = 0.0;  // |grad u|^2 int_0^t g at the previous step
        double prev_diamond = 0.0;
        double worst = 0.0;
        const int steps = static_cast<int>(std::round(1.0 / dt));
        for (int n = 1; n <= steps; ++n) {
            const double t = n * dt;
            const Eigen::VectorXd u = u_of_t(t);
            memory_advance(mem, model, u, dt);
            const double grad_sq = u.dot(model.stiffness * u);
            const double weighted_grad = grad_sq * kernel_mass(kernel, t);
            const double diamond = g_diamond_u(mem, u, model);
            if (n > 1) {
                const double lhs = memory_force(mem, model).dot(u_t_of_t(t));
                const double rhs = 0.5 * g_prime_diamond_u(mem, u, model) +
                                   0.5 * (weighted_grad - prev_weighted_grad) / dt -
                                   0.5 * eval_g(kernel, t) * grad_sq -
                                   0.5 * (diamond - prev_diamond) / dt;
                worst = std::max(worst, std::abs(lhs - rhs));
            }
            prev_weighted_grad = weighted_grad;
            prev_diamond = diamond;
        }
        return worst;
    };

    const double residual_coarse = max_residual(4e-3);
    const double residual_mid = max_residual(2e-3);
    const double residual_fine = max_residual(1e-3);
    CHECK(residual_coarse / residual_mid >= 1.8);
    CHECK(residual_mid / residual_fine >= 1.8);
}

TEST_CASE("predicted force agrees with the advanced memory at second order") {
    const KernelSpec kernel{{{0.5, 1.0}}};
    const DiscreteModel model = small_model(kernel);
    const auto u_of_t = random_trajectory(model, 7);

    auto gap = [&](double dt) {
        MemoryState mem = make_memory(model, u_of_t(0.0), MemoryMode::Recursion);
        const int warmup = 50;
        for (int n = 1; n <= warmup; ++n) memory_advance(mem, model, u_of_t(n * dt), dt);
        const double t = warmup * dt;
        const Eigen::VectorXd v = ((u_of_t(t + 1e-7) - u_of_t(t - 1e-7)) / 2e-7).eval();
        const Eigen::VectorXd predicted = memory_force_at(mem, model, v, dt);
        memory_advance(mem, model, u_of_t(t + dt), dt);
        return (predicted - memory_force(mem, model)).norm();
    };
    CHECK(gap(4e-3) / gap(2e-3) > 3.0);
}

TEST_CASE("argument validation") {
    const DiscreteModel model = small_model(KernelSpec{{{0.5, 1.0}}});
    MemoryState mem = make_memory(model, Eigen::VectorXd::Zero(model.size()));
    CHECK_THROWS_AS(memory_advance(mem, model, Eigen::VectorXd::Zero(model.size()), 0.0),
                    std::domain_error);
    CHECK_THROWS_AS(memory_advance(mem, model, Eigen::VectorXd::Zero(model.size()), -1.0),
                    std::domain_error);
    CHECK_THROWS_AS(memory_advance(mem, model, Eigen::VectorXd::Zero(3), 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(g_diamond_u(mem, Eigen::VectorXd::Zero(2), model), std::invalid_argument);
}
