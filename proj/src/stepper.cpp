#include "viscowave/stepper.hpp"

#include <cmath>

namespace viscowave {

Stepper::Stepper(const DiscreteModel& model, StepperOptions opts) : model_(model), opts_(opts) {}

void Stepper::factor(double dt) {
    if (dt == factored_dt_) return;
    const double stiffness_weight = opts_.scheme == Scheme::Midpoint
                                        ? dt / 2.0 * model_.alpha + dt * dt / 4.0
                                        : dt * model_.alpha + dt * dt;
    Eigen::MatrixXd system = stiffness_weight * model_.stiffness;
    system.diagonal() += model_.mass;
    solver_.compute(system);
    if (solver_.info() != Eigen::Success)
        throw std::runtime_error("stepper: factorization of the step matrix failed");
    factored_dt_ = dt;
}

Eigen::VectorXd Stepper::nonlinear_load(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                        double t) const {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(model_.size());
    if (model_.source_enabled) {
        for (Eigen::Index i = 0; i < model_.size(); ++i)
            load[i] += model_.interior_mass[i] *
                       std::pow(std::abs(u[i]), model_.p - 2.0) * u[i];
    }
    for (Eigen::Index k : model_.boundary_nodes)
        load[k] -= model_.boundary_mass[k] * damping_h(model_, v[k]);
    if (model_.interior_forcing) {
        const bool planar = model_.dimension == 2;
        for (Eigen::Index i = 0; i < model_.size(); ++i)
            load[i] += model_.interior_mass[i] *
                       model_.interior_forcing(model_.x[i], planar ? model_.y[i] : 0.0, t);
    }
    if (model_.boundary_forcing) {
        const bool planar = model_.dimension == 2;
        for (Eigen::Index k : model_.boundary_nodes)
            load[k] += model_.boundary_mass[k] *
                       model_.boundary_forcing(model_.x[k], planar ? model_.y[k] : 0.0, t);
    }
    return load;
}

void Stepper::step(State& state, MemoryState& mem, double dt) {
    if (dt <= 0.0) throw std::domain_error("step: dt must be positive");
    if (state.u.size() != model_.size() || state.v.size() != model_.size())
        throw std::invalid_argument("step: state/model size mismatch");
    factor(dt);

    const bool midpoint = opts_.scheme == Scheme::Midpoint;
    const double load_weight = midpoint ? dt / 2.0 : dt;  // weight of the nonlinear load
    const double t_eval = midpoint ? state.t + dt / 2.0 : state.t + dt;

    const Eigen::VectorXd memory_load =
        memory_force_at(mem, model_, state.v, midpoint ? dt / 2.0 : dt);
    const Eigen::VectorXd rhs_fixed = (model_.mass.array() * state.v.array()).matrix() -
                                      load_weight * (model_.stiffness * state.u) +
                                      load_weight * memory_load;

    // Fixed point on the velocity unknown w (midpoint velocity, or the end
    // velocity under backward Euler).
    Eigen::VectorXd w = state.v;
    double residual = 0.0;
    bool converged = false;
    for (int iter = 0; iter < opts_.corrector_max_iters; ++iter) {
        const Eigen::VectorXd u_eval = state.u + load_weight * w;
        const Eigen::VectorXd w_next =
            solver_.solve(rhs_fixed + load_weight * nonlinear_load(u_eval, w, t_eval));
        residual = std::sqrt((model_.mass.array() * (w_next - w).array().square()).sum());
        const double scale =
            std::max(1.0, std::sqrt((model_.mass.array() * w_next.array().square()).sum()));
        w = w_next;
        if (!w.allFinite()) { converged = true; break; }  // escape signal, caller checks
        if (residual <= opts_.corrector_tol * scale) { converged = true; break; }
    }
    if (!converged)
        throw CorrectorError("step: corrector did not converge (dt too large)", residual,
                             opts_.corrector_max_iters);

    if (midpoint) {
        state.u += dt * w;
        state.v = 2.0 * w - state.v;
    } else {
        state.u += dt * w;
        state.v = w;
    }
    memory_advance(mem, model_, state.u, dt);
    state.t += dt;
}

Eigen::VectorXd profile_values(const DiscreteModel& model, Profile profile, std::uint64_t seed) {
    const double length_x = model.x.maxCoeff();
    Eigen::VectorXd values = Eigen::VectorXd::Zero(model.size());
    switch (profile) {
        case Profile::Zero:
            break;
        case Profile::Sine:
            for (Eigen::Index i = 0; i < model.size(); ++i)
                values[i] = std::sin(M_PI * model.x[i] / (2.0 * length_x));
            break;
        case Profile::Bump: {
            // Smooth bump supported strictly inside the domain in x, so it
            // vanishes on the clamped edge.
            const double center = 0.5 * length_x;
            const double width = 0.45 * length_x;
            for (Eigen::Index i = 0; i < model.size(); ++i) {
                double r_sq = std::pow((model.x[i] - center) / width, 2);
                if (model.dimension == 2) {
                    const double length_y = model.y.maxCoeff();
                    r_sq += std::pow((model.y[i] - 0.5 * length_y) / (0.45 * length_y), 2);
                }
                values[i] = r_sq < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r_sq)) : 0.0;
            }
            break;
        }
        case Profile::Random:
            values = seeded_smooth_field(model, seed);
            break;
    }
    return values;
}

State initial_data(const DiscreteModel& model, const InitialSpec& spec) {
    State state;
    state.t = 0.0;
    state.u = spec.amplitude * profile_values(model, spec.profile, spec.seed);
    state.v = spec.velocity_amplitude *
              profile_values(model, spec.velocity_profile, spec.velocity_seed);
    return state;
}

}  // namespace viscowave
