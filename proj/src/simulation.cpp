#include "viscowave/simulation.hpp"

#include <cmath>

namespace viscowave {

namespace {

void push_sample(Trajectory& trajectory, const State& state, const MemoryState& mem,
                 const DiscreteModel& model, const Thresholds& thresholds) {
    EnergyReport report = make_report(state, mem, model, thresholds);
    if (!trajectory.samples.empty()) {
        const EnergyReport& prev = trajectory.samples.back();
        const double dt = report.t - prev.t;
        if (dt > 0.0) {
            const double rhs = 0.5 * report.g_prime_diamond -
                               0.5 * eval_g(model.kernel, report.t) * report.grad_u_norm *
                                   report.grad_u_norm -
                               model.alpha * report.ut_h1_sq - report.boundary_damping_power;
            report.dissipation_residual = (report.E - prev.E) / dt - rhs;
        }
    }
    trajectory.samples.push_back(report);
    trajectory.states.push_back(state);
}

}  // namespace

SimulationResult run_simulation(const DiscreteModel& model, const State& initial,
                                const TimeConfig& time) {
    if (time.dt <= 0.0) throw ConfigError("dt must be positive");
    if (time.t_final <= 0.0) throw ConfigError("t_final must be positive");
    if (time.sampling_stride < 1) throw ConfigError("sampling_stride must be >= 1");

    SimulationResult result;
    State state = initial;
    MemoryState mem = make_memory(model, state.u, time.memory_mode);
    Stepper stepper(model, time.stepper);

    const double B = sobolev_constant_B(model);
    result.thresholds = compute_thresholds(model, B, state);

    Trajectory& trajectory = result.trajectory;
    trajectory.initial_lp_norm = lp_norm(model, state.u, model.p);
    trajectory.cap_absolute = time.blowup_cap * std::max(1.0, trajectory.initial_lp_norm);
    trajectory.dt_initial = time.dt;
    push_sample(trajectory, state, mem, model, result.thresholds);

    const double dt_min = time.dt / std::pow(2.0, time.max_halvings);
    double dt = time.dt;
    double lp_prev = trajectory.initial_lp_norm;
    const double lp_floor = 1e-12 * std::max(1.0, trajectory.initial_lp_norm);
    long step_index = 0;
    bool stopped = false;

    while (!stopped && state.t < time.t_final - 1e-12 * time.t_final) {
        const double dt_eff = std::min(dt, time.t_final - state.t);

        State trial_state = state;
        MemoryState trial_mem = mem;
        bool step_ok = true;
        try {
            stepper.step(trial_state, trial_mem, dt_eff);
        } catch (const CorrectorError&) {
            step_ok = false;
        }
        const bool finite = step_ok && trial_state.u.allFinite() && trial_state.v.allFinite();
        double lp_new = 0.0;
        bool increment_ok = true;
        if (finite) {
            lp_new = lp_norm(model, trial_state.u, model.p);
            increment_ok = !(lp_prev > lp_floor && lp_new > 1.1 * lp_prev);
        }

        if (!step_ok || (finite && !increment_ok)) {
            if (dt_eff > dt_min * (1.0 + 1e-12)) {
                dt = dt_eff / 2.0;  // reject and retry at half the step
                continue;
            }
            if (!step_ok) {  // cannot produce a step even at the floor
                trajectory.cap_triggered = true;
                trajectory.resolved_to_dt_min = true;
                break;
            }
            // increment rule at the floor: accept, the cap check below decides
        }

        if (step_ok && !finite) {  // escape inside a single step
            trajectory.cap_triggered = true;
            trajectory.resolved_to_dt_min = dt_eff <= dt_min * (1.0 + 1e-12);
            break;
        }

        state = trial_state;
        mem = trial_mem;
        lp_prev = lp_new;
        ++step_index;

        const bool cap_hit = lp_new > trajectory.cap_absolute;
        if (cap_hit) trajectory.cap_triggered = true;
        if (cap_hit || step_index % time.sampling_stride == 0 ||
            state.t >= time.t_final - 1e-12 * time.t_final)
            push_sample(trajectory, state, mem, model, result.thresholds);
        if (cap_hit) stopped = true;
    }

    if (trajectory.samples.back().t < state.t)
        push_sample(trajectory, state, mem, model, result.thresholds);
    trajectory.dt_final = dt;

    result.verdict = classify(trajectory, result.thresholds, model);
    return result;
}

SimulationResult run_simulation(const SimulationConfig& config) {
    const DiscreteModel model = build_model(config.model);
    const State initial = initial_data(model, config.initial);
    return run_simulation(model, initial, config.time);
}

}  // namespace viscowave
