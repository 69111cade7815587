#ifndef VISCOWAVE_SIMULATION_HPP
#define VISCOWAVE_SIMULATION_HPP

#include "viscowave/classifier.hpp"
#include "viscowave/functionals.hpp"
#include "viscowave/stepper.hpp"

namespace viscowave {

struct TimeConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    int sampling_stride = 1;       // record every k-th accepted step
    double blowup_cap = 1e6;       // escape when |u|_p > cap * max(1, |u(0)|_p)
    int max_halvings = 12;         // dt floor is dt / 2^max_halvings
    StepperOptions stepper;
    MemoryMode memory_mode = MemoryMode::Recursion;
};

struct SimulationConfig {
    ModelConfig model;
    InitialSpec initial;
    TimeConfig time;
};

struct SimulationResult {
    Trajectory trajectory;
    Thresholds thresholds;
    RegimeVerdict verdict;
};

/// Integrates to t_final or until the escape cap triggers.  The step is
/// rejected and dt halved when the corrector fails or the relative increment
/// of |u|_p exceeds 10%; after max_halvings consecutive halvings the run is
/// reported as resolved to dt_min.  Thresholds are computed once from the
/// initial data, every sampled step is reported, and the verdict closes the
/// run.
SimulationResult run_simulation(const DiscreteModel& model, const State& initial,
                                const TimeConfig& time);

SimulationResult run_simulation(const SimulationConfig& config);

}  // namespace viscowave

#endif
