#ifndef VISCOWAVE_STEPPER_HPP
#define VISCOWAVE_STEPPER_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "viscowave/memory.hpp"
#include "viscowave/model.hpp"

namespace viscowave {

enum class Scheme { Midpoint, BackwardEuler };

struct StepperOptions {
    Scheme scheme = Scheme::Midpoint;
    double corrector_tol = 1e-10;  // fixed-point tolerance in the mass norm
    int corrector_max_iters = 50;
};

/// Thrown when the nonlinear corrector does not contract; the driver responds
/// by halving dt.
struct CorrectorError : std::runtime_error {
    CorrectorError(const std::string& what, double residual_, int iterations_)
        : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
    double residual;
    int iterations;
};

/// One-step integrator for
///   M dv/dt + alpha K v + K u - (memory load) + boundary damping = source,
///   du/dt = v.
///
/// Midpoint scheme: the linear skeleton is treated by the implicit midpoint
/// rule, the memory load is evaluated at the half step from known history, and
/// the nodal source |u|^{p-2}u and boundary damping h(v) are resolved by a
/// fixed-point corrector on the midpoint values.  Each corrector pass solves
/// with the constant matrix M + (dt/2) alpha K + (dt^2/4) K, factored once per
/// dt.  Backward Euler is available as a first-order fallback for stiff
/// late-stage escape runs.
class Stepper {
  public:
    explicit Stepper(const DiscreteModel& model, StepperOptions opts = {});

    /// Advances state and memory by dt.  Throws CorrectorError on
    /// non-convergence; produces non-finite values (not an error) when the
    /// solution escapes within one step.
    void step(State& state, MemoryState& mem, double dt);

    const StepperOptions& options() const { return opts_; }

  private:
    void factor(double dt);
    Eigen::VectorXd nonlinear_load(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                   double t) const;

    const DiscreteModel& model_;
    StepperOptions opts_;
    double factored_dt_ = -1.0;
    Eigen::LLT<Eigen::MatrixXd> solver_;
};

enum class Profile { Zero, Sine, Bump, Random };

struct InitialSpec {
    Profile profile = Profile::Zero;
    double amplitude = 0.0;
    std::uint64_t seed = 0;
    Profile velocity_profile = Profile::Zero;
    double velocity_amplitude = 0.0;
    std::uint64_t velocity_seed = 0;
};

/// Deterministic initial state: named interpolated profiles scaled by the
/// amplitude, or a seeded random smooth field.
State initial_data(const DiscreteModel& model, const InitialSpec& spec);

/// Nodal interpolation of a named profile with unit amplitude.
Eigen::VectorXd profile_values(const DiscreteModel& model, Profile profile, std::uint64_t seed);

}  // namespace viscowave

#endif
