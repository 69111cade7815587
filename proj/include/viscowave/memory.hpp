#ifndef VISCOWAVE_MEMORY_HPP
#define VISCOWAVE_MEMORY_HPP

#include <Eigen/Dense>
#include <vector>

#include "viscowave/model.hpp"

namespace viscowave {

enum class MemoryMode { Recursion, History };

/// Realization of the convolution memory.
///
/// Recursion mode keeps, per Prony term, three exponentially weighted
/// accumulators sharing one quadrature rule (integrating factor at the slab
/// midpoint, trapezoid endpoints for the smooth part):
///   psi_i   = int_0^t a_i e^{-b_i (t-s)} u(s) ds            (vector)
///   s_i     = int_0^t a_i e^{-b_i (t-s)} |grad u(s)|^2 ds   (scalar)
///   q_i     = int_0^t a_i e^{-b_i (t-s)} ds                 (scalar)
/// Sharing the rule makes the past-deviation functional a positively weighted
/// sum of |grad u(s) - grad u(t)|^2, hence nonnegative and exactly zero on
/// time-constant trajectories.
///
/// History mode stores every accepted state and integrates by trapezoid; it is
/// the brute-force reference the recursion is tested against.
struct MemoryState {
    MemoryMode mode = MemoryMode::Recursion;
    double t = 0.0;

    Eigen::VectorXd u_prev;     // last accepted displacement
    double grad_sq_prev = 0.0;  // |grad u_prev|^2

    // recursion mode, one entry per Prony term
    std::vector<Eigen::VectorXd> psi;
    std::vector<double> weighted_grad_sq;
    std::vector<double> weight;

    // history mode
    std::vector<double> times;
    std::vector<Eigen::VectorXd> snapshots;
};

MemoryState make_memory(const DiscreteModel& model, const Eigen::VectorXd& u0,
                        MemoryMode mode = MemoryMode::Recursion);

/// Advances the accumulators (or appends to the history) over one step of
/// size dt ending at displacement u_new.  Throws std::domain_error for
/// dt <= 0 and std::invalid_argument on shape mismatch.
void memory_advance(MemoryState& mem, const DiscreteModel& model, const Eigen::VectorXd& u_new,
                    double dt);

/// Weak-form memory load K * sum_i psi_i; subtracted from the stiffness load.
Eigen::VectorXd memory_force(const MemoryState& mem, const DiscreteModel& model);

/// Memory load advanced to t + dt_ahead using known data only: the new slab is
/// integrated with the Taylor prediction u_prev + (dt_ahead/2) v at its
/// midpoint.  Second-order consistent, explicit in the step unknown; the
/// stepper evaluates it at the half step (dt_ahead = dt/2).
Eigen::VectorXd memory_force_at(const MemoryState& mem, const DiscreteModel& model,
                                const Eigen::VectorXd& v, double dt_ahead);

/// Past-deviation functional int_0^t g(t-s) |grad u(s) - grad u(t)|^2 ds,
/// evaluated against the deviation field u_now.  Nonnegative; exactly zero
/// for time-constant histories.
double g_diamond_u(const MemoryState& mem, const Eigen::VectorXd& u_now,
                   const DiscreteModel& model);

/// Same functional with kernel g'; always <= 0 for admissible kernels.
double g_prime_diamond_u(const MemoryState& mem, const Eigen::VectorXd& u_now,
                         const DiscreteModel& model);

}  // namespace viscowave

#endif
