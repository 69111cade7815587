#ifndef VISCOWAVE_FUNCTIONALS_HPP
#define VISCOWAVE_FUNCTIONALS_HPP

#include <Eigen/Dense>
#include <vector>

#include "viscowave/memory.hpp"
#include "viscowave/model.hpp"

namespace viscowave {

/// Every scalar diagnostic evaluated at one sample time.
///
/// E is assembled as J plus the kinetic terms, so the identity
/// E = J + |u_t|^2/2 + |u_t|^2_boundary/2 holds by construction.
struct EnergyReport {
    double t = 0.0;
    double E = 0.0;        // modified energy including the memory correction
    double I = 0.0;        // Nehari-type functional
    double J = 0.0;        // potential part of the energy
    double gamma = 0.0;    // (1 - int g) |grad u|^2 + diamond
    double g_diamond = 0.0;
    double H = 0.0;        // E2 - E
    double L = 0.0;        // H + eps (u_t, u) + eps (u_t, u)_boundary + eps alpha/2 |grad u|^2
    double Lhat = 0.0;     // H^{1-sigma} + eps (u_t, u) + eps (u_t, u)_boundary
    bool lhat_defined = false;  // false outside the escape regime (H <= 0 or sigma invalid)
    double u_p_norm = 0.0;
    double grad_u_norm = 0.0;
    double ut_norm = 0.0;
    double ut_boundary_norm = 0.0;
    double dissipation_residual = 0.0;  // filled at trajectory assembly; 0 at the first sample

    // extra terms kept for the energy-identity residual and the trajectory norm
    double g_prime_diamond = 0.0;
    double ut_h1_sq = 0.0;                // |grad u_t|^2
    double boundary_damping_power = 0.0;  // integral of h(u_t) u_t over the dynamic edge
    double ut_boundary_m_norm = 0.0;      // L^m norm of u_t on the dynamic edge
};

/// Precomputed constants separating the three regimes.  Entries that are
/// undefined for the given data are NaN and mirrored by the flags.
struct Thresholds {
    double B = 0.0;       // discrete Poincare-Sobolev constant sup |u|_p / |grad u|_2
    double B1 = 0.0;      // B / l
    double alpha1 = 0.0;  // B1^{-p/(p-2)}, location of the well barrier
    double E1 = 0.0;      // (1/2 - 1/p) alpha1^2, barrier height
    double E2 = 0.0;      // (l/2 - 1/p) alpha1^2, memory-corrected barrier
    double beta = 0.0;    // stable-set indicator, < 1 required
    double alpha2 = 0.0;  // larger root of the well equation at level E(0)
    bool alpha2_defined = false;  // false when E(0) > E1
    double c1 = 0.0;      // (l - 2/p) - 2 E2 (B1 alpha2)^{-p}
    double sigma_hat = 0.0;
    bool sigma_hat_defined = false;
    double sigma = 0.0;   // fractional exponent used in Lhat
    bool sigma_defined = false;
    double nu = 0.0;      // sigma / (1 - sigma)
    double d = 0.0;       // 1 + 1/H(0)
    double epsilon = 0.0; // perturbation weight in L and Lhat
    double E0 = 0.0;
    double H0 = 0.0;      // E2 - E0
    double l = 1.0;
    double p = 0.0;
};

/// Logged run: one report and one sampled state per sample time.
struct Trajectory {
    std::vector<EnergyReport> samples;
    std::vector<State> states;
    bool cap_triggered = false;
    bool resolved_to_dt_min = false;
    double initial_lp_norm = 0.0;
    double cap_absolute = 0.0;
    double dt_initial = 0.0;
    double dt_final = 0.0;
};

double energy_E(const State& state, const MemoryState& mem, const DiscreteModel& model);
double functional_I(const State& state, const MemoryState& mem, const DiscreteModel& model);
double functional_J(const State& state, const MemoryState& mem, const DiscreteModel& model);
double gamma_functional(const State& state, const MemoryState& mem, const DiscreteModel& model);

/// Well barrier F(a) = a^2/2 - (B1^p/p) a^p; F(alpha1) = E1.
double well_function(double a, double B1, double p);

struct SobolevOptions {
    int starts = 5;
    double tol = 1e-10;    // stop when the quotient changes less than this per iteration
    long max_iters = 100000;
};

/// Raised when the quotient ascent fails to settle; carries the best value.
struct SobolevError : std::runtime_error {
    SobolevError(const std::string& what, double best) : std::runtime_error(what), best_value(best) {}
    double best_value;
};

/// Discrete best constant in |u|_p <= B |grad u|_2 over fields vanishing on
/// the clamped edge: multi-start gradient ascent on the Rayleigh quotient,
/// with the ascent direction taken in the stiffness metric and a normalize-
/// and-backtrack line search, monotone in the quotient.
double sobolev_constant_B(const DiscreteModel& model, double p, const SobolevOptions& opts = {});
double sobolev_constant_B(const DiscreteModel& model);

Thresholds compute_thresholds(double B, double l, double p, double m, int dimension, double E0,
                              double u0_l2_sq, double u1_l2_sq);
Thresholds compute_thresholds(const DiscreteModel& model, double B, const State& initial);

double lyapunov_L(const State& state, const MemoryState& mem, const DiscreteModel& model,
                  double E2, double eps);

/// Fractional-power perturbation H^{1-sigma} + eps (u_t,u) + eps (u_t,u)_boundary.
/// Undefined (flag false) when H <= 0 or sigma is outside (0,1).
struct LhatValue {
    double value = 0.0;
    bool defined = false;
};
LhatValue lyapunov_Lhat(const State& state, const MemoryState& mem, const DiscreteModel& model,
                        double E2, double eps, double sigma);

EnergyReport make_report(const State& state, const MemoryState& mem, const DiscreteModel& model,
                         const Thresholds& thresholds);

/// Trajectory norm: sup over samples of [|u_t|^2 + l |grad u|^2], plus the
/// squared space-time L^m boundary norm of u_t, plus the time integral of
/// |grad u_t|^2 realized by backward differences of the sampled displacements.
double yt_norm(const Trajectory& trajectory, const DiscreteModel& model);

/// Residual of the energy identity
///   dE/dt = (g' diamond u)/2 - g(t)|grad u|^2/2 - alpha |grad u_t|^2
///           - int h(u_t) u_t
/// per sample, with dE/dt by backward differences; first entry is 0.
std::vector<double> dissipation_residual_series(const Trajectory& trajectory,
                                                const DiscreteModel& model);

}  // namespace viscowave

#endif
