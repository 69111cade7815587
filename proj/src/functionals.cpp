#include "viscowave/functionals.hpp"

#include <cmath>
#include <limits>

namespace viscowave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double kinetic(const State& state, const DiscreteModel& model) {
    return 0.5 * l2_norm_sq(model, state.v) + 0.5 * boundary_l2_norm_sq(model, state.v);
}

double pair_interior(const DiscreteModel& model, const State& state) {
    return (model.interior_mass.array() * state.v.array() * state.u.array()).sum();
}

double pair_boundary(const DiscreteModel& model, const State& state) {
    double total = 0.0;
    for (Eigen::Index k : model.boundary_nodes)
        total += model.boundary_mass[k] * state.v[k] * state.u[k];
    return total;
}

// The potential term enters the functionals only when the source acts on the
// dynamics, so the conservative reduction reports its conserved energy.
double source_pow_sum(const State& state, const DiscreteModel& model) {
    return model.source_enabled ? lp_pow_sum(model, state.u, model.p) : 0.0;
}

}  // namespace

double energy_E(const State& state, const MemoryState& mem, const DiscreteModel& model) {
    return functional_J(state, mem, model) + kinetic(state, model);
}

double functional_I(const State& state, const MemoryState& mem, const DiscreteModel& model) {
    const double remaining = 1.0 - kernel_mass(model.kernel, state.t);
    return remaining * grad_norm_sq(model, state.u) + g_diamond_u(mem, state.u, model) -
           source_pow_sum(state, model);
}

double functional_J(const State& state, const MemoryState& mem, const DiscreteModel& model) {
    const double remaining = 1.0 - kernel_mass(model.kernel, state.t);
    return 0.5 * remaining * grad_norm_sq(model, state.u) +
           0.5 * g_diamond_u(mem, state.u, model) -
           source_pow_sum(state, model) / model.p;
}

double gamma_functional(const State& state, const MemoryState& mem, const DiscreteModel& model) {
    const double remaining = 1.0 - kernel_mass(model.kernel, state.t);
    return remaining * grad_norm_sq(model, state.u) + g_diamond_u(mem, state.u, model);
}

double well_function(double a, double B1, double p) {
    return 0.5 * a * a - std::pow(B1, p) / p * std::pow(a, p);
}

double sobolev_constant_B(const DiscreteModel& model, double p, const SobolevOptions& opts) {
    if (!(p >= 2.0)) throw std::invalid_argument("sobolev_constant_B: requires p >= 2");
    const Eigen::LLT<Eigen::MatrixXd> stiffness_solver(model.stiffness);
    if (stiffness_solver.info() != Eigen::Success)
        throw std::runtime_error("sobolev_constant_B: stiffness factorization failed");

    double best = 0.0;
    bool any_converged = false;
    for (int start = 0; start < opts.starts; ++start) {
        Eigen::VectorXd u = seeded_smooth_field(model, 9001 + static_cast<std::uint64_t>(start));
        double norm_k = std::sqrt(grad_norm_sq(model, u));
        if (!(norm_k > 0.0)) continue;
        u /= norm_k;
        double quotient = lp_norm(model, u, p);  // |u|_p with |grad u| = 1

        double tau = 1.0;
        bool converged = false;
        for (long iter = 0; iter < opts.max_iters; ++iter) {
            Eigen::VectorXd grad(model.size());
            const double scale = std::pow(quotient, 1.0 - p);
            for (Eigen::Index i = 0; i < model.size(); ++i)
                grad[i] = scale * model.interior_mass[i] *
                          std::pow(std::abs(u[i]), p - 2.0) * u[i];
            const Eigen::VectorXd direction = stiffness_solver.solve(grad);

            bool accepted = false;
            double gain = 0.0;
            while (tau >= 1e-18) {
                Eigen::VectorXd trial = u + tau * direction;
                const double trial_norm = std::sqrt(grad_norm_sq(model, trial));
                if (trial_norm > 0.0) {
                    trial /= trial_norm;
                    const double trial_quotient = lp_norm(model, trial, p);
                    if (trial_quotient >= quotient) {
                        gain = trial_quotient - quotient;
                        u = trial;
                        quotient = trial_quotient;
                        tau *= 1.3;
                        accepted = true;
                        break;
                    }
                }
                tau *= 0.5;
            }
            if (!accepted || gain < opts.tol) {
                converged = true;
                break;
            }
        }
        best = std::max(best, quotient);
        if (!converged)
            throw SobolevError("sobolev_constant_B: ascent did not settle within iteration budget",
                               best);
        any_converged = true;
    }
    if (!any_converged) throw SobolevError("sobolev_constant_B: no usable start", best);
    return best;
}

double sobolev_constant_B(const DiscreteModel& model) {
    return sobolev_constant_B(model, model.p, SobolevOptions{});
}

Thresholds compute_thresholds(double B, double l, double p, double m, int dimension, double E0,
                              double u0_l2_sq, double u1_l2_sq) {
    Thresholds th;
    th.B = B;
    th.l = l;
    th.p = p;
    th.E0 = E0;
    th.B1 = B / l;
    th.alpha1 = std::pow(th.B1, -p / (p - 2.0));
    th.E1 = (0.5 - 1.0 / p) * th.alpha1 * th.alpha1;
    th.E2 = (l / 2.0 - 1.0 / p) * th.alpha1 * th.alpha1;
    th.H0 = th.E2 - E0;

    th.beta = E0 >= 0.0
                  ? std::pow(B, p) / l * std::pow(2.0 * p / (l * (p - 2.0)) * E0, (p - 2.0) / 2.0)
                  : kNaN;

    if (E0 > th.E1) {
        th.alpha2 = kNaN;
        th.alpha2_defined = false;
    } else if (E0 == th.E1) {
        th.alpha2 = th.alpha1;
        th.alpha2_defined = true;
    } else {
        double lo = th.alpha1;
        double hi = std::max(2.0 * th.alpha1, 1.0);
        while (well_function(hi, th.B1, p) > E0) hi *= 2.0;
        while (hi - lo > 1e-12 * std::max(1.0, hi)) {
            const double mid = 0.5 * (lo + hi);
            (well_function(mid, th.B1, p) > E0 ? lo : hi) = mid;
        }
        th.alpha2 = 0.5 * (lo + hi);
        th.alpha2_defined = true;
    }
    th.c1 = th.alpha2_defined
                ? (l - 2.0 / p) - 2.0 * th.E2 * std::pow(th.B1 * th.alpha2, -p)
                : kNaN;

    // Interpolation exponent for the fractional bound: midpoint of its
    // admissible open interval.  The interval can be empty (1D with larger m);
    // the fractional bound then drops out of the minimum below.
    const double s_lo = std::max(0.0, dimension / 2.0 - (dimension - 1.0) / m);
    const double s_hi = p > m ? std::min(2.0 / m, 2.0 * (p - m) / (m * (p - 2.0)))
                              : -1.0;
    if (s_lo < s_hi) {
        const double s = 0.5 * (s_lo + s_hi);
        th.sigma_hat = (2.0 - m * s) / (2.0 * (m - 1.0)) *
                       (1.0 - 2.0 * m * (1.0 - s) / ((2.0 - m * s) * p));
        th.sigma_hat_defined = th.sigma_hat > 0.0;
        if (!th.sigma_hat_defined) th.sigma_hat = kNaN;
    } else {
        th.sigma_hat = kNaN;
        th.sigma_hat_defined = false;
    }

    const double bound_pm = p > m ? (p - m) / (p * (m - 1.0)) : -1.0;
    const double bound_p = (p - 2.0) / (2.0 * p);
    const double bound_m = (m - 2.0) / (2.0 * m);
    double bound = std::min({bound_pm, bound_p, bound_m});
    if (th.sigma_hat_defined) bound = std::min(bound, th.sigma_hat);
    th.sigma_defined = bound > 0.0;
    th.sigma = th.sigma_defined ? bound / 2.0 : kNaN;
    th.nu = th.sigma_defined ? th.sigma / (1.0 - th.sigma) : kNaN;

    th.d = th.H0 > 0.0 ? 1.0 + 1.0 / th.H0 : kNaN;
    th.epsilon =
        th.H0 > 0.0 ? 1e-2 * std::min(1.0, th.H0 / (1.0 + u0_l2_sq + u1_l2_sq)) : 0.0;
    return th;
}

Thresholds compute_thresholds(const DiscreteModel& model, double B, const State& initial) {
    MemoryState empty = make_memory(model, initial.u, MemoryMode::Recursion);
    const double E0 = energy_E(initial, empty, model);
    return compute_thresholds(B, model.l, model.p, model.m, model.dimension, E0,
                              l2_norm_sq(model, initial.u), l2_norm_sq(model, initial.v));
}

double lyapunov_L(const State& state, const MemoryState& mem, const DiscreteModel& model,
                  double E2, double eps) {
    const double H = E2 - energy_E(state, mem, model);
    return H + eps * pair_interior(model, state) + eps * pair_boundary(model, state) +
           eps * model.alpha / 2.0 * grad_norm_sq(model, state.u);
}

LhatValue lyapunov_Lhat(const State& state, const MemoryState& mem, const DiscreteModel& model,
                        double E2, double eps, double sigma) {
    LhatValue result;
    const double H = E2 - energy_E(state, mem, model);
    if (!(H > 0.0) || !(sigma > 0.0) || !(sigma < 1.0)) {
        result.value = kNaN;
        return result;  // outside the escape regime, reported as a flag
    }
    result.value = std::pow(H, 1.0 - sigma) + eps * pair_interior(model, state) +
                   eps * pair_boundary(model, state);
    result.defined = true;
    return result;
}

EnergyReport make_report(const State& state, const MemoryState& mem, const DiscreteModel& model,
                         const Thresholds& thresholds) {
    EnergyReport r;
    r.t = state.t;
    const double remaining = 1.0 - kernel_mass(model.kernel, state.t);
    const double grad_sq = grad_norm_sq(model, state.u);
    const double u_pow = source_pow_sum(state, model);
    r.g_diamond = g_diamond_u(mem, state.u, model);
    r.I = remaining * grad_sq + r.g_diamond - u_pow;
    r.J = 0.5 * remaining * grad_sq + 0.5 * r.g_diamond - u_pow / model.p;
    r.E = r.J + kinetic(state, model);
    r.gamma = remaining * grad_sq + r.g_diamond;
    r.H = thresholds.E2 - r.E;

    const double eps = thresholds.epsilon;
    const double pi = pair_interior(model, state);
    const double pb = pair_boundary(model, state);
    r.L = r.H + eps * pi + eps * pb + eps * model.alpha / 2.0 * grad_sq;
    if (r.H > 0.0 && thresholds.sigma_defined) {
        r.Lhat = std::pow(r.H, 1.0 - thresholds.sigma) + eps * pi + eps * pb;
        r.lhat_defined = true;
    } else {
        r.Lhat = kNaN;
        r.lhat_defined = false;
    }

    r.u_p_norm = lp_norm(model, state.u, model.p);
    r.grad_u_norm = std::sqrt(std::max(0.0, grad_sq));
    r.ut_norm = std::sqrt(l2_norm_sq(model, state.v));
    r.ut_boundary_norm = std::sqrt(boundary_l2_norm_sq(model, state.v));

    r.g_prime_diamond = g_prime_diamond_u(mem, state.u, model);
    r.ut_h1_sq = grad_norm_sq(model, state.v);
    double damping_power = 0.0;
    for (Eigen::Index k : model.boundary_nodes)
        damping_power += model.boundary_mass[k] * damping_h(model, state.v[k]) * state.v[k];
    r.boundary_damping_power = damping_power;
    r.ut_boundary_m_norm = boundary_lq_norm(model, state.v, model.m);
    return r;
}

double yt_norm(const Trajectory& trajectory, const DiscreteModel& model) {
    if (trajectory.samples.empty()) return 0.0;
    const auto& reports = trajectory.samples;
    const auto& states = trajectory.states;

    double pointwise = 0.0;
    for (size_t k = 0; k < reports.size(); ++k)
        pointwise = std::max(pointwise, reports[k].ut_norm * reports[k].ut_norm +
                                            model.l * reports[k].grad_u_norm *
                                                reports[k].grad_u_norm);

    double lm_integral = 0.0;
    double grad_vt_integral = 0.0;
    double prev_rate_sq = 0.0;  // backward-difference |grad u_t|^2, zero at the first sample
    for (size_t k = 1; k < reports.size(); ++k) {
        const double dt = reports[k].t - reports[k - 1].t;
        const double f0 = std::pow(reports[k - 1].ut_boundary_m_norm, model.m);
        const double f1 = std::pow(reports[k].ut_boundary_m_norm, model.m);
        lm_integral += dt / 2.0 * (f0 + f1);

        const Eigen::VectorXd rate = (states[k].u - states[k - 1].u) / dt;
        const double rate_sq = grad_norm_sq(model, rate);
        grad_vt_integral += dt / 2.0 * (prev_rate_sq + rate_sq);
        prev_rate_sq = rate_sq;
    }
    const double lm_term = lm_integral > 0.0 ? std::pow(lm_integral, 2.0 / model.m) : 0.0;
    return pointwise + lm_term + grad_vt_integral;
}

std::vector<double> dissipation_residual_series(const Trajectory& trajectory,
                                                const DiscreteModel& model) {
    const auto& reports = trajectory.samples;
    std::vector<double> residual(reports.size(), 0.0);
    for (size_t k = 1; k < reports.size(); ++k) {
        const double dt = reports[k].t - reports[k - 1].t;
        const double dE_dt = (reports[k].E - reports[k - 1].E) / dt;
        const double rhs = 0.5 * reports[k].g_prime_diamond -
                           0.5 * eval_g(model.kernel, reports[k].t) * reports[k].grad_u_norm *
                               reports[k].grad_u_norm -
                           model.alpha * reports[k].ut_h1_sq - reports[k].boundary_damping_power;
        residual[k] = dE_dt - rhs;
    }
    return residual;
}

}  // namespace viscowave
