#include "viscowave/memory.hpp"

#include <cmath>

namespace viscowave {

namespace {

// Trapezoid weights for possibly uneven sample times.
std::vector<double> trapezoid_weights(const std::vector<double>& times) {
    const size_t n = times.size();
    std::vector<double> w(n, 0.0);
    for (size_t k = 0; k + 1 < n; ++k) {
        const double half = (times[k + 1] - times[k]) / 2.0;
        w[k] += half;
        w[k + 1] += half;
    }
    return w;
}

Eigen::VectorXd history_convolution(const KernelSpec& kernel, const std::vector<double>& times,
                                    const std::vector<Eigen::VectorXd>& snapshots, double t_eval) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(snapshots.front().size());
    const std::vector<double> w = trapezoid_weights(times);
    for (size_t k = 0; k < snapshots.size(); ++k)
        acc += w[k] * eval_g(kernel, t_eval - times[k]) * snapshots[k];
    return acc;
}

}  // namespace

MemoryState make_memory(const DiscreteModel& model, const Eigen::VectorXd& u0, MemoryMode mode) {
    if (u0.size() != model.size())
        throw std::invalid_argument("make_memory: initial displacement/model size mismatch");
    MemoryState mem;
    mem.mode = mode;
    mem.t = 0.0;
    mem.u_prev = u0;
    mem.grad_sq_prev = grad_norm_sq(model, u0);
    if (mode == MemoryMode::Recursion) {
        const size_t n_terms = model.kernel.terms.size();
        mem.psi.assign(n_terms, Eigen::VectorXd::Zero(model.size()));
        mem.weighted_grad_sq.assign(n_terms, 0.0);
        mem.weight.assign(n_terms, 0.0);
    } else {
        mem.times = {0.0};
        mem.snapshots = {u0};
    }
    return mem;
}

void memory_advance(MemoryState& mem, const DiscreteModel& model, const Eigen::VectorXd& u_new,
                    double dt) {
    if (dt <= 0.0) throw std::domain_error("memory_advance: dt must be positive");
    if (u_new.size() != mem.u_prev.size() || u_new.size() != model.size())
        throw std::invalid_argument("memory_advance: displacement size mismatch");

    mem.t += dt;
    if (mem.mode == MemoryMode::Recursion) {
        const double grad_sq_new = grad_norm_sq(model, u_new);
        for (size_t i = 0; i < mem.psi.size(); ++i) {
            const auto& term = model.kernel.terms[i];
            const double decay = std::exp(-term.rate * dt);
            const double w = dt * term.amplitude * std::exp(-term.rate * dt / 2.0);
            mem.psi[i] = decay * mem.psi[i] + (w / 2.0) * (mem.u_prev + u_new);
            mem.weighted_grad_sq[i] =
                decay * mem.weighted_grad_sq[i] + (w / 2.0) * (mem.grad_sq_prev + grad_sq_new);
            mem.weight[i] = decay * mem.weight[i] + w;
        }
        mem.grad_sq_prev = grad_sq_new;
    } else {
        mem.times.push_back(mem.t);
        mem.snapshots.push_back(u_new);
    }
    mem.u_prev = u_new;
}

Eigen::VectorXd memory_force(const MemoryState& mem, const DiscreteModel& model) {
    if (mem.u_prev.size() != model.size())
        throw std::invalid_argument("memory_force: state/model size mismatch");
    if (model.kernel.empty()) return Eigen::VectorXd::Zero(model.size());
    if (mem.mode == MemoryMode::Recursion) {
        Eigen::VectorXd total = Eigen::VectorXd::Zero(model.size());
        for (const auto& psi : mem.psi) total += psi;
        return model.stiffness * total;
    }
    return model.stiffness *
           history_convolution(model.kernel, mem.times, mem.snapshots, mem.t);
}

Eigen::VectorXd memory_force_at(const MemoryState& mem, const DiscreteModel& model,
                                const Eigen::VectorXd& v, double dt_ahead) {
    if (dt_ahead <= 0.0) throw std::domain_error("memory_force_at: dt_ahead must be positive");
    if (model.kernel.empty()) return Eigen::VectorXd::Zero(model.size());
    const Eigen::VectorXd u_pred = mem.u_prev + (dt_ahead / 2.0) * v;  // slab midpoint prediction

    if (mem.mode == MemoryMode::Recursion) {
        Eigen::VectorXd total = Eigen::VectorXd::Zero(model.size());
        for (size_t i = 0; i < mem.psi.size(); ++i) {
            const auto& term = model.kernel.terms[i];
            const double decay = std::exp(-term.rate * dt_ahead);
            const double w = dt_ahead * term.amplitude * std::exp(-term.rate * dt_ahead / 2.0);
            total += decay * mem.psi[i] + w * u_pred;
        }
        return model.stiffness * total;
    }

    std::vector<double> times = mem.times;
    std::vector<Eigen::VectorXd> snapshots = mem.snapshots;
    times.push_back(mem.t + dt_ahead);
    snapshots.push_back(mem.u_prev + dt_ahead * v);
    return model.stiffness *
           history_convolution(model.kernel, times, snapshots, mem.t + dt_ahead);
}

namespace {

double diamond(const MemoryState& mem, const Eigen::VectorXd& u_now, const DiscreteModel& model,
               bool derivative_kernel) {
    if (u_now.size() != model.size())
        throw std::invalid_argument("g_diamond_u: state/model size mismatch");
    if (model.kernel.empty()) return 0.0;

    if (mem.mode == MemoryMode::History) {
        const std::vector<double> w = trapezoid_weights(mem.times);
        double total = 0.0;
        for (size_t k = 0; k < mem.snapshots.size(); ++k) {
            const Eigen::VectorXd dev = mem.snapshots[k] - u_now;
            const double weight = derivative_kernel ? eval_g_prime(model.kernel, mem.t - mem.times[k])
                                                    : eval_g(model.kernel, mem.t - mem.times[k]);
            total += w[k] * weight * grad_norm_sq(model, dev);
        }
        return total;
    }

    const double grad_sq_now = grad_norm_sq(model, u_now);
    double total = 0.0;
    for (size_t i = 0; i < mem.psi.size(); ++i) {
        const double cross = u_now.dot(model.stiffness * mem.psi[i]);
        double term = mem.weighted_grad_sq[i] - 2.0 * cross + mem.weight[i] * grad_sq_now;
        // The expansion cancels to roundoff on near-constant histories; snap
        // the cancellation dust so the sign contract is exact.
        const double scale = mem.weighted_grad_sq[i] + mem.weight[i] * grad_sq_now;
        if (std::abs(term) <= 1e-13 * scale) term = 0.0;
        term = std::max(term, 0.0);
        total += derivative_kernel ? -model.kernel.terms[i].rate * term : term;
    }
    return total;
}

}  // namespace

double g_diamond_u(const MemoryState& mem, const Eigen::VectorXd& u_now,
                   const DiscreteModel& model) {
    const double value = diamond(mem, u_now, model, false);
    return mem.mode == MemoryMode::Recursion ? value : std::max(value, 0.0);
}

double g_prime_diamond_u(const MemoryState& mem, const Eigen::VectorXd& u_now,
                         const DiscreteModel& model) {
    const double value = diamond(mem, u_now, model, true);
    return std::min(value, 0.0);
}

}  // namespace viscowave
