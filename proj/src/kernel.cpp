#include "viscowave/kernel.hpp"

#include <cmath>
#include <limits>

namespace viscowave {

double eval_g(const KernelSpec& kernel, double s) {
    if (s < 0.0) throw std::domain_error("eval_g: s must be nonnegative");
    double value = 0.0;
    for (const auto& term : kernel.terms) value += term.amplitude * std::exp(-term.rate * s);
    return value;
}

double eval_g_prime(const KernelSpec& kernel, double s) {
    if (s < 0.0) throw std::domain_error("eval_g_prime: s must be nonnegative");
    double value = 0.0;
    for (const auto& term : kernel.terms)
        value -= term.amplitude * term.rate * std::exp(-term.rate * s);
    return value;
}

double kernel_l(const KernelSpec& kernel) {
    double mass = 0.0;
    for (const auto& term : kernel.terms) mass += term.amplitude / term.rate;
    return 1.0 - mass;
}

double kernel_mass(const KernelSpec& kernel, double t) {
    if (t < 0.0) throw std::domain_error("kernel_mass: t must be nonnegative");
    double mass = 0.0;
    for (const auto& term : kernel.terms)
        mass += term.amplitude / term.rate * (1.0 - std::exp(-term.rate * t));
    return mass;
}

KernelReport validate_kernel(const KernelSpec& kernel) {
    KernelReport report;
    report.nonnegative = true;
    report.nonincreasing = true;
    bool rates_positive = true;
    for (const auto& term : kernel.terms) {
        if (term.amplitude < 0.0) report.nonnegative = false;
        if (term.amplitude < 0.0 || term.rate <= 0.0) report.nonincreasing = false;
        if (term.rate <= 0.0) rates_positive = false;
    }
    report.l = rates_positive ? kernel_l(kernel) : std::numeric_limits<double>::quiet_NaN();
    report.residual_positive = rates_positive && report.l > 0.0;
    report.admissible = report.nonnegative && report.nonincreasing && report.residual_positive;
    return report;
}

}  // namespace viscowave
