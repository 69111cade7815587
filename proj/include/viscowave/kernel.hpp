#ifndef VISCOWAVE_KERNEL_HPP
#define VISCOWAVE_KERNEL_HPP

#include <stdexcept>
#include <vector>

namespace viscowave {

/// One decaying exponential a * exp(-b s) of a Prony-series relaxation kernel.
struct PronyTerm {
    double amplitude = 0.0;  // a, >= 0
    double rate = 0.0;       // b, > 0
};

/// Relaxation kernel g(s) = sum_i a_i exp(-b_i s).  An empty term list is g = 0.
///
/// Prony form gives g >= 0 and g' <= 0 by construction (for a >= 0, b > 0) and
/// admits an exact one-step recursion for the convolution memory, which is why
/// the simulator is restricted to it.
struct KernelSpec {
    std::vector<PronyTerm> terms;

    bool empty() const { return terms.empty(); }
};

/// Per-hypothesis admissibility record for a relaxation kernel.
struct KernelReport {
    bool nonnegative = false;      // g(s) >= 0 for all s >= 0
    bool nonincreasing = false;    // g'(s) <= 0 for all s >= 0
    bool residual_positive = false;  // l = 1 - total mass > 0
    double l = 0.0;                // 1 - sum a_i / b_i (NaN when a rate is <= 0)
    bool admissible = false;
};

/// g(s).  Throws std::domain_error for s < 0.
double eval_g(const KernelSpec& kernel, double s);

/// g'(s) = -sum a_i b_i exp(-b_i s), always <= 0 for admissible kernels.
double eval_g_prime(const KernelSpec& kernel, double s);

/// Residual stiffness fraction l = 1 - integral of g over [0, inf),
/// evaluated in closed form so threshold constants are exactly reproducible.
double kernel_l(const KernelSpec& kernel);

/// Partial mass integral of g over [0, t], closed form per term.
double kernel_mass(const KernelSpec& kernel, double t);

/// Checks the kernel hypotheses (g >= 0, g' <= 0, l > 0) and reports each.
/// Inadmissible kernels yield a failing report, never an exception.
KernelReport validate_kernel(const KernelSpec& kernel);

}  // namespace viscowave

#endif
