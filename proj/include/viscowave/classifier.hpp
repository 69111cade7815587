#ifndef VISCOWAVE_CLASSIFIER_HPP
#define VISCOWAVE_CLASSIFIER_HPP

#include <string>
#include <vector>

#include "viscowave/functionals.hpp"

namespace viscowave {

enum class Outcome { GlobalBounded, ExpGrowth, Blowup, Inconclusive };

std::string to_string(Outcome outcome);

struct GrowthFit {
    double mu = 0.0;
    double r_squared = 0.0;
    bool ok = false;  // false when the window held nonpositive values
};

/// Least-squares line on (t, log value).  Refused (ok = false) when any value
/// in the window is nonpositive or fewer than two samples are given.
GrowthFit fit_growth_rate(const std::vector<double>& t, const std::vector<double>& value);

struct BlowupEstimate {
    double t_star = 0.0;       // fitted singular time
    double exponent = 0.0;     // q in |u|_p ~ c (t_star - t)^{-q}
    double cap_crossing = 0.0; // first sample past the cap; lower bound for t_star
    bool coarse = false;       // too few post-growth samples, t_star = cap_crossing
};

/// Estimates the escape time by fitting the singular model
/// |u|_p ~ c (T - t)^{-q} on the last decade of growth below the cap.
/// Throws std::invalid_argument when the cap was never crossed.
BlowupEstimate detect_blowup(const Trajectory& trajectory, double cap_absolute);

struct RegimeVerdict {
    // hypothesis flags evaluated on the initial report
    bool stable_set_applies = false;  // beta < 1 and I(u0) > 0
    bool growth_applies = false;      // E(0) < E2, |grad u0| >= alpha1, alpha > 0, gates
    bool blowup_applies = false;      // same with alpha = 0 and m > 2

    Outcome outcome = Outcome::Inconclusive;
    GrowthFit fit_lp;  // on log |u|_p^p, last half of the run
    GrowthFit fit_L;   // on log L, same window
    bool has_blowup_estimate = false;
    BlowupEstimate blowup;

    bool consistent = true;  // observed outcome lies in the operative prediction
    std::string summary;
};

/// Turns a logged trajectory plus thresholds into a verdict: which set of
/// hypotheses held at t = 0, what was observed, and whether they agree.
/// Trajectories with fewer than 10 samples come back inconclusive.
RegimeVerdict classify(const Trajectory& trajectory, const Thresholds& thresholds,
                       const DiscreteModel& model);

/// 0 consistent, 3 theory-inconsistent, 4 inconclusive.
int verdict_exit_code(const RegimeVerdict& verdict);

}  // namespace viscowave

#endif
