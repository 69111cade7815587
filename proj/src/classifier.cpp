#include "viscowave/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace viscowave {

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::GlobalBounded: return "GLOBAL_BOUNDED";
        case Outcome::ExpGrowth: return "EXP_GROWTH";
        case Outcome::Blowup: return "BLOWUP";
        case Outcome::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

GrowthFit fit_growth_rate(const std::vector<double>& t, const std::vector<double>& value) {
    GrowthFit fit;
    if (t.size() != value.size() || t.size() < 2) return fit;
    for (double y : value)
        if (!(y > 0.0) || !std::isfinite(y)) return fit;

    const size_t n = t.size();
    double mean_t = 0.0, mean_z = 0.0;
    std::vector<double> z(n);
    for (size_t k = 0; k < n; ++k) {
        z[k] = std::log(value[k]);
        mean_t += t[k];
        mean_z += z[k];
    }
    mean_t /= n;
    mean_z /= n;
    double stt = 0.0, stz = 0.0, szz = 0.0;
    for (size_t k = 0; k < n; ++k) {
        stt += (t[k] - mean_t) * (t[k] - mean_t);
        stz += (t[k] - mean_t) * (z[k] - mean_z);
        szz += (z[k] - mean_z) * (z[k] - mean_z);
    }
    if (stt == 0.0) return fit;
    fit.mu = stz / stt;
    double ss_res = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double r = z[k] - mean_z - fit.mu * (t[k] - mean_t);
        ss_res += r * r;
    }
    fit.r_squared = szz > 0.0 ? 1.0 - ss_res / szz : 1.0;
    fit.ok = true;
    return fit;
}

namespace {

double singular_fit_ss(const std::vector<double>& t, const std::vector<double>& z,
                       double t_star, double* slope_out) {
    const size_t n = t.size();
    double mean_x = 0.0, mean_z = 0.0;
    std::vector<double> x(n);
    for (size_t k = 0; k < n; ++k) {
        x[k] = std::log(t_star - t[k]);
        mean_x += x[k];
        mean_z += z[k];
    }
    mean_x /= n;
    mean_z /= n;
    double sxx = 0.0, sxz = 0.0;
    for (size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mean_x) * (x[k] - mean_x);
        sxz += (x[k] - mean_x) * (z[k] - mean_z);
    }
    const double slope = sxx > 0.0 ? sxz / sxx : 0.0;
    if (slope_out) *slope_out = slope;
    double ss = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double r = z[k] - mean_z - slope * (x[k] - mean_x);
        ss += r * r;
    }
    return ss;
}

}  // namespace

BlowupEstimate detect_blowup(const Trajectory& trajectory, double cap_absolute) {
    const auto& samples = trajectory.samples;
    size_t crossing = samples.size();
    for (size_t k = 0; k < samples.size(); ++k) {
        if (samples[k].u_p_norm >= cap_absolute || !std::isfinite(samples[k].u_p_norm)) {
            crossing = k;
            break;
        }
    }
    if (crossing == samples.size())
        throw std::invalid_argument("detect_blowup: the norm never crossed the cap");

    BlowupEstimate estimate;
    estimate.cap_crossing = samples[crossing].t;

    // Last decade of growth below (and including) the crossing sample.
    std::vector<double> t, z;
    double level = samples[crossing].u_p_norm;
    if (!std::isfinite(level)) level = cap_absolute;
    for (size_t k = 0; k <= crossing; ++k) {
        const double y = samples[k].u_p_norm;
        if (std::isfinite(y) && y >= level / 10.0 && y > 0.0) {
            t.push_back(samples[k].t);
            z.push_back(std::log(y));
        }
    }
    if (t.size() < 5) {
        estimate.coarse = true;
        estimate.t_star = estimate.cap_crossing;
        estimate.exponent = std::numeric_limits<double>::quiet_NaN();
        return estimate;
    }

    const double t_end = t.back();
    const double span = std::max(t_end - t.front(), 1e-12);
    double lo = t_end + 1e-9 * std::max(1.0, t_end);
    double hi = t_end + 10.0 * span;
    // Golden-section search for the singular time minimizing the log-log
    // residual; the residual is smooth and single-dipped in t_star here.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = singular_fit_ss(t, z, c, nullptr);
    double fd = singular_fit_ss(t, z, d, nullptr);
    for (int iter = 0; iter < 200 && (b - a) > 1e-12 * std::max(1.0, b); ++iter) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a);
            fc = singular_fit_ss(t, z, c, nullptr);
        } else {
            a = c; c = d; fc = fd;
            d = a + phi * (b - a);
            fd = singular_fit_ss(t, z, d, nullptr);
        }
    }
    double slope = 0.0;
    const double t_star = 0.5 * (a + b);
    singular_fit_ss(t, z, t_star, &slope);
    if (!(slope < 0.0)) {  // no singular steepening resolved
        estimate.coarse = true;
        estimate.t_star = estimate.cap_crossing;
        estimate.exponent = std::numeric_limits<double>::quiet_NaN();
        return estimate;
    }
    estimate.t_star = std::max(t_star, estimate.cap_crossing);
    estimate.exponent = -slope;
    return estimate;
}

RegimeVerdict classify(const Trajectory& trajectory, const Thresholds& thresholds,
                       const DiscreteModel& model) {
    RegimeVerdict verdict;
    const auto& samples = trajectory.samples;

    if (!samples.empty()) {
        const EnergyReport& first = samples.front();
        const bool beta_ok = std::isfinite(thresholds.beta) && thresholds.beta < 1.0;
        verdict.stable_set_applies = beta_ok && first.I > 0.0;

        const bool exponent_gate = model.p > std::max(model.m, 2.0 / model.l);
        const bool large_data =
            thresholds.E0 < thresholds.E2 && first.grad_u_norm >= thresholds.alpha1;
        verdict.growth_applies =
            large_data && model.alpha > 0.0 && model.m >= 2.0 && exponent_gate;
        verdict.blowup_applies =
            large_data && model.alpha == 0.0 && model.m > 2.0 && exponent_gate;
    }

    if (samples.size() < 10) {
        verdict.outcome = Outcome::Inconclusive;
    } else if (trajectory.cap_triggered) {
        verdict.outcome = Outcome::Blowup;
        verdict.has_blowup_estimate = true;
        verdict.blowup = detect_blowup(trajectory, trajectory.cap_absolute);
    } else {
        const size_t half = samples.size() / 2;
        // fit on |u|_p^p and on L over the last half of the run
        {
            std::vector<double> t, y_lp, y_L;
            for (size_t k = half; k < samples.size(); ++k) {
                t.push_back(samples[k].t);
                y_lp.push_back(std::pow(samples[k].u_p_norm, thresholds.p));
                y_L.push_back(samples[k].L);
            }
            verdict.fit_lp = fit_growth_rate(t, y_lp);
            verdict.fit_L = fit_growth_rate(t, y_L);
        }

        const bool lp_growth =
            verdict.fit_lp.ok && verdict.fit_lp.mu > 0.0 && verdict.fit_lp.r_squared >= 0.99;
        const bool L_growth =
            verdict.fit_L.ok && verdict.fit_L.mu > 0.0 && verdict.fit_L.r_squared >= 0.99;
        const bool rates_disagree =
            lp_growth && L_growth &&
            std::abs(verdict.fit_lp.mu - verdict.fit_L.mu) >
                0.2 * std::max(verdict.fit_lp.mu, verdict.fit_L.mu);

        if (lp_growth && rates_disagree) {
            verdict.outcome = Outcome::Inconclusive;
        } else if (lp_growth) {
            verdict.outcome = Outcome::ExpGrowth;
        } else {
            double max_first = 0.0, max_last = 0.0;
            bool bound_held = true;
            for (size_t k = 0; k < samples.size(); ++k) {
                const double y = samples[k].u_p_norm;
                if (k < half) max_first = std::max(max_first, y);
                else max_last = std::max(max_last, y);
                const double lhs = (thresholds.p - 2.0) / (2.0 * thresholds.p) *
                                       samples[k].grad_u_norm * samples[k].grad_u_norm +
                                   0.5 * samples[k].ut_norm * samples[k].ut_norm;
                if (lhs > 1.05 * thresholds.E0) bound_held = false;
            }
            verdict.outcome = (max_last <= 1.1 * max_first && bound_held)
                                  ? Outcome::GlobalBounded
                                  : Outcome::Inconclusive;
        }
    }

    // Operative prediction vs observation.  A growth-regime run that escapes
    // the cap is still growth-consistent: the discrete observation cannot
    // separate the two for alpha > 0.
    verdict.consistent = true;
    if (verdict.stable_set_applies)
        verdict.consistent = verdict.outcome == Outcome::GlobalBounded;
    else if (verdict.growth_applies)
        verdict.consistent =
            verdict.outcome == Outcome::ExpGrowth || verdict.outcome == Outcome::Blowup;
    else if (verdict.blowup_applies)
        verdict.consistent = verdict.outcome == Outcome::Blowup;
    if (verdict.outcome == Outcome::Inconclusive) verdict.consistent = false;

    std::ostringstream text;
    const char* operative = verdict.stable_set_applies ? "stable_set"
                            : verdict.growth_applies  ? "growth"
                            : verdict.blowup_applies  ? "blowup"
                                                      : "none";
    text << "outcome = " << to_string(verdict.outcome) << "\n";
    text << "operative_hypotheses = " << operative << "\n";
    text << "consistent = " << (verdict.consistent ? "yes" : "no") << "\n";
    text << "stable_set_applies = " << (verdict.stable_set_applies ? "yes" : "no") << "\n";
    text << "growth_applies = " << (verdict.growth_applies ? "yes" : "no") << "\n";
    text << "blowup_applies = " << (verdict.blowup_applies ? "yes" : "no") << "\n";
    if (verdict.fit_lp.ok)
        text << "mu_fit_lp = " << verdict.fit_lp.mu << "\nr_squared_lp = " << verdict.fit_lp.r_squared
             << "\n";
    if (verdict.fit_L.ok)
        text << "mu_fit_L = " << verdict.fit_L.mu << "\nr_squared_L = " << verdict.fit_L.r_squared
             << "\n";
    if (verdict.has_blowup_estimate) {
        text << "t_star_estimate = " << verdict.blowup.t_star << "\n";
        text << "t_star_lower_bound = " << verdict.blowup.cap_crossing << "\n";
        text << "singular_exponent = " << verdict.blowup.exponent << "\n";
        text << "resolution = " << (verdict.blowup.coarse ? "coarse" : "fitted") << "\n";
        if (trajectory.resolved_to_dt_min) text << "note = blow-up resolved to dt_min\n";
    }
    verdict.summary = text.str();
    return verdict;
}

int verdict_exit_code(const RegimeVerdict& verdict) {
    if (verdict.outcome == Outcome::Inconclusive) return 4;
    const bool operative =
        verdict.stable_set_applies || verdict.growth_applies || verdict.blowup_applies;
    if (operative && !verdict.consistent) return 3;
    return 0;
}

}  // namespace viscowave
