#include "viscowave/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <thread>

namespace viscowave {

namespace fs = std::filesystem;

std::string format_value(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_run_csv(const fs::path& path, const Trajectory& trajectory) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "t,E,I,J,gamma,g_diamond_u,H,L,Lhat,u_p_norm,grad_u_norm,ut_norm,ut_boundary_norm,"
           "dissipation_residual\n";
    for (const EnergyReport& r : trajectory.samples) {
        out << format_value(r.t) << ',' << format_value(r.E) << ',' << format_value(r.I) << ','
            << format_value(r.J) << ',' << format_value(r.gamma) << ','
            << format_value(r.g_diamond) << ',' << format_value(r.H) << ',' << format_value(r.L)
            << ',' << format_value(r.Lhat) << ',' << format_value(r.u_p_norm) << ','
            << format_value(r.grad_u_norm) << ',' << format_value(r.ut_norm) << ','
            << format_value(r.ut_boundary_norm) << ',' << format_value(r.dissipation_residual)
            << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void write_thresholds(const fs::path& path, const Thresholds& th) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "B = " << format_value(th.B) << '\n';
    out << "B1 = " << format_value(th.B1) << '\n';
    out << "alpha1 = " << format_value(th.alpha1) << '\n';
    out << "alpha2 = " << format_value(th.alpha2) << '\n';
    out << "E1 = " << format_value(th.E1) << '\n';
    out << "E2 = " << format_value(th.E2) << '\n';
    out << "beta = " << format_value(th.beta) << '\n';
    out << "c1 = " << format_value(th.c1) << '\n';
    out << "sigma_hat = " << format_value(th.sigma_hat) << '\n';
    out << "sigma = " << format_value(th.sigma) << '\n';
    out << "d = " << format_value(th.d) << '\n';
    out << "epsilon = " << format_value(th.epsilon) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

void write_verdict(const fs::path& path, const RegimeVerdict& verdict) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << verdict.summary;
    if (!out) throw IoError("failed writing " + path.string());
}

int run_experiment(const SimulationConfig& config, const fs::path& output_dir,
                   std::ostream& log) {
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + output_dir.string());

    const SimulationResult result = run_simulation(config);
    write_run_csv(output_dir / "run.csv", result.trajectory);
    write_thresholds(output_dir / "thresholds.txt", result.thresholds);
    write_verdict(output_dir / "verdict.txt", result.verdict);

    log << "samples = " << result.trajectory.samples.size() << "\n" << result.verdict.summary;
    return verdict_exit_code(result.verdict);
}

namespace {

struct SweepCell {
    std::map<std::string, double> overrides;
    bool failed = false;
    std::string error;
    Outcome outcome = Outcome::Inconclusive;
    bool consistent = false;
    double mu_fit = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double max_u_p = 0.0;
    bool stable_set_applies = false, growth_applies = false, blowup_applies = false;
};

}  // namespace

int sweep_experiment(const ParsedConfig& parsed, const fs::path& output_dir, int jobs,
                     std::ostream& log) {
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + output_dir.string());

    std::vector<SweepCell> cells;
    if (parsed.axes.empty()) {
        cells.push_back({});
    } else if (parsed.axes.size() == 1) {
        for (double v : parsed.axes[0].values)
            cells.push_back({{{parsed.axes[0].key, v}}});
    } else {
        for (double v0 : parsed.axes[0].values)
            for (double v1 : parsed.axes[1].values)
                cells.push_back({{{parsed.axes[0].key, v0}, {parsed.axes[1].key, v1}}});
    }

    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
    std::atomic<size_t> next{0};
    auto work = [&]() {
        while (true) {
            const size_t index = next.fetch_add(1);
            if (index >= cells.size()) return;
            SweepCell& cell = cells[index];
            char name[32];
            std::snprintf(name, sizeof(name), "cell_%04zu", index);
            try {
                const SimulationConfig config = apply_overrides(parsed, cell.overrides);
                const SimulationResult result = run_simulation(config);
                const fs::path cell_dir = output_dir / name;
                fs::create_directories(cell_dir);
                write_run_csv(cell_dir / "run.csv", result.trajectory);
                write_thresholds(cell_dir / "thresholds.txt", result.thresholds);
                write_verdict(cell_dir / "verdict.txt", result.verdict);

                cell.outcome = result.verdict.outcome;
                cell.consistent = result.verdict.consistent;
                if (result.verdict.fit_lp.ok) {
                    cell.mu_fit = result.verdict.fit_lp.mu;
                    cell.r_squared = result.verdict.fit_lp.r_squared;
                }
                if (result.verdict.has_blowup_estimate)
                    cell.t_star = result.verdict.blowup.t_star;
                for (const EnergyReport& r : result.trajectory.samples)
                    cell.max_u_p = std::max(cell.max_u_p, r.u_p_norm);
                cell.stable_set_applies = result.verdict.stable_set_applies;
                cell.growth_applies = result.verdict.growth_applies;
                cell.blowup_applies = result.verdict.blowup_applies;
            } catch (const std::exception& error) {
                cell.failed = true;
                cell.error = error.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < workers; ++j) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();

    std::ofstream summary(output_dir / "sweep_summary.csv");
    if (!summary) throw IoError("cannot write sweep summary");
    summary << "cell";
    for (const auto& axis : parsed.axes) summary << ',' << axis.key;
    summary << ",verdict,consistent,mu_fit,r_squared,t_star,max_u_p_norm,"
               "stable_set_applies,growth_applies,blowup_applies,error\n";
    for (size_t index = 0; index < cells.size(); ++index) {
        const SweepCell& cell = cells[index];
        summary << index;
        for (const auto& axis : parsed.axes)
            summary << ',' << format_value(cell.overrides.at(axis.key));
        if (cell.failed) {
            summary << ",FAILED,,,,,,,,," << '"' << cell.error << '"' << '\n';
            continue;
        }
        summary << ',' << to_string(cell.outcome) << ',' << (cell.consistent ? "yes" : "no")
                << ',' << format_value(cell.mu_fit) << ',' << format_value(cell.r_squared) << ','
                << format_value(cell.t_star) << ',' << format_value(cell.max_u_p) << ','
                << (cell.stable_set_applies ? "yes" : "no") << ','
                << (cell.growth_applies ? "yes" : "no") << ','
                << (cell.blowup_applies ? "yes" : "no") << ",\n";
    }
    if (!summary) throw IoError("failed writing sweep summary");

    size_t failed = 0;
    for (const auto& cell : cells)
        if (cell.failed) ++failed;
    log << "sweep: " << cells.size() << " cells, " << failed << " failed, summary at "
        << (output_dir / "sweep_summary.csv").string() << "\n";
    return 0;
}

int refine_experiment(const ParsedConfig& parsed, const fs::path& output_dir, int levels,
                      std::ostream& log) {
    if (levels < 2) throw ConfigError("refine needs --levels >= 2");
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + output_dir.string());

    std::ofstream table(output_dir / "refine.csv");
    if (!table) throw IoError("cannot write refine table");
    table << "level,dt,max_dissipation_residual,ratio\n";
    log << std::setw(8) << "dt" << std::setw(26) << "max_residual" << std::setw(12) << "ratio"
        << "\n";

    double previous = 0.0;
    for (int level = 0; level < levels; ++level) {
        SimulationConfig config = parsed.sim;
        config.time.dt = parsed.sim.time.dt / std::pow(2.0, level);
        config.time.sampling_stride = 1;  // the residual is a per-step diagnostic here
        const SimulationResult result = run_simulation(config);
        double max_residual = 0.0;
        for (size_t k = 1; k < result.trajectory.samples.size(); ++k)
            max_residual = std::max(max_residual,
                                    std::abs(result.trajectory.samples[k].dissipation_residual));
        const double ratio = level > 0 && max_residual > 0.0 ? previous / max_residual : 0.0;
        table << level << ',' << format_value(config.time.dt) << ','
              << format_value(max_residual) << ','
              << (level > 0 ? format_value(ratio) : std::string()) << '\n';
        log << std::setw(12) << format_value(config.time.dt) << std::setw(22)
            << format_value(max_residual);
        if (level > 0) log << std::setw(12) << format_value(ratio);
        log << "\n";
        previous = max_residual;
    }
    if (!table) throw IoError("failed writing refine table");
    return 0;
}

}  // namespace viscowave
