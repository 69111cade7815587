#ifndef VISCOWAVE_EXPERIMENT_HPP
#define VISCOWAVE_EXPERIMENT_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "viscowave/config.hpp"

namespace viscowave {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Number formatting used in every artifact: 17 significant digits, so runs
/// are reproducible post hoc from the files alone.
std::string format_value(double value);

void write_run_csv(const std::filesystem::path& path, const Trajectory& trajectory);
void write_thresholds(const std::filesystem::path& path, const Thresholds& thresholds);
void write_verdict(const std::filesystem::path& path, const RegimeVerdict& verdict);

/// Executes one run and writes run.csv, thresholds.txt and verdict.txt into
/// the output directory.  Returns the verdict exit code (0/3/4).
int run_experiment(const SimulationConfig& config, const std::filesystem::path& output_dir,
                   std::ostream& log);

/// Cartesian product over the ranged keys, one subdirectory per cell, cells
/// executed concurrently by at most `jobs` workers.  Failed cells are marked
/// in the summary and do not stop the sweep.
int sweep_experiment(const ParsedConfig& parsed, const std::filesystem::path& output_dir,
                     int jobs, std::ostream& log);

/// dt-halving study: reruns the configured experiment at dt, dt/2, ...,
/// sampling every step, and reports the max energy-identity residual per
/// level with its reduction ratio.
int refine_experiment(const ParsedConfig& parsed, const std::filesystem::path& output_dir,
                      int levels, std::ostream& log);

}  // namespace viscowave

#endif
