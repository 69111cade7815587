#ifndef VISCOWAVE_CONFIG_HPP
#define VISCOWAVE_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "viscowave/simulation.hpp"

namespace viscowave {

/// A ranged key in a sweep: "section.key" plus the values it takes.
struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

/// Parsed configuration file: the resolved single-run setup plus up to two
/// sweep axes.  For a sweep, axis keys are re-applied per cell.
struct ParsedConfig {
    SimulationConfig sim;
    std::string output_dir = ".";
    std::vector<SweepAxis> axes;
    std::map<std::string, std::string> entries;  // raw "section.key" -> value
};

/// Reads a line-oriented key = value file with [kernel], [model], [initial],
/// [time] and [experiment] sections.  Kernel terms are repeated
/// "term = a b" lines.  Numeric values may be ranged with
/// sweep(v1, v2, ...) or linspace(lo, hi, n); at most two keys may be ranged.
/// All hypothesis gates of the requested experiment are checked here, with
/// the violated relation named in the error.
ParsedConfig parse_config(const std::string& path);

/// Rebuilds and re-validates the simulation config with axis keys overridden
/// (used per sweep cell).
SimulationConfig apply_overrides(const ParsedConfig& parsed,
                                 const std::map<std::string, double>& overrides);

}  // namespace viscowave

#endif
