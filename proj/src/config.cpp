#include "viscowave/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace viscowave {

namespace {

std::string trim(const std::string& s) {
    size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (trim(value.substr(used)).empty()) return parsed;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
    const double parsed = parse_double(key, value);
    const int as_int = static_cast<int>(parsed);
    if (parsed != as_int)
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    return as_int;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const unsigned long long parsed = std::stoull(value, &used);
        if (trim(value.substr(used)).empty()) return parsed;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "': expected a nonnegative integer seed, got '" +
                      value + "'");
}

bool parse_switch(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "yes" || value == "1") return true;
    if (value == "off" || value == "false" || value == "no" || value == "0") return false;
    throw ConfigError("config key '" + key + "': expected on/off, got '" + value + "'");
}

Profile parse_profile(const std::string& key, const std::string& value) {
    if (value == "zero") return Profile::Zero;
    if (value == "sine") return Profile::Sine;
    if (value == "bump") return Profile::Bump;
    if (value == "random") return Profile::Random;
    throw ConfigError("config key '" + key + "': unknown profile '" + value +
                      "' (zero, sine, bump, random)");
}

// Splits "f(a, b, c)" into arguments if the value has that shape for the
// given function name; returns false otherwise.
bool parse_call(const std::string& value, const std::string& name, std::vector<double>& args) {
    if (value.rfind(name + "(", 0) != 0 || value.back() != ')') return false;
    const std::string inner = value.substr(name.size() + 1, value.size() - name.size() - 2);
    std::stringstream stream(inner);
    std::string piece;
    args.clear();
    while (std::getline(stream, piece, ',')) {
        piece = trim(piece);
        if (piece.empty()) throw ConfigError("malformed range '" + value + "'");
        args.push_back(parse_double(name, piece));
    }
    return true;
}

bool parse_range(const std::string& key, const std::string& value, std::vector<double>& out) {
    std::vector<double> args;
    if (parse_call(value, "sweep", args)) {
        if (args.empty()) throw ConfigError("config key '" + key + "': empty sweep()");
        out = args;
        return true;
    }
    if (parse_call(value, "linspace", args)) {
        if (args.size() != 3 || args[2] < 2 || args[2] != std::floor(args[2]))
            throw ConfigError("config key '" + key + "': linspace needs (lo, hi, count >= 2)");
        const int count = static_cast<int>(args[2]);
        out.clear();
        for (int i = 0; i < count; ++i)
            out.push_back(args[0] + (args[1] - args[0]) * i / (count - 1));
        return true;
    }
    return false;
}

SimulationConfig build_config(const std::map<std::string, std::string>& entries,
                              const std::vector<std::pair<double, double>>& kernel_terms) {
    SimulationConfig config;
    for (const auto& [a, b] : kernel_terms) config.model.kernel.terms.push_back({a, b});

    for (const auto& [key, value] : entries) {
        if (key == "model.dimension") config.model.dimension = parse_int(key, value);
        else if (key == "model.length" || key == "model.length_x")
            config.model.length_x = parse_double(key, value);
        else if (key == "model.length_y") config.model.length_y = parse_double(key, value);
        else if (key == "model.num_nodes" || key == "model.nodes_x")
            config.model.nodes_x = parse_int(key, value);
        else if (key == "model.nodes_y") config.model.nodes_y = parse_int(key, value);
        else if (key == "model.alpha") config.model.alpha = parse_double(key, value);
        else if (key == "model.p") config.model.p = parse_double(key, value);
        else if (key == "model.m") config.model.m = parse_double(key, value);
        else if (key == "model.damping_coefficient" || key == "model.kappa")
            config.model.kappa = parse_double(key, value);
        else if (key == "model.source") config.model.source_enabled = parse_switch(key, value);
        else if (key == "initial.profile")
            config.initial.profile = parse_profile(key, value);
        else if (key == "initial.amplitude") config.initial.amplitude = parse_double(key, value);
        else if (key == "initial.seed") config.initial.seed = parse_seed(key, value);
        else if (key == "initial.velocity_profile")
            config.initial.velocity_profile = parse_profile(key, value);
        else if (key == "initial.velocity_amplitude")
            config.initial.velocity_amplitude = parse_double(key, value);
        else if (key == "initial.velocity_seed")
            config.initial.velocity_seed = parse_seed(key, value);
        else if (key == "time.dt") config.time.dt = parse_double(key, value);
        else if (key == "time.t_final") config.time.t_final = parse_double(key, value);
        else if (key == "time.sampling_stride")
            config.time.sampling_stride = parse_int(key, value);
        else if (key == "time.blowup_cap") config.time.blowup_cap = parse_double(key, value);
        else if (key == "time.corrector_tol")
            config.time.stepper.corrector_tol = parse_double(key, value);
        else if (key == "time.scheme") {
            if (value == "midpoint") config.time.stepper.scheme = Scheme::Midpoint;
            else if (value == "backward_euler")
                config.time.stepper.scheme = Scheme::BackwardEuler;
            else
                throw ConfigError("config key '" + key + "': unknown scheme '" + value +
                                  "' (midpoint, backward_euler)");
        } else if (key == "experiment.type") {
            if (value == "generic") config.model.experiment = ExperimentType::Generic;
            else if (value == "stable" || value == "stable_set")
                config.model.experiment = ExperimentType::StableSet;
            else if (value == "growth") config.model.experiment = ExperimentType::Growth;
            else if (value == "blowup") config.model.experiment = ExperimentType::Blowup;
            else
                throw ConfigError("config key '" + key + "': unknown experiment '" + value +
                                  "' (generic, stable, growth, blowup)");
        } else if (key == "experiment.memory_mode") {
            if (value == "recursion") config.time.memory_mode = MemoryMode::Recursion;
            else if (value == "history") config.time.memory_mode = MemoryMode::History;
            else
                throw ConfigError("config key '" + key + "': unknown memory mode '" + value +
                                  "' (recursion, history)");
        } else if (key == "experiment.output_dir") {
            // handled by the caller
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    if (config.time.dt <= 0.0) throw ConfigError("time.dt must be positive");
    if (config.time.t_final <= 0.0) throw ConfigError("time.t_final must be positive");
    if (config.time.sampling_stride < 1)
        throw ConfigError("time.sampling_stride must be >= 1");
    build_model(config.model);  // run every model/experiment gate now
    return config;
}

}  // namespace

ParsedConfig parse_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot open config file '" + path + "'");

    ParsedConfig parsed;
    std::vector<std::pair<double, double>> kernel_terms;
    std::string line, section;
    int line_number = 0;
    while (std::getline(file, line)) {
        ++line_number;
        const size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(path + ":" + std::to_string(line_number) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "kernel" && section != "model" && section != "initial" &&
                section != "time" && section != "experiment")
                throw ConfigError(path + ":" + std::to_string(line_number) +
                                  ": unknown section [" + section + "]");
            continue;
        }
        const size_t equals = line.find('=');
        if (equals == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_number) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, equals));
        const std::string value = trim(line.substr(equals + 1));
        if (section.empty())
            throw ConfigError(path + ":" + std::to_string(line_number) +
                              ": key outside any section");

        if (section == "kernel") {
            if (key != "term")
                throw ConfigError(path + ":" + std::to_string(line_number) +
                                  ": [kernel] only holds 'term = a b' lines");
            std::string pair = value;
            std::replace(pair.begin(), pair.end(), ',', ' ');
            std::istringstream stream(pair);
            double a = 0.0, b = 0.0;
            std::string rest;
            if (!(stream >> a >> b) || (stream >> rest))
                throw ConfigError(path + ":" + std::to_string(line_number) +
                                  ": kernel term needs exactly two numbers");
            kernel_terms.emplace_back(a, b);
            continue;
        }

        const std::string full_key = section + "." + key;
        std::vector<double> range;
        if (parse_range(full_key, value, range)) {
            parsed.axes.push_back({full_key, range});
            std::ostringstream first;
            first.precision(17);
            first << range.front();
            parsed.entries[full_key] = first.str();
            continue;
        }
        parsed.entries[full_key] = value;
    }

    if (parsed.axes.size() > 2)
        throw ConfigError("at most 2 ranged keys are supported, got " +
                          std::to_string(parsed.axes.size()));
    std::sort(parsed.axes.begin(), parsed.axes.end(),
              [](const SweepAxis& a, const SweepAxis& b) { return a.key < b.key; });
    if (auto it = parsed.entries.find("experiment.output_dir"); it != parsed.entries.end())
        parsed.output_dir = it->second;

    SimulationConfig with_kernel = build_config(parsed.entries, kernel_terms);
    parsed.sim = with_kernel;
    return parsed;
}

SimulationConfig apply_overrides(const ParsedConfig& parsed,
                                 const std::map<std::string, double>& overrides) {
    std::map<std::string, std::string> entries = parsed.entries;
    for (const auto& [key, value] : overrides) {
        std::ostringstream text;
        text.precision(17);
        text << value;
        entries[key] = text.str();
    }
    std::vector<std::pair<double, double>> kernel_terms;
    for (const auto& term : parsed.sim.model.kernel.terms)
        kernel_terms.emplace_back(term.amplitude, term.rate);
    return build_config(entries, kernel_terms);
}

}  // namespace viscowave
