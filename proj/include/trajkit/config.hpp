// config.hpp
//
// Flat configuration file with one section per stage:
//
//     [pca]
//     ratio = 0.85
//     standardize = true
//
// Built-in defaults < config file < command-line flags.
#ifndef TRAJKIT_CONFIG_HPP_
#define TRAJKIT_CONFIG_HPP_

#include "trajkit/experiment.hpp"
#include "trajkit/fusion.hpp"
#include "trajkit/simgen.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace trajkit {

struct PipelineConfig {
    ExperimentConfig experiment;  // corpus, preprocess, pca, svm, mlp, adams, seed
    WindowConfig window;
    FlightScenario scenario;      // defaults for single-flight simulation
};

/// "section.key" -> raw value. Keys are lower-cased; blank lines and lines
/// starting with '#' or ';' are ignored.
using IniValues = std::map<std::string, std::string>;
IniValues parse_ini(const std::string& text, const std::string& source = "config");

/// Applies known keys; an unknown key or a malformed value throws
/// InvalidArgument naming it.
void apply_ini(PipelineConfig& config, const IniValues& values);

/// Checks every field against the preconditions of the stage that uses it.
void validate_config(const PipelineConfig& config);

/// Reads `path` if given, else $TRAJKIT_CONFIG if set, else the built-ins.
PipelineConfig load_config(const std::optional<std::filesystem::path>& path);

/// The full key set with current values, in file syntax.
std::string dump_config(const PipelineConfig& config);

} // namespace trajkit

#endif // TRAJKIT_CONFIG_HPP_
