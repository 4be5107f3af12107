#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qflab/lab/report.hpp"

namespace qflab::lab {

struct Experiment {
  std::string name;
  std::string anchor;
  Json defaults;
  std::function<void(const ExperimentConfig&, Report&)> run;
  /// Predicted number of innermost terms, in the units of count_terms.
  std::function<double(const ExperimentConfig&)> estimate;
};

const std::vector<Experiment>& experiments();
/// Throws UnknownExperiment.
const Experiment& find_experiment(const std::string& name);

/// Experiment defaults, then the config file, then the command-line overrides.
ExperimentConfig resolve_config(const Experiment& e, const Json& file, const Json& overrides);

/// Cap on the predicted work of a single run.
inline constexpr double kRunTermCap = 2e11;

struct RunOutcome {
  Report report;
  double estimate = 0.0;
  std::uint64_t terms = 0;
};

/// Validates the estimate against kRunTermCap, applies the thread count and runs.
RunOutcome run_experiment(const Experiment& e, const ExperimentConfig& config);

void register_spectral(std::vector<Experiment>& out);
void register_factor(std::vector<Experiment>& out);
void register_local(std::vector<Experiment>& out);
void register_pattern(std::vector<Experiment>& out);
void register_combinatorics(std::vector<Experiment>& out);

}  // namespace qflab::lab
