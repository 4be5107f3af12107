#include "qflab/lab/registry.hpp"

#include <algorithm>
#include <sstream>

namespace qflab::lab {

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> out;
    register_spectral(out);
    register_factor(out);
    register_local(out);
    register_pattern(out);
    register_combinatorics(out);
    return out;
  }();
  return all;
}

const Experiment& find_experiment(const std::string& name) {
  const auto& all = experiments();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Experiment& e) { return e.name == name; });
  if (it == all.end()) throw Error(ErrorKind::UnknownExperiment, "no experiment named \"" + name + "\"");
  return *it;
}

ExperimentConfig resolve_config(const Experiment& e, const Json& file, const Json& overrides) {
  return ExperimentConfig::from_json(merge_config(merge_config(e.defaults, file), overrides));
}

RunOutcome run_experiment(const Experiment& e, const ExperimentConfig& config) {
  const double estimate = e.estimate(config);
  if (estimate > kRunTermCap) {
    std::ostringstream msg;
    msg << "estimated " << estimate << " terms exceeds the run cap " << kRunTermCap;
    throw Error(ErrorKind::CapExceeded, msg.str());
  }
  const int previous = thread_count();
  set_thread_count(config.threads);
  reset_term_counter();
  Report report(e.name, e.anchor, config.echo());
  try {
    e.run(config, report);
  } catch (...) {
    set_thread_count(previous);
    throw;
  }
  set_thread_count(previous);
  return RunOutcome{std::move(report), estimate, terms_counted()};
}

}  // namespace qflab::lab
