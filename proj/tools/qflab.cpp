#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qflab/lab/registry.hpp"

namespace {

using qflab::Error;
using qflab::ErrorKind;
using namespace qflab::lab;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

Json read_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, std::string("config file is not valid JSON: ") + e.what());
  }
}

struct Overrides {
  std::optional<int> p, n, trials, threads, samples;
  std::optional<std::uint64_t> seed;
  std::string out;

  Json to_json() const {
    Json j = Json::object();
    if (p) j["p"] = *p;
    if (n) j["n"] = *n;
    if (trials) j["trials"] = *trials;
    if (threads) j["threads"] = *threads;
    if (samples) j["samples"] = *samples;
    if (seed) j["seed"] = *seed;
    if (!out.empty()) j["out"] = out;
    return j;
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--p", o.p, "prime modulus");
  cmd->add_option("--n", o.n, "dimension");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--trials", o.trials, "number of trials");
  cmd->add_option("--samples", o.samples, "direction sampling budget");
  cmd->add_option("--threads", o.threads, "worker threads");
}

int is_config_error(ErrorKind k) {
  return k == ErrorKind::ConfigError || k == ErrorKind::CapExceeded || k == ErrorKind::UnknownExperiment ||
         k == ErrorKind::InvalidArgument;
}

int cmd_list() {
  for (const auto& e : experiments()) std::cout << e.name << "\t" << e.anchor << "\n";
  return kExitPass;
}

int cmd_estimate(const std::string& name, const std::string& config, const Overrides& o) {
  const Experiment& e = find_experiment(name);
  const ExperimentConfig c = resolve_config(e, read_config(config), o.to_json());
  const double estimate = e.estimate(c);
  std::cout << Json{{"experiment", name}, {"estimated_terms", estimate}, {"cap", kRunTermCap},
                    {"within_cap", estimate <= kRunTermCap}}
                   .dump(2)
            << "\n";
  return estimate <= kRunTermCap ? kExitPass : kExitConfig;
}

int cmd_run(const std::string& name, const std::string& config, const Overrides& o) {
  const Experiment& e = find_experiment(name);
  const ExperimentConfig c = resolve_config(e, read_config(config), o.to_json());
  std::cerr << "estimated terms: " << e.estimate(c) << "\n";
  const RunOutcome outcome = run_experiment(e, c);
  std::cerr << "counted terms: " << outcome.terms << "\n";
  const std::string text = outcome.report.dump();
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.out, std::ios::binary);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write report to " + c.out);
    out << text;
  }
  const Report& r = outcome.report;
  std::cerr << r.experiment() << ": " << r.hard_checks() << " hard checks, " << r.hard_failures() << " failed"
            << (r.trends().empty() ? "" : r.trends_ok() ? ", trends non-increasing" : ", a trend increased") << "\n";
  return r.passed() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on quadratic Fourier analysis over F_p^n"};
  app.require_subcommand(1);

  app.add_subcommand("list", "list experiments with their anchors");

  std::string run_name, run_config;
  Overrides run_over;
  CLI::App* run = app.add_subcommand("run", "run an experiment and write its report");
  run->add_option("experiment", run_name, "experiment name")->required();
  run->add_option("--config", run_config, "JSON config file");
  run->add_option("--out", run_over.out, "report path (stdout when absent)");
  add_overrides(run, run_over);

  std::string est_name, est_config;
  Overrides est_over;
  CLI::App* est = app.add_subcommand("estimate", "print the predicted cost of a run");
  est->add_option("experiment", est_name, "experiment name")->required();
  est->add_option("--config", est_config, "JSON config file");
  add_overrides(est, est_over);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    if (app.got_subcommand("estimate")) return cmd_estimate(est_name, est_config, est_over);
    return cmd_run(run_name, run_config, run_over);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.kind()) ? kExitConfig : kExitFail;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed config value: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
