#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qflab/lab/json_io.hpp"

namespace qflab::lab {

inline constexpr const char* kReportSchema = "qflab-report/1";
/// Relative wobble tolerated between consecutive points of a non-increasing trend.
inline constexpr double kTrendWobble = 0.05;

struct ExperimentConfig {
  int p = 3;
  int n = 3;
  std::vector<int> n_values;
  std::uint64_t seed = 1;
  int trials = 10;
  int samples = 2000;
  double tolerance = kDefaultTolerance;
  double epsilon = 0.0;
  int threads = 1;
  std::string out;
  Json factor;
  Json set;
  /// Experiment-specific keys not listed above.
  Json extra = Json::object();

  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Parses a merged JSON object; throws ConfigError on malformed values.
  static ExperimentConfig from_json(const Json& j);
  /// Config echo for reports; omits the thread count and the output path.
  Json echo() const;
};

/// Merges `overlay` into `base` key by key at the top level.
Json merge_config(Json base, const Json& overlay);

enum class Verdict { Pass, Fail, Info, Degenerate };
const char* to_string(Verdict v);

struct TrialRecord {
  std::size_t index = 0;
  std::string check;
  std::string digest;
  double observed = 0.0;
  double bound = 0.0;
  Verdict verdict = Verdict::Info;
  Json details = Json::object();

  double margin() const { return observed - bound; }
};

/// Hard check: passes iff observed <= bound.
TrialRecord hard_check(std::size_t index, std::string check, const Json& inputs, double observed, double bound,
                       Json details = Json::object());
TrialRecord info_record(std::size_t index, std::string check, const Json& inputs, double observed,
                        double bound = 0.0, Json details = Json::object());
TrialRecord degenerate_record(std::size_t index, std::string check, const Json& inputs, const std::string& reason);

struct Trend {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool non_increasing = true;
  double slope = 0.0;
};

Trend make_trend(std::string label, std::vector<double> x, std::vector<double> y);
/// y[i+1] <= (1 + wobble) y[i] + 1e-12 for all i.
bool is_non_increasing(const std::vector<double>& y, double wobble = kTrendWobble);
/// Least-squares slope of y against x; 0 for fewer than two points.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

class Report {
 public:
  Report(std::string experiment, std::string anchor, Json config);

  void add(TrialRecord record);
  void add(const std::vector<TrialRecord>& records);
  void add_trend(Trend trend);
  void note(const std::string& key, Json value);

  const std::string& experiment() const { return experiment_; }
  const std::vector<TrialRecord>& records() const { return records_; }
  const std::vector<Trend>& trends() const { return trends_; }
  const Json& notes() const { return notes_; }

  std::size_t hard_checks() const;
  std::size_t hard_failures() const;
  bool passed() const { return hard_failures() == 0; }
  bool trends_ok() const;

  Json to_json() const;
  /// Pretty-printed JSON followed by a newline.
  std::string dump() const;

 private:
  std::string experiment_;
  std::string anchor_;
  Json config_;
  std::vector<TrialRecord> records_;
  std::vector<Trend> trends_;
  Json notes_ = Json::object();
};

}  // namespace qflab::lab
