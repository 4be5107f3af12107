#include "qflab/lab/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qflab::lab {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

int int_field(const Json& j, const char* key, int lo, int hi) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) bad(std::string(key) + " must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) bad(std::string(key) + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

double double_field(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number()) bad(std::string(key) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(std::string(key) + " must be finite");
  return x;
}

/// Keeps the JSON output free of non-finite numbers, which have no JSON encoding.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? Json("nan") : Json(v > 0 ? "inf" : "-inf");
}

}  // namespace

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
  if (!extra.contains(key)) return fallback;
  if (!extra.at(key).is_number_integer()) bad(key + " must be an integer");
  return extra.at(key).get<int>();
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  if (!extra.contains(key)) return fallback;
  if (!extra.at(key).is_number()) bad(key + " must be a number");
  return extra.at(key).get<double>();
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  if (!extra.contains(key)) return fallback;
  if (!extra.at(key).is_boolean()) bad(key + " must be a boolean");
  return extra.at(key).get<bool>();
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "p") {
      c.p = int_field(j, "p", 3, 13);
      FieldPrime check(c.p);
      (void)check;
    } else if (key == "n") {
      c.n = int_field(j, "n", 1, 20);
    } else if (key == "n_values") {
      if (!value.is_array() || value.empty()) bad("n_values must be a non-empty array");
      c.n_values.clear();
      for (const auto& v : value) {
        if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > 20) bad("n_values entries must be integers in [1, 20]");
        c.n_values.push_back(v.get<int>());
      }
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
        bad("seed must be a non-negative integer");
      }
      c.seed = value.get<std::uint64_t>();
    } else if (key == "trials") {
      c.trials = int_field(j, "trials", 1, 1000000);
    } else if (key == "samples") {
      c.samples = int_field(j, "samples", 1, 10000000);
    } else if (key == "tolerance") {
      c.tolerance = double_field(j, "tolerance");
      if (c.tolerance < 0) bad("tolerance must be non-negative");
    } else if (key == "epsilon") {
      c.epsilon = double_field(j, "epsilon");
      if (c.epsilon < 0) bad("epsilon must be non-negative");
    } else if (key == "threads") {
      c.threads = int_field(j, "threads", 1, 256);
    } else if (key == "out") {
      if (!value.is_string()) bad("out must be a string");
      c.out = value.get<std::string>();
    } else if (key == "factor") {
      c.factor = value;
    } else if (key == "set") {
      c.set = value;
    } else {
      c.extra[key] = value;
    }
  }
  if (c.n_values.empty()) c.n_values.push_back(c.n);
  for (int n : c.n_values) {
    if (std::pow(static_cast<double>(c.p), n) > static_cast<double>(kDefaultEnumerationCap)) {
      bad("p^n exceeds the enumeration cap 2^20");
    }
  }
  return c;
}

Json ExperimentConfig::echo() const {
  Json j{{"p", p},           {"n", n},         {"n_values", n_values}, {"seed", seed},
         {"trials", trials}, {"samples", samples}, {"tolerance", tolerance}, {"epsilon", epsilon}};
  if (!factor.is_null()) j["factor"] = factor;
  if (!set.is_null()) j["set"] = set;
  for (const auto& [key, value] : extra.items()) j[key] = value;
  return j;
}

Json merge_config(Json base, const Json& overlay) {
  if (overlay.is_null()) return base;
  if (!overlay.is_object()) bad("config must be a JSON object");
  if (base.is_null()) base = Json::object();
  for (const auto& [key, value] : overlay.items()) base[key] = value;
  return base;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Info: return "info";
    case Verdict::Degenerate: return "degenerate";
  }
  return "info";
}

TrialRecord hard_check(std::size_t index, std::string check, const Json& inputs, double observed, double bound,
                       Json details) {
  TrialRecord r;
  r.index = index;
  r.check = std::move(check);
  r.digest = digest(inputs);
  r.observed = observed;
  r.bound = bound;
  r.verdict = observed <= bound ? Verdict::Pass : Verdict::Fail;
  r.details = std::move(details);
  return r;
}

TrialRecord info_record(std::size_t index, std::string check, const Json& inputs, double observed, double bound,
                        Json details) {
  TrialRecord r = hard_check(index, std::move(check), inputs, observed, bound, std::move(details));
  r.verdict = Verdict::Info;
  return r;
}

TrialRecord degenerate_record(std::size_t index, std::string check, const Json& inputs, const std::string& reason) {
  TrialRecord r;
  r.index = index;
  r.check = std::move(check);
  r.digest = digest(inputs);
  r.observed = std::numeric_limits<double>::quiet_NaN();
  r.bound = std::numeric_limits<double>::quiet_NaN();
  r.verdict = Verdict::Degenerate;
  r.details = Json{{"reason", reason}};
  return r;
}

bool is_non_increasing(const std::vector<double>& y, double wobble) {
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (!(y[i] <= (1.0 + wobble) * y[i - 1] + 1e-12)) return false;
  }
  return true;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = std::min(x.size(), y.size());
  if (k < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

Trend make_trend(std::string label, std::vector<double> x, std::vector<double> y) {
  Trend t;
  t.label = std::move(label);
  t.non_increasing = is_non_increasing(y);
  t.slope = least_squares_slope(x, y);
  t.x = std::move(x);
  t.y = std::move(y);
  return t;
}

Report::Report(std::string experiment, std::string anchor, Json config)
    : experiment_(std::move(experiment)), anchor_(std::move(anchor)), config_(std::move(config)) {}

void Report::add(TrialRecord record) { records_.push_back(std::move(record)); }

void Report::add(const std::vector<TrialRecord>& records) {
  records_.insert(records_.end(), records.begin(), records.end());
}

void Report::add_trend(Trend trend) { trends_.push_back(std::move(trend)); }

void Report::note(const std::string& key, Json value) { notes_[key] = std::move(value); }

std::size_t Report::hard_checks() const {
  return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [](const TrialRecord& r) {
    return r.verdict == Verdict::Pass || r.verdict == Verdict::Fail;
  }));
}

std::size_t Report::hard_failures() const {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [](const TrialRecord& r) { return r.verdict == Verdict::Fail; }));
}

bool Report::trends_ok() const {
  return std::all_of(trends_.begin(), trends_.end(), [](const Trend& t) { return t.non_increasing; });
}

Json Report::to_json() const {
  Json trials = Json::array();
  double max_margin = -std::numeric_limits<double>::infinity();
  std::size_t degenerate = 0, info = 0;
  for (const auto& r : records_) {
    trials.push_back(Json{{"index", r.index},
                          {"check", r.check},
                          {"digest", r.digest},
                          {"observed", number(r.observed)},
                          {"bound", number(r.bound)},
                          {"margin", number(r.margin())},
                          {"verdict", to_string(r.verdict)},
                          {"details", r.details}});
    if (r.verdict == Verdict::Pass || r.verdict == Verdict::Fail) max_margin = std::max(max_margin, r.margin());
    if (r.verdict == Verdict::Degenerate) ++degenerate;
    if (r.verdict == Verdict::Info) ++info;
  }
  Json trends = Json::array();
  Json slopes = Json::array();
  for (const auto& t : trends_) {
    Json xs = Json::array(), ys = Json::array();
    for (double v : t.x) xs.push_back(number(v));
    for (double v : t.y) ys.push_back(number(v));
    trends.push_back(Json{{"label", t.label},
                          {"x", xs},
                          {"y", ys},
                          {"verdict", t.non_increasing ? "non-increasing" : "not-monotone"},
                          {"slope", number(t.slope)}});
    slopes.push_back(number(t.slope));
  }
  const std::size_t checks = hard_checks();
  const std::size_t failures = hard_failures();
  Json aggregate{{"hard_checks", checks},
                 {"failures", failures},
                 {"pass_rate", checks ? number(static_cast<double>(checks - failures) / static_cast<double>(checks))
                                      : Json(nullptr)},
                 {"max_margin", checks ? number(max_margin) : Json(nullptr)},
                 {"info_records", info},
                 {"degenerate_records", degenerate},
                 {"trend_slopes", slopes},
                 {"trends_non_increasing", trends_ok()}};
  return Json{{"schema", kReportSchema},
              {"experiment", experiment_},
              {"anchor", anchor_},
              {"config", config_},
              {"status", passed() ? "pass" : "fail"},
              {"aggregate", aggregate},
              {"trends", trends},
              {"notes", notes_},
              {"trials", trials}};
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

}  // namespace qflab::lab
