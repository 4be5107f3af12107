#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "common.hpp"
#include "directions.hpp"
#include "qflab/local_norms.hpp"
#include "qflab/pattern_ops.hpp"

namespace qflab::lab {

namespace {

using namespace detail;

// ---------------------------------------------------------------------------
// Atom and level-set sizes.

void run_atom_sizes(const ExperimentConfig& c, Report& r) {
  std::vector<double> xs, ys;
  std::size_t idx = 0;
  for (int n : c.n_values) {
    const Space sp(c.p, n);
    const QuadraticFactor f = config_factor(c, sp, 0, 1);
    const double expected = std::pow(static_cast<double>(c.p), n - f.label_length());
    std::uint64_t total = 0, misplaced = 0;
    double worst = 0.0;
    Json sizes = Json::array();
    for (std::uint32_t code = 0; code < f.num_labels(); ++code) {
      const auto& mem = f.members(code);
      total += mem.size();
      for (Index x : mem) misplaced += f.label_code(x) != code;
      worst = std::max(worst, std::abs(static_cast<double>(mem.size()) / expected - 1.0));
      sizes.push_back(mem.size());
    }
    const Json in{{"p", c.p}, {"n", n}, {"factor", to_json(f)}};
    r.add(hard_check(idx++, "partition", in,
                     static_cast<double>(misplaced) + std::abs(static_cast<double>(total) - sp.size()), 0.0,
                     Json{{"sizes", sizes}}));
    r.add(info_record(idx++, "size-deviation", in, worst,
                      std::pow(static_cast<double>(c.p), f.label_length() - f.rank() / 2.0),
                      Json{{"rank", f.rank()}}));
    xs.push_back(n);
    ys.push_back(worst);
  }
  r.add_trend(make_trend("max |size * p^(l+q-n) - 1|", xs, ys));
}

double est_atom_sizes(const ExperimentConfig& c) {
  double total = 0;
  for (int n : c.n_values) total += 3 * group_size(c.p, n);
  return total;
}

void run_level_sizes(const ExperimentConfig& c, Report& r) {
  std::vector<double> xs, ys;
  std::size_t idx = 0;
  for (int n : c.n_values) {
    const Space sp(c.p, n);
    const QuadraticFactor f = config_factor(c, sp, 0, 1);
    if (f.q() == 0) throw Error(ErrorKind::ConfigError, "bil-level-sizes needs q >= 1");
    const double universe = sp.size() * static_cast<double>(sp.size());
    const double expected = universe / std::pow(static_cast<double>(c.p), f.q());
    std::uint64_t total = 0;
    double worst = 0.0;
    Json sizes = Json::array();
    const auto labels = static_cast<std::uint32_t>(ipow(c.p, f.q()));
    for (std::uint32_t code = 0; code < labels; ++code) {
      const BilinearLevelSet b = f.level_set(decode_label(code, c.p, f.q()));
      total += b.size;
      worst = std::max(worst, std::abs(static_cast<double>(b.size) / expected - 1.0));
      sizes.push_back(b.size);
    }
    const Json in{{"p", c.p}, {"n", n}, {"factor", to_json(f)}};
    r.add(hard_check(idx++, "sizes-sum-to-p^2n", in, std::abs(static_cast<double>(total) - universe), 0.0,
                     Json{{"sizes", sizes}}));
    r.add(info_record(idx++, "size-deviation", in, worst, std::pow(static_cast<double>(c.p), f.q() - f.rank()),
                      Json{{"rank", f.rank()}}));
    xs.push_back(n);
    ys.push_back(worst);
  }
  r.add_trend(make_trend("max |size * p^q / p^2n - 1|", xs, ys));
}

double est_level_sizes(const ExperimentConfig& c) {
  double total = 0;
  for (int n : c.n_values) total += group_size(c.p, n) * (2 + std::pow(3.0, 1));
  return total;
}

// ---------------------------------------------------------------------------
// Configuration averages of the characteristic measures.

void run_genbilsums(const ExperimentConfig& c, Report& r) {
  std::vector<double> xs, y1, y2;
  std::size_t idx = 0;
  for (int n : c.n_values) {
    const Space sp(c.p, n);
    const QuadraticFactor f = config_factor(c, sp, 1, 1);
    const auto dirs = direction_list(f, static_cast<std::size_t>(c.samples), c.seed, static_cast<std::uint64_t>(n));
    const SubsetBitmask full = SubsetBitmask::full(sp);
    const GroupFunction one = GroupFunction::constant(sp, 1.0);
    struct Out {
      bool degenerate;
      std::string reason;
      double single, doubled;
    };
    const auto res = parallel_map<Out>(dirs.size(), [&](std::size_t k) {
      const LocalContext3 ctx(f, dirs[k]);
      if (ctx.degenerate()) return Out{true, ctx.degeneracy_reason(), 0, 0};
      const double w = weighted_ternary_density(f, dirs[k], full).weight;
      const double u = std::pow(local_u3_norm(ctx, one), 8);
      return Out{false, "", w, u};
    });
    CompensatedSum s1, s2;
    std::size_t used = 0;
    for (std::size_t k = 0; k < res.size(); ++k) {
      const Json in{{"n", n}, {"d", to_json(dirs[k])}};
      if (res[k].degenerate) {
        r.add(degenerate_record(idx++, "configuration-average", in, res[k].reason));
        continue;
      }
      ++used;
      s1.add(std::abs(res[k].single - 1.0));
      s2.add(std::abs(res[k].doubled - 1.0));
      r.add(info_record(idx++, "configuration-average", in, std::abs(res[k].doubled - 1.0), 0.0,
                        Json{{"ijk_1", res[k].single}, {"ijk_2", res[k].doubled}}));
    }
    if (used == 0) continue;
    xs.push_back(n);
    y1.push_back(s1.value() / static_cast<double>(used));
    y2.push_back(s2.value() / static_cast<double>(used));
  }
  r.add_trend(make_trend("mean |E prod mu - 1|, |I|=|J|=|K|=1", xs, y1));
  r.add_trend(make_trend("mean |E prod mu - 1|, |I|=|J|=|K|=2", xs, y2));
}

double est_genbilsums(const ExperimentConfig& c) {
  double total = 0;
  for (int n : c.n_values) {
    const int ell = c.get_int("ell", 1), q = c.get_int("q", 1);
    const double b = atom_estimate(c.p, n, ell, q);
    const double pq = std::pow(static_cast<double>(c.p), q);
    const double per = b * b / pq + u3_local_estimate(b, pq);
    total += direction_count(c.p, ell, q, static_cast<std::size_t>(c.samples)) * per + 8 * group_size(c.p, n);
  }
  return total;
}

/// Triples (i, j, k) of atom positions whose pairs all lie in the prescribed level sets.
std::vector<std::array<std::size_t, 3>> admissible_triples(const LocalContext3& ctx) {
  std::vector<std::array<std::size_t, 3>> out;
  const BitRows& a12 = ctx.adjacency(0);
  const BitRows& a13 = ctx.adjacency(1);
  const BitRows& a23 = ctx.adjacency(2);
  for (std::size_t i = 0; i < a12.rows(); ++i)
    for (std::size_t j = 0; j < a12.cols(); ++j) {
      if (!a12.test(i, j)) continue;
      for (std::size_t k = 0; k < a13.cols(); ++k)
        if (a13.test(i, k) && a23.test(j, k)) out.push_back({i, j, k});
    }
  count_terms(a12.rows() * a12.cols());
  return out;
}

std::size_t popcount_and(std::initializer_list<const std::uint64_t*> rows, std::size_t words) {
  std::size_t total = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t v = ~std::uint64_t{0};
    for (const auto* r : rows) v &= r[w];
    total += static_cast<std::size_t>(std::popcount(v));
  }
  return total;
}

/// The nine-factor average g(x', y', z') over x, y, z in the three atoms.
double config_g(const LocalContext3& ctx, const std::array<std::size_t, 3>& t) {
  const BitRows& a12 = ctx.adjacency(0);
  const BitRows& a13 = ctx.adjacency(1);
  const BitRows& a23 = ctx.adjacency(2);
  const auto [ip, jp, kp] = t;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < a12.rows(); ++i) {
    if (!a12.test(i, jp) || !a13.test(i, kp)) continue;
    for (std::size_t j = 0; j < a12.cols(); ++j) {
      if (!a12.test(i, j) || !a12.test(ip, j) || !a23.test(j, kp)) continue;
      count += popcount_and({a13.row(i), a23.row(j), a13.row(ip), a23.row(jp)}, a13.words());
    }
  }
  count_terms(a12.rows() * a12.cols());
  const double scale = std::pow(ctx.mu(0) * ctx.mu(1) * ctx.mu(2), 3) /
                       (static_cast<double>(ctx.atom(0).size()) * ctx.atom(1).size() * ctx.atom(2).size());
  return scale * static_cast<double>(count);
}

/// h(x0, y0, z0) = E_{y1, z1} mu12(x0,y1) mu13(x0,z1) prod over (j,k) != (0,0) of mu23(y_j, z_k).
double config_h(const LocalContext3& ctx, const std::array<std::size_t, 3>& t) {
  const BitRows& a12 = ctx.adjacency(0);
  const BitRows& a13 = ctx.adjacency(1);
  const BitRows& a23 = ctx.adjacency(2);
  const auto [i0, j0, k0] = t;
  std::uint64_t count = 0;
  for (std::size_t j1 = 0; j1 < a12.cols(); ++j1) {
    if (!a12.test(i0, j1) || !a23.test(j1, k0)) continue;
    count += popcount_and({a13.row(i0), a23.row(j0), a23.row(j1)}, a13.words());
  }
  count_terms(a12.cols());
  const double scale = ctx.mu(0) * ctx.mu(1) * std::pow(ctx.mu(2), 3) /
                       (static_cast<double>(ctx.atom(1).size()) * ctx.atom(2).size());
  return scale * static_cast<double>(count);
}

void run_config_regularity(const ExperimentConfig& c, Report& r) {
  const int per = c.get_int("triples", 8);
  const std::vector<double> thresholds{0.5, 0.25, 0.1};
  std::vector<double> xs, yg, yh;
  std::size_t idx = 0;
  Json distribution = Json::array();
  for (int n : c.n_values) {
    const Space sp(c.p, n);
    const QuadraticFactor f = config_factor(c, sp, 1, 1);
    const auto dirs = direction_list(f, static_cast<std::size_t>(c.samples), c.seed, 1000u + static_cast<unsigned>(n));
    struct Out {
      std::string reason;
      std::vector<double> g, h;
    };
    const auto res = parallel_map<Out>(dirs.size(), [&](std::size_t k) {
      const LocalContext3 ctx(f, dirs[k]);
      if (ctx.degenerate()) return Out{ctx.degeneracy_reason(), {}, {}};
      const auto triples = admissible_triples(ctx);
      if (triples.empty()) return Out{"no admissible triple", {}, {}};
      Rng rng = trial_rng(c.seed, 1100u + static_cast<unsigned>(n), k);
      Out o;
      for (int s = 0; s < per; ++s) {
        const auto& t = triples[rng.below(triples.size())];
        o.g.push_back(config_g(ctx, t));
        o.h.push_back(config_h(ctx, t));
      }
      return o;
    });
    std::vector<double> dev_g, dev_h;
    for (std::size_t k = 0; k < res.size(); ++k) {
      const Json in{{"n", n}, {"d", to_json(dirs[k])}};
      if (!res[k].reason.empty()) {
        r.add(degenerate_record(idx++, "configuration-functions", in, res[k].reason));
        continue;
      }
      double worst = 0;
      for (double g : res[k].g) {
        dev_g.push_back(std::abs(g - 1.0));
        worst = std::max(worst, std::abs(g - 1.0));
      }
      for (double h : res[k].h) dev_h.push_back(std::abs(h - 1.0));
      r.add(info_record(idx++, "configuration-functions", in, worst, 0.0, Json{{"g", res[k].g}, {"h", res[k].h}}));
    }
    if (dev_g.empty()) continue;
    const auto mean = [](const std::vector<double>& v) {
      CompensatedSum s;
      for (double x : v) s.add(x);
      return s.value() / static_cast<double>(v.size());
    };
    Json row{{"n", n}, {"samples", dev_g.size()}, {"mean_abs_g_minus_1", mean(dev_g)}, {"mean_abs_h_minus_1", mean(dev_h)}};
    for (double th : thresholds) {
      const auto frac = [&](const std::vector<double>& v) {
        return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x > th; })) /
               static_cast<double>(v.size());
      };
      row["g_exceeding_" + std::to_string(th).substr(0, 4)] = frac(dev_g);
      row["h_exceeding_" + std::to_string(th).substr(0, 4)] = frac(dev_h);
    }
    distribution.push_back(row);
    xs.push_back(n);
    yg.push_back(mean(dev_g));
    yh.push_back(mean(dev_h));
  }
  r.note("distribution", distribution);
  r.add_trend(make_trend("mean |g - 1| over admissible triples", xs, yg));
  r.add_trend(make_trend("mean |h - 1| over admissible triples", xs, yh));
}

double est_config_regularity(const ExperimentConfig& c) {
  double total = 0;
  const int per = c.get_int("triples", 8);
  for (int n : c.n_values) {
    const int ell = c.get_int("ell", 1), q = c.get_int("q", 1);
    const double b = atom_estimate(c.p, n, ell, q);
    const double d = direction_count(c.p, ell, q, static_cast<std::size_t>(c.samples));
    total += d * (b * b + per * (b * b + b)) + 8 * group_size(c.p, n);
  }
  return total;
}

}  // namespace

void register_factor(std::vector<Experiment>& out) {
  out.push_back({"atom-sizes", "|B| = (1 + O(p^{l+q-r/2})) p^{n-l-q}",
                 Json{{"p", 3}, {"n_values", {2, 4, 6, 8}}}, run_atom_sizes, est_atom_sizes});
  out.push_back({"bil-level-sizes", "Size of a bilinear level set", Json{{"p", 3}, {"n_values", {2, 4, 6, 8}}},
                 run_level_sizes, est_level_sizes});
  out.push_back({"genbilsums-trend", "The same holds whenever any instance of mu is replaced by 1",
                 Json{{"p", 3}, {"n_values", {4, 5, 6, 7}}, {"samples", 24}}, run_genbilsums, est_genbilsums});
  out.push_back({"config-regularity-trend", "for all but an O(p^{5l+18q-tau/4})-proportion",
                 Json{{"p", 3}, {"n_values", {3, 4, 5, 6}}, {"samples", 12}, {"triples", 8}}, run_config_regularity,
                 est_config_regularity});
}

}  // namespace qflab::lab
