#include <algorithm>
#include <cmath>
#include <limits>

#include "common.hpp"
#include "directions.hpp"
#include "qflab/local_norms.hpp"
#include "qflab/pattern_ops.hpp"

namespace qflab::lab {

namespace {

using namespace detail;

Json base_inputs(const ExperimentConfig& c, std::size_t i) {
  return Json{{"seed", c.seed}, {"trial", i}, {"p", c.p}, {"n", c.n}};
}

ComplexGrid random_grid(Rng& rng, const Space& sp, std::array<int, 3> dims) {
  ComplexGrid grid(dims, GroupFunction(sp));
  for (int i = 0; i < dims[0]; ++i)
    for (int j = 0; j < dims[1]; ++j)
      for (int k = 0; k < dims[2]; ++k) grid.at(i, j, k) = random_bounded_function(rng, sp);
  return grid;
}

/// All bipartite graphs with |U|, |V| <= max_part, every edge set included.
std::vector<PatternHypergraph> all_bipartite(int max_part) {
  std::vector<PatternHypergraph> out;
  for (int u = 1; u <= max_part; ++u)
    for (int v = 1; v <= max_part; ++v)
      for (int mask = 0; mask < (1 << (u * v)); ++mask) {
        std::vector<std::array<int, 2>> edges;
        for (int i = 0; i < u * v; ++i)
          if ((mask >> i) & 1) edges.push_back({i / v, i % v});
        out.push_back(PatternHypergraph::bipartite(u, v, edges));
      }
  return out;
}

/// All 3-partite 3-uniform hypergraphs with parts at most max_part.
std::vector<PatternHypergraph> all_ternary(int max_part) {
  std::vector<PatternHypergraph> out;
  for (int u = 1; u <= max_part; ++u)
    for (int v = 1; v <= max_part; ++v)
      for (int w = 1; w <= max_part; ++w)
        for (int mask = 0; mask < (1 << (u * v * w)); ++mask) {
          std::vector<std::array<int, 3>> edges;
          for (int i = 0; i < u * v * w; ++i)
            if ((mask >> i) & 1) edges.push_back({i / (v * w), (i / w) % v, i % w});
          out.push_back(PatternHypergraph::ternary(u, v, w, edges));
        }
  return out;
}

BipartiteLabels random_bipartite_labels(Rng& rng, const PatternHypergraph& f, int p, int ell) {
  BipartiteLabels l;
  for (int u = 0; u < f.u(); ++u) l.du.push_back(random_label(rng, p, ell));
  for (int v = 0; v < f.v(); ++v) l.dv.push_back(random_label(rng, p, ell));
  return l;
}

std::optional<LabelAssignment> random_assignment(Rng& rng, const PatternHypergraph& f, const QuadraticFactor& b,
                                                 int attempts = 64) {
  const int p = b.p(), len = b.label_length(), q = b.q();
  for (int t = 0; t < attempts; ++t) {
    LabelAssignment e;
    for (int u = 0; u < f.u(); ++u) e.a.push_back(random_label(rng, p, len));
    for (int v = 0; v < f.v(); ++v) e.b.push_back(random_label(rng, p, len));
    for (int w = 0; w < f.w(); ++w) e.c.push_back(random_label(rng, p, len));
    for (int k = 0; k < f.u() * f.v(); ++k) e.d_uv.push_back(random_label(rng, p, q));
    for (int k = 0; k < f.u() * f.w(); ++k) e.d_uw.push_back(random_label(rng, p, q));
    for (int k = 0; k < f.v() * f.w(); ++k) e.d_vw.push_back(random_label(rng, p, q));
    try {
      (void)ternary_normalization(f, b, e);
      return e;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::DegenerateContext) throw;
    }
  }
  return std::nullopt;
}

Json assignment_json(const LabelAssignment& e) {
  return Json{{"a", e.a}, {"b", e.b}, {"c", e.c}, {"d_uv", e.d_uv}, {"d_uw", e.d_uw}, {"d_vw", e.d_vw}};
}

/// A union of atoms of b, each atom kept with probability one half.
SubsetBitmask random_atom_union(Rng& rng, const QuadraticFactor& b) {
  SubsetBitmask a(b.space());
  for (std::uint32_t code = 0; code < b.num_labels(); ++code) {
    if (!rng.coin(0.5)) continue;
    for (Index x : b.members(code)) a.insert(x);
  }
  return a;
}

double ip2_local_estimate(double b, double pq) { return 64 * std::pow(b, 5) / std::pow(pq, 8) + b * b; }

// ---------------------------------------------------------------------------

void run_control_ip(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const int m = c.get_int("m", 2);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 31, i);
    const ComplexGrid grid = random_grid(rng, sp, {m, 1 << m, 1});
    double least = std::numeric_limits<double>::infinity();
    for (const auto& g : grid.cells()) least = std::min(least, u2_norm(g));
    return std::vector<TrialRecord>{
        hard_check(i, "ip-controlled-by-u2", base_inputs(c, i), std::abs(t_ip(m, grid)), least + c.tolerance)};
  }));
}

double est_control_ip(const ExperimentConfig& c) {
  const int m = c.get_int("m", 2);
  const double size = group_size(c.p, c.n);
  return c.trials * (std::pow(size, m) * (1 << m) * size * m + (1 << m) * 2 * size * size + (1 << m) * 2 * size);
}

void run_control_ip2(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const int m = c.get_int("m", 2);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 32, i);
    const ComplexGrid grid = random_grid(rng, sp, {m, m, 1 << (m * m)});
    double least = std::numeric_limits<double>::infinity();
    for (const auto& g : grid.cells()) least = std::min(least, u3_norm(g));
    return std::vector<TrialRecord>{
        hard_check(i, "ip2-controlled-by-u3", base_inputs(c, i), std::abs(t_ip2(m, grid)), least + c.tolerance)};
  }));
}

double est_control_ip2(const ExperimentConfig& c) {
  const double size = group_size(c.p, c.n);
  const int cells = 4 * 16;
  return c.trials * (ip2_local_estimate(size, 1.0) + cells * (size * size * size + 2 * size));
}

void run_control_ip_local(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const int m = c.get_int("m", 2);
  const int ell = c.get_int("ell", 1);
  const LinearFactor lin = default_factor(sp, ell, 0).linear();
  const PatternHypergraph k22 = PatternHypergraph::bipartite(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 33, i);
    std::vector<TrialRecord> out;
    const DirectionTuple2 d{random_label(rng, c.p, ell), random_label(rng, c.p, ell)};
    const LocalContext2 ctx(lin, d);
    const ComplexGrid grid = random_grid(rng, sp, {m, 1 << m, 1});
    double least = std::numeric_limits<double>::infinity();
    for (const auto& g : grid.cells()) least = std::min(least, local_u2_norm(ctx, g, LocalU2Method::Fourier));
    Json in = base_inputs(c, i);
    in["d"] = to_json(d);
    out.push_back(hard_check(i, "local-ip-controlled", in, std::abs(t_ip_local(m, lin, d, grid)), least + c.tolerance));
    const BipartiteLabels labels = random_bipartite_labels(rng, k22, c.p, ell);
    const ComplexGrid bgrid = random_grid(rng, sp, {2, 2, 1});
    double bleast = std::numeric_limits<double>::infinity();
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v) {
        const LocalContext2 cuv(lin, DirectionTuple2{labels.du[static_cast<std::size_t>(u)],
                                                     labels.dv[static_cast<std::size_t>(v)]});
        bleast = std::min(bleast, local_u2_norm(cuv, bgrid.at(u, v), LocalU2Method::Fourier));
      }
    Json bin = base_inputs(c, i);
    bin["du"] = labels.du;
    bin["dv"] = labels.dv;
    out.push_back(hard_check(i, "multi-local-controlled", bin, std::abs(t_bipartite(k22, lin, labels, bgrid)),
                             bleast + c.tolerance));
    return out;
  }));
}

double est_control_ip_local(const ExperimentConfig& c) {
  const int m = c.get_int("m", 2), ell = c.get_int("ell", 1);
  const double h = atom_estimate(c.p, c.n, ell, 0);
  const double fourier = 4 * (c.n - ell) * h * c.p + 2 * h;
  return c.trials * (std::pow(h, m) * (1 << m) * h * m + ((1 << m) + 4) * fourier + h * h * 2 * h * 2 +
                     ((1 << m) + 4) * 2 * group_size(c.p, c.n));
}

void run_control_ip2_trend(const ExperimentConfig& c, Report& r) {
  std::vector<double> xs, ys, ts, ns;
  std::size_t idx = 0;
  const int per = c.get_int("directions", 6);
  for (int n : c.n_values) {
    const Space sp(c.p, n);
    const QuadraticFactor fac = config_factor(c, sp, 1, 1);
    struct Out {
      std::string reason;
      Json inputs;
      double t = 0, norm = 0, weight = 0;
    };
    const auto res = parallel_map<Out>(static_cast<std::size_t>(per), [&](std::size_t k) {
      Rng rng = trial_rng(c.seed, 3400u + static_cast<unsigned>(n), k);
      const SubsetBitmask a = random_set(rng, sp, 0.5);
      const auto d = nondegenerate_direction3(rng, fac);
      if (!d) return Out{"no nondegenerate direction found", Json{{"n", n}, {"sample", k}}};
      const LocalContext3 ctx(fac, *d);
      const Json in{{"n", n}, {"sample", k}, {"d", to_json(*d)}};
      if (ctx.target_members().empty()) return Out{"target atom is empty", in};
      const GroupFunction g = balanced(a, density(a, ctx.target_members()));
      const ComplexGrid grid(std::array<int, 3>{2, 2, 16}, g);
      const ComplexGrid ones(std::array<int, 3>{2, 2, 16}, GroupFunction::constant(sp, 1.0));
      return Out{"", in, std::abs(t_ip2_local(2, fac, *d, grid)), local_u3_norm(ctx, g),
                 std::abs(t_ip2_local(2, fac, *d, ones))};
    });
    double worst = 0, tmax = 0, nmin = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& o : res) {
      if (!o.reason.empty()) {
        r.add(degenerate_record(idx++, "local-ip2-margin", o.inputs, o.reason));
        continue;
      }
      any = true;
      const double margin = std::max(0.0, o.t - o.norm);
      worst = std::max(worst, margin);
      tmax = std::max(tmax, o.t);
      nmin = std::min(nmin, o.norm);
      r.add(info_record(idx++, "local-ip2-margin", o.inputs, o.t, o.norm,
                        Json{{"margin", margin}, {"constant_one_value", o.weight}}));
    }
    if (!any) continue;
    xs.push_back(n);
    ys.push_back(worst);
    ts.push_back(tmax);
    ns.push_back(nmin);
  }
  r.add_trend(make_trend("max(0, |T| - ||f||_U3(d))", xs, ys));
  r.add_trend(make_trend("max |T|", xs, ts));
  r.note("min_local_u3_norm", ns);
}

double est_control_ip2_trend(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1), q = c.get_int("q", 1);
  const double pq = std::pow(static_cast<double>(c.p), q);
  double total = 0;
  for (int n : c.n_values) {
    const double b = atom_estimate(c.p, n, ell, q);
    total += c.get_int("directions", 6) *
             (2 * ip2_local_estimate(b, pq) + u3_local_estimate(b, pq) + 4 * group_size(c.p, n));
  }
  return total;
}

void run_counting_binary(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const int ell = c.get_int("ell", 1);
  const LinearFactor lin = default_factor(sp, ell, 0).linear();
  const auto graphs = all_bipartite(c.get_int("max_part", 2));
  const auto sets_count = static_cast<std::size_t>(c.get_int("sets", 20));
  std::vector<SubsetBitmask> sets;
  for (std::size_t s = 0; s < sets_count; ++s) {
    Rng rng = trial_rng(c.seed, 35, s);
    sets.push_back(random_set(rng, sp, 0.5));
  }
  r.add(parallel_trials(graphs.size(), [&](std::size_t gi) {
    const PatternHypergraph& f = graphs[gi];
    double ident = 0, scaled = 0, worst_gap = -std::numeric_limits<double>::infinity();
    Json worst;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      Rng rng = trial_rng(c.seed, 36, gi * 1000 + s);
      const SubsetBitmask& a = sets[s];
      const SubsetBitmask ac = a.complement();
      const BipartiteLabels labels = random_bipartite_labels(rng, f, c.p, ell);
      const auto witness = witness_count_bipartite(f, lin, labels, a);
      const __int128 raw = bipartite_raw_sum(f, lin, labels, CountingGrid::pattern(f, counting_indicator(a), counting_indicator(ac)));
      ident = std::max(ident, std::abs(static_cast<double>(raw - static_cast<__int128>(witness))));
      const GroupFunction on = indicator(a), off = indicator(ac);
      const Complex t = t_bipartite(f, lin, labels, ComplexGrid::pattern(f, on, off));
      const double norm = bipartite_normalization(f, lin, labels);
      scaled = std::max(scaled, std::abs(t * norm - static_cast<double>(witness)) / std::max(1.0, norm));
      // Densities on L(d_u + d_v) and the local U2 deviation of each pair.
      double prod = 1, eps = 0;
      for (int u = 0; u < f.u(); ++u)
        for (int v = 0; v < f.v(); ++v) {
          const LocalContext2 ctx(lin, DirectionTuple2{labels.du[static_cast<std::size_t>(u)],
                                                       labels.dv[static_cast<std::size_t>(v)]});
          const double alpha = density(a, ctx.target_members());
          prod *= f.has_edge(u, v) ? alpha : 1 - alpha;
          eps = std::max(eps, local_u2_norm(ctx, balanced(a, alpha), LocalU2Method::Fourier));
        }
      const double gap = std::abs(t - prod);
      const double bound = eps * f.u() * f.v();
      if (gap - bound > worst_gap) {
        worst_gap = gap - bound;
        worst = Json{{"set", s}, {"du", labels.du}, {"dv", labels.dv}, {"T", std::abs(t)}, {"product", prod},
                     {"gap", gap}, {"epsilon", eps}, {"bound", bound}};
      }
    }
    const Json in{{"seed", c.seed}, {"graph", to_json(f)}, {"sets", sets.size()}};
    return std::vector<TrialRecord>{
        hard_check(gi, "witness-identity", in, ident, 0.0),
        hard_check(gi, "normalized-operator", in, scaled, 1e-9),
        hard_check(gi, "binary-counting-bound", in, worst["gap"].get<double>(),
                   worst["bound"].get<double>() + c.tolerance, worst)};
  }));
}

double est_counting_binary(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1), mp = c.get_int("max_part", 2);
  const double h = atom_estimate(c.p, c.n, ell, 0);
  double total = 0;
  for (const auto& f : all_bipartite(mp)) {
    const double walk = std::pow(h, f.u()) * h * f.u() * f.v();
    const double pairs = f.u() * f.v() * (4 * (c.n - ell) * h * c.p + 2 * h);
    total += 3 * walk + pairs + 8 * group_size(c.p, c.n);
  }
  return total * c.get_int("sets", 20);
}

double ternary_walk_estimate(const PatternHypergraph& f, double b, double pq) {
  const double ys = std::pow(b / std::pow(pq, f.u()), f.v());
  const double zs = f.w() * (b / std::pow(pq, f.u() + f.v()) + 1);
  return std::pow(b, f.u()) * std::max(1.0, ys * zs * f.u() * f.v());
}

std::vector<int> isize_dimensions(const ExperimentConfig& c) {
  return c.extra.value("isize_n_values", std::vector<int>{4, 5});
}

void run_counting_ternary(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const QuadraticFactor fac = config_factor(c, sp, 1, 1);
  const int m = c.get_int("max_part", 2);
  const auto graphs = all_ternary(m);
  const auto sets_count = static_cast<std::size_t>(c.get_int("sets", 20));
  std::vector<SubsetBitmask> random_sets, unions;
  for (std::size_t s = 0; s < sets_count; ++s) {
    Rng rng = trial_rng(c.seed, 37, s);
    random_sets.push_back(random_set(rng, sp, 0.5));
    unions.push_back(random_atom_union(rng, fac));
  }
  const double m3 = 3.0 * m * m * m;
  r.add(parallel_trials(graphs.size(), [&](std::size_t gi) {
    const PatternHypergraph& f = graphs[gi];
    const Json in{{"seed", c.seed}, {"graph", to_json(f)}, {"sets", sets_count}};
    std::vector<TrialRecord> out;
    double ident = 0, scaled = 0, ratio_dev = 0;
    std::size_t degenerate = 0;
    for (std::size_t s = 0; s < sets_count; ++s) {
      Rng rng = trial_rng(c.seed, 38, gi * 1000 + s);
      const auto e = random_assignment(rng, f, fac);
      if (!e) {
        ++degenerate;
        continue;
      }
      const SubsetBitmask& a = random_sets[s];
      const SubsetBitmask ac = a.complement();
      const auto witness = witness_count_ternary(f, fac, *e, a);
      const __int128 raw =
          ternary_raw_sum(f, fac, *e, CountingGrid::pattern(f, counting_indicator(a), counting_indicator(ac)));
      ident = std::max(ident, std::abs(static_cast<double>(raw - static_cast<__int128>(witness))));
      const double norm = ternary_normalization(f, fac, *e).value();
      const Complex t = t_ternary(f, fac, *e, ComplexGrid::pattern(f, indicator(a), indicator(ac)));
      scaled = std::max(scaled, std::abs(t * norm - static_cast<double>(witness)) / std::max(1.0, norm));
      const auto size = if_enumerate(f, fac, *e);
      if (std::abs(t) > 0 && size > 0) {
        ratio_dev = std::max(ratio_dev, std::abs(static_cast<double>(witness) / (std::abs(t) * static_cast<double>(size)) - 1));
      }
    }
    if (degenerate == sets_count) {
      out.push_back(degenerate_record(gi, "witness-identity", in, "no nondegenerate label assignment found"));
      return out;
    }
    out.push_back(hard_check(gi, "witness-identity", in, ident, 0.0));
    out.push_back(hard_check(gi, "normalized-operator", in, scaled, 1e-9));
    out.push_back(info_record(gi, "witness-over-T-size", in, ratio_dev, 0.0,
                              Json{{"meaning", "max |witness / (T |I_F(e)|) - 1| over the sets"}}));
    // Counting margin for unions of atoms with measured local U3 deviations.
    double worst = -std::numeric_limits<double>::infinity();
    Json detail;
    for (std::size_t s = 0; s < sets_count; ++s) {
      Rng rng = trial_rng(c.seed, 39, gi * 1000 + s);
      const auto e = random_assignment(rng, f, fac);
      if (!e) continue;
      const SubsetBitmask& a = unions[s];
      double prod = 1, eps = 0;
      bool ok = true;
      for (int u = 0; u < f.u() && ok; ++u)
        for (int v = 0; v < f.v() && ok; ++v)
          for (int w = 0; w < f.w() && ok; ++w) {
            const LocalContext3 ctx(fac, e->tuple(f, u, v, w));
            if (ctx.degenerate() || ctx.target_members().empty()) {
              ok = false;
              break;
            }
            const double alpha = density(a, ctx.target_members());
            prod *= f.has_edge(u, v, w) ? alpha : 1 - alpha;
            eps = std::max(eps, local_u3_norm(ctx, balanced(a, alpha)));
          }
      if (!ok) continue;
      const Complex t = t_ternary(f, fac, *e, ComplexGrid::pattern(f, indicator(a), indicator(a.complement())));
      const double gap = std::abs(t - prod);
      const double bound = m3 * eps + 1e-6;
      if (gap - bound > worst) {
        worst = gap - bound;
        detail = Json{{"set", s}, {"assignment", assignment_json(*e)}, {"T", std::abs(t)}, {"product", prod},
                      {"gap", gap}, {"epsilon", eps}, {"bound", bound}};
      }
    }
    if (detail.is_null()) {
      out.push_back(degenerate_record(gi, "ternary-counting-bound", in, "no nondegenerate assignment"));
    } else {
      out.push_back(hard_check(gi, "ternary-counting-bound", in, detail["gap"].get<double>(),
                               detail["bound"].get<double>(), detail));
    }
    return out;
  }));
  // Every label assignment of the complete (2,2,2) pattern has admissible configurations.
  const PatternHypergraph full = all_ternary(2).back();
  const auto samples = static_cast<std::size_t>(c.get_int("isize_samples", 40));
  std::size_t base = graphs.size();
  for (int isize_n : isize_dimensions(c)) {
    const Space spn(c.p, isize_n);
    const QuadraticFactor facn = default_factor(spn, c.get_int("isize_ell", 0), c.get_int("q", 1));
    r.add(parallel_trials(samples, [&](std::size_t k) {
      Rng rng = trial_rng(c.seed, 40u + static_cast<unsigned>(isize_n), k);
      const auto e = random_assignment(rng, full, facn);
      const Json in{{"seed", c.seed}, {"n", isize_n}, {"sample", k}};
      if (!e) return std::vector<TrialRecord>{degenerate_record(base + k, "if-nonempty", in, "degenerate labels")};
      const auto size = if_enumerate(full, facn, *e);
      return std::vector<TrialRecord>{hard_check(base + k, "if-nonempty", in, size > 0 ? 0.0 : 1.0, 0.0,
                                                 Json{{"size", size}, {"assignment", assignment_json(*e)}})};
    }));
    base += samples;
  }
}

double est_counting_ternary(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1), q = c.get_int("q", 1), m = c.get_int("max_part", 2);
  const double pq = std::pow(static_cast<double>(c.p), q);
  const double b = atom_estimate(c.p, c.n, ell, q);
  const double sets = c.get_int("sets", 20);
  double total = 0;
  for (const auto& f : all_ternary(m)) {
    const double cells = f.u() * f.v() * f.w();
    total += sets * (5 * ternary_walk_estimate(f, b, pq) + cells * (u3_local_estimate(b, pq) + 4 * group_size(c.p, c.n)) +
                     4 * group_size(c.p, c.n));
  }
  const PatternHypergraph full = all_ternary(2).back();
  for (int n : isize_dimensions(c)) {
    total += c.get_int("isize_samples", 40) *
             ternary_walk_estimate(full, atom_estimate(c.p, n, c.get_int("isize_ell", 0), q), pq);
  }
  return total;
}

}  // namespace

void register_pattern(std::vector<Experiment>& out) {
  out.push_back({"control-ip", "IP is controlled by U2", Json{{"p", 3}, {"n", 3}, {"trials", 50}}, run_control_ip,
                 est_control_ip});
  out.push_back({"control-ip2", "IP2 is controlled by U3", Json{{"p", 3}, {"n", 2}, {"trials", 20}}, run_control_ip2,
                 est_control_ip2});
  out.push_back({"control-ip-local", "Local IP is controlled by local U2",
                 Json{{"p", 3}, {"n", 3}, {"trials", 50}}, run_control_ip_local, est_control_ip_local});
  out.push_back({"control-ip2-local-trend", "Local IP2 is controlled by local U3",
                 Json{{"p", 3}, {"n_values", {3, 4, 5, 6}}}, run_control_ip2_trend, est_control_ip2_trend});
  out.push_back({"counting-binary", "Counting lemma for induced binary sums", Json{{"p", 3}, {"n", 3}},
                 run_counting_binary, est_counting_binary});
  out.push_back({"counting-ternary", "Counting lemma for induced ternary sums", Json{{"p", 3}, {"n", 3}},
                 run_counting_ternary, est_counting_ternary});
}

}  // namespace qflab::lab
