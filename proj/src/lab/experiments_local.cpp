#include <algorithm>
#include <cmath>

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

DirectionTuple2 random_direction2(Rng& rng, const LinearFactor& l) {
  return DirectionTuple2{random_label(rng, l.space().p(), l.ell()), random_label(rng, l.space().p(), l.ell())};
}

/// A direction tuple with the same Sigma as d, obtained by redrawing everything but a3.
DirectionTuple3 same_sigma(Rng& rng, const QuadraticFactor& f, const DirectionTuple3& d) {
  DirectionTuple3 e = random_direction3(rng, f);
  const Label want = sigma3(d, f.ell(), f.p());
  const Label got = sigma3(e, f.ell(), f.p());
  for (std::size_t k = 0; k < e.a3.size(); ++k) e.a3[k] = ((e.a3[k] + want[k] - got[k]) % f.p() + f.p()) % f.p();
  return e;
}

double local_u3_cost(const ExperimentConfig& c, int n, int ell, int q) {
  return u3_local_estimate(atom_estimate(c.p, n, ell, q), std::pow(static_cast<double>(c.p), q));
}

// ---------------------------------------------------------------------------

void run_local_gcs(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const QuadraticFactor f = config_factor(c, sp, 1, 1);
  const LinearFactor& lin = f.linear();
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 21, i);
    std::vector<TrialRecord> out;
    Json in = base_inputs(c, i);
    const auto d = nondegenerate_direction3(rng, f);
    Octuple oct = random_octuple(rng, sp);
    if (!d) {
      out.push_back(degenerate_record(i, "local-u3-gcs", in, "no nondegenerate direction found"));
    } else {
      in["d"] = to_json(*d);
      const LocalContext3 ctx(f, *d);
      double prod = 1.0;
      for (const auto& g : oct) prod *= local_u3_norm(ctx, g);
      out.push_back(hard_check(i, "local-u3-gcs", in, std::abs(local_u3_inner(ctx, oct)), prod + c.tolerance));
    }
    const DirectionTuple2 d2 = random_direction2(rng, lin);
    const LocalContext2 ctx2(lin, d2);
    double prod2 = 1.0;
    for (int e = 0; e < 4; ++e) prod2 *= local_u2_norm(ctx2, oct[static_cast<std::size_t>(e)], LocalU2Method::Fourier);
    Json in2 = base_inputs(c, i);
    in2["d2"] = to_json(d2);
    out.push_back(hard_check(i, "local-u2-gcs", in2,
                             std::abs(local_u2_inner(ctx2, oct[0], oct[1], oct[2], oct[3], LocalU2Method::Fourier)),
                             prod2 + c.tolerance));
    return out;
  }));
}

double est_local_gcs(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1), q = c.get_int("q", 1);
  const double h = atom_estimate(c.p, c.n, ell, 0);
  return c.trials * (9 * local_u3_cost(c, c.n, ell, q) + 12 * (c.n - ell) * h * c.p + 3 * group_size(c.p, c.n)) +
         8 * group_size(c.p, c.n);
}

void run_local_triangle(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const int ell = c.get_int("ell", 1);
  const QuadraticFactor f10 = default_factor(sp, ell, 0);
  const QuadraticFactor f11 = config_factor(c, sp, ell, 1);
  const LinearFactor& lin = f10.linear();
  struct Found {
    bool any = false;
    Json witness;
  };
  std::vector<Found> found(static_cast<std::size_t>(c.trials));
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 22, i);
    const GroupFunction f = random_bounded_function(rng, sp);
    const GroupFunction g = random_bounded_function(rng, sp);
    const Complex s = rng.disc() * 2.0;
    std::vector<TrialRecord> out;
    // Local U2 on the linear factor.
    const DirectionTuple2 d2 = random_direction2(rng, lin);
    const LocalContext2 ctx2(lin, d2);
    const auto n2 = [&](const GroupFunction& h) { return local_u2_norm(ctx2, h, LocalU2Method::Direct); };
    Json in = base_inputs(c, i);
    in["d2"] = to_json(d2);
    out.push_back(hard_check(i, "u2d-triangle", in, n2(f + g), n2(f) + n2(g) + c.tolerance));
    out.push_back(hard_check(i, "u2d-homogeneity", in, std::abs(n2(f * s) - std::abs(s) * n2(f)), c.tolerance));
    DirectionTuple2 moved = d2;
    for (std::size_t k = 0; k < moved.a1.size(); ++k) {
      const int t = rng.residue(c.p);
      moved.a1[k] = (moved.a1[k] + t) % c.p;
      moved.a2[k] = ((moved.a2[k] - t) % c.p + c.p) % c.p;
    }
    const LocalContext2 ctx2b(lin, moved);
    out.push_back(hard_check(i, "u2d-sigma-invariance", in,
                             std::abs(local_u2_norm(ctx2b, f, LocalU2Method::Direct) - n2(f)), 1e-12,
                             Json{{"d2_moved", to_json(moved)}}));
    // Local U3 on (ell, 0) and (ell, 1).
    for (const QuadraticFactor* fac : {&f10, &f11}) {
      const auto d = nondegenerate_direction3(rng, *fac);
      const std::string tag = "u3d-" + std::to_string(fac->ell()) + std::to_string(fac->q());
      Json in3 = base_inputs(c, i);
      if (!d) {
        out.push_back(degenerate_record(i, tag + "-triangle", in3, "no nondegenerate direction found"));
        continue;
      }
      in3["d"] = to_json(*d);
      const LocalContext3 ctx(*fac, *d);
      const auto n3 = [&](const GroupFunction& h) { return local_u3_norm(ctx, h); };
      const double nf = n3(f);
      out.push_back(hard_check(i, tag + "-triangle", in3, n3(f + g), nf + n3(g) + c.tolerance));
      out.push_back(hard_check(i, tag + "-homogeneity", in3, std::abs(n3(f * s) - std::abs(s) * nf), c.tolerance));
      if (fac->q() > 0) {
        const DirectionTuple3 e = same_sigma(rng, *fac, *d);
        const LocalContext3 ctx_e(*fac, e);
        if (!ctx_e.degenerate()) {
          const double ne = local_u3_norm(ctx_e, f);
          if (std::abs(ne - nf) > 1e-6) {
            found[i] = Found{true, Json{{"trial", i}, {"d", to_json(*d)}, {"d_prime", to_json(e)},
                                        {"norm_d", nf}, {"norm_d_prime", ne}}};
          }
        }
      }
    }
    return out;
  }));
  const auto it = std::find_if(found.begin(), found.end(), [](const Found& x) { return x.any; });
  const auto hits = std::count_if(found.begin(), found.end(), [](const Found& x) { return x.any; });
  r.note("u3d_depends_on_d", Json{{"pairs_scanned", c.trials},
                                  {"pairs_with_different_norms", hits},
                                  {"first_witness", it == found.end() ? Json(nullptr) : it->witness}});
}

double est_local_triangle(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1);
  const double h = atom_estimate(c.p, c.n, ell, 0);
  const double u2 = h * h * h;
  return c.trials * (6 * u2 + 4 * local_u3_cost(c, c.n, ell, 0) + 5 * local_u3_cost(c, c.n, ell, 1) +
                     3 * group_size(c.p, c.n)) +
         6 * group_size(c.p, c.n);
}

void run_u3_dominates(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const int ell = c.get_int("ell", 1);
  const LinearFactor lin = default_factor(sp, ell, 0).linear();
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 23, i);
    const Label a1 = random_label(rng, c.p, ell), a2 = random_label(rng, c.p, ell), a3 = random_label(rng, c.p, ell);
    const GroupFunction f = i == 0 ? GroupFunction::constant(sp, 1.0) : random_bounded_function(rng, sp);
    const DominationResult res = local_u3_dominates_check(lin, a1, a2, a3, f);
    Json in = base_inputs(c, i);
    in["a"] = {a1, a2, a3};
    std::vector<TrialRecord> out{hard_check(i, "u2-below-u3", in, res.u2, res.u3 + c.tolerance,
                                            Json{{"u3", res.u3}, {"u2", res.u2}})};
    if (i == 0) out.push_back(hard_check(i, "constant-one", in, std::abs(res.u3 - 1) + std::abs(res.u2 - 1), c.tolerance));
    return out;
  }));
}

double est_u3_dominates(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1);
  const double h = atom_estimate(c.p, c.n, ell, 0);
  return c.trials * (local_u3_cost(c, c.n, ell, 0) + h * h * h + 3 * group_size(c.p, c.n));
}

void run_atom_u2(const ExperimentConfig& c, Report& r) {
  std::vector<double> xs, ys;
  std::size_t idx = 0;
  const int direct_max_n = c.get_int("direct_max_n", 4);
  for (int n : c.n_values) {
    const Space sp(c.p, n);
    const QuadraticFactor f = config_factor(c, sp, 1, 1);
    const LinearFactor& lin = f.linear();
    const auto pairs = static_cast<std::uint32_t>(ipow(c.p, 2 * f.ell()));
    double worst = 0;
    Json per_atom = Json::array();
    for (std::uint32_t code = 0; code < f.num_labels(); ++code) {
      const auto& mem = f.members(code);
      if (mem.empty()) continue;
      const SubsetBitmask a = SubsetBitmask::from_indices(sp, mem);
      const GroupFunction ind = indicator(a);
      for (std::uint32_t dc = 0; dc < pairs; ++dc) {
        const Label both = decode_label(dc, c.p, 2 * f.ell());
        const DirectionTuple2 d{Label(both.begin(), both.begin() + f.ell()), Label(both.begin() + f.ell(), both.end())};
        const LocalContext2 ctx(lin, d);
        const double alpha = density(a, ctx.target_members());
        const GroupFunction g = ind - GroupFunction::constant(sp, alpha);
        const double fourier = local_u2_norm(ctx, g, LocalU2Method::Fourier);
        worst = std::max(worst, fourier);
        const Json in{{"n", n}, {"atom", f.decode(code)}, {"d", to_json(d)}};
        if (n <= direct_max_n) {
          const Complex direct = local_u2_inner(ctx, g, g, g, g, LocalU2Method::Direct);
          const Complex via = local_u2_inner(ctx, g, g, g, g, LocalU2Method::Fourier);
          r.add(hard_check(idx++, "restricted-fourier-identity", in, std::abs(direct - via), c.tolerance));
        }
        per_atom.push_back(Json{{"atom", f.decode(code)}, {"d", to_json(d)}, {"alpha", alpha}, {"norm", fourier}});
      }
    }
    r.add(info_record(idx++, "max-local-u2", Json{{"n", n}, {"factor", to_json(f)}}, worst,
                      std::pow(static_cast<double>(c.p), -(std::min(f.rank(), n) - f.ell()) / 4.0),
                      Json{{"rank", f.rank()}, {"values", per_atom}}));
    xs.push_back(n);
    ys.push_back(worst);
  }
  r.add_trend(make_trend("max over atoms and d of ||1_A - alpha||_U2(d)", xs, ys));
}

double est_atom_u2(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1), q = c.get_int("q", 1);
  double total = 0;
  for (int n : c.n_values) {
    const double h = atom_estimate(c.p, n, ell, 0);
    const double per = 8 * (n - ell) * h * c.p + (n <= c.get_int("direct_max_n", 4) ? h * h * h + 4 * (n - ell) * h * c.p : 0);
    total += std::pow(static_cast<double>(c.p), 3 * ell + q) * per + 4 * group_size(c.p, n);
  }
  return total;
}

void run_sparse_uniform(const ExperimentConfig& c, Report& r) {
  const double eps = c.epsilon > 0 ? c.epsilon : 0.2;
  const Space sp(c.p, c.n);
  const QuadraticFactor f = config_factor(c, sp, 1, 1);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 24, i);
    Json in = base_inputs(c, i);
    const auto d = nondegenerate_direction3(rng, f);
    if (!d) return std::vector<TrialRecord>{degenerate_record(i, "sparse", in, "no nondegenerate direction found")};
    in["d"] = to_json(*d);
    const LocalContext3 ctx(f, *d);
    const auto& target = ctx.target_members();
    if (target.empty()) return std::vector<TrialRecord>{degenerate_record(i, "sparse", in, "target atom is empty")};
    // A random set whose density on the target atom is at most eps (or at least 1 - eps).
    SubsetBitmask a = random_set(rng, sp, 0.5);
    for (Index x : target) a.erase(x);
    const auto k = static_cast<std::size_t>(std::floor(eps * static_cast<double>(target.size())));
    std::vector<Index> pool = target;
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t j = t + rng.below(pool.size() - t);
      std::swap(pool[t], pool[j]);
      a.insert(pool[t]);
    }
    const bool dense = rng.coin(0.5);
    if (dense) {
      for (Index x : target) a.set(x, !a.contains(x));
    }
    const double alpha = density(a, target);
    const double norm = local_u3_norm(ctx, balanced(a, alpha));
    in["dense_side"] = dense;
    return std::vector<TrialRecord>{hard_check(i, "sparse", in, norm, 2 * std::pow(eps, 0.125) + c.tolerance,
                                               Json{{"alpha", alpha}, {"epsilon", eps}, {"target_size", target.size()}})};
  }));
  // Weighted ternary density against alpha as the rank grows.
  std::vector<double> xs, ys;
  std::size_t idx = static_cast<std::size_t>(c.trials);
  for (int n : c.n_values) {
    const Space s(c.p, n);
    const QuadraticFactor fn = config_factor(c, s, 1, 1);
    const int per = c.get_int("trend_samples", 16);
    struct Out {
      std::string reason;
      double value = 0, alpha = 0, weight = 0;
    };
    const auto res = parallel_map<Out>(static_cast<std::size_t>(per), [&](std::size_t k) {
      Rng rng = trial_rng(c.seed, 2400u + static_cast<unsigned>(n), k);
      const SubsetBitmask a = random_set(rng, s, 0.5);
      const auto d = nondegenerate_direction3(rng, fn);
      if (!d) return Out{"no nondegenerate direction found"};
      try {
        const WeightedDensity w = weighted_ternary_density(fn, *d, a);
        return Out{"", w.value, w.alpha, w.weight};
      } catch (const Error& e) {
        return Out{e.what()};
      }
    });
    CompensatedSum dev;
    std::size_t used = 0;
    for (std::size_t k = 0; k < res.size(); ++k) {
      const Json in{{"n", n}, {"sample", k}};
      if (!res[k].reason.empty()) {
        r.add(degenerate_record(idx++, "weighted-density", in, res[k].reason));
        continue;
      }
      ++used;
      dev.add(std::abs(res[k].value - res[k].alpha));
      r.add(info_record(idx++, "weighted-density", in, std::abs(res[k].value - res[k].alpha), 0.0,
                        Json{{"value", res[k].value}, {"alpha", res[k].alpha}, {"weight", res[k].weight}}));
    }
    if (used == 0) continue;
    xs.push_back(n);
    ys.push_back(dev.value() / static_cast<double>(used));
  }
  r.add_trend(make_trend("mean |weighted density - alpha|", xs, ys));
}

double est_sparse_uniform(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1), q = c.get_int("q", 1);
  double total = c.trials * (local_u3_cost(c, c.n, ell, q) + 8 * group_size(c.p, c.n)) + 2 * group_size(c.p, c.n);
  for (int n : c.n_values) {
    const double b = atom_estimate(c.p, n, ell, q);
    total += c.get_int("trend_samples", 16) * (b * b / std::pow(c.p, q) + 8 * group_size(c.p, n)) + 2 * group_size(c.p, n);
  }
  return total;
}

void run_smallpart(const ExperimentConfig& c, Report& r) {
  const double eps = c.epsilon > 0 ? c.epsilon : 1e-3;
  const double critical = 2 * std::pow(eps, 1.0 / 16.0);
  const std::vector<double> thresholds{0.001, 0.01, 0.05, 0.1, critical};
  const Space sp(c.p, c.n);
  const QuadraticFactor f = config_factor(c, sp, 1, 1);
  const auto dirs = direction_list(f, static_cast<std::size_t>(c.samples), c.seed, 25);
  Rng rng = trial_rng(c.seed, 25, 0);
  // Two functions with ||f||_2 just below eps: spread over the group, and concentrated on three points.
  GroupFunction::Values spread(sp.size()), spike = GroupFunction::Values::Zero(sp.size());
  for (Index x = 0; x < sp.size(); ++x) spread[x] = 2 * rng.uniform() - 1;
  for (int t = 0; t < 3; ++t) spike[static_cast<Eigen::Index>(rng.below(sp.size()))] = rng.coin(0.5) ? 1.0 : -1.0;
  std::vector<std::pair<std::string, GroupFunction>> fns;
  for (auto [name, v] : {std::pair{"spread", spread}, std::pair{"concentrated", spike}}) {
    GroupFunction g(sp, v);
    g = g * Complex(0.99 * eps / l2_norm(g), 0.0);
    fns.emplace_back(name, g);
  }
  std::size_t idx = 0;
  Json summary = Json::object();
  for (const auto& [name, g] : fns) {
    const auto norms = parallel_map<double>(dirs.size(), [&](std::size_t k) {
      const LocalContext3 ctx(f, dirs[k]);
      if (ctx.degenerate()) return std::nan("");
      return local_u3_norm(ctx, g);
    });
    std::vector<double> valid;
    for (std::size_t k = 0; k < norms.size(); ++k) {
      const Json in{{"function", name}, {"d", to_json(dirs[k])}};
      if (std::isnan(norms[k])) {
        r.add(degenerate_record(idx++, name, in, "degenerate direction"));
        continue;
      }
      valid.push_back(norms[k]);
      r.add(info_record(idx++, name, in, norms[k], critical));
    }
    Json row{{"l2_norm", l2_norm(g)}, {"sup_norm", linf_norm(g)}, {"directions", valid.size()},
             {"max_norm", valid.empty() ? 0.0 : *std::max_element(valid.begin(), valid.end())}};
    Json props = Json::array();
    for (double th : thresholds) {
      const double share = valid.empty() ? 0.0
                                         : static_cast<double>(std::count_if(valid.begin(), valid.end(),
                                                                             [&](double v) { return v < th; })) /
                                               static_cast<double>(valid.size());
      props.push_back(Json{{"threshold", th}, {"proportion_below", share}});
    }
    row["proportions"] = props;
    row["required_proportion"] = 1 - 8 * eps;
    summary[name] = row;
  }
  r.note("gamma", summary);
  r.note("critical_threshold", critical);
}

double est_smallpart(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1), q = c.get_int("q", 1);
  return 2 * direction_count(c.p, ell, q, static_cast<std::size_t>(c.samples)) * local_u3_cost(c, c.n, ell, q) +
         2 * group_size(c.p, c.n);
}

}  // namespace

void register_local(std::vector<Experiment>& out) {
  out.push_back({"local-gcs", "Local Gowers-Cauchy-Schwarz", Json{{"p", 3}, {"n", 3}, {"trials", 50}}, run_local_gcs,
                 est_local_gcs});
  out.push_back({"local-triangle", "defines a semi-norm on the space", Json{{"p", 3}, {"n", 3}, {"trials", 50}},
                 run_local_triangle, est_local_triangle});
  out.push_back({"u3-dominates", "Local U3 dominates local U2 on linear factors",
                 Json{{"p", 3}, {"n", 3}, {"trials", 50}}, run_u3_dominates, est_u3_dominates});
  out.push_back({"atom-u2-uniformity", "quadratic atoms of high-rank factors have small local U2 semi-norm",
                 Json{{"p", 3}, {"n_values", {3, 4, 5, 6, 7, 8}}}, run_atom_u2, est_atom_u2});
  out.push_back({"sparse-uniform", "Locally sparse implies locally uniform",
                 Json{{"p", 3}, {"n", 4}, {"trials", 40}, {"epsilon", 0.2}, {"n_values", {3, 4, 5, 6}}},
                 run_sparse_uniform, est_sparse_uniform});
  out.push_back({"smallpart", "|Gamma| >= (1 - 8 eps) p^{3l+6q}",
                 Json{{"p", 3}, {"n", 4}, {"samples", 200}, {"epsilon", 1e-3}}, run_smallpart, est_smallpart});
}

}  // namespace qflab::lab
