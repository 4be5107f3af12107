#include <cmath>

#include "common.hpp"
#include "qflab/spectral.hpp"

namespace qflab::lab {

namespace {

using namespace detail;

Json trial_inputs(const ExperimentConfig& c, std::size_t i) {
  return Json{{"seed", c.seed}, {"trial", i}, {"p", c.p}, {"n", c.n}};
}

double max_abs_diff(const GroupFunction& a, const GroupFunction& b) {
  return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

/// Symmetric form of rank at most k: a sum of k scaled outer products v v^T.
SymmetricForm random_low_rank_form(Rng& rng, int p, int n, int k) {
  IntMatrix m = IntMatrix::Zero(n, n);
  for (int t = 0; t < k; ++t) {
    const GroupVector v = random_vector(rng, p, n);
    const int c = 1 + rng.residue(p - 1);
    m += c * v.coords * v.coords.transpose();
  }
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = ((m.data()[i] % p) + p) % p;
  return SymmetricForm(p, m);
}

// ---------------------------------------------------------------------------

void run_parseval(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 1, i);
    const GroupFunction f = random_function(rng, sp);
    const SpectrumTable s = fourier_transform(f);
    const double lhs = l2_norm(f) * l2_norm(f);
    const double rhs = s.power_sum(2);
    return std::vector<TrialRecord>{hard_check(i, "parseval", trial_inputs(c, i), std::abs(lhs - rhs), c.tolerance,
                                               Json{{"l2_squared", lhs}, {"spectrum_l2_squared", rhs}})};
  }));
}

double est_parseval(const ExperimentConfig& c) {
  const double size = group_size(c.p, c.n);
  return c.trials * (c.n * size * c.p + size);
}

void run_roundtrip(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 2, i);
    const GroupFunction f = random_function(rng, sp);
    const SpectrumTable fast = fourier_transform(f, FourierMethod::Fast);
    const SpectrumTable naive = fourier_transform(f, FourierMethod::Naive);
    const GroupFunction back = inverse_transform(fast);
    const double paths = (fast.values - naive.values).cwiseAbs().maxCoeff();
    const Json in = trial_inputs(c, i);
    return std::vector<TrialRecord>{hard_check(i, "inversion", in, max_abs_diff(back, f), c.tolerance),
                                    hard_check(i, "naive-vs-fast", in, paths, 1e-10)};
  }));
  // Two closed forms: the point mass at 0 and a single character.
  GroupFunction delta(sp);
  GroupFunction::Values dv = GroupFunction::Values::Zero(sp.size());
  dv[0] = 1.0;
  delta = GroupFunction(sp, dv);
  const SpectrumTable sd = fourier_transform(delta);
  const double expect = 1.0 / static_cast<double>(sp.size());
  r.add(hard_check(static_cast<std::size_t>(c.trials), "point-mass-flat", Json{{"case", "delta0"}},
                   (sd.values.array() - expect).abs().maxCoeff(), c.tolerance));
  Rng rng = trial_rng(c.seed, 2, static_cast<std::uint64_t>(c.trials));
  const GroupVector t0 = random_vector(rng, c.p, c.n);
  const SpectrumTable sc = fourier_transform(character(sp, t0));
  GroupFunction::Values want = GroupFunction::Values::Zero(sp.size());
  want[sp.index(t0)] = 1.0;
  r.add(hard_check(static_cast<std::size_t>(c.trials) + 1, "character-spike", Json{{"t0", to_json(t0)}},
                   (sc.values - want).cwiseAbs().maxCoeff(), c.tolerance));
}

double est_roundtrip(const ExperimentConfig& c) {
  const double size = group_size(c.p, c.n);
  return (c.trials + 2) * (2 * c.n * size * c.p + size * size);
}

void run_u2_equiv(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 3, i);
    const GroupFunction f = random_bounded_function(rng, sp);
    const double u2_4 = u2_inner(f, f, f, f).real();
    const SpectrumTable s = fourier_transform(f);
    const double l4 = s.power_sum(4);
    const double sup = s.sup_norm();
    const Json in = trial_inputs(c, i);
    return std::vector<TrialRecord>{
        hard_check(i, "u2-fourth-equals-l4", in, std::abs(u2_4 - l4), c.tolerance,
                   Json{{"u2_fourth", u2_4}, {"spectrum_l4_fourth", l4}}),
        hard_check(i, "sup-fourth-below-u2-fourth", in, std::pow(sup, 4), u2_4 + c.tolerance),
        hard_check(i, "u2-fourth-below-sup-squared", in, u2_4, sup * sup + c.tolerance)};
  }));
}

double est_u2_equiv(const ExperimentConfig& c) {
  const double size = group_size(c.p, c.n);
  return c.trials * (2 * size * size + 2 * c.n * size * c.p);
}

void run_gcs(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 4, i);
    Octuple f = random_octuple(rng, sp);
    double prod3 = 1.0;
    for (const auto& g : f) prod3 *= u3_norm(g);
    const double inner3 = std::abs(u3_inner(f));
    double prod2 = 1.0;
    for (int e = 0; e < 4; ++e) prod2 *= u2_norm(f[static_cast<std::size_t>(e)]);
    const double inner2 = std::abs(u2_inner(f[0], f[1], f[2], f[3]));
    const Json in = trial_inputs(c, i);
    return std::vector<TrialRecord>{hard_check(i, "u3-gcs", in, inner3, prod3 + c.tolerance),
                                    hard_check(i, "u2-gcs", in, inner2, prod2 + c.tolerance)};
  }));
}

double est_gcs(const ExperimentConfig& c) {
  const double size = group_size(c.p, c.n);
  return c.trials * (9 * size * size * size + 10 * size * size);
}

void run_triangle(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 5, i);
    const GroupFunction f = random_bounded_function(rng, sp);
    const GroupFunction g = random_bounded_function(rng, sp);
    const Complex scale = rng.disc() * 2.0;
    const GroupFunction fg = f + g;
    const GroupFunction cf = f * scale;
    const double f3 = u3_norm(f), g3 = u3_norm(g), fg3 = u3_norm(fg), cf3 = u3_norm(cf);
    const double f2 = u2_norm(f), g2 = u2_norm(g), fg2 = u2_norm(fg), cf2 = u2_norm(cf);
    const Json in = trial_inputs(c, i);
    return std::vector<TrialRecord>{
        hard_check(i, "u2-triangle", in, fg2, f2 + g2 + c.tolerance),
        hard_check(i, "u3-triangle", in, fg3, f3 + g3 + c.tolerance),
        hard_check(i, "u2-homogeneity", in, std::abs(cf2 - std::abs(scale) * f2), c.tolerance),
        hard_check(i, "u3-homogeneity", in, std::abs(cf3 - std::abs(scale) * f3), c.tolerance),
        hard_check(i, "u2-below-u3", in, f2, f3 + c.tolerance)};
  }));
}

double est_triangle(const ExperimentConfig& c) {
  const double size = group_size(c.p, c.n);
  return c.trials * (4 * size * size * size + 8 * size * size);
}

void run_ap3(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 6, i);
    const GroupFunction f = random_bounded_function(rng, sp);
    const SubsetBitmask a = random_set(rng, sp, rng.uniform());
    const GroupFunction fa = balanced(a, static_cast<double>(a.count()) / sp.size());
    const Json in = trial_inputs(c, i);
    return std::vector<TrialRecord>{
        hard_check(i, "bounded", in, std::abs(ap3_average(f)), fourier_transform(f).sup_norm() + c.tolerance),
        hard_check(i, "balanced-set", in, std::abs(ap3_average(fa)), fourier_transform(fa).sup_norm() + c.tolerance,
                   Json{{"density", static_cast<double>(a.count()) / sp.size()}})};
  }));
}

double est_ap3(const ExperimentConfig& c) {
  const double size = group_size(c.p, c.n);
  return c.trials * 2 * (size * size + c.n * size * c.p + size);
}

void run_ap4(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 7, i);
    const GroupFunction f = random_bounded_function(rng, sp);
    GroupFunction g = random_function(rng, sp);
    g = g * Complex(1.0 / l2_norm(g), 0.0);
    const Json in = trial_inputs(c, i);
    return std::vector<TrialRecord>{
        hard_check(i, "sup-bounded", in, std::abs(ap4_average(f)), u3_norm(f) + c.tolerance),
        info_record(i, "l2-bounded", in, std::abs(ap4_average(g)), u3_norm(g) + c.tolerance,
                    Json{{"l2_norm", l2_norm(g)}, {"sup_norm", linf_norm(g)}})};
  }));
}

double est_ap4(const ExperimentConfig& c) {
  const double size = group_size(c.p, c.n);
  return c.trials * 2 * (size * size + size * size * size);
}

void run_expsum(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 8, i);
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(c.n + 1)));
    const SymmetricForm m = random_low_rank_form(rng, c.p, c.n, k);
    const GroupVector b = random_vector(rng, c.p, c.n);
    const int rank = matrix_rank(m);
    const double value = std::abs(quad_char_sum(m, b));
    Json in = trial_inputs(c, i);
    in["form"] = to_json(m);
    in["b"] = to_json(b);
    return std::vector<TrialRecord>{hard_check(i, "quadratic-sum", in, value,
                                               std::pow(static_cast<double>(c.p), -rank / 2.0) + c.tolerance,
                                               Json{{"rank", rank}})};
  }));
  // Exactness of the linear sum: p^n at r = 0 and 0 elsewhere, over every small n.
  std::size_t idx = static_cast<std::size_t>(c.trials);
  const int max_n = c.get_int("linear_max_n", 5);
  for (int n = 1; n <= max_n; ++n) {
    if (group_size(c.p, n) > 243.5 && n > 1) break;
    const Space s(c.p, n);
    std::size_t mismatches = 0;
    for (Index x = 0; x < s.size(); ++x) {
      const CyclotomicValue v = linear_char_sum_exact(s.vector(x));
      const long long want = x == 0 ? static_cast<long long>(s.size()) : 0;
      if (!v.is_integer() || v.integer_value() != want) ++mismatches;
    }
    r.add(hard_check(idx++, "linear-sum-exact", Json{{"p", c.p}, {"n", n}}, static_cast<double>(mismatches), 0.0,
                     Json{{"vectors", s.size()}}));
  }
}

double est_expsum(const ExperimentConfig& c) {
  double total = c.trials * group_size(c.p, c.n);
  for (int n = 1; n <= c.get_int("linear_max_n", 5); ++n) {
    if (group_size(c.p, n) > 243.5 && n > 1) break;
    total += group_size(c.p, n) * group_size(c.p, n);
  }
  return total;
}

void run_bilsum(const ExperimentConfig& c, Report& r) {
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 9, i);
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(c.n + 1)));
    const SymmetricForm m = random_low_rank_form(rng, c.p, c.n, k);
    const GroupVector cv = random_vector(rng, c.p, c.n);
    const GroupVector dv = rng.coin(0.5) ? GroupVector::zero(c.p, c.n) : random_vector(rng, c.p, c.n);
    const int rank = matrix_rank(m);
    Json in = trial_inputs(c, i);
    in["form"] = to_json(m);
    in["c"] = to_json(cv);
    in["d"] = to_json(dv);
    return std::vector<TrialRecord>{hard_check(i, "bilinear-sum", in, std::abs(bilinear_char_sum(m, cv, dv)),
                                               std::pow(static_cast<double>(c.p), -rank) + c.tolerance,
                                               Json{{"rank", rank}})};
  }));
}

double est_bilsum(const ExperimentConfig& c) { return c.trials * group_size(c.p, c.n); }

void run_inverse(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const CorrelationOptions opts{false, static_cast<std::uint64_t>(c.get_int("cap", 59049))};
  r.add(parallel_trials(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 10, i);
    const SymmetricForm m0 = i == 0 ? SymmetricForm::identity(c.p, c.n) : random_form(rng, c.p, c.n);
    const GroupFunction f = quadratic_phase(m0);
    const QuadraticCorrelation best = max_quadratic_correlation(f, opts);
    const GroupFunction product = f.cwise(quadratic_phase(best.m));
    const double spread = (product.values().array() - product(0)).abs().maxCoeff();
    Json in = trial_inputs(c, i);
    in["form"] = to_json(m0);
    const Json details{{"maximizer", to_json(best.m)}, {"value", best.value}, {"candidates", best.candidates}};
    return std::vector<TrialRecord>{hard_check(i, "value-one", in, std::abs(best.value - 1.0), c.tolerance, details),
                                    hard_check(i, "phase-product-constant", in, spread, c.tolerance)};
  }));
  const QuadraticCorrelation zero = max_quadratic_correlation(GroupFunction(sp), opts);
  r.add(hard_check(static_cast<std::size_t>(c.trials), "zero-function", Json{{"case", "zero"}}, zero.value,
                   c.tolerance, Json{{"maximizer", to_json(zero.m)}}));
}

double est_inverse(const ExperimentConfig& c) {
  const double forms = std::pow(static_cast<double>(c.p), c.n * (c.n + 1) / 2.0);
  return (c.trials + 1) * forms * group_size(c.p, c.n);
}

}  // namespace

void register_spectral(std::vector<Experiment>& out) {
  out.push_back({"parseval", "Parseval's identity ||f||_L2 = ||f^||_l2",
                 Json{{"p", 3}, {"n", 4}, {"trials", 100}}, run_parseval, est_parseval});
  out.push_back({"fourier-roundtrip", "inversion formula f(x) = sum_t f^(t) w^{x.t}",
                 Json{{"p", 3}, {"n", 4}, {"trials", 100}}, run_roundtrip, est_roundtrip});
  out.push_back({"u2-fourier-equiv", "||f||_U2^4 = ||f^||_4^4",
                 Json{{"p", 3}, {"n", 4}, {"trials", 100}}, run_u2_equiv, est_u2_equiv});
  out.push_back({"gcs", "Gowers-Cauchy-Schwarz inequality", Json{{"p", 3}, {"n", 3}, {"trials", 50}}, run_gcs,
                 est_gcs});
  out.push_back({"triangle", "the U2 and U3 norms are norms, and the U^d norms are nested",
                 Json{{"p", 3}, {"n", 3}, {"trials", 50}}, run_triangle, est_triangle});
  out.push_back({"ap3-bound", "Fourier transform controls 3-APs", Json{{"p", 3}, {"n", 4}, {"trials", 100}},
                 run_ap3, est_ap3});
  out.push_back({"ap4-bound", "U3 controls 4-APs", Json{{"p", 3}, {"n", 3}, {"trials", 100}}, run_ap4, est_ap4});
  out.push_back({"expsum-bound", "Quadratic exponential sums of high rank are small",
                 Json{{"p", 3}, {"n", 4}, {"trials", 200}}, run_expsum, est_expsum});
  out.push_back({"bilsum-bound", "Bilinear exponential sums of high rank are small",
                 Json{{"p", 3}, {"n", 4}, {"trials", 200}}, run_bilsum, est_bilsum});
  out.push_back({"inverse-oracle", "there exists a quadratic form q correlating with f",
                 Json{{"p", 3}, {"n", 3}, {"trials", 5}}, run_inverse, est_inverse});
}

}  // namespace qflab::lab
