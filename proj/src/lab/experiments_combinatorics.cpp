#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "directions.hpp"
#include "qflab/combinatorics.hpp"
#include "qflab/local_norms.hpp"

namespace qflab::lab {

namespace {

using namespace detail;

Json certificate_json(const std::optional<WitnessCertificate>& cert) {
  if (!cert) return nullptr;
  static const char* kinds[] = {"IP", "OP", "IP2"};
  return Json{{"kind", kinds[static_cast<int>(cert->kind)]}, {"order", cert->order},
              {"a", cert->a},                                 {"b", cert->b},
              {"c", cert->c}};
}

/// Hard record that a certificate exists and replays against a.
TrialRecord replay_record(std::size_t index, const std::string& check, const Json& inputs,
                          const std::optional<WitnessCertificate>& cert, const SubsetBitmask& a) {
  if (!cert) return hard_check(index, check, inputs, 1.0, 0.0, Json{{"reason", "no witness found"}});
  const ReplayResult res = replay(*cert, a);
  return hard_check(index, check, inputs, res.ok ? 0.0 : 1.0, 0.0,
                    Json{{"certificate", certificate_json(cert)}, {"replay_checks", res.checks},
                         {"replay_failures", res.failures}});
}

std::vector<SymmetricForm> generator_forms(int p, int n) {
  std::vector<SymmetricForm> out{SymmetricForm::identity(p, n)};
  std::vector<int> diag(static_cast<std::size_t>(n), 1);
  diag.back() = p - 1;
  out.push_back(SymmetricForm::diagonal(p, diag));
  IntMatrix swap = IntMatrix::Zero(n, n);
  swap(0, 1) = swap(1, 0) = 1;
  for (int i = 2; i < n; ++i) swap(i, i) = 1;
  out.push_back(SymmetricForm(p, swap));
  return out;
}

std::vector<QuadraticFactor> generator_factors(const Space& sp) {
  std::vector<QuadraticFactor> out;
  GroupVector ones(sp.p(), IntVector::Ones(sp.n()));
  for (const auto& m : generator_forms(sp.p(), sp.n())) {
    out.emplace_back(LinearFactor(sp, {}), std::vector<SymmetricForm>{m});
    out.emplace_back(LinearFactor(sp, {GroupVector::unit(sp.p(), sp.n(), 0)}), std::vector<SymmetricForm>{m});
    out.emplace_back(LinearFactor(sp, {ones}), std::vector<SymmetricForm>{m});
  }
  return out;
}

SubsetBitmask random_atom_union(Rng& rng, const QuadraticFactor& b) {
  SubsetBitmask a(b.space());
  for (std::uint32_t code = 0; code < b.num_labels(); ++code) {
    if (!rng.coin(0.5)) continue;
    for (Index x : b.members(code)) a.insert(x);
  }
  return a;
}

// ---------------------------------------------------------------------------

void run_atom_vc(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  const QuadraticFactor f = c.factor.is_null() ? default_factor(sp, 0, 1) : factor_from_json(c.factor, sp);
  const Label zero(static_cast<std::size_t>(f.label_length()), 0);
  const SubsetBitmask a = SubsetBitmask::from_indices(sp, f.members(zero));
  const Json in{{"p", c.p}, {"n", c.n}, {"factor", to_json(f)}, {"label", zero}, {"rank", f.rank()}};
  const int k = c.get_int("k", 2);
  r.add(replay_record(0, "ip-witness", in, has_k_ip(a, k), a));
  const DimensionResult dim = vc_dimension(a, c.get_int("cap", 3));
  r.add(info_record(1, "vc-dimension", in, dim.dimension, k,
                    Json{{"capped", dim.capped}, {"certificate", certificate_json(dim.witness)}}));
}

double est_atom_vc(const ExperimentConfig& c) {
  // Witnesses of every order up to the cap turn up among the first few candidates.
  const int cap = c.get_int("cap", 3);
  return group_size(c.p, c.n) * (2 * c.get_int("k", 2) + cap * (cap + 1));
}

void run_atom_vc2(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  std::vector<QuadraticFactor> factors;
  if (!c.factor.is_null()) {
    factors.push_back(factor_from_json(c.factor, sp));
  } else {
    factors = generator_factors(sp);
  }
  struct Job {
    std::size_t factor;
    std::uint32_t code;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < factors.size(); ++i)
    for (std::uint32_t code = 0; code < factors[i].num_labels(); ++code)
      if (!factors[i].members(code).empty()) jobs.push_back({i, code});
  r.add(parallel_trials(jobs.size(), [&](std::size_t j) {
    const QuadraticFactor& f = factors[jobs[j].factor];
    const SubsetBitmask a = SubsetBitmask::from_indices(sp, f.members(jobs[j].code));
    const DimensionResult dim = vc2_dimension(a, 2);
    const Json in{{"p", c.p}, {"n", c.n}, {"factor", to_json(f)}, {"label", f.decode(jobs[j].code)}};
    std::vector<TrialRecord> out{hard_check(j, "atom-vc2-at-most-1", in, dim.dimension, 1.0,
                                            Json{{"size", a.count()}, {"certificate", certificate_json(dim.witness)}})};
    return out;
  }));
  r.note("factors_scanned", factors.size());
  r.note("atoms_scanned", jobs.size());
}

double est_atom_vc2(const ExperimentConfig& c) {
  const double size = group_size(c.p, c.n);
  const double atoms = c.factor.is_null() ? 3 * (1 + 2 * c.p) * c.p : std::pow(c.p, 2);
  return atoms * (size * size * size + size * size);
}

void run_coset_union(const ExperimentConfig& c, Report& r) {
  const Space sp(c.p, c.n);
  Json spec = c.set;
  if (spec.is_null()) {
    Json basis = Json::array();
    for (int i = 2; i < c.n; ++i) {
      std::vector<int> v(static_cast<std::size_t>(c.n), 0);
      v[static_cast<std::size_t>(i)] = 1;
      basis.push_back(v);
    }
    std::vector<int> zero(static_cast<std::size_t>(c.n), 0), e1 = zero;
    e1[0] = 1;
    spec = Json{{"kind", "coset_union"}, {"subgroup_basis", basis}, {"reps", {zero, e1}}};
  }
  const SubsetBitmask a = set_from_json(spec, sp);
  const int cosets = static_cast<int>(spec.contains("reps") ? spec["reps"].size() : 1);
  const int stated = static_cast<int>(std::ceil(std::log2(std::max(1, cosets))));
  const int corrected = static_cast<int>(std::floor(std::log2(std::max(1, cosets)))) + 1;
  const DimensionResult dim = vc_dimension(a, c.get_int("cap", 3));
  const Json in{{"p", c.p}, {"n", c.n}, {"set", spec}, {"cosets", cosets}};
  const Json cert{{"capped", dim.capped}, {"certificate", certificate_json(dim.witness)}};
  r.add(hard_check(0, "vc-at-most-ceil-log2-k", in, dim.dimension, stated, cert));
  r.add(info_record(1, "vc-at-most-floor-log2-k-plus-1", in, dim.dimension, corrected, cert));
  if (dim.witness) r.add(replay_record(2, "witness-replays", in, dim.witness, a));
  if (spec.value("kind", "") == "coset_union") {
    Json sub = spec;
    sub["reps"] = Json::array({std::vector<int>(static_cast<std::size_t>(c.n), 0)});
    const SubsetBitmask h = set_from_json(sub, sp);
    const DimensionResult hd = vc_dimension(h, c.get_int("cap", 3));
    r.add(hard_check(3, "subgroup-vc-at-most-1", Json{{"p", c.p}, {"n", c.n}, {"set", sub}}, hd.dimension, 1.0,
                     Json{{"certificate", certificate_json(hd.witness)}}));
  }
}

double est_coset_union(const ExperimentConfig& c) {
  // The order one above the true dimension is searched in full after the trace filter.
  const double size = group_size(c.p, c.n);
  return 14 * size * size;
}

void run_trivdense(const ExperimentConfig& c, Report& r) {
  const double eps = c.epsilon > 0 ? c.epsilon : 0.1;
  const Space sp(c.p, c.n);
  const QuadraticFactor f = config_factor(c, sp, 1, 1);
  const auto dirs = direction_list(f, static_cast<std::size_t>(c.samples), c.seed, 51);
  const int sets = c.get_int("sets", 4);
  std::size_t idx = 0;
  Json summary = Json::array();
  for (int s = 0; s < 2 * sets; ++s) {
    Rng rng = trial_rng(c.seed, 52, static_cast<std::uint64_t>(s));
    const bool atom_union = s < sets;
    const SubsetBitmask a = atom_union ? random_atom_union(rng, f) : random_set(rng, sp, 0.5);
    const DimensionResult vc2 = vc2_dimension(a, 2);
    // The hypothesis VC2(A) < m can only be certified here for m = 2.
    const int m = 2;
    const bool hypothesis = vc2.dimension < m;
    const double eta = std::pow(eps / 4, m * m * static_cast<double>(1 << (m * m)));
    struct Out {
      bool degenerate = true;
      double norm = 0, alpha = 0;
    };
    const auto res = parallel_map<Out>(dirs.size(), [&](std::size_t k) {
      const LocalContext3 ctx(f, dirs[k]);
      if (ctx.degenerate() || ctx.target_members().empty()) return Out{};
      const double alpha = density(a, ctx.target_members());
      return Out{false, local_u3_norm(ctx, balanced(a, alpha)), alpha};
    });
    std::size_t uniform = 0, trivial = 0, degenerate = 0;
    for (std::size_t k = 0; k < res.size(); ++k) {
      if (res[k].degenerate) {
        ++degenerate;
        continue;
      }
      if (!hypothesis || res[k].norm >= eta) continue;
      ++uniform;
      const double al = res[k].alpha;
      const bool ok = al < eps || al > 1 - eps;
      trivial += ok;
      if (!ok && atom_union) {
        r.add(hard_check(idx++, "uniform-atom-has-trivial-density", Json{{"set", s}, {"d", to_json(dirs[k])}},
                         std::min(al, 1 - al), eps, Json{{"norm", res[k].norm}, {"eta", eta}}));
      }
    }
    const Json in{{"set", s}, {"kind", atom_union ? "atom_union" : "random"}, {"hex", a.to_hex()}};
    const auto make = atom_union ? hard_check : info_record;
    r.add(make(idx++, "uniform-atom-has-trivial-density", in, static_cast<double>(uniform - trivial), 0.0,
                     Json{{"directions", res.size()}, {"degenerate", degenerate}, {"locally_uniform", uniform},
                          {"vc2", vc2.dimension}, {"hypothesis_vc2_below_m", hypothesis}, {"eta", eta}}));
    summary.push_back(Json{{"set", s}, {"atom_union", atom_union}, {"vc2", vc2.dimension},
                           {"locally_uniform", uniform}, {"directions", res.size() - degenerate}});
  }
  r.note("epsilon", eps);
  r.note("sets", summary);
}

double est_trivdense(const ExperimentConfig& c) {
  const int ell = c.get_int("ell", 1), q = c.get_int("q", 1);
  const double size = group_size(c.p, c.n);
  const double b = atom_estimate(c.p, c.n, ell, q);
  const double dirs = direction_count(c.p, ell, q, static_cast<std::size_t>(c.samples));
  return 2 * c.get_int("sets", 4) *
         (size * size * size + dirs * (u3_local_estimate(b, std::pow(c.p, q)) + 2 * size));
}

void run_vc2_structure(const ExperimentConfig& c, Report& r) {
  const double mu = c.epsilon > 0 ? c.epsilon : 0.1;
  const Space sp(c.p, c.n);
  const QuadraticFactor f = config_factor(c, sp, 1, 1);
  const int sets = c.get_int("sets", 10);
  const int alternatives = c.get_int("alternatives", 100);
  r.add(parallel_trials(static_cast<std::size_t>(3 * sets), [&](std::size_t i) {
    Rng rng = trial_rng(c.seed, 53, i);
    const int family = static_cast<int>(i) / sets;
    SubsetBitmask a = family == 2 ? random_set(rng, sp, 0.5) : random_atom_union(rng, f);
    if (family == 1) a = a.complement();
    static const char* names[] = {"atom_union", "complement_of_union", "random"};
    const Json in{{"set_index", i}, {"kind", names[family]}, {"hex", a.to_hex()}};
    const RegularityConclusion reg = regularity_conclusion(a, f, mu);
    const AtomUnionApprox approx = best_atom_union_approx(a, f);
    std::vector<TrialRecord> out;
    const Json regj{{"fraction", reg.fraction}, {"trivial_atoms", reg.trivial_atoms},
                    {"nonempty_atoms", reg.nonempty_atoms}, {"mu", mu}};
    const double symdiff_share = static_cast<double>(approx.symdiff) / static_cast<double>(sp.size());
    if (family < 2) {
      out.push_back(hard_check(i, "atom-density-trivial", in, 1 - reg.fraction, 0.0, regj));
      out.push_back(hard_check(i, "union-approx-exact", in, static_cast<double>(approx.symdiff), 0.0));
    } else {
      out.push_back(info_record(i, "atom-density-trivial", in, reg.fraction, 1.0, regj));
      out.push_back(info_record(i, "union-approx-share", in, symdiff_share, mu));
    }
    // No other union of atoms is closer to A.
    std::uint64_t best_alt = std::numeric_limits<std::uint64_t>::max();
    for (int t = 0; t < alternatives; ++t) {
      const SubsetBitmask y = random_atom_union(rng, f);
      best_alt = std::min<std::uint64_t>(best_alt, (a ^ y).count());
    }
    out.push_back(hard_check(i, "majority-union-optimal", in, static_cast<double>(approx.symdiff),
                             static_cast<double>(best_alt), Json{{"alternatives", alternatives}}));
    return out;
  }));
}

double est_vc2_structure(const ExperimentConfig& c) {
  return 3 * c.get_int("sets", 10) * 2 * group_size(c.p, c.n);
}

}  // namespace

void register_combinatorics(std::vector<Experiment>& out) {
  out.push_back({"atom-vc", "have large VC-dimension", Json{{"p", 3}, {"n", 4}}, run_atom_vc, est_atom_vc});
  out.push_back({"atom-vc2", "VC2-dimension at most 1", Json{{"p", 3}, {"n", 3}}, run_atom_vc2, est_atom_vc2});
  out.push_back({"coset-union-vc", "Unions of cosets have bounded VC-dimension", Json{{"p", 3}, {"n", 4}},
                 run_coset_union, est_coset_union});
  out.push_back({"trivdense", "alpha_{B(Sigma(d))} in [0,eps) or (1-eps,1]",
                 Json{{"p", 3}, {"n", 3}, {"samples", 400}, {"epsilon", 0.1}}, run_trivdense, est_trivdense});
  out.push_back({"vc2-structure", "for all B in At(B) outside Xi", Json{{"p", 3}, {"n", 4}, {"epsilon", 0.1}},
                 run_vc2_structure, est_vc2_structure});
}

}  // namespace qflab::lab
