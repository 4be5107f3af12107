#include "qflab/lab/json_io.hpp"

#include <cstdio>

#include "qflab/random.hpp"

namespace qflab::lab {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

int as_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<int>();
}

void check_space(const Json& j, const Space& space) {
  if (j.contains("p") && as_int(j.at("p"), "p") != space.p()) bad("p in spec differs from the configured p");
  if (j.contains("n") && as_int(j.at("n"), "n") != space.n()) bad("n in spec differs from the configured n");
}

std::vector<GroupVector> vectors_from_json(const Json& j, const Space& space, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array of vectors");
  std::vector<GroupVector> out;
  for (const auto& v : j) {
    GroupVector g = vector_from_json(v, space.p());
    if (g.n() != space.n()) bad(std::string(what) + ": vector length differs from n");
    out.push_back(std::move(g));
  }
  return out;
}

/// All F_p-combinations of the basis, as group indices.
std::vector<Index> span_indices(const Space& space, const std::vector<GroupVector>& basis) {
  std::vector<Index> out{0};
  for (const auto& b : basis) {
    const Index bi = space.index(b);
    const std::size_t size = out.size();
    for (int c = 1; c < space.p(); ++c) {
      const Index step = space.scale(c, bi);
      for (std::size_t k = 0; k < size; ++k) out.push_back(space.add(out[k], step));
    }
  }
  return out;
}

}  // namespace

Json to_json(const GroupVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.coords.size(); ++i) out.push_back(v.coords[i]);
  return out;
}

Json to_json(const SymmetricForm& m) {
  Json out = Json::array();
  for (int i = 0; i < m.n(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.n(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const QuadraticFactor& factor) {
  Json lin = Json::array();
  for (const auto& r : factor.linear().vectors()) lin.push_back(to_json(r));
  Json quad = Json::array();
  for (const auto& m : factor.forms()) quad.push_back(to_json(m));
  return Json{{"p", factor.p()}, {"n", factor.n()}, {"linear", lin}, {"quadratic", quad}};
}

Json to_json(const DirectionTuple3& d) {
  return Json{{"a", {d.a1, d.a2, d.a3}}, {"b", {d.b12, d.b13, d.b23}}};
}

Json to_json(const DirectionTuple2& d) { return Json{{"a", {d.a1, d.a2}}}; }

Json to_json(const GroupFunction& f) {
  Json values = Json::array();
  for (Index x = 0; x < f.size(); ++x) values.push_back({f(x).real(), f(x).imag()});
  return Json{{"p", f.space().p()}, {"n", f.space().n()}, {"values", values}};
}

Json to_json(const PatternHypergraph& f) {
  Json edges = Json::array();
  for (const auto& e : f.edges()) {
    if (f.kind() == PatternHypergraph::Kind::Bipartite) {
      edges.push_back({e[0], e[1]});
    } else {
      edges.push_back({e[0], e[1], e[2]});
    }
  }
  Json parts{{"U", f.u()}, {"V", f.v()}};
  if (f.kind() == PatternHypergraph::Kind::Ternary) parts["W"] = f.w();
  return Json{{"parts", parts}, {"edges", edges}};
}

GroupVector vector_from_json(const Json& j, int p) {
  if (!j.is_array()) bad("vector must be an array of integers");
  IntVector c(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) c[static_cast<Eigen::Index>(i)] = as_int(j[i], "vector entry");
  return GroupVector(p, c);
}

SymmetricForm form_from_json(const Json& j, int p) {
  if (!j.is_array() || j.empty()) bad("form must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  IntMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) bad("form must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = as_int(row[static_cast<std::size_t>(k)], "form entry");
  }
  return SymmetricForm(p, m);
}

Label label_from_json(const Json& j, int p) {
  if (!j.is_array()) bad("label must be an array of integers");
  Label out;
  const FieldPrime field(p);
  for (const auto& v : j) out.push_back(field.reduce(as_int(v, "label entry")));
  return out;
}

QuadraticFactor default_factor(const Space& space, int ell, int q) {
  const int n = space.n();
  if (ell < 0 || q < 0 || ell > n) bad("factor shorthand needs 0 <= ell <= n and q >= 0");
  std::vector<GroupVector> lin;
  for (int i = 0; i < ell; ++i) lin.push_back(GroupVector::unit(space.p(), n, i));
  std::vector<SymmetricForm> forms;
  for (int j = 0; j < q; ++j) {
    IntMatrix m = IntMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const int partner = j == 0 ? i : ((j - 1 - i) % n + n) % n;
      m(i, partner) = 1;
    }
    forms.emplace_back(space.p(), m);
  }
  return new_quadratic_factor(new_linear_factor(space, std::move(lin)), std::move(forms));
}

QuadraticFactor factor_from_json(const Json& j, const Space& space) {
  if (!j.is_object()) bad("factor spec must be an object");
  check_space(j, space);
  if (j.contains("ell") || j.contains("q")) {
    if (j.contains("linear") || j.contains("quadratic")) bad("factor spec mixes shorthand and explicit parts");
    return default_factor(space, j.contains("ell") ? as_int(j.at("ell"), "ell") : 0,
                          j.contains("q") ? as_int(j.at("q"), "q") : 0);
  }
  std::vector<GroupVector> lin;
  if (j.contains("linear")) lin = vectors_from_json(j.at("linear"), space, "linear");
  std::vector<SymmetricForm> forms;
  if (j.contains("quadratic")) {
    if (!j.at("quadratic").is_array()) bad("quadratic must be an array of forms");
    for (const auto& m : j.at("quadratic")) {
      SymmetricForm f = form_from_json(m, space.p());
      if (f.n() != space.n()) bad("form size differs from n");
      forms.push_back(std::move(f));
    }
  }
  return new_quadratic_factor(new_linear_factor(space, std::move(lin)), std::move(forms));
}

SubsetBitmask set_from_json(const Json& j, const Space& space) {
  if (!j.is_object()) bad("set spec must be an object");
  check_space(j, space);
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "explicit") {
    std::vector<Index> elems;
    for (const auto& v : vectors_from_json(field(j, "elements"), space, "elements")) elems.push_back(space.index(v));
    return SubsetBitmask::from_indices(space, elems);
  }
  if (kind == "bitmask_hex") return SubsetBitmask::from_hex(space, field(j, "hex").get<std::string>());
  if (kind == "atom" || kind == "atom_union") {
    const QuadraticFactor factor = factor_from_json(field(j, "factor"), space);
    SubsetBitmask out(space);
    Json labels = kind == "atom" ? Json::array({field(j, "label")}) : field(j, "labels");
    if (!labels.is_array()) bad("labels must be an array");
    for (const auto& l : labels) {
      const Label label = label_from_json(l, space.p());
      if (static_cast<int>(label.size()) != factor.label_length()) bad("atom label length differs from ell + q");
      for (Index x : factor.members(label)) out.insert(x);
    }
    return out;
  }
  if (kind == "random") {
    const double density = field(j, "density").get<double>();
    if (!(density >= 0.0 && density <= 1.0)) bad("density must lie in [0, 1]");
    Rng rng(field(j, "seed").get<std::uint64_t>());
    return random_set(rng, space, density);
  }
  if (kind == "coset_union") {
    const auto basis = vectors_from_json(field(j, "subgroup_basis"), space, "subgroup_basis");
    if (matrix_rank([&] {
          IntMatrix m(static_cast<Eigen::Index>(basis.size()), space.n());
          for (std::size_t i = 0; i < basis.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = basis[i].coords.transpose();
          return m;
        }(), space.p()) != static_cast<int>(basis.size())) {
      bad("subgroup_basis is linearly dependent");
    }
    const auto h = span_indices(space, basis);
    SubsetBitmask out(space);
    for (const auto& r : vectors_from_json(field(j, "reps"), space, "reps")) {
      const Index ri = space.index(r);
      for (Index x : h) out.insert(space.add(ri, x));
    }
    return out;
  }
  bad("unknown set kind \"" + kind + "\"");
}

GroupFunction function_from_json(const Json& j, const Space& space) {
  if (!j.is_object()) bad("function spec must be an object");
  if (j.contains("set")) {
    const SubsetBitmask a = set_from_json(j.at("set"), space);
    if (j.value("balanced", false)) {
      return balanced(a, static_cast<double>(a.count()) / static_cast<double>(a.universe()));
    }
    return indicator(a);
  }
  check_space(j, space);
  const Json& values = field(j, "values");
  if (!values.is_array() || values.size() != space.size()) bad("values must list p^n entries");
  GroupFunction::Values v(space.size());
  for (Index x = 0; x < space.size(); ++x) {
    const Json& e = values[x];
    if (e.is_number()) {
      v[x] = Complex(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2) {
      v[x] = Complex(e[0].get<double>(), e[1].get<double>());
    } else {
      bad("function values must be numbers or [re, im] pairs");
    }
  }
  return GroupFunction(space, v);
}

DirectionTuple3 direction3_from_json(const Json& j, int p) {
  const Json& a = field(j, "a");
  const Json& b = field(j, "b");
  if (!a.is_array() || a.size() != 3 || !b.is_array() || b.size() != 3) bad("direction tuple needs three a and three b labels");
  return DirectionTuple3{label_from_json(a[0], p), label_from_json(a[1], p), label_from_json(a[2], p),
                         label_from_json(b[0], p), label_from_json(b[1], p), label_from_json(b[2], p)};
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest(const Json& inputs) { return fnv1a_hex(inputs.dump()); }

}  // namespace qflab::lab
