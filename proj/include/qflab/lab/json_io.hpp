#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qflab/factor.hpp"
#include "qflab/group_function.hpp"
#include "qflab/pattern_ops.hpp"
#include "qflab/subset.hpp"

namespace qflab::lab {

using Json = nlohmann::json;

Json to_json(const GroupVector& v);
Json to_json(const SymmetricForm& m);
Json to_json(const QuadraticFactor& factor);
Json to_json(const DirectionTuple3& d);
Json to_json(const DirectionTuple2& d);
Json to_json(const GroupFunction& f);
Json to_json(const PatternHypergraph& f);

GroupVector vector_from_json(const Json& j, int p);
SymmetricForm form_from_json(const Json& j, int p);
Label label_from_json(const Json& j, int p);

/// {"p","n","linear":[[...]],"quadratic":[[[row],...],...]} or the shorthand {"ell":l,"q":q}.
QuadraticFactor factor_from_json(const Json& j, const Space& space);
/// Linear vectors e_1..e_ell and forms built from the identity.
QuadraticFactor default_factor(const Space& space, int ell, int q);

/// explicit | bitmask_hex | atom | atom_union | random | coset_union.
SubsetBitmask set_from_json(const Json& j, const Space& space);

/// {"p","n","values":[[re,im],...]} or {"set": spec, "balanced": bool}.
GroupFunction function_from_json(const Json& j, const Space& space);

DirectionTuple3 direction3_from_json(const Json& j, int p);

/// FNV-1a over the bytes of s, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& s);
std::string digest(const Json& inputs);

}  // namespace qflab::lab
