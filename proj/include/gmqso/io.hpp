#pragma once

// JSON and CSV encodings.
//
//   group      [n1, ..., nr]
//   element    [r1, ..., rr]            (a bare integer is accepted for rank 1)
//   point      {"[r1,...]": weight, ...} zero weights omitted; a dense array
//                                       in element order is also accepted
//   weight     number (float) or "p/q" string (rational)
//   operator   {"group": [...], "mu": <point>}

#include <json.hpp>

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "gmqso/abelian.hpp"
#include "gmqso/qso.hpp"
#include "gmqso/scalar.hpp"
#include "gmqso/simplex.hpp"

namespace gmqso::io {

using json = nlohmann::json;

inline json to_json(const GroupSpec& spec) { return spec.cyclic_orders(); }

inline GroupSpec group_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("group must be a nonempty JSON array of cyclic orders");
  std::vector<std::int64_t> orders;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ValidationError("cyclic order must be an integer, got " + v.dump());
    orders.push_back(v.get<std::int64_t>());
  }
  try {
    return GroupSpec(std::move(orders));
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
}

inline json to_json(const GroupElement& g) { return g.residues; }

inline GroupElement element_from_json(const GroupSpec& spec, const json& j) {
  GroupElement g;
  if (j.is_number_integer() && spec.rank() == 1) {
    g.residues = {j.get<std::int64_t>()};
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw ValidationError("residue must be an integer, got " + v.dump());
      g.residues.push_back(v.get<std::int64_t>());
    }
  } else {
    throw ValidationError("element must be an array of residues, got " + j.dump());
  }
  if (!spec.is_valid(g)) throw ValidationError("element " + j.dump() + " is not in " + spec.to_string());
  return g;
}

/// Canonical object key for an element: its compact JSON array, e.g. "[1,2]".
inline std::string element_key(const GroupElement& g) { return to_string(g); }

inline GroupElement element_from_key(const GroupSpec& spec, const std::string& key) {
  json parsed;
  try {
    parsed = json::parse(key);
  } catch (const json::exception&) {
    throw ValidationError("element key '" + key + "' is not a JSON array or integer");
  }
  return element_from_json(spec, parsed);
}

template <Scalar T>
json weight_to_json(const T& v) {
  if constexpr (scalar_traits<T>::exact) return scalar_traits<T>::format(v);
  else return v;
}

template <Scalar T>
T weight_from_json(const json& j) {
  using tr = scalar_traits<T>;
  if (j.is_number_integer()) return tr::ratio(j.get<long>(), 1);
  if (j.is_number()) return tr::from_double(j.get<double>());
  if (j.is_string()) return tr::parse(j.get<std::string>());
  throw ValidationError("weight must be a number or \"p/q\" string, got " + j.dump());
}

template <Scalar T>
json to_json(const SimplexPoint<T>& x) {
  json out = json::object();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (scalar_traits<T>::sign(x[i]) != 0) out[element_key(x.spec().element_at(i))] = weight_to_json(x[i]);
  return out;
}

/// Raw weights without the simplex check, for callers that validate later.
template <Scalar T>
std::vector<T> weights_from_json(const GroupSpec& spec, const json& j) {
  std::vector<T> w(spec.order(), scalar_traits<T>::zero());
  if (j.is_array()) {
    if (j.size() != spec.order())
      throw ValidationError("dense weight array needs " + std::to_string(spec.order()) + " entries");
    for (std::size_t i = 0; i < j.size(); ++i) w[i] = weight_from_json<T>(j[i]);
    return w;
  }
  if (!j.is_object()) throw ValidationError("point must be a JSON object or array");
  std::vector<char> set(spec.order(), 0);
  for (const auto& [key, value] : j.items()) {
    const std::size_t idx = spec.index_of(element_from_key(spec, key));
    if (set[idx]) throw ValidationError("element " + key + " given twice");
    set[idx] = 1;
    w[idx] = weight_from_json<T>(value);
  }
  return w;
}

template <Scalar T>
SimplexPoint<T> point_from_json(const GroupSpec& spec, const json& j) {
  return SimplexPoint<T>::make(spec, weights_from_json<T>(spec, j));
}

template <Scalar T>
json to_json(const QsoOperator<T>& op) {
  return json{{"group", to_json(op.spec())}, {"mu", to_json(op.mu())}};
}

template <Scalar T>
QsoOperator<T> operator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("group") || !j.contains("mu"))
    throw ValidationError("operator JSON needs \"group\" and \"mu\"");
  const GroupSpec spec = group_from_json(j.at("group"));
  auto w = weights_from_json<T>(spec, j.at("mu"));
  check_stochasticity<T>(spec, w);
  return QsoOperator<T>(SimplexPoint<T>::make(spec, std::move(w)));
}

inline json to_json(const ElementSet& s) {
  json out = json::array();
  for (const auto& g : s.elements()) out.push_back(to_json(g));
  return out;
}

inline ElementSet set_from_json(const GroupSpec& spec, const json& j) {
  if (!j.is_array()) throw ValidationError("element set must be a JSON array");
  std::vector<GroupElement> members;
  for (const auto& e : j) members.push_back(element_from_json(spec, e));
  return ElementSet(spec, members);
}

inline json to_json(const Subgroup& u) { return to_json(u.members()); }

inline Subgroup subgroup_from_json(const GroupSpec& spec, const json& j) {
  auto u = Subgroup::from_members(set_from_json(spec, j));
  if (!u) throw ValidationError("element set " + j.dump() + " is not a subgroup");
  return *u;
}

inline json to_json(const Coset& c) {
  return json{{"representative", to_json(c.representative())},
              {"subgroup", to_json(c.subgroup())},
              {"elements", to_json(c.elements())}};
}

inline Coset coset_from_json(const GroupSpec& spec, const json& j) {
  Coset c(element_from_json(spec, j.at("representative")), subgroup_from_json(spec, j.at("subgroup")));
  if (j.contains("elements") && !(set_from_json(spec, j.at("elements")) == c.elements()))
    throw ValidationError("coset elements do not match representative + subgroup");
  return c;
}

/// One row per (step, element): step, residue columns c0..c{r-1}, weight.
template <Scalar T>
void write_trajectory_csv(std::ostream& out, const std::vector<SimplexPoint<T>>& states) {
  if (states.empty()) return;
  const auto& spec = states.front().spec();
  out << "step";
  for (std::size_t c = 0; c < spec.rank(); ++c) out << ",c" << c;
  out << ",weight\n";
  for (std::size_t n = 0; n < states.size(); ++n) {
    for (std::size_t i = 0; i < spec.order(); ++i) {
      out << n;
      for (auto r : spec.element_at(i).residues) out << ',' << r;
      out << ',' << scalar_traits<T>::format(states[n][i]) << '\n';
    }
  }
}

template <Scalar T>
json trajectory_to_json(const QsoOperator<T>& op, const std::vector<SimplexPoint<T>>& states) {
  json s = json::array();
  for (const auto& x : states) s.push_back(to_json(x));
  return json{{"group", to_json(op.spec())}, {"mu", to_json(op.mu())}, {"states", std::move(s)}};
}

}  // namespace gmqso::io
