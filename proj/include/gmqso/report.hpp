#pragma once

// Classification report: regularity, s(mu)-invariant subgroups, periodic
// uniform orbits and fixed points of one operator, plus its JSON schema.

#include <optional>
#include <vector>

#include "gmqso/analysis.hpp"
#include "gmqso/io.hpp"

namespace gmqso {

struct ClassificationReport {
  GroupSpec group;
  bool regular = true;
  std::optional<RegularityWitness> witness;
  ElementSet mu_support;
  std::vector<Subgroup> invariant_subgroups;
  std::vector<PeriodicOrbit> periodic_orbits;
  /// Cosets C with V(u(C)) = u(C): the period-1 entries of periodic_orbits.
  std::vector<Coset> fixed_points;
};

template <Scalar T>
ClassificationReport classify(const QsoOperator<T>& op, std::size_t bound = kDefaultExhaustiveBound) {
  const auto verdict = is_regular(op, bound);
  const ElementSet s_mu = support(op.mu());
  ClassificationReport r{op.spec(), verdict.regular, verdict.witness, s_mu,
                         invariant_subgroups(op.spec(), s_mu, bound), periodic_orbits(op, bound), {}};
  for (const auto& o : r.periodic_orbits)
    if (o.minimal_period == 1) r.fixed_points.push_back(o.orbit.front());
  return r;
}

namespace io {

inline json to_json(const ClassificationReport& r) {
  json witnesses = json::array();
  if (r.witness) witnesses.push_back({{"subgroup", to_json(r.witness->subgroup)}, {"g", to_json(r.witness->g)}});
  json subgroups = json::array();
  for (const auto& u : r.invariant_subgroups) subgroups.push_back(to_json(u));
  json orbits = json::array();
  for (const auto& o : r.periodic_orbits) {
    json cosets = json::array();
    for (const auto& c : o.orbit) cosets.push_back(to_json(c));
    orbits.push_back({{"subgroup", to_json(o.subgroup)}, {"orbit", cosets}, {"minimal_period", o.minimal_period}});
  }
  json fixed = json::array();
  for (const auto& c : r.fixed_points) fixed.push_back(to_json(c));
  return json{
      {"group", to_json(r.group)},
      {"regular", r.regular},
      {"witnesses", witnesses},
      {"invariant_subgroups", {{"support", to_json(r.mu_support)}, {"subgroups", subgroups}}},
      {"periodic_orbits", orbits},
      {"fixed_points", fixed},
  };
}

/// Parses and structurally validates a report produced by to_json.
inline ClassificationReport report_from_json(const json& j) {
  try {
    const GroupSpec spec = group_from_json(j.at("group"));
    ClassificationReport r{spec, j.at("regular").get<bool>(), std::nullopt,
                           set_from_json(spec, j.at("invariant_subgroups").at("support")), {}, {}, {}};
    const auto& w = j.at("witnesses");
    if (w.size() > 1) throw ValidationError("at most one regularity witness expected");
    if (w.size() == 1) r.witness = RegularityWitness{subgroup_from_json(spec, w[0].at("subgroup")),
                                                     element_from_json(spec, w[0].at("g"))};
    if (r.regular == r.witness.has_value()) throw ValidationError("witness must be present iff regular is false");
    for (const auto& u : j.at("invariant_subgroups").at("subgroups"))
      r.invariant_subgroups.push_back(subgroup_from_json(spec, u));
    for (const auto& o : j.at("periodic_orbits")) {
      PeriodicOrbit orbit{subgroup_from_json(spec, o.at("subgroup")), {}, o.at("minimal_period").get<std::size_t>()};
      for (const auto& c : o.at("orbit")) orbit.orbit.push_back(coset_from_json(spec, c));
      if (orbit.orbit.size() != orbit.minimal_period) throw ValidationError("orbit length differs from its period");
      r.periodic_orbits.push_back(std::move(orbit));
    }
    for (const auto& c : j.at("fixed_points")) r.fixed_points.push_back(coset_from_json(spec, c));
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed classification report: ") + e.what());
  }
}

}  // namespace io
}  // namespace gmqso
