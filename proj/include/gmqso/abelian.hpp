#pragma once

/**
 * @file abelian.hpp
 * @brief Finite Abelian groups as products of cyclic groups.
 *
 * A group Z_{n1} x ... x Z_{nr} is described by its list of cyclic orders.
 * Elements are residue tuples. Internally every element also has a dense
 * index in [0, m): mixed radix with the first coordinate most significant,
 * so index order coincides with lexicographic order on residue tuples.
 * Element sets are kept as sorted index lists, which makes set equality
 * plain vector equality.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gmqso/errors.hpp"

namespace gmqso {

/// Upper bound on |G| for operations that enumerate subgroups.
inline constexpr std::size_t kDefaultExhaustiveBound = 64;

/// Largest group order accepted at all (dense weight vectors are allocated).
inline constexpr std::size_t kMaxGroupOrder = std::size_t{1} << 24;

struct GroupElement {
  std::vector<std::int64_t> residues;

  GroupElement() = default;
  explicit GroupElement(std::vector<std::int64_t> r) : residues(std::move(r)) {}
  GroupElement(std::initializer_list<std::int64_t> r) : residues(r) {}

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

inline std::string to_string(const GroupElement& g) {
  std::string out = "[";
  for (std::size_t i = 0; i < g.residues.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(g.residues[i]);
  }
  return out + "]";
}

class GroupSpec {
 public:
  explicit GroupSpec(std::vector<std::int64_t> cyclic_orders)
      : orders_(std::move(cyclic_orders)) {
    if (orders_.empty()) throw DomainError("group spec needs at least one cyclic factor");
    std::size_t m = 1;
    for (auto n : orders_) {
      if (n < 1) throw DomainError("cyclic order must be >= 1, got " + std::to_string(n));
      if (m > kMaxGroupOrder / static_cast<std::size_t>(n))
        throw CapacityError("group order exceeds " + std::to_string(kMaxGroupOrder));
      m *= static_cast<std::size_t>(n);
    }
    order_ = m;
    strides_.assign(orders_.size(), 1);
    for (std::size_t i = orders_.size() - 1; i-- > 0;)
      strides_[i] = strides_[i + 1] * static_cast<std::size_t>(orders_[i + 1]);
  }
  GroupSpec(std::initializer_list<std::int64_t> orders)
      : GroupSpec(std::vector<std::int64_t>(orders)) {}

  const std::vector<std::int64_t>& cyclic_orders() const { return orders_; }
  std::size_t rank() const { return orders_.size(); }
  std::size_t order() const { return order_; }

  bool is_valid(const GroupElement& g) const {
    if (g.residues.size() != orders_.size()) return false;
    for (std::size_t i = 0; i < orders_.size(); ++i)
      if (g.residues[i] < 0 || g.residues[i] >= orders_[i]) return false;
    return true;
  }

  void require_valid(const GroupElement& g) const {
    if (!is_valid(g))
      throw StructuralError("element " + gmqso::to_string(g) + " is not in " + to_string());
  }

  GroupElement zero() const { return GroupElement(std::vector<std::int64_t>(rank(), 0)); }

  GroupElement add(const GroupElement& a, const GroupElement& b) const {
    require_valid(a);
    require_valid(b);
    GroupElement out = a;
    for (std::size_t i = 0; i < rank(); ++i) out.residues[i] = (a.residues[i] + b.residues[i]) % orders_[i];
    return out;
  }

  GroupElement negate(const GroupElement& a) const {
    require_valid(a);
    GroupElement out = a;
    for (std::size_t i = 0; i < rank(); ++i) out.residues[i] = (orders_[i] - a.residues[i]) % orders_[i];
    return out;
  }

  GroupElement subtract(const GroupElement& a, const GroupElement& b) const { return add(a, negate(b)); }

  /// k * g for k >= 0.
  GroupElement multiple(std::uint64_t k, const GroupElement& g) const {
    require_valid(g);
    GroupElement out = g;
    for (std::size_t i = 0; i < rank(); ++i) {
      auto n = static_cast<std::uint64_t>(orders_[i]);
      out.residues[i] = static_cast<std::int64_t>(((k % n) * static_cast<std::uint64_t>(g.residues[i])) % n);
    }
    return out;
  }

  std::size_t index_of(const GroupElement& g) const {
    require_valid(g);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < rank(); ++i) idx += static_cast<std::size_t>(g.residues[i]) * strides_[i];
    return idx;
  }

  GroupElement element_at(std::size_t idx) const {
    if (idx >= order_) throw StructuralError("element index out of range");
    GroupElement g{std::vector<std::int64_t>(rank())};
    for (std::size_t i = 0; i < rank(); ++i) {
      g.residues[i] = static_cast<std::int64_t>(idx / strides_[i]);
      idx %= strides_[i];
    }
    return g;
  }

  std::vector<GroupElement> elements() const {
    std::vector<GroupElement> out;
    out.reserve(order_);
    for (std::size_t i = 0; i < order_; ++i) out.push_back(element_at(i));
    return out;
  }

  // Index arithmetic without materializing residue tuples. Callers guarantee
  // indices are < order().
  std::size_t add_index(std::size_t a, std::size_t b) const {
    std::size_t out = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      const auto n = static_cast<std::size_t>(orders_[i]);
      const std::size_t da = (a / strides_[i]) % n;
      const std::size_t db = (b / strides_[i]) % n;
      out += ((da + db) % n) * strides_[i];
    }
    return out;
  }

  std::size_t neg_index(std::size_t a) const {
    std::size_t out = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      const auto n = static_cast<std::size_t>(orders_[i]);
      const std::size_t da = (a / strides_[i]) % n;
      out += ((n - da) % n) * strides_[i];
    }
    return out;
  }

  std::size_t sub_index(std::size_t a, std::size_t b) const { return add_index(a, neg_index(b)); }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (i) out += "xZ";
      else out += "Z";
      out += std::to_string(orders_[i]);
    }
    return out;
  }

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) { return a.orders_ == b.orders_; }

 private:
  std::vector<std::int64_t> orders_;
  std::vector<std::size_t> strides_;
  std::size_t order_ = 1;
};

inline void require_same_group(const GroupSpec& a, const GroupSpec& b) {
  if (!(a == b)) throw StructuralError("group mismatch: " + a.to_string() + " vs " + b.to_string());
}

inline void require_within_bound(const GroupSpec& spec, std::size_t bound) {
  if (spec.order() > bound)
    throw CapacityError("group order " + std::to_string(spec.order()) + " exceeds exhaustive-search bound " +
                        std::to_string(bound));
}

/// A finite set of elements of one group, stored as sorted unique indices.
class ElementSet {
 public:
  explicit ElementSet(GroupSpec spec) : spec_(std::move(spec)) {}

  ElementSet(GroupSpec spec, const std::vector<GroupElement>& members) : spec_(std::move(spec)) {
    idx_.reserve(members.size());
    for (const auto& g : members) idx_.push_back(spec_.index_of(g));
    normalize();
  }

  static ElementSet from_indices(GroupSpec spec, std::vector<std::size_t> indices) {
    ElementSet s(std::move(spec));
    for (auto i : indices)
      if (i >= s.spec_.order()) throw StructuralError("element index out of range");
    s.idx_ = std::move(indices);
    s.normalize();
    return s;
  }

  static ElementSet singleton(GroupSpec spec, const GroupElement& g) { return ElementSet(std::move(spec), {g}); }

  static ElementSet whole(GroupSpec spec) {
    std::vector<std::size_t> all(spec.order());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return from_indices(std::move(spec), std::move(all));
  }

  const GroupSpec& spec() const { return spec_; }
  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  const std::vector<std::size_t>& indices() const { return idx_; }

  bool contains_index(std::size_t i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }
  bool contains(const GroupElement& g) const { return spec_.is_valid(g) && contains_index(spec_.index_of(g)); }

  std::vector<GroupElement> elements() const {
    std::vector<GroupElement> out;
    out.reserve(idx_.size());
    for (auto i : idx_) out.push_back(spec_.element_at(i));
    return out;
  }

  /// Smallest member in canonical order. Requires a nonempty set.
  GroupElement front() const {
    if (idx_.empty()) throw DomainError("empty element set has no first member");
    return spec_.element_at(idx_.front());
  }

  bool is_subset_of(const ElementSet& other) const {
    require_same_group(spec_, other.spec_);
    return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
  }

  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      if (i) out += ",";
      out += gmqso::to_string(spec_.element_at(idx_[i]));
    }
    return out + "}";
  }

  friend bool operator==(const ElementSet& a, const ElementSet& b) { return a.spec_ == b.spec_ && a.idx_ == b.idx_; }
  friend bool operator<(const ElementSet& a, const ElementSet& b) { return a.idx_ < b.idx_; }

 private:
  void normalize() {
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
  }

  GroupSpec spec_;
  std::vector<std::size_t> idx_;
};

inline ElementSet set_union(const ElementSet& a, const ElementSet& b) {
  require_same_group(a.spec(), b.spec());
  std::vector<std::size_t> out;
  std::set_union(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
                 std::back_inserter(out));
  return ElementSet::from_indices(a.spec(), std::move(out));
}

/// {x + y : x in a, y in b}.
inline ElementSet sumset(const ElementSet& a, const ElementSet& b) {
  require_same_group(a.spec(), b.spec());
  if (a.empty() || b.empty()) throw DomainError("sumset of an empty set");
  const auto& spec = a.spec();
  std::vector<char> hit(spec.order(), 0);
  for (auto i : a.indices())
    for (auto j : b.indices()) hit[spec.add_index(i, j)] = 1;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < hit.size(); ++k)
    if (hit[k]) out.push_back(k);
  return ElementSet::from_indices(spec, std::move(out));
}

inline ElementSet translate(const ElementSet& a, const GroupElement& g) {
  const std::size_t gi = a.spec().index_of(g);
  std::vector<std::size_t> out;
  out.reserve(a.size());
  for (auto i : a.indices()) out.push_back(a.spec().add_index(i, gi));
  return ElementSet::from_indices(a.spec(), std::move(out));
}

inline bool is_closed_subgroup(const ElementSet& s) {
  if (!s.contains_index(0)) return false;
  const auto& spec = s.spec();
  for (auto i : s.indices())
    for (auto j : s.indices())
      if (!s.contains_index(spec.add_index(i, j))) return false;
  return true;
}

class Subgroup {
 public:
  /// Accepts `members` only if it contains 0 and is closed under addition.
  static std::optional<Subgroup> from_members(ElementSet members) {
    if (!is_closed_subgroup(members)) return std::nullopt;
    return Subgroup(std::move(members));
  }

  static Subgroup trivial(const GroupSpec& spec) { return Subgroup(ElementSet::singleton(spec, spec.zero())); }
  static Subgroup whole(const GroupSpec& spec) { return Subgroup(ElementSet::whole(spec)); }

  const ElementSet& members() const { return members_; }
  const GroupSpec& spec() const { return members_.spec(); }
  std::size_t order() const { return members_.size(); }
  bool contains(const GroupElement& g) const { return members_.contains(g); }
  bool contains_index(std::size_t i) const { return members_.contains_index(i); }

  friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.members_ == b.members_; }

 private:
  explicit Subgroup(ElementSet m) : members_(std::move(m)) {}
  ElementSet members_;
};

class Coset {
 public:
  Coset(GroupElement representative, Subgroup subgroup)
      : rep_(std::move(representative)), subgroup_(std::move(subgroup)) {
    subgroup_.spec().require_valid(rep_);
  }

  const GroupElement& representative() const { return rep_; }
  const Subgroup& subgroup() const { return subgroup_; }
  ElementSet elements() const { return translate(subgroup_.members(), rep_); }

  /// Same coset with its smallest member as representative.
  Coset canonical() const { return Coset(elements().front(), subgroup_); }

  std::string to_string() const { return gmqso::to_string(rep_) + "+" + subgroup_.members().to_string(); }

  friend bool operator==(const Coset& a, const Coset& b) {
    return a.subgroup_ == b.subgroup_ && a.elements() == b.elements();
  }

 private:
  GroupElement rep_;
  Subgroup subgroup_;
};

/// Smallest subgroup containing every generator. Grows S by S + (gens u {0})
/// until it stops changing; in a finite group that is closed under inverses.
inline Subgroup closure(const ElementSet& generators) {
  const auto& spec = generators.spec();
  const ElementSet step = set_union(generators, ElementSet::singleton(spec, spec.zero()));
  ElementSet current = step;
  for (;;) {
    ElementSet next = sumset(current, step);
    if (next == current) break;
    current = std::move(next);
  }
  return *Subgroup::from_members(std::move(current));
}

/// <g> = {0, g, 2g, ...}.
inline Subgroup cyclic_subgroup(const GroupSpec& spec, std::size_t g) {
  std::vector<std::size_t> idx{0};
  for (std::size_t h = g; h != 0; h = spec.add_index(h, g)) idx.push_back(h);
  return *Subgroup::from_members(ElementSet::from_indices(spec, std::move(idx)));
}

/// Every subgroup of `spec` exactly once, ordered by (order, members).
///
/// Breadth-first generator adjunction: start from {0} and repeatedly form
/// closure(S u {g}) = S + <g> for each subgroup S found and each coset g + S
/// other than S itself. A subgroup of a rank-r group is generated by at most
/// r elements, so it is reached in at most r rounds.
inline std::vector<Subgroup> enumerate_subgroups(const GroupSpec& spec,
                                                 std::size_t bound = kDefaultExhaustiveBound) {
  require_within_bound(spec, bound);
  std::vector<Subgroup> cyclic;
  cyclic.reserve(spec.order());
  for (std::size_t g = 0; g < spec.order(); ++g) cyclic.push_back(cyclic_subgroup(spec, g));

  std::map<std::vector<std::size_t>, Subgroup> seen;
  std::vector<Subgroup> frontier{Subgroup::trivial(spec)};
  seen.emplace(frontier.front().members().indices(), frontier.front());
  while (!frontier.empty()) {
    std::vector<Subgroup> next;
    for (const auto& s : frontier) {
      std::vector<char> covered(spec.order(), 0);
      for (auto i : s.members().indices()) covered[i] = 1;
      for (std::size_t g = 0; g < spec.order(); ++g) {
        if (covered[g]) continue;
        for (auto i : s.members().indices()) covered[spec.add_index(g, i)] = 1;
        auto joined = *Subgroup::from_members(sumset(s.members(), cyclic[g].members()));
        if (seen.emplace(joined.members().indices(), joined).second) next.push_back(std::move(joined));
      }
    }
    frontier = std::move(next);
  }
  std::vector<Subgroup> out;
  out.reserve(seen.size());
  for (auto& [key, sg] : seen) out.push_back(sg);
  std::stable_sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.members() < b.members();
  });
  return out;
}

struct DoublingOrbit {
  std::size_t preperiod = 0;
  std::size_t period = 1;
  /// 2^0 g, 2^1 g, ..., 2^(preperiod+period-1) g.
  std::vector<GroupElement> orbit;
};

/// Eventually periodic structure of n -> 2^n g.
inline DoublingOrbit doubling_orbit(const GroupSpec& spec, const GroupElement& g) {
  std::map<std::size_t, std::size_t> first_seen;
  std::vector<std::size_t> seq;
  std::size_t cur = spec.index_of(g);
  while (!first_seen.count(cur)) {
    first_seen.emplace(cur, seq.size());
    seq.push_back(cur);
    cur = spec.add_index(cur, cur);
  }
  DoublingOrbit out;
  out.preperiod = first_seen.at(cur);
  out.period = seq.size() - out.preperiod;
  for (auto i : seq) out.orbit.push_back(spec.element_at(i));
  return out;
}

/// Least n >= 1 with n g = 0.
inline std::uint64_t element_order(const GroupSpec& spec, const GroupElement& g) {
  spec.require_valid(g);
  std::uint64_t ord = 1;
  for (std::size_t i = 0; i < spec.rank(); ++i) {
    const auto n = static_cast<std::uint64_t>(spec.cyclic_orders()[i]);
    const auto r = static_cast<std::uint64_t>(g.residues[i]);
    ord = std::lcm(ord, n / std::gcd(n, r));
  }
  return ord;
}

}  // namespace gmqso
