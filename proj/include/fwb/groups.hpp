#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fwb/perm.hpp"
#include "fwb/structures.hpp"

namespace fwb {

// Abstract finite group by multiplication table; element 0 is the identity.
class GroupTable {
 public:
  GroupTable(int order, std::vector<int> table, std::string name = {});

  int order() const { return order_; }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a * order_ + b)]; }
  int inverse(int a) const { return inverse_[a]; }
  int identity() const { return 0; }
  const std::string& name() const { return name_; }

  // Associativity, identity and inverse laws; empty means valid.
  std::vector<std::string> violations() const;

  static GroupTable cyclic(int n);
  // Elements are the permutations of {0..n-1} in lexicographic order.
  static GroupTable symmetric(int n);
  static GroupTable product(const GroupTable& a, const GroupTable& b);

 private:
  int order_;
  std::vector<int> table_;
  std::vector<int> inverse_;
  std::string name_;
};

// Group specs: cyclic:<n>, sym:<n>, Z<n>, S<n>, prod:<spec>,<spec>.
GroupTable parse_group_spec(std::string_view spec);

// Text format: `order <m>` then `mul <i> <j> <k>` lines (identity is 0).
GroupTable parse_group_table(std::string_view text);
std::string serialize_group_table(const GroupTable& g);

// Right action x -> x^g of a GroupTable on {0..carrier-1}.
class GAction {
 public:
  GAction(int carrier, GroupTable group, std::vector<int> act);

  int carrier() const { return carrier_; }
  const GroupTable& group() const { return group_; }
  int act(int x, int g) const { return act_[static_cast<std::size_t>(x * group_.order() + g)]; }

  // Identity acts trivially and (x^g)^h = x^(gh); empty means valid.
  std::vector<std::string> violations() const;

  static GAction cayley(const GroupTable& g);

 private:
  int carrier_;
  GroupTable group_;
  std::vector<int> act_;
};

struct FixedPointWitness {
  int point;
  int element;
};
std::optional<FixedPointWitness> fixed_point(const GAction& a);
inline bool is_free_action(const GAction& a) { return !fixed_point(a).has_value(); }

struct ActionWitness {
  int element;
  std::string symbol;
  Tuple tuple;
};
// nullopt iff every group element induces an automorphism of m.
std::optional<ActionWitness> action_violation(const GAction& a, const Structure& m);
inline bool acts_by_automorphisms(const GAction& a, const Structure& m) {
  return !action_violation(a, m).has_value();
}

struct GroupIdentity {
  std::size_t order = 0;
  bool is_abelian = false;
  bool is_cyclic = false;
  std::vector<long> invariant_factors;  // abelian only; d1 | d2 | ... ascending
  std::vector<long> element_orders;     // sorted multiset
  std::string describe() const;
  bool operator==(const GroupIdentity&) const = default;
};

std::vector<long> element_orders(const PermGroup& g);
bool is_abelian(const PermGroup& g);
bool has_element_of_order(const PermGroup& g, long k);
GroupIdentity identify(const PermGroup& g);

// Invariant factors of an abelian group of the given order from the orders
// of its elements.
std::vector<long> invariant_factors_from_orders(const std::vector<long>& orders);

using IntSet = std::vector<long>;  // sorted, duplicate-free

IntSet symdiff_compose(const IntSet& a, const IntSet& b);

// Finite-support permutation of the integers, stored as its support map.
class IntPermutation {
 public:
  IntPermutation() = default;
  explicit IntPermutation(std::map<long, long> support);

  long operator()(long x) const;
  IntPermutation then(const IntPermutation& q) const;
  bool is_identity() const { return support_.empty(); }
  long order() const;
  const std::map<long, long>& support() const { return support_; }
  bool operator==(const IntPermutation&) const = default;

 private:
  std::map<long, long> support_;
};

// x -> -x on A, identity elsewhere. A must not contain 0 or negatives.
IntPermutation h_embed(const IntSet& a);

}  // namespace fwb
