#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fwb/fraisse.hpp"
#include "fwb/groups.hpp"
#include "fwb/structures.hpp"

namespace fwb {

// Signatures. Bipartite graphs: L/1, R/1, adj/2. Linear orders: lt/2.
// Rotating machines: lt/2, adj/2 and the successor function s.
SignaturePtr bipartite_signature();
SignaturePtr linear_order_signature();
SignaturePtr machine_signature();

ClassPtr class_pure_sets();
ClassPtr class_linear_orders();
ClassPtr class_bipartite();
ClassPtr class_rotating_machines();

// D(base): P/1, C/1 and `~R` of arity n+1 for each n-ary base relation R.
// Requires a relational base that claims disjoint amalgamation.
ClassPtr diversify(ClassPtr base);

// D_G(base): D(base) plus unary functions act0..act{|G|-1}, act_g(x) = x^g,
// forming a free right action by automorphisms. Embeddings of such
// structures commute with the action.
ClassPtr diversify_with_action(ClassPtr base, const GroupTable& g);

// E ⋈ F: L/1, R/1, adj/2, `l.<name>` for E's relations and `r.<name>` for
// F's. Both sides relational with disjoint amalgamation.
ClassPtr mixed_sum(ClassPtr left, ClassPtr right);

// Registry names: sets, lo, bipartite, rot, div:<base>, divg:<base>:<group>,
// mix:<left>:<right>. Repeated lookups of one name share a class object.
ClassPtr class_by_name(std::string_view name);

// ---- diversified structures ----

SignaturePtr diversified_signature(const Signature& base);
SignaturePtr action_signature(const Signature& diversified, int group_order);

std::vector<int> products(const Structure& d);
std::vector<int> consumers(const Structure& d);
// Base structure on the products (in increasing order) induced by consumer c.
Structure slice(const Structure& d, const SignaturePtr& base, int c);

// Structure-with-action <-> (D-structure, GAction).
GAction action_of(const Structure& m, const GroupTable& g);
Structure attach_action(const Structure& d, const GAction& a);
Structure forget_action(const Structure& m);

struct FixedPart {
  std::vector<int> elements;  // a function-closed subset of X, sorted
  GAction action;             // on positions 0..|elements|-1
};

struct OrbitCompletion {
  Structure xg;          // with action functions
  Embedding embedding;   // X -> X^G
  GAction action;
};

// X^G for a nonempty X in D(base). Without a fixed part every element of X
// gets |G| copies x^g (x^1 = x keeps its index) and the embedding is the
// identity prefix. Elements of a fixed part keep their given action and are
// not duplicated.
OrbitCompletion orbit_completion(const ClassSpec& base, const Structure& x, const GroupTable& g,
                                 const std::optional<FixedPart>& fixed = std::nullopt);

// ---- consumer-product models (D of linear orders) ----

// Products sorted by consumer c's preference, least preferred first.
std::vector<int> preference(const Structure& m, int c);

struct PreferenceReport {
  bool distinct = true;
  int c = -1;
  int d = -1;
};
// True iff every two consumers disagree on some pair of products.
PreferenceReport cp_preference_distinct(const Structure& m);
// The same, restricted to the given consumers.
PreferenceReport cp_preference_distinct(const Structure& m, const std::vector<int>& among);

// ---- rotating machines ----

Structure wheel(int n);
// C = Z_n below D = Z_{kn}, x^C adj y^D iff x = y mod n. C is 0..n-1.
Structure gadget(int n, int k);
// Wheels as element lists, in block order, each starting at its least
// element and following s.
std::vector<std::vector<int>> machine_wheels(const Structure& m);

// Canonical labelled machines: wheel sizes in block order, wheels laid out
// consecutively, and `edge_mask` choosing successor orbits of cross-wheel
// pairs (bit i = i-th orbit in wheel-pair order).
std::vector<std::vector<int>> compositions(int n);
int edge_orbit_count(const std::vector<int>& wheel_sizes);
Structure machine(const std::vector<int>& wheel_sizes, unsigned long long edge_mask);

// ---- mixed sums ----

struct DistinguishingWitness {
  Structure m;  // M' ⊇ M, M occupying the first |M| elements
  int a0;
};
// Adds one L-element a0 adjacent to b0 and not to h(b0); the L-part is
// extended by the left class's generic_extend.
DistinguishingWitness distinguishing_witness(const ClassSpec& mix, const Structure& m,
                                             const Perm& h, int b0);

// The part of a mixed-sum structure on one side, over that side's signature,
// on the side's elements in increasing order.
Structure mixed_side(const ClassSpec& mix, const Structure& m, bool left);

}  // namespace fwb
