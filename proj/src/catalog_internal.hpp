// Helpers shared by the catalog translation units.
#pragma once

#include <vector>

#include "fwb/fraisse.hpp"

namespace fwb::detail {

// Universe of an amalgam of f: Z -> X and g: Z -> Y laid out as X followed
// by the elements of Y outside g(Z), in Y order.
struct Layout {
  int x_size = 0;
  int size = 0;
  std::vector<int> gy;          // Y -> W
  std::vector<char> y_new;      // y not in g(Z)
  std::vector<char> x_old;      // x in f(Z)
};
Layout disjoint_layout(const Structure& x, const Embedding& f, const Structure& y,
                       const Embedding& g);

// Adds every tuple and function value of `src`, mapped through `map`.
void copy_into(StructureBuilder& b, const Structure& src, const std::vector<int>& map);

Embedding identity_prefix(int n);

// A base-class structure sitting on some elements of a larger universe:
// element i of `s` is host element at[i].
struct Placed {
  Structure s;
  std::vector<int> at;
};

// Disjoint base amalgam of a and b over the host elements they share,
// restricted to the union of the two images.
Placed place_amalgam(const ClassSpec& base, const Placed& a, const Placed& b);
// a extended by the base class's generic_extend onto the host elements
// new_at (in order).
Placed place_extension(const ClassSpec& base, const Placed& a, const std::vector<int>& new_at);
// The base structure induced on host elements `at` through relations
// `rel_of[r]` of the host (host relation indices, one per base relation).
// When `extra` >= 0 it is appended as the last coordinate of every tuple
// (a consumer, for diversified slices).
Placed place_part(const Structure& host, const Signature& base, SignaturePtr base_ptr,
                  const std::vector<int>& at, const std::vector<int>& rel_of, int extra = -1);

// Every labelled member of size n (all relabellings of each type), sorted
// by serialization. Throws CapExceeded above `limit` structures.
std::vector<Structure> labelled_members(const ClassSpec& c, int n, long limit);

std::string join_ints(const std::vector<int>& v);

}  // namespace fwb::detail
