#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fwb/structures.hpp"

namespace fwb {

enum class Status { pass, fail, skip };
const char* status_name(Status s);

struct CheckRecord {
  std::string id;
  Status status = Status::pass;
  std::string witness;  // always set on fail
  std::string detail;
  double seconds = 0;
};

struct SuiteReport {
  std::string suite;
  std::vector<std::pair<std::string, std::string>> bounds;
  std::vector<CheckRecord> checks;

  long count(Status s) const;
  bool ok() const { return count(Status::fail) == 0; }
  // Human-readable report; timings are left out unless asked for so that
  // reports of equal runs compare equal byte for byte.
  std::string text(bool timings = false) const;
  // One `check <id> <status> <witness>` line per record ("-" when empty).
  std::string lines() const;
};

struct SuiteBounds {
  int law_size = 3;          // class-law battery size bound
  int group_law_size = 6;    // the same for D_G classes
  int max_group_order = 6;
  int sample_size = 4;       // |X| bound for orbit completion
  int max_products = 4;
  int max_consumers = 3;
  int max_wheel = 5;         // gadget n
  int max_k = 4;             // gadget k
  int max_machine = 7;       // exhaustive Aut(M) abelian sweep
  int max_mixed = 5;         // distinguishing witness |M| bound
  int max_set = 10;          // h_embed over subsets of {1..max_set}
  int samples = 500;
  int steps = 200;
  std::uint64_t seed = 1;
};

// Throws PreconditionError on bounds outside the supported range.
void check_bounds(const SuiteBounds& b);

std::vector<std::string> suite_names();
// Throws PreconditionError on an unknown name.
SuiteReport run_suite(std::string_view name, const SuiteBounds& b);

SuiteReport suite_groups(const SuiteBounds& b);
SuiteReport suite_diversification(const SuiteBounds& b);
SuiteReport suite_consumer_product(const SuiteBounds& b);
SuiteReport suite_mixed_sum(const SuiteBounds& b);
SuiteReport suite_rotating_machines(const SuiteBounds& b);

// Bipartite condition on the elements below `prefix` of a structure with
// unary L, R and binary adj (given by relation index): for disjoint A, B of
// those elements with |A ∪ B| <= max_union there are l in L and r in R
// outside A ∪ B, l adjacent to A ∩ R and not to B ∩ R, r adjacent to A ∩ L
// and not to B ∩ L. Returns a description of the first failing (A, B).
std::optional<std::string> star_violation(const Structure& m, int l_rel, int r_rel, int adj_rel,
                                          int prefix, int max_union);

enum class Exec { serial, parallel };

// Aut(M) for every canonical labelled machine with |M| <= max_size (every
// machine is isomorphic to one of them), testing commutativity.
struct MachineSweep {
  long machines = 0;
  long non_abelian = 0;
  std::string first_witness;  // smallest failing (wheels, mask) in sweep order
};
MachineSweep machine_abelian_sweep(int max_size, Exec exec);

// Invariant factors of Z_{n1} x ... x Z_{nr}, ascending.
std::vector<long> cyclic_product_factors(const std::vector<int>& sizes);

}  // namespace fwb
