#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fwb/groups.hpp"
#include "fwb/structures.hpp"

namespace fwb {

// W together with embeddings fx: X -> W and gy: Y -> W.
struct Amalgam {
  Structure w;
  Embedding fx;
  Embedding gy;
};

// A structure M' containing M via `inclusion`.
struct Extension {
  Structure m;
  Embedding inclusion;
};

// Streams candidate structures of one size. Every member type of that size
// must appear at least once; non-members and repeats are allowed. The
// visitor returns false to stop.
using Generator = std::function<void(int n, const std::function<bool(const Structure&)>& visit)>;

struct EnumerationLimits {
  int max_size = 12;
  long max_candidates = 200000;
};

class MemberCache;

// A pluggable class definition.
struct ClassSpec {
  std::string name;
  SignaturePtr signature;
  // nullopt iff the structure (already known to be valid over `signature`)
  // belongs to the class.
  std::function<std::optional<std::string>(const Structure&)> violation;
  // Amalgamates f: Z -> X and g: Z -> Y.
  std::function<Amalgam(const Structure& z, const Structure& x, const Embedding& f,
                        const Structure& y, const Embedding& g)>
      amalgamate;
  // Adds k new elements to M.
  std::function<Extension(const Structure& m, int k)> generic_extend;
  Generator generate;
  bool claims_disjoint = false;
  // Component classes (the base of a diversification, both sides of a mixed
  // sum) and the acting group of D_G classes.
  std::vector<std::shared_ptr<const ClassSpec>> parts;
  std::shared_ptr<const GroupTable> group;

  std::shared_ptr<MemberCache> cache;

  // Signature match, structural validity and the class axioms.
  bool member(const Structure& m) const;
  std::optional<std::string> membership_violation(const Structure& m) const;
};

using ClassPtr = std::shared_ptr<const ClassSpec>;

// Gives `spec` a fresh member cache and returns it as a shared pointer.
ClassPtr finalize(ClassSpec spec);

// Members of size exactly n up to isomorphism, sorted by serialization.
// Throws CapExceeded when n exceeds limits.max_size or generation exceeds
// limits.max_candidates. Results are cached per class.
std::vector<Structure> enumerate_members(const ClassSpec& c, int n,
                                         const EnumerationLimits& limits = {});
// Cached reference variant; stays valid for the lifetime of the class.
const std::vector<Structure>& members(const ClassSpec& c, int n,
                                      const EnumerationLimits& limits = {});

struct LawReport {
  std::string law;
  std::string class_name;
  int max_n = 0;
  long cases = 0;
  long skipped = 0;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  bool ok() const { return failures.empty(); }
  std::string summary() const;
};

LawReport check_hereditary(const ClassSpec& c, int max_n);

struct AmalgamationOptions {
  // Oracle searches |W| from max(|X|,|Y|) up to |X|+|Y|, but never beyond
  // this size; triples needing more are counted as skipped.
  int oracle_size_cap = 8;
  EnumerationLimits limits{12, 50000};
  bool oracle = true;
};

LawReport check_amalgamation(const ClassSpec& c, int max_n, const AmalgamationOptions& opt = {});
LawReport check_jep(const ClassSpec& c, int max_n, const AmalgamationOptions& opt = {});

// Validates an amalgam of f: Z -> X, g: Z -> Y; returns a description of the
// first problem.
std::optional<std::string> amalgam_violation(const ClassSpec& c, const Structure& z,
                                             const Structure& x, const Embedding& f,
                                             const Structure& y, const Embedding& g,
                                             const Amalgam& a, bool require_disjoint);

// Exhaustive search for some amalgam W with size in [lo, hi]. Returns the
// first found in size-then-serialization order, or nullopt.
std::optional<Amalgam> oracle_amalgam(const ClassSpec& c, const Structure& x, const Embedding& f,
                                      const Structure& y, const Embedding& g, int lo, int hi,
                                      const EnumerationLimits& limits = {});

// A ⊆ B, both members, with A given as a function-closed subset of B.
struct PairType {
  Structure b;
  std::vector<int> a_in_b;  // sorted
  Structure a;              // induced on a_in_b, in that order
};

// Proper closed subsets of each member B with |B| <= cap, one per
// Aut(B)-orbit; ordered by |B|, then B, then the subset.
std::vector<PairType> pair_types(const ClassSpec& c, int cap);

struct Task {
  int type = 0;
  int created_at = 0;            // stage that e maps into
  std::vector<int> e;            // A -> stage
  int fulfilled_at = -1;         // stage holding the witness; -1 while pending
  std::vector<int> witness;      // B -> that stage, restricting to e on A
  bool by_step = false;          // realized by an amalgamation step
};

// E_0 ⊆ ... ⊆ E_t, stored as the top structure and the stage sizes; stage i
// is the substructure induced on the first sizes[i] elements of `top`.
struct LimitApproximation {
  std::string class_name;
  int steps = 0;
  int task_size_cap = 0;
  std::optional<std::uint64_t> seed;
  std::vector<int> sizes;
  Structure top;
  std::vector<PairType> types;
  std::vector<Task> ledger;
  // Largest i such that every task created at a stage <= i is fulfilled;
  // -1 if none.
  int settled = -1;
  int certified_level = 0;

  int stage_count() const { return static_cast<int>(sizes.size()); }
  Structure stage(int i) const;
};

LimitApproximation build_limit(const ClassSpec& c, int steps, int task_size_cap,
                               std::optional<std::uint64_t> seed = std::nullopt);

struct Certificate {
  bool ok = true;
  int stage = 0;                       // audited stage E_s
  long audited = 0;
  long missing_count = 0;
  std::vector<std::string> missing;    // first few unrealized extensions
};

// Re-audits, independently of the ledger, every extension A ⊆ B with
// |B| <= k and e: A -> E_s into the top, where s = max(settled, 0).
Certificate certify_extension_level(const ClassSpec& c, const LimitApproximation& apx, int k);

// manifest.txt, stage_NNNN.txt per stage, types.txt and ledger.txt.
void save_limit(const LimitApproximation& apx, const std::filesystem::path& dir);
// Restores everything but the pair types and ledger.
LimitApproximation load_limit(const std::filesystem::path& dir);

std::string serialize_ledger(const LimitApproximation& apx);

}  // namespace fwb
