#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fwb/perm.hpp"

namespace fwb {

struct RelationSymbol {
  std::string name;
  int arity = 1;
  bool operator==(const RelationSymbol&) const = default;
};

// Relation and unary function symbols. Names are unique across both kinds.
class Signature {
 public:
  Signature() = default;
  Signature(std::vector<RelationSymbol> relations, std::vector<std::string> functions);

  const std::vector<RelationSymbol>& relations() const { return relations_; }
  const std::vector<std::string>& functions() const { return functions_; }
  std::optional<int> relation_index(std::string_view name) const;
  std::optional<int> function_index(std::string_view name) const;
  bool relational() const { return functions_.empty(); }

  bool operator==(const Signature& other) const {
    return relations_ == other.relations_ && functions_ == other.functions_;
  }

 private:
  std::vector<RelationSymbol> relations_;
  std::vector<std::string> functions_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

SignaturePtr make_signature(std::vector<RelationSymbol> relations,
                            std::vector<std::string> functions = {});

using Tuple = std::vector<int>;

// One relation table. Tuples are kept sorted and duplicate-free; membership
// queries for in-range tuples are O(1) (dense) or O(log n) (sparse).
class Relation {
 public:
  Relation(int arity, int universe, std::vector<Tuple> tuples);

  int arity() const { return arity_; }
  std::size_t size() const { return flat_.size() / static_cast<std::size_t>(arity_); }
  std::span<const int> tuple(std::size_t i) const {
    return {flat_.data() + i * static_cast<std::size_t>(arity_), static_cast<std::size_t>(arity_)};
  }
  bool contains(std::span<const int> t) const;
  // Tuple ids containing element x (each id listed once).
  std::span<const int> incident(int x) const {
    if (x < 0 || static_cast<std::size_t>(x) + 1 >= incidence_start_.size()) return {};
    return {incidence_.data() + incidence_start_[x],
            static_cast<std::size_t>(incidence_start_[x + 1] - incidence_start_[x])};
  }
  std::vector<Tuple> tuples() const;

 private:
  std::uint64_t key(std::span<const int> t) const;

  int arity_;
  int universe_;
  bool in_range_ = true;
  std::vector<int> flat_;
  std::vector<std::uint64_t> keys_;
  std::vector<bool> dense_;
  std::vector<int> incidence_start_;
  std::vector<int> incidence_;
};

// A finite model over the universe {0..size-1}. Immutable once built. A
// Structure may hold out-of-range entries or partial function graphs; such
// values only come from direct construction and are reported by validate().
class Structure {
 public:
  Structure(SignaturePtr sig, int size, std::vector<std::vector<Tuple>> relations,
            std::vector<std::vector<int>> functions);
  static Structure empty(SignaturePtr sig);

  const Signature& signature() const { return *sig_; }
  const SignaturePtr& signature_ptr() const { return sig_; }
  int size() const { return size_; }

  const Relation& relation(int r) const { return relations_[r]; }
  const Relation& relation(std::string_view name) const;
  bool holds(int r, std::span<const int> t) const { return relations_[r].contains(t); }
  bool holds(int r, std::initializer_list<int> t) const {
    return relations_[r].contains(std::span<const int>(t.begin(), t.size()));
  }
  // Unary predicate membership; r must have arity 1.
  bool in(int r, int x) const { return relations_[r].contains(std::span<const int>(&x, 1)); }

  const std::vector<int>& function(int f) const { return functions_[f]; }
  int apply(int f, int x) const { return functions_[f][x]; }

  // Canonical text serialization (see text_format.hpp); equal structures
  // serialize identically.
  std::string serialize() const;

  bool operator==(const Structure& other) const;

 private:
  SignaturePtr sig_;
  int size_;
  std::vector<Relation> relations_;
  std::vector<std::vector<int>> functions_;
};

// Accumulates tuples and function values, then builds an immutable Structure.
class StructureBuilder {
 public:
  StructureBuilder(SignaturePtr sig, int size);
  StructureBuilder& add(int r, Tuple t);
  StructureBuilder& add(std::string_view relation, Tuple t);
  StructureBuilder& set(int f, int x, int y);
  StructureBuilder& set(std::string_view function, int x, int y);
  int size() const { return size_; }
  const Signature& signature() const { return *sig_; }
  Structure build() const;

 private:
  SignaturePtr sig_;
  int size_;
  std::vector<std::vector<Tuple>> relations_;
  std::vector<std::vector<int>> functions_;
};

// An injective map dom-universe -> cod-universe. Whether it is an embedding
// between two particular structures is checked by is_embedding().
struct Embedding {
  std::vector<int> map;
  int operator()(int x) const { return map[x]; }
  bool operator==(const Embedding&) const = default;
  auto operator<=>(const Embedding&) const = default;
};

Embedding compose(const Embedding& first, const Embedding& second);
Embedding identity_embedding(int n);

// Returns a description of the first violated embedding condition, or
// nullopt if `e` is injective, preserves and reflects every relation, and
// commutes with every function.
std::optional<std::string> embedding_violation(const Structure& dom, const Structure& cod,
                                               const Embedding& e);
inline bool is_embedding(const Structure& dom, const Structure& cod, const Embedding& e) {
  return !embedding_violation(dom, cod, e).has_value();
}

// validate: empty result means every structural invariant holds.
std::vector<std::string> validate(const Structure& m);

// Closure of `seed` under all functions, in increasing element order.
std::vector<int> closure(const Structure& m, std::span<const int> seed);
bool is_closed(const Structure& m, std::span<const int> subset);

// Substructure on a function-closed subset; universe renumbered in the
// order of `subset` (which must be sorted for order preservation).
Structure induced_substructure(const Structure& m, std::span<const int> subset);

struct Substructure {
  Structure structure;
  Embedding inclusion;
};
Substructure generated_substructure(const Structure& m, std::span<const int> seed);

// Structure with elements relabelled: element x of `m` becomes perm[x].
Structure relabel(const Structure& m, std::span<const int> perm);

// Visits every embedding dom -> cod extending `fixed` (entries < 0 are free,
// empty span means nothing fixed). When the sizes agree the search prunes
// with exact degree profiles, which makes automorphism and isomorphism
// queries cheap. The visitor returns false to stop early.
// Visit order is unspecified; callers that need an order sort the results.
void for_each_embedding(const Structure& dom, const Structure& cod, std::span<const int> fixed,
                        const std::function<bool(std::span<const int>)>& visit);

struct Profile;

// Reusable search target: precomputes the per-element invariants of `cod`
// once, for repeated extension queries into the same structure. Holds a
// reference to `cod`, which must outlive the index.
class EmbeddingIndex {
 public:
  explicit EmbeddingIndex(const Structure& cod);
  void for_each(const Structure& dom, std::span<const int> fixed,
                const std::function<bool(std::span<const int>)>& visit) const;
  std::optional<Embedding> find(const Structure& dom, std::span<const int> fixed = {}) const;
  const Structure& target() const { return cod_; }

 private:
  const Structure& cod_;
  std::shared_ptr<const std::vector<Profile>> profiles_;
};

std::vector<Embedding> all_embeddings(const Structure& dom, const Structure& cod);
std::optional<Embedding> find_embedding(const Structure& dom, const Structure& cod,
                                        std::span<const int> fixed = {});
std::optional<Embedding> isomorphic(const Structure& a, const Structure& b);

constexpr int kDefaultAutomorphismCap = 10;
PermGroup automorphisms(const Structure& m, int size_cap = kDefaultAutomorphismCap);

// An isomorphism-invariant key: structures with different keys are never
// isomorphic.
std::string invariant_key(const Structure& m);

}  // namespace fwb
