#include "fwb/structures.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fwb/error.hpp"

namespace fwb {

Signature::Signature(std::vector<RelationSymbol> relations, std::vector<std::string> functions)
    : relations_(std::move(relations)), functions_(std::move(functions)) {
  std::set<std::string> names;
  for (const auto& r : relations_) {
    if (r.arity < 1) throw std::invalid_argument("relation '" + r.name + "' has arity < 1");
    if (r.name.empty()) throw std::invalid_argument("empty relation name");
    if (!names.insert(r.name).second)
      throw std::invalid_argument("duplicate symbol name '" + r.name + "'");
  }
  for (const auto& f : functions_) {
    if (f.empty()) throw std::invalid_argument("empty function name");
    if (!names.insert(f).second) throw std::invalid_argument("duplicate symbol name '" + f + "'");
  }
}

std::optional<int> Signature::relation_index(std::string_view name) const {
  for (std::size_t i = 0; i < relations_.size(); ++i)
    if (relations_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> Signature::function_index(std::string_view name) const {
  for (std::size_t i = 0; i < functions_.size(); ++i)
    if (functions_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

SignaturePtr make_signature(std::vector<RelationSymbol> relations,
                            std::vector<std::string> functions) {
  return std::make_shared<const Signature>(std::move(relations), std::move(functions));
}

namespace {

constexpr std::uint64_t kDenseLimit = 1u << 20;

bool tuple_in_range(std::span<const int> t, int universe) {
  return std::all_of(t.begin(), t.end(), [&](int v) { return v >= 0 && v < universe; });
}

}  // namespace

Relation::Relation(int arity, int universe, std::vector<Tuple> tuples)
    : arity_(arity), universe_(universe) {
  for (const auto& t : tuples)
    if (static_cast<int>(t.size()) != arity_)
      throw std::invalid_argument("tuple length does not match relation arity");
  std::sort(tuples.begin(), tuples.end());
  tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
  flat_.reserve(tuples.size() * static_cast<std::size_t>(arity_));
  for (const auto& t : tuples) flat_.insert(flat_.end(), t.begin(), t.end());

  std::uint64_t space = 1;
  bool small = true;
  for (int i = 0; i < arity_ && small; ++i) {
    space *= static_cast<std::uint64_t>(std::max(universe_, 1));
    if (space > kDenseLimit) small = false;
  }
  if (small) dense_.assign(space, false);

  std::vector<int> degree(static_cast<std::size_t>(std::max(universe_, 0)), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    auto t = tuple(i);
    if (!tuple_in_range(t, universe_)) {
      in_range_ = false;
      continue;
    }
    std::uint64_t k = key(t);
    if (small)
      dense_[k] = true;
    else
      keys_.push_back(k);
    for (int j = 0; j < arity_; ++j) {
      bool first = std::find(t.begin(), t.begin() + j, t[j]) == t.begin() + j;
      if (first) ++degree[t[j]];
    }
  }
  std::sort(keys_.begin(), keys_.end());

  incidence_start_.assign(degree.size() + 1, 0);
  for (std::size_t x = 0; x < degree.size(); ++x)
    incidence_start_[x + 1] = incidence_start_[x] + degree[x];
  incidence_.assign(static_cast<std::size_t>(incidence_start_.back()), 0);
  std::vector<int> fill(incidence_start_.begin(), incidence_start_.end() - 1);
  for (std::size_t i = 0; i < size(); ++i) {
    auto t = tuple(i);
    if (!tuple_in_range(t, universe_)) continue;
    for (int j = 0; j < arity_; ++j) {
      bool first = std::find(t.begin(), t.begin() + j, t[j]) == t.begin() + j;
      if (first) incidence_[fill[t[j]]++] = static_cast<int>(i);
    }
  }
}

std::uint64_t Relation::key(std::span<const int> t) const {
  std::uint64_t k = 0;
  for (int v : t) k = k * static_cast<std::uint64_t>(universe_) + static_cast<std::uint64_t>(v);
  return k;
}

bool Relation::contains(std::span<const int> t) const {
  if (static_cast<int>(t.size()) != arity_) return false;
  if (!tuple_in_range(t, universe_)) {
    if (in_range_) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (std::equal(t.begin(), t.end(), tuple(i).begin())) return true;
    return false;
  }
  std::uint64_t k = key(t);
  if (!dense_.empty()) return dense_[k];
  return std::binary_search(keys_.begin(), keys_.end(), k);
}

std::vector<Tuple> Relation::tuples() const {
  std::vector<Tuple> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto t = tuple(i);
    out.emplace_back(t.begin(), t.end());
  }
  return out;
}

Structure::Structure(SignaturePtr sig, int size, std::vector<std::vector<Tuple>> relations,
                     std::vector<std::vector<int>> functions)
    : sig_(std::move(sig)), size_(size), functions_(std::move(functions)) {
  if (!sig_) throw std::invalid_argument("Structure: null signature");
  if (size_ < 0) throw std::invalid_argument("Structure: negative size");
  const auto& rels = sig_->relations();
  if (relations.size() != rels.size())
    throw std::invalid_argument("Structure: relation table count does not match signature");
  if (functions_.size() != sig_->functions().size())
    throw std::invalid_argument("Structure: function table count does not match signature");
  for (const auto& f : functions_)
    if (static_cast<int>(f.size()) != size_)
      throw std::invalid_argument("Structure: function table length differs from size");
  relations_.reserve(rels.size());
  for (std::size_t r = 0; r < rels.size(); ++r)
    relations_.emplace_back(rels[r].arity, size_, std::move(relations[r]));
}

Structure Structure::empty(SignaturePtr sig) {
  std::size_t nr = sig->relations().size();
  std::size_t nf = sig->functions().size();
  return Structure(std::move(sig), 0, std::vector<std::vector<Tuple>>(nr),
                   std::vector<std::vector<int>>(nf));
}

const Relation& Structure::relation(std::string_view name) const {
  auto r = sig_->relation_index(name);
  if (!r) throw std::invalid_argument("unknown relation '" + std::string(name) + "'");
  return relations_[*r];
}

bool Structure::operator==(const Structure& other) const {
  if (size_ != other.size_) return false;
  if (sig_ != other.sig_ && !(*sig_ == *other.sig_)) return false;
  if (functions_ != other.functions_) return false;
  for (std::size_t r = 0; r < relations_.size(); ++r) {
    const auto& a = relations_[r];
    const auto& b = other.relations_[r];
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!std::equal(a.tuple(i).begin(), a.tuple(i).end(), b.tuple(i).begin())) return false;
  }
  return true;
}

StructureBuilder::StructureBuilder(SignaturePtr sig, int size)
    : sig_(std::move(sig)),
      size_(size),
      relations_(sig_->relations().size()),
      functions_(sig_->functions().size(), std::vector<int>(static_cast<std::size_t>(size), -1)) {}

StructureBuilder& StructureBuilder::add(int r, Tuple t) {
  if (static_cast<int>(t.size()) != sig_->relations().at(r).arity)
    throw std::invalid_argument("arity mismatch for relation '" + sig_->relations()[r].name + "'");
  relations_[r].push_back(std::move(t));
  return *this;
}

StructureBuilder& StructureBuilder::add(std::string_view relation, Tuple t) {
  auto r = sig_->relation_index(relation);
  if (!r) throw std::invalid_argument("unknown relation '" + std::string(relation) + "'");
  return add(*r, std::move(t));
}

StructureBuilder& StructureBuilder::set(int f, int x, int y) {
  functions_.at(f).at(x) = y;
  return *this;
}

StructureBuilder& StructureBuilder::set(std::string_view function, int x, int y) {
  auto f = sig_->function_index(function);
  if (!f) throw std::invalid_argument("unknown function '" + std::string(function) + "'");
  return set(*f, x, y);
}

Structure StructureBuilder::build() const {
  return Structure(sig_, size_, relations_, functions_);
}

Embedding compose(const Embedding& first, const Embedding& second) {
  Embedding out;
  out.map.reserve(first.map.size());
  for (int x : first.map) out.map.push_back(second.map.at(x));
  return out;
}

Embedding identity_embedding(int n) {
  Embedding e;
  e.map.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) e.map[i] = i;
  return e;
}

namespace {

void require_same_signature(const Structure& a, const Structure& b) {
  if (a.signature_ptr() != b.signature_ptr() && !(a.signature() == b.signature()))
    throw SignatureMismatch("structures have different signatures");
}

std::string tuple_text(std::span<const int> t) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
  os << ')';
  return os.str();
}

}  // namespace

std::optional<std::string> embedding_violation(const Structure& dom, const Structure& cod,
                                               const Embedding& e) {
  require_same_signature(dom, cod);
  if (static_cast<int>(e.map.size()) != dom.size()) return "map length differs from domain size";
  std::vector<int> inv(static_cast<std::size_t>(cod.size()), -1);
  for (int x = 0; x < dom.size(); ++x) {
    int y = e.map[x];
    if (y < 0 || y >= cod.size()) return "image of " + std::to_string(x) + " out of range";
    if (inv[y] >= 0) return "not injective at " + std::to_string(x);
    inv[y] = x;
  }
  const auto& sig = dom.signature();
  Tuple img;
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    const Relation& rd = dom.relation(static_cast<int>(r));
    const Relation& rc = cod.relation(static_cast<int>(r));
    for (std::size_t i = 0; i < rd.size(); ++i) {
      auto t = rd.tuple(i);
      img.assign(t.begin(), t.end());
      for (int& v : img) v = e.map[v];
      if (!rc.contains(img))
        return "relation " + sig.relations()[r].name + " not preserved at " + tuple_text(t);
    }
    std::set<int> ids;
    for (int x = 0; x < dom.size(); ++x)
      for (int id : rc.incident(e.map[x])) ids.insert(id);
    for (int id : ids) {
      auto t = rc.tuple(static_cast<std::size_t>(id));
      bool inside = std::all_of(t.begin(), t.end(), [&](int v) { return inv[v] >= 0; });
      if (!inside) continue;
      img.assign(t.begin(), t.end());
      for (int& v : img) v = inv[v];
      if (!rd.contains(img))
        return "relation " + sig.relations()[r].name + " not reflected at " + tuple_text(t);
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    for (int x = 0; x < dom.size(); ++x) {
      int fx = dom.apply(static_cast<int>(f), x);
      if (fx < 0 || fx >= dom.size()) return "domain function " + sig.functions()[f] + " invalid";
      if (e.map[fx] != cod.apply(static_cast<int>(f), e.map[x]))
        return "function " + sig.functions()[f] + " does not commute at " + std::to_string(x);
    }
  }
  return std::nullopt;
}

std::vector<std::string> validate(const Structure& m) {
  std::vector<std::string> out;
  const auto& sig = m.signature();
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    const Relation& rel = m.relation(static_cast<int>(r));
    for (std::size_t i = 0; i < rel.size(); ++i) {
      auto t = rel.tuple(i);
      for (int v : t)
        if (v < 0 || v >= m.size()) {
          out.push_back("entry out of range: " + sig.relations()[r].name + " " + tuple_text(t));
          break;
        }
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    for (int x = 0; x < m.size(); ++x) {
      int y = m.apply(static_cast<int>(f), x);
      if (y < 0)
        out.push_back("function not total: " + sig.functions()[f] + " undefined at " +
                      std::to_string(x));
      else if (y >= m.size())
        out.push_back("entry out of range: " + sig.functions()[f] + "(" + std::to_string(x) +
                      ") = " + std::to_string(y));
    }
  }
  return out;
}

std::vector<int> closure(const Structure& m, std::span<const int> seed) {
  std::vector<char> in(static_cast<std::size_t>(m.size()), 0);
  std::deque<int> queue;
  for (int x : seed) {
    if (x < 0 || x >= m.size()) throw std::out_of_range("closure: element out of range");
    if (!in[x]) {
      in[x] = 1;
      queue.push_back(x);
    }
  }
  const int nf = static_cast<int>(m.signature().functions().size());
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int f = 0; f < nf; ++f) {
      int y = m.apply(f, x);
      if (!in[y]) {
        in[y] = 1;
        queue.push_back(y);
      }
    }
  }
  std::vector<int> out;
  for (int x = 0; x < m.size(); ++x)
    if (in[x]) out.push_back(x);
  return out;
}

bool is_closed(const Structure& m, std::span<const int> subset) {
  std::vector<char> in(static_cast<std::size_t>(m.size()), 0);
  for (int x : subset) in[x] = 1;
  const int nf = static_cast<int>(m.signature().functions().size());
  for (int x : subset)
    for (int f = 0; f < nf; ++f)
      if (!in[m.apply(f, x)]) return false;
  return true;
}

Structure induced_substructure(const Structure& m, std::span<const int> subset) {
  std::vector<int> pos(static_cast<std::size_t>(m.size()), -1);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (pos[subset[i]] >= 0) throw std::invalid_argument("induced_substructure: repeated element");
    pos[subset[i]] = static_cast<int>(i);
  }
  const auto& sig = m.signature();
  std::vector<std::vector<Tuple>> rels(sig.relations().size());
  for (std::size_t r = 0; r < rels.size(); ++r) {
    const Relation& rel = m.relation(static_cast<int>(r));
    std::set<int> ids;
    for (int x : subset)
      for (int id : rel.incident(x)) ids.insert(id);
    for (int id : ids) {
      auto t = rel.tuple(static_cast<std::size_t>(id));
      Tuple mapped;
      mapped.reserve(t.size());
      bool inside = true;
      for (int v : t) {
        if (pos[v] < 0) {
          inside = false;
          break;
        }
        mapped.push_back(pos[v]);
      }
      if (inside) rels[r].push_back(std::move(mapped));
    }
  }
  std::vector<std::vector<int>> funs(sig.functions().size(),
                                     std::vector<int>(subset.size(), -1));
  for (std::size_t f = 0; f < funs.size(); ++f)
    for (std::size_t i = 0; i < subset.size(); ++i) {
      int y = pos[m.apply(static_cast<int>(f), subset[i])];
      if (y < 0) throw PreconditionError("induced_substructure: subset not closed under functions");
      funs[f][i] = y;
    }
  return Structure(m.signature_ptr(), static_cast<int>(subset.size()), std::move(rels),
                   std::move(funs));
}

Substructure generated_substructure(const Structure& m, std::span<const int> seed) {
  std::vector<int> s = closure(m, seed);
  Structure sub = induced_substructure(m, s);
  return {std::move(sub), Embedding{std::move(s)}};
}

Structure relabel(const Structure& m, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != m.size())
    throw std::invalid_argument("relabel: permutation length differs from size");
  const auto& sig = m.signature();
  std::vector<std::vector<Tuple>> rels(sig.relations().size());
  for (std::size_t r = 0; r < rels.size(); ++r) {
    const Relation& rel = m.relation(static_cast<int>(r));
    rels[r].reserve(rel.size());
    for (std::size_t i = 0; i < rel.size(); ++i) {
      auto t = rel.tuple(i);
      Tuple mapped(t.begin(), t.end());
      for (int& v : mapped) v = perm[v];
      rels[r].push_back(std::move(mapped));
    }
  }
  std::vector<std::vector<int>> funs(sig.functions().size(),
                                     std::vector<int>(static_cast<std::size_t>(m.size()), -1));
  for (std::size_t f = 0; f < funs.size(); ++f)
    for (int x = 0; x < m.size(); ++x) funs[f][perm[x]] = perm[m.apply(static_cast<int>(f), x)];
  return Structure(m.signature_ptr(), m.size(), std::move(rels), std::move(funs));
}

}  // namespace fwb
