// Backtracking embedding search shared by all_embeddings, automorphisms,
// isomorphic and the extension queries of the limit construction.

#include <algorithm>
#include <sstream>

#include "fwb/error.hpp"
#include "fwb/structures.hpp"

namespace fwb {

// Per-element invariants. `exact` must agree between an element and its
// image under any embedding; `degree` may only grow (and must agree when the
// two structures have the same size).
struct Profile {
  std::vector<long> exact;
  std::vector<long> degree;
};

namespace {

std::vector<Profile> profiles(const Structure& m) {
  const auto& sig = m.signature();
  const int n = m.size();
  std::vector<Profile> out(static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    const Relation& rel = m.relation(static_cast<int>(r));
    const int arity = rel.arity();
    Tuple diag(static_cast<std::size_t>(arity));
    for (int x = 0; x < n; ++x) {
      std::fill(diag.begin(), diag.end(), x);
      out[x].exact.push_back(rel.contains(diag) ? 1 : 0);
      std::vector<long> pos(static_cast<std::size_t>(arity), 0);
      for (int id : rel.incident(x)) {
        auto t = rel.tuple(static_cast<std::size_t>(id));
        for (int j = 0; j < arity; ++j)
          if (t[j] == x) ++pos[j];
      }
      out[x].degree.insert(out[x].degree.end(), pos.begin(), pos.end());
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const auto& fn = m.function(static_cast<int>(f));
    std::vector<long> indeg(static_cast<std::size_t>(n), 0);
    for (int x = 0; x < n; ++x) ++indeg[fn[x]];
    for (int x = 0; x < n; ++x) {
      long period = 0;
      int y = fn[x];
      for (int step = 1; step <= n; ++step, y = fn[y])
        if (y == x) {
          period = step;
          break;
        }
      out[x].exact.push_back(period);
      out[x].degree.push_back(indeg[x]);
    }
  }
  return out;
}

class Search {
 public:
  Search(const Structure& dom, const Structure& cod, const std::vector<Profile>& pc,
         const std::function<bool(std::span<const int>)>& visit)
      : dom_(dom),
        cod_(cod),
        visit_(visit),
        bijective_(dom.size() == cod.size()),
        map_(static_cast<std::size_t>(dom.size()), -1),
        inv_(static_cast<std::size_t>(cod.size()), -1) {
    auto pd = profiles(dom_);
    candidates_.resize(static_cast<std::size_t>(dom_.size()));
    for (int a = 0; a < dom_.size(); ++a)
      for (int b = 0; b < cod_.size(); ++b)
        if (compatible(pd[a], pc[b])) candidates_[a].push_back(b);
    compute_order();
  }

  void run(std::span<const int> fixed) {
    for (std::size_t a = 0; a < fixed.size(); ++a) {
      if (fixed[a] < 0) continue;
      if (fixed[a] >= cod_.size()) return;
      if (!assign(static_cast<int>(a), fixed[a])) return;
    }
    dfs(0);
  }

 private:
  bool compatible(const Profile& a, const Profile& b) const {
    if (a.exact != b.exact) return false;
    for (std::size_t i = 0; i < a.degree.size(); ++i) {
      if (bijective_ ? a.degree[i] != b.degree[i] : a.degree[i] > b.degree[i]) return false;
    }
    return true;
  }

  // Most constrained first, then by connectivity to already ordered elements.
  void compute_order() {
    const int n = dom_.size();
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    const auto& sig = dom_.signature();
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
      const Relation& rel = dom_.relation(static_cast<int>(r));
      if (rel.arity() < 2) continue;
      for (std::size_t i = 0; i < rel.size(); ++i) {
        auto t = rel.tuple(i);
        for (int u : t)
          for (int v : t)
            if (u != v) adj[u].push_back(v);
      }
    }
    for (std::size_t f = 0; f < sig.functions().size(); ++f)
      for (int x = 0; x < n; ++x) {
        int y = dom_.apply(static_cast<int>(f), x);
        if (y != x) {
          adj[x].push_back(y);
          adj[y].push_back(x);
        }
      }
    std::vector<long> links(static_cast<std::size_t>(n), 0);
    std::vector<char> placed(static_cast<std::size_t>(n), 0);
    order_.reserve(static_cast<std::size_t>(n));
    for (int step = 0; step < n; ++step) {
      int best = -1;
      for (int x = 0; x < n; ++x) {
        if (placed[x]) continue;
        if (best < 0 || links[x] > links[best] ||
            (links[x] == links[best] && candidates_[x].size() < candidates_[best].size()))
          best = x;
      }
      placed[best] = 1;
      order_.push_back(best);
      for (int y : adj[best]) ++links[y];
    }
  }

  bool check_relations(int a, int b) {
    const auto& sig = dom_.signature();
    const int assigned = static_cast<int>(trail_.size());
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
      const Relation& rd = dom_.relation(static_cast<int>(r));
      const Relation& rc = cod_.relation(static_cast<int>(r));
      const int k = rd.arity();
      long combos = 1, fewer = 1;
      for (int i = 0; i < k; ++i) {
        combos *= assigned;
        fewer *= assigned - 1;
        if (combos > 1L << 20) break;
      }
      long scan = static_cast<long>(rd.incident(a).size() + rc.incident(b).size());
      if (combos - fewer <= scan) {
        if (!check_by_enumeration(rd, rc, a)) return false;
      } else if (!check_by_incidence(rd, rc, a, b)) {
        return false;
      }
    }
    return true;
  }

  // Every tuple over the assigned elements that mentions a.
  bool check_by_enumeration(const Relation& rd, const Relation& rc, int a) {
    const int k = rd.arity();
    const int s = static_cast<int>(trail_.size());
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    Tuple td(static_cast<std::size_t>(k)), tc(static_cast<std::size_t>(k));
    while (true) {
      bool has_a = false;
      for (int i = 0; i < k; ++i) {
        td[i] = trail_[idx[i]];
        tc[i] = map_[td[i]];
        has_a |= td[i] == a;
      }
      if (has_a && rd.contains(td) != rc.contains(tc)) return false;
      int i = k - 1;
      while (i >= 0 && ++idx[i] == s) idx[i--] = 0;
      if (i < 0) break;
    }
    return true;
  }

  bool check_by_incidence(const Relation& rd, const Relation& rc, int a, int b) {
    std::size_t count_dom = 0, count_cod = 0;
    Tuple img(static_cast<std::size_t>(rd.arity()));
    for (int id : rd.incident(a)) {
      auto t = rd.tuple(static_cast<std::size_t>(id));
      bool full = true;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (map_[t[i]] < 0) {
          full = false;
          break;
        }
        img[i] = map_[t[i]];
      }
      if (!full) continue;
      if (!rc.contains(img)) return false;
      ++count_dom;
    }
    for (int id : rc.incident(b)) {
      auto t = rc.tuple(static_cast<std::size_t>(id));
      if (std::all_of(t.begin(), t.end(), [&](int v) { return inv_[v] >= 0; })) ++count_cod;
    }
    return count_dom == count_cod;
  }

  bool assign(int a, int b) {
    if (map_[a] == b) return true;
    if (map_[a] >= 0 || inv_[b] >= 0) return false;
    if (!std::binary_search(candidates_[a].begin(), candidates_[a].end(), b)) return false;
    map_[a] = b;
    inv_[b] = a;
    trail_.push_back(a);
    if (!check_relations(a, b)) return false;
    const int nf = static_cast<int>(dom_.signature().functions().size());
    for (int f = 0; f < nf; ++f)
      if (!assign(dom_.apply(f, a), cod_.apply(f, b))) return false;
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      int a = trail_.back();
      trail_.pop_back();
      inv_[map_[a]] = -1;
      map_[a] = -1;
    }
  }

  void dfs(std::size_t pos) {
    while (pos < order_.size() && map_[order_[pos]] >= 0) ++pos;
    if (pos == order_.size()) {
      if (!visit_(map_)) stop_ = true;
      return;
    }
    int a = order_[pos];
    for (int b : candidates_[a]) {
      if (inv_[b] >= 0) continue;
      std::size_t mark = trail_.size();
      if (assign(a, b)) dfs(pos + 1);
      undo(mark);
      if (stop_) return;
    }
  }

  const Structure& dom_;
  const Structure& cod_;
  const std::function<bool(std::span<const int>)>& visit_;
  bool bijective_;
  bool stop_ = false;
  std::vector<int> map_, inv_, trail_, order_;
  std::vector<std::vector<int>> candidates_;
};

void require_same_signature(const Structure& a, const Structure& b) {
  if (a.signature_ptr() != b.signature_ptr() && !(a.signature() == b.signature()))
    throw SignatureMismatch("structures have different signatures");
}

}  // namespace

EmbeddingIndex::EmbeddingIndex(const Structure& cod)
    : cod_(cod), profiles_(std::make_shared<const std::vector<Profile>>(profiles(cod))) {}

void EmbeddingIndex::for_each(const Structure& dom, std::span<const int> fixed,
                              const std::function<bool(std::span<const int>)>& visit) const {
  require_same_signature(dom, cod_);
  if (dom.size() > cod_.size()) return;
  if (!fixed.empty() && static_cast<int>(fixed.size()) != dom.size())
    throw std::invalid_argument("embedding search: fixed map has wrong length");
  Search search(dom, cod_, *profiles_, visit);
  search.run(fixed);
}

std::optional<Embedding> EmbeddingIndex::find(const Structure& dom,
                                              std::span<const int> fixed) const {
  std::optional<Embedding> out;
  for_each(dom, fixed, [&](std::span<const int> m) {
    out = Embedding{std::vector<int>(m.begin(), m.end())};
    return false;
  });
  return out;
}

void for_each_embedding(const Structure& dom, const Structure& cod, std::span<const int> fixed,
                        const std::function<bool(std::span<const int>)>& visit) {
  EmbeddingIndex(cod).for_each(dom, fixed, visit);
}

std::vector<Embedding> all_embeddings(const Structure& dom, const Structure& cod) {
  std::vector<Embedding> out;
  for_each_embedding(dom, cod, {}, [&](std::span<const int> m) {
    out.push_back(Embedding{std::vector<int>(m.begin(), m.end())});
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Embedding> find_embedding(const Structure& dom, const Structure& cod,
                                        std::span<const int> fixed) {
  return EmbeddingIndex(cod).find(dom, fixed);
}

std::optional<Embedding> isomorphic(const Structure& a, const Structure& b) {
  require_same_signature(a, b);
  if (a.size() != b.size()) return std::nullopt;
  return find_embedding(a, b);
}

PermGroup automorphisms(const Structure& m, int size_cap) {
  if (m.size() > size_cap)
    throw CapExceeded("automorphisms: size " + std::to_string(m.size()) + " exceeds cap " +
                      std::to_string(size_cap));
  std::vector<Perm> elements;
  for_each_embedding(m, m, {}, [&](std::span<const int> map) {
    elements.emplace_back(std::vector<int>(map.begin(), map.end()));
    return true;
  });
  return PermGroup(m.size(), std::move(elements));
}

std::string invariant_key(const Structure& m) {
  auto ps = profiles(m);
  std::vector<std::vector<long>> rows;
  rows.reserve(ps.size());
  for (auto& p : ps) {
    std::vector<long> row = std::move(p.exact);
    row.insert(row.end(), p.degree.begin(), p.degree.end());
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end());
  std::ostringstream os;
  os << m.size();
  for (std::size_t r = 0; r < m.signature().relations().size(); ++r)
    os << ' ' << m.relation(static_cast<int>(r)).size();
  for (const auto& row : rows) {
    os << '|';
    for (long v : row) os << v << ',';
  }
  return os.str();
}

}  // namespace fwb
