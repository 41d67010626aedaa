// Pure sets, linear orders, bipartite graphs and rotating machines.

#include <algorithm>
#include <numeric>

#include "catalog_internal.hpp"
#include "fwb/catalog.hpp"
#include "fwb/error.hpp"

namespace fwb {

using detail::copy_into;
using detail::disjoint_layout;
using detail::identity_prefix;

SignaturePtr bipartite_signature() {
  static const SignaturePtr sig = make_signature({{"L", 1}, {"R", 1}, {"adj", 2}});
  return sig;
}

SignaturePtr linear_order_signature() {
  static const SignaturePtr sig = make_signature({{"lt", 2}});
  return sig;
}

SignaturePtr machine_signature() {
  static const SignaturePtr sig = make_signature({{"lt", 2}, {"adj", 2}}, {"s"});
  return sig;
}

namespace {

const SignaturePtr& sets_signature() {
  static const SignaturePtr sig = make_signature({});
  return sig;
}

// Rank of each element under a strict order relation: number of elements
// below it.
std::vector<int> ranks(const Structure& m, int lt) {
  std::vector<int> rank(static_cast<std::size_t>(m.size()), 0);
  const Relation& rel = m.relation(lt);
  for (std::size_t i = 0; i < rel.size(); ++i) ++rank[rel.tuple(i)[1]];
  return rank;
}

std::vector<int> sorted_by_rank(const Structure& m, int lt) {
  auto rank = ranks(m, lt);
  std::vector<int> order(static_cast<std::size_t>(m.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rank[a] < rank[b]; });
  return order;
}

// Merges two chains over their common items. Each chain lists items in
// increasing order with the old (common) ones flagged; the k-th old item of
// one chain corresponds to the k-th old item of the other. Within a gap
// between old items the new items of the first chain come first.
// Returns (chain, index) pairs; old items are reported from the first chain.
std::vector<std::pair<int, int>> merge_chains(const std::vector<char>& first_old,
                                              const std::vector<char>& second_old) {
  std::vector<std::vector<int>> gap1(1), gap2(1);
  std::vector<int> old1;
  for (std::size_t i = 0; i < first_old.size(); ++i) {
    if (first_old[i]) {
      old1.push_back(static_cast<int>(i));
      gap1.emplace_back();
    } else {
      gap1.back().push_back(static_cast<int>(i));
    }
  }
  for (std::size_t i = 0; i < second_old.size(); ++i) {
    if (second_old[i])
      gap2.emplace_back();
    else
      gap2.back().push_back(static_cast<int>(i));
  }
  if (gap1.size() != gap2.size()) throw ConstructionFailure("chain merge: common parts differ");
  std::vector<std::pair<int, int>> out;
  for (std::size_t j = 0; j < gap1.size(); ++j) {
    for (int i : gap1[j]) out.emplace_back(0, i);
    for (int i : gap2[j]) out.emplace_back(1, i);
    if (j < old1.size()) out.emplace_back(0, old1[j]);
  }
  return out;
}

Extension add_isolated(const Structure& m, int k) {
  StructureBuilder b(m.signature_ptr(), m.size() + k);
  copy_into(b, m, identity_prefix(m.size()).map);
  return Extension{b.build(), identity_prefix(m.size())};
}

bool lo_generate_chain(int n, const std::function<bool(const Structure&)>& visit) {
  StructureBuilder b(linear_order_signature(), n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) b.add(0, {i, j});
  return visit(b.build());
}

}  // namespace

ClassPtr class_pure_sets() {
  static const ClassPtr instance = [] {
    ClassSpec c;
    c.name = "sets";
    c.signature = sets_signature();
    c.violation = [](const Structure&) -> std::optional<std::string> { return std::nullopt; };
    c.amalgamate = [](const Structure&, const Structure& x, const Embedding& f, const Structure& y,
                      const Embedding& g) {
      auto l = disjoint_layout(x, f, y, g);
      return Amalgam{StructureBuilder(x.signature_ptr(), l.size).build(), identity_prefix(x.size()),
                     Embedding{l.gy}};
    };
    c.generic_extend = add_isolated;
    c.generate = [](int n, const std::function<bool(const Structure&)>& visit) {
      visit(StructureBuilder(sets_signature(), n).build());
    };
    c.claims_disjoint = true;
    return finalize(std::move(c));
  }();
  return instance;
}

ClassPtr class_linear_orders() {
  static const ClassPtr instance = [] {
    ClassSpec c;
    c.name = "lo";
    c.signature = linear_order_signature();
    c.violation = [](const Structure& m) -> std::optional<std::string> {
      const int n = m.size();
      for (int x = 0; x < n; ++x) {
        if (m.holds(0, {x, x})) return "lt is not irreflexive at " + std::to_string(x);
        for (int y = x + 1; y < n; ++y)
          if (m.holds(0, {x, y}) == m.holds(0, {y, x}))
            return "lt does not order " + std::to_string(x) + " and " + std::to_string(y) +
                   " exactly one way";
      }
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (m.holds(0, {x, y}))
            for (int z = 0; z < n; ++z)
              if (m.holds(0, {y, z}) && !m.holds(0, {x, z}))
                return "lt is not transitive at " + std::to_string(x) + "," + std::to_string(y) +
                       "," + std::to_string(z);
      return std::nullopt;
    };
    c.amalgamate = [](const Structure&, const Structure& x, const Embedding& f, const Structure& y,
                      const Embedding& g) {
      auto l = disjoint_layout(x, f, y, g);
      auto xs = sorted_by_rank(x, 0);
      auto ys = sorted_by_rank(y, 0);
      std::vector<char> x_old, y_old;
      for (int v : xs) x_old.push_back(l.x_old[v]);
      for (int v : ys) y_old.push_back(!l.y_new[v]);
      std::vector<int> order;
      for (auto [side, i] : merge_chains(x_old, y_old)) order.push_back(side == 0 ? xs[i] : l.gy[ys[i]]);
      StructureBuilder b(x.signature_ptr(), l.size);
      for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j) b.add(0, {order[i], order[j]});
      return Amalgam{b.build(), identity_prefix(x.size()), Embedding{l.gy}};
    };
    // New elements go above everything, in index order.
    c.generic_extend = [](const Structure& m, int k) {
      StructureBuilder b(m.signature_ptr(), m.size() + k);
      copy_into(b, m, identity_prefix(m.size()).map);
      for (int v = m.size(); v < m.size() + k; ++v)
        for (int u = 0; u < v; ++u) b.add(0, {u, v});
      return Extension{b.build(), identity_prefix(m.size())};
    };
    c.generate = [](int n, const std::function<bool(const Structure&)>& visit) {
      lo_generate_chain(n, visit);
    };
    c.claims_disjoint = true;
    return finalize(std::move(c));
  }();
  return instance;
}

ClassPtr class_bipartite() {
  static const ClassPtr instance = [] {
    ClassSpec c;
    c.name = "bipartite";
    c.signature = bipartite_signature();
    c.violation = [](const Structure& m) -> std::optional<std::string> {
      for (int x = 0; x < m.size(); ++x)
        if (m.in(0, x) == m.in(1, x))
          return "element " + std::to_string(x) + " is not in exactly one of L, R";
      const Relation& adj = m.relation(2);
      for (std::size_t i = 0; i < adj.size(); ++i) {
        auto t = adj.tuple(i);
        if (!m.holds(2, {t[1], t[0]}))
          return "adj is not symmetric at " + std::to_string(t[0]) + "," + std::to_string(t[1]);
        if (m.in(0, t[0]) == m.in(0, t[1]))
          return "adj joins " + std::to_string(t[0]) + " and " + std::to_string(t[1]) +
                 " on the same side";
      }
      return std::nullopt;
    };
    c.amalgamate = [](const Structure&, const Structure& x, const Embedding& f, const Structure& y,
                      const Embedding& g) {
      auto l = disjoint_layout(x, f, y, g);
      StructureBuilder b(x.signature_ptr(), l.size);
      copy_into(b, x, identity_prefix(x.size()).map);
      copy_into(b, y, l.gy);
      return Amalgam{b.build(), identity_prefix(x.size()), Embedding{l.gy}};
    };
    // New vertices join L with no edges.
    c.generic_extend = [](const Structure& m, int k) {
      StructureBuilder b(m.signature_ptr(), m.size() + k);
      copy_into(b, m, identity_prefix(m.size()).map);
      for (int v = m.size(); v < m.size() + k; ++v) b.add(0, {v});
      return Extension{b.build(), identity_prefix(m.size())};
    };
    c.generate = [](int n, const std::function<bool(const Structure&)>& visit) {
      for (int left = 0; left <= n; ++left) {
        const int right = n - left;
        const int pairs = left * right;
        for (unsigned long long mask = 0; mask < (1ULL << pairs); ++mask) {
          StructureBuilder b(bipartite_signature(), n);
          for (int v = 0; v < n; ++v) b.add(v < left ? 0 : 1, {v});
          for (int i = 0; i < pairs; ++i)
            if (mask >> i & 1ULL) {
              int u = i / right, v = left + i % right;
              b.add(2, {u, v});
              b.add(2, {v, u});
            }
          if (!visit(b.build())) return;
        }
      }
    };
    c.claims_disjoint = true;
    return finalize(std::move(c));
  }();
  return instance;
}

// ---- rotating machines ----

std::vector<std::vector<int>> machine_wheels(const Structure& m) {
  const auto& s = m.function(0);
  std::vector<char> seen(static_cast<std::size_t>(m.size()), 0);
  std::vector<std::vector<int>> wheels;
  for (int x = 0; x < m.size(); ++x) {
    if (seen[x]) continue;
    std::vector<int> w;
    for (int y = x; !seen[y]; y = s[y]) {
      seen[y] = 1;
      w.push_back(y);
    }
    wheels.push_back(std::move(w));
  }
  auto rank = ranks(m, 0);
  std::stable_sort(wheels.begin(), wheels.end(),
                   [&](const auto& a, const auto& b) { return rank[a[0]] < rank[b[0]]; });
  return wheels;
}

std::vector<std::vector<int>> compositions(int n) {
  if (n == 0) return {{}};
  std::vector<std::vector<int>> out;
  for (int first = 1; first <= n; ++first)
    for (auto rest : compositions(n - first)) {
      rest.insert(rest.begin(), first);
      out.push_back(std::move(rest));
    }
  return out;
}

int edge_orbit_count(const std::vector<int>& sizes) {
  int count = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    for (std::size_t j = i + 1; j < sizes.size(); ++j) count += std::gcd(sizes[i], sizes[j]);
  return count;
}

Structure machine(const std::vector<int>& sizes, unsigned long long edge_mask) {
  const int n = std::accumulate(sizes.begin(), sizes.end(), 0);
  StructureBuilder b(machine_signature(), n);
  std::vector<int> start;
  int at = 0;
  for (int size : sizes) {
    start.push_back(at);
    for (int t = 0; t < size; ++t) b.set(0, at + t, at + (t + 1) % size);
    at += size;
  }
  int bit = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    for (std::size_t j = i + 1; j < sizes.size(); ++j) {
      for (int u = 0; u < sizes[i]; ++u)
        for (int v = 0; v < sizes[j]; ++v) b.add(0, {start[i] + u, start[j] + v});
      const int ni = sizes[i], nj = sizes[j];
      const int orbits = std::gcd(ni, nj);
      const int len = ni / orbits * nj;
      for (int d = 0; d < orbits; ++d, ++bit) {
        if (!(edge_mask >> bit & 1ULL)) continue;
        for (int t = 0; t < len; ++t) {
          int u = start[i] + t % ni, v = start[j] + (d + t) % nj;
          b.add(1, {u, v});
          b.add(1, {v, u});
        }
      }
    }
  return b.build();
}

Structure wheel(int n) {
  if (n < 1) throw PreconditionError("wheel: size must be positive");
  return machine({n}, 0);
}

Structure gadget(int n, int k) {
  if (n < 1 || k < 1) throw PreconditionError("gadget: n and k must be positive");
  const int m = k * n;
  StructureBuilder b(machine_signature(), n + m);
  for (int x = 0; x < n; ++x) b.set(0, x, (x + 1) % n);
  for (int y = 0; y < m; ++y) b.set(0, n + y, n + (y + 1) % m);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y) {
      b.add(0, {x, n + y});
      if (x == y % n) {
        b.add(1, {x, n + y});
        b.add(1, {n + y, x});
      }
    }
  return b.build();
}

ClassPtr class_rotating_machines() {
  static const ClassPtr instance = [] {
    ClassSpec c;
    c.name = "rot";
    c.signature = machine_signature();
    c.violation = [](const Structure& m) -> std::optional<std::string> {
      const int n = m.size();
      const auto& s = m.function(0);
      if (!is_permutation(s)) return "V0: successor is not a bijection";
      std::vector<int> wheel_of(static_cast<std::size_t>(n), -1);
      int wheels = 0;
      for (int x = 0; x < n; ++x) {
        if (wheel_of[x] >= 0) continue;
        for (int y = x; wheel_of[y] < 0; y = s[y]) wheel_of[y] = wheels;
        ++wheels;
      }
      auto lt = [&](int x, int y) { return m.holds(0, {x, y}); };
      auto adj = [&](int x, int y) { return m.holds(1, {x, y}); };
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          const std::string at = std::to_string(x) + "," + std::to_string(y);
          if ((lt(x, y) || adj(x, y)) && wheel_of[x] == wheel_of[y])
            return "V2: relation inside one wheel at " + at;
          if (adj(x, y) && !adj(y, x)) return "V1: adj is not symmetric at " + at;
          if (lt(x, y))
            for (int z = 0; z < n; ++z)
              if (lt(y, z) && !lt(x, z)) return "V1: lt is not transitive at " + at + "," + std::to_string(z);
          if (adj(x, y) && !adj(s[x], s[y])) return "V4: adj not compatible with s at " + at;
        }
      // V3: distinct wheels compare blockwise.
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          if (wheel_of[x] == wheel_of[y]) continue;
          bool below = lt(x, y), above = lt(y, x);
          if (below == above)
            return "V3: " + std::to_string(x) + " and " + std::to_string(y) + " are not ordered";
          for (int u = 0; u < n; ++u)
            if (wheel_of[u] == wheel_of[x])
              for (int v = 0; v < n; ++v)
                if (wheel_of[v] == wheel_of[y] && lt(u, v) != below)
                  return "V3: wheels of " + std::to_string(x) + " and " + std::to_string(y) +
                         " are not ordered blockwise";
        }
      return std::nullopt;
    };
    c.amalgamate = [](const Structure&, const Structure& x, const Embedding& f, const Structure& y,
                      const Embedding& g) {
      auto l = disjoint_layout(x, f, y, g);
      auto xw = machine_wheels(x);
      auto yw = machine_wheels(y);
      std::vector<char> x_old, y_old;
      for (const auto& w : xw) x_old.push_back(l.x_old[w[0]]);
      for (const auto& w : yw) y_old.push_back(!l.y_new[w[0]]);
      StructureBuilder b(x.signature_ptr(), l.size);
      copy_into(b, x, identity_prefix(x.size()).map);
      copy_into(b, y, l.gy);
      std::vector<std::vector<int>> blocks;
      for (auto [side, i] : merge_chains(x_old, y_old)) {
        if (side == 0) {
          blocks.push_back(xw[i]);
        } else {
          std::vector<int> w;
          for (int v : yw[i]) w.push_back(l.gy[v]);
          blocks.push_back(std::move(w));
        }
      }
      for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
          for (int u : blocks[i])
            for (int v : blocks[j]) b.add(0, {u, v});
      return Amalgam{b.build(), identity_prefix(x.size()), Embedding{l.gy}};
    };
    // k one-element wheels above all existing wheels.
    c.generic_extend = [](const Structure& m, int k) {
      StructureBuilder b(m.signature_ptr(), m.size() + k);
      copy_into(b, m, identity_prefix(m.size()).map);
      for (int v = m.size(); v < m.size() + k; ++v) {
        b.set(0, v, v);
        for (int u = 0; u < v; ++u) b.add(0, {u, v});
      }
      return Extension{b.build(), identity_prefix(m.size())};
    };
    c.generate = [](int n, const std::function<bool(const Structure&)>& visit) {
      for (const auto& comp : compositions(n)) {
        const int orbits = edge_orbit_count(comp);
        if (orbits >= 63) throw CapExceeded("rot: too many edge orbits");
        for (unsigned long long mask = 0; mask < (1ULL << orbits); ++mask)
          if (!visit(machine(comp, mask))) return;
      }
    };
    c.claims_disjoint = true;
    return finalize(std::move(c));
  }();
  return instance;
}

}  // namespace fwb
