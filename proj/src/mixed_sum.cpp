// Mixed sums E ⋈ F: an E-structure on L and an F-structure on R with an
// arbitrary bipartite adjacency between them.

#include <numeric>

#include "catalog_internal.hpp"
#include "fwb/catalog.hpp"
#include "fwb/error.hpp"

namespace fwb {

using detail::copy_into;
using detail::disjoint_layout;
using detail::identity_prefix;
using detail::Placed;
using detail::place_amalgam;
using detail::place_extension;
using detail::place_part;

namespace {

constexpr int kL = 0, kR = 1, kAdj = 2;

struct MixInfo {
  ClassPtr side[2];
  SignaturePtr sig;
  std::vector<int> rel_of[2];
};

std::vector<int> side_elements(const Structure& m, int s) {
  std::vector<int> out;
  for (int x = 0; x < m.size(); ++x)
    if (m.in(s, x)) out.push_back(x);
  return out;
}

Placed side_of(const MixInfo& info, const Structure& m, int s) {
  const auto& sig = info.side[s]->signature;
  return place_part(m, *sig, sig, side_elements(m, s), info.rel_of[s]);
}

void write_side(const MixInfo& info, StructureBuilder& b, const Placed& p, int s) {
  for (std::size_t r = 0; r < info.rel_of[s].size(); ++r) {
    const Relation& rel = p.s.relation(static_cast<int>(r));
    for (std::size_t i = 0; i < rel.size(); ++i) {
      Tuple t;
      for (int v : rel.tuple(i)) t.push_back(p.at[v]);
      b.add(info.rel_of[s][r], std::move(t));
    }
  }
}

std::optional<std::string> mix_violation(const MixInfo& info, const Structure& m) {
  for (int x = 0; x < m.size(); ++x)
    if (m.in(kL, x) == m.in(kR, x))
      return "element " + std::to_string(x) + " is not in exactly one of L, R";
  const Relation& adj = m.relation(kAdj);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    auto t = adj.tuple(i);
    if (!m.holds(kAdj, {t[1], t[0]}))
      return "adj is not symmetric at " + std::to_string(t[0]) + "," + std::to_string(t[1]);
    if (m.in(kL, t[0]) == m.in(kL, t[1]))
      return "adj joins " + std::to_string(t[0]) + " and " + std::to_string(t[1]) +
             " on the same side";
  }
  for (int s = 0; s < 2; ++s) {
    for (int r : info.rel_of[s]) {
      const Relation& rel = m.relation(r);
      for (std::size_t i = 0; i < rel.size(); ++i)
        for (int v : rel.tuple(i))
          if (!m.in(s, v))
            return m.signature().relations()[r].name + " tuple leaves its side at " +
                   std::to_string(v);
    }
    if (auto why = info.side[s]->membership_violation(side_of(info, m, s).s))
      return std::string(s == 0 ? "left" : "right") + " part: " + *why;
  }
  return std::nullopt;
}

Amalgam mix_amalgamate(const MixInfo& info, const Structure& x, const Embedding& f,
                       const Structure& y, const Embedding& g) {
  auto l = disjoint_layout(x, f, y, g);
  StructureBuilder b(info.sig, l.size);
  copy_into(b, x, identity_prefix(x.size()).map);
  copy_into(b, y, l.gy);
  for (int s = 0; s < 2; ++s) {
    Placed py = side_of(info, y, s);
    for (int& a : py.at) a = l.gy[a];
    write_side(info, b, place_amalgam(*info.side[s], side_of(info, x, s), py), s);
  }
  return Amalgam{b.build(), identity_prefix(x.size()), Embedding{l.gy}};
}

// New elements join L without edges; the L-part grows by E's generic_extend.
Extension mix_extend(const MixInfo& info, const Structure& m, int k) {
  const int n = m.size();
  StructureBuilder b(info.sig, n + k);
  copy_into(b, m, identity_prefix(n).map);
  std::vector<int> fresh(static_cast<std::size_t>(k));
  std::iota(fresh.begin(), fresh.end(), n);
  for (int v : fresh) b.add(kL, {v});
  write_side(info, b, place_extension(*info.side[0], side_of(info, m, 0), fresh), 0);
  return Extension{b.build(), identity_prefix(n)};
}

void mix_generate(const MixInfo& info, int n, const std::function<bool(const Structure&)>& visit) {
  for (int left = 0; left <= n; ++left) {
    const int right = n - left;
    const int pairs = left * right;
    if (pairs >= 63) throw CapExceeded("mixed sum: too many edge slots");
    const auto& es = members(*info.side[0], left);
    const auto& fs = members(*info.side[1], right);
    std::vector<int> lat(static_cast<std::size_t>(left)), rat(static_cast<std::size_t>(right));
    std::iota(lat.begin(), lat.end(), 0);
    std::iota(rat.begin(), rat.end(), left);
    for (const Structure& e : es)
      for (const Structure& fr : fs)
        for (unsigned long long mask = 0; mask < (1ULL << pairs); ++mask) {
          StructureBuilder b(info.sig, n);
          for (int v = 0; v < n; ++v) b.add(v < left ? kL : kR, {v});
          write_side(info, b, Placed{e, lat}, 0);
          write_side(info, b, Placed{fr, rat}, 1);
          for (int i = 0; i < pairs; ++i)
            if (mask >> i & 1ULL) {
              const int u = i / right, v = left + i % right;
              b.add(kAdj, {u, v});
              b.add(kAdj, {v, u});
            }
          if (!visit(b.build())) return;
        }
  }
}

std::shared_ptr<const MixInfo> mix_info(const ClassSpec& mix) {
  if (mix.parts.size() != 2) throw PreconditionError(mix.name + " is not a mixed sum");
  auto info = std::make_shared<MixInfo>();
  info->side[0] = mix.parts[0];
  info->side[1] = mix.parts[1];
  info->sig = mix.signature;
  int next = 3;
  for (int s = 0; s < 2; ++s)
    for (std::size_t r = 0; r < info->side[s]->signature->relations().size(); ++r)
      info->rel_of[s].push_back(next++);
  return info;
}

}  // namespace

ClassPtr mixed_sum(ClassPtr left, ClassPtr right) {
  for (const ClassPtr& side : {left, right}) {
    if (!side->signature->relational())
      throw PreconditionError("mixed sum needs relational sides; " + side->name + " has functions");
    if (!side->claims_disjoint)
      throw PreconditionError("mixed sum needs disjoint amalgamation; " + side->name +
                              " does not claim it");
  }
  std::vector<RelationSymbol> rels{{"L", 1}, {"R", 1}, {"adj", 2}};
  for (const auto& r : left->signature->relations()) rels.push_back({"l." + r.name, r.arity});
  for (const auto& r : right->signature->relations()) rels.push_back({"r." + r.name, r.arity});
  ClassSpec c;
  c.name = "mix:" + left->name + ":" + right->name;
  c.signature = make_signature(std::move(rels));
  c.parts = {left, right};
  auto info = mix_info(c);
  c.violation = [info](const Structure& m) { return mix_violation(*info, m); };
  c.amalgamate = [info](const Structure&, const Structure& x, const Embedding& f,
                        const Structure& y, const Embedding& g) {
    return mix_amalgamate(*info, x, f, y, g);
  };
  c.generic_extend = [info](const Structure& m, int k) { return mix_extend(*info, m, k); };
  c.generate = [info](int n, const std::function<bool(const Structure&)>& visit) {
    mix_generate(*info, n, visit);
  };
  c.claims_disjoint = true;
  return finalize(std::move(c));
}

Structure mixed_side(const ClassSpec& mix, const Structure& m, bool left) {
  return side_of(*mix_info(mix), m, left ? 0 : 1).s;
}

DistinguishingWitness distinguishing_witness(const ClassSpec& mix, const Structure& m,
                                             const Perm& h, int b0) {
  auto info = mix_info(mix);
  if (!mix.member(m)) throw PreconditionError("distinguishing_witness: M is not a member");
  if (h.degree() != m.size() || !is_embedding(m, m, Embedding{h.images()}))
    throw PreconditionError("distinguishing_witness: h is not an automorphism of M");
  if (b0 < 0 || b0 >= m.size() || !m.in(kR, b0))
    throw PreconditionError("distinguishing_witness: b0 is not an R-element");
  if (h(b0) == b0) throw PreconditionError("distinguishing_witness: h fixes b0");
  Extension ext = mix.generic_extend(m, 1);
  if (!mix.member(ext.m) || !is_embedding(m, ext.m, ext.inclusion))
    throw ConstructionFailure(mix.name + ": generic_extend produced an invalid extension");
  // Put M first, the new element last.
  std::vector<int> perm(static_cast<std::size_t>(ext.m.size()), -1);
  std::vector<char> used(static_cast<std::size_t>(ext.m.size()), 0);
  for (int x = 0; x < m.size(); ++x) {
    perm[ext.inclusion(x)] = x;
    used[ext.inclusion(x)] = 1;
  }
  for (int w = 0; w < ext.m.size(); ++w)
    if (!used[w]) perm[w] = m.size();
  Structure placed = relabel(ext.m, perm);
  const int a0 = m.size();
  if (!placed.in(kL, a0)) throw ConstructionFailure(mix.name + ": new element is not on the left");
  StructureBuilder b(info->sig, placed.size());
  copy_into(b, placed, identity_prefix(placed.size()).map);
  b.add(kAdj, {a0, b0});
  b.add(kAdj, {b0, a0});
  return DistinguishingWitness{b.build(), a0};
}

}  // namespace fwb
