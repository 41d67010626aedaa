#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "catalog_internal.hpp"
#include "fwb/error.hpp"
#include "fwb/text_format.hpp"

namespace fwb::detail {

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out.empty() ? "-" : out;
}

Layout disjoint_layout(const Structure& x, const Embedding& f, const Structure& y,
                       const Embedding& g) {
  Layout l;
  l.x_size = x.size();
  l.gy.assign(static_cast<std::size_t>(y.size()), -1);
  l.y_new.assign(static_cast<std::size_t>(y.size()), 1);
  l.x_old.assign(static_cast<std::size_t>(x.size()), 0);
  for (std::size_t i = 0; i < g.map.size(); ++i) {
    l.gy[g.map[i]] = f.map[i];
    l.y_new[g.map[i]] = 0;
    l.x_old[f.map[i]] = 1;
  }
  int next = x.size();
  for (int v = 0; v < y.size(); ++v)
    if (l.y_new[v]) l.gy[v] = next++;
  l.size = next;
  return l;
}

void copy_into(StructureBuilder& b, const Structure& src, const std::vector<int>& map) {
  const auto& sig = src.signature();
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    const Relation& rel = src.relation(static_cast<int>(r));
    for (std::size_t i = 0; i < rel.size(); ++i) {
      auto t = rel.tuple(i);
      Tuple mapped(t.begin(), t.end());
      for (int& v : mapped) v = map[v];
      b.add(static_cast<int>(r), std::move(mapped));
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f)
    for (int x = 0; x < src.size(); ++x)
      b.set(static_cast<int>(f), map[x], map[src.apply(static_cast<int>(f), x)]);
}

Embedding identity_prefix(int n) {
  Embedding e;
  e.map.resize(static_cast<std::size_t>(n));
  std::iota(e.map.begin(), e.map.end(), 0);
  return e;
}

Placed place_amalgam(const ClassSpec& base, const Placed& a, const Placed& b) {
  std::unordered_map<int, int> pos_a;
  for (std::size_t i = 0; i < a.at.size(); ++i) pos_a[a.at[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> common;  // (host, position in b)
  for (std::size_t j = 0; j < b.at.size(); ++j)
    if (pos_a.count(b.at[j])) common.emplace_back(b.at[j], static_cast<int>(j));
  std::sort(common.begin(), common.end());
  Embedding f, g;
  for (auto [host, j] : common) {
    f.map.push_back(pos_a[host]);
    g.map.push_back(j);
  }
  Structure z = induced_substructure(a.s, f.map);
  Amalgam am = base.amalgamate(z, a.s, f, b.s, g);
  if (auto why = amalgam_violation(base, z, a.s, f, b.s, g, am, true))
    throw ConstructionFailure(base.name + " amalgam unusable: " + *why);
  std::vector<int> host(static_cast<std::size_t>(am.w.size()), -1);
  for (std::size_t i = 0; i < a.at.size(); ++i) host[am.fx(static_cast<int>(i))] = a.at[i];
  for (std::size_t j = 0; j < b.at.size(); ++j) host[am.gy(static_cast<int>(j))] = b.at[j];
  std::vector<int> image;
  for (int w = 0; w < am.w.size(); ++w)
    if (host[w] >= 0) image.push_back(w);
  Placed out{induced_substructure(am.w, image), {}};
  for (int w : image) out.at.push_back(host[w]);
  return out;
}

Placed place_extension(const ClassSpec& base, const Placed& a, const std::vector<int>& new_at) {
  const int k = static_cast<int>(new_at.size());
  if (k == 0) return a;
  Extension ext = base.generic_extend(a.s, k);
  if (ext.m.size() != a.s.size() + k || !base.member(ext.m) ||
      !is_embedding(a.s, ext.m, ext.inclusion))
    throw ConstructionFailure(base.name + ": generic_extend produced an invalid extension of [" +
                              compact_structure(a.s) + "]");
  std::vector<int> host(static_cast<std::size_t>(ext.m.size()), -1);
  for (std::size_t i = 0; i < a.at.size(); ++i) host[ext.inclusion(static_cast<int>(i))] = a.at[i];
  int next = 0;
  for (int& h : host)
    if (h < 0) h = new_at[next++];
  return Placed{ext.m, host};
}

Placed place_part(const Structure& host, const Signature& base, SignaturePtr base_ptr,
                  const std::vector<int>& at, const std::vector<int>& rel_of, int extra) {
  std::unordered_map<int, int> pos;
  for (std::size_t i = 0; i < at.size(); ++i) pos[at[i]] = static_cast<int>(i);
  StructureBuilder b(std::move(base_ptr), static_cast<int>(at.size()));
  for (std::size_t r = 0; r < base.relations().size(); ++r) {
    const Relation& rel = host.relation(rel_of[r]);
    const int arity = base.relations()[r].arity;
    auto take = [&](std::span<const int> t) {
      if (extra >= 0 && t.back() != extra) return;
      Tuple mapped;
      for (int j = 0; j < arity; ++j) {
        auto it = pos.find(t[j]);
        if (it == pos.end()) return;
        mapped.push_back(it->second);
      }
      b.add(static_cast<int>(r), std::move(mapped));
    };
    if (extra >= 0) {
      for (int id : rel.incident(extra)) take(rel.tuple(static_cast<std::size_t>(id)));
    } else {
      for (std::size_t i = 0; i < rel.size(); ++i) take(rel.tuple(i));
    }
  }
  return Placed{b.build(), at};
}

std::vector<Structure> labelled_members(const ClassSpec& c, int n, long limit) {
  const auto& reps = members(c, n);
  long perms = 1;
  for (int i = 2; i <= n; ++i) {
    perms *= i;
    if (perms * static_cast<long>(reps.size()) > limit)
      throw CapExceeded("labelled members of " + c.name + " at size " + std::to_string(n) +
                        " exceed " + std::to_string(limit));
  }
  std::set<std::string> seen;
  std::vector<std::pair<std::string, Structure>> out;
  std::vector<int> p(static_cast<std::size_t>(n));
  for (const Structure& rep : reps) {
    std::iota(p.begin(), p.end(), 0);
    do {
      Structure s = relabel(rep, p);
      std::string text = s.serialize();
      if (seen.insert(text).second) out.emplace_back(std::move(text), std::move(s));
    } while (std::next_permutation(p.begin(), p.end()));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Structure> result;
  result.reserve(out.size());
  for (auto& [text, s] : out) result.push_back(std::move(s));
  return result;
}

}  // namespace fwb::detail
