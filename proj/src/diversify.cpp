// Diversifications D(E), D_G(E), orbit completion and consumer-product
// helpers. D(E) is handled as D_G(E) for the trivial group without action
// functions in the signature.

#include <algorithm>
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

SignaturePtr diversified_signature(const Signature& base) {
  std::vector<RelationSymbol> rels{{"P", 1}, {"C", 1}};
  for (const auto& r : base.relations()) rels.push_back({"~" + r.name, r.arity + 1});
  return make_signature(std::move(rels));
}

SignaturePtr action_signature(const Signature& diversified, int group_order) {
  std::vector<std::string> funs;
  for (int g = 0; g < group_order; ++g) funs.push_back("act" + std::to_string(g));
  return make_signature(diversified.relations(), std::move(funs));
}

std::vector<int> products(const Structure& d) {
  std::vector<int> out;
  for (int x = 0; x < d.size(); ++x)
    if (d.in(0, x)) out.push_back(x);
  return out;
}

std::vector<int> consumers(const Structure& d) {
  std::vector<int> out;
  for (int x = 0; x < d.size(); ++x)
    if (d.in(1, x)) out.push_back(x);
  return out;
}

namespace {

std::vector<int> slice_relations(const Signature& base) {
  std::vector<int> rel_of(base.relations().size());
  std::iota(rel_of.begin(), rel_of.end(), 2);
  return rel_of;
}

}  // namespace

Structure slice(const Structure& d, const SignaturePtr& base, int c) {
  return place_part(d, *base, base, products(d), slice_relations(*base), c).s;
}

GAction action_of(const Structure& m, const GroupTable& g) {
  if (static_cast<int>(m.signature().functions().size()) != g.order())
    throw PreconditionError("action_of: structure carries " +
                            std::to_string(m.signature().functions().size()) +
                            " action functions for a group of order " + std::to_string(g.order()));
  std::vector<int> act(static_cast<std::size_t>(m.size() * g.order()));
  for (int x = 0; x < m.size(); ++x)
    for (int h = 0; h < g.order(); ++h)
      act[static_cast<std::size_t>(x * g.order() + h)] = m.apply(h, x);
  return GAction(m.size(), g, std::move(act));
}

Structure attach_action(const Structure& d, const GAction& a) {
  if (a.carrier() != d.size()) throw PreconditionError("attach_action: carrier size differs");
  StructureBuilder b(action_signature(d.signature(), a.group().order()), d.size());
  std::vector<int> id = identity_prefix(d.size()).map;
  const auto& sig = d.signature();
  for (std::size_t r = 0; r < sig.relations().size(); ++r)
    for (const Tuple& t : d.relation(static_cast<int>(r)).tuples()) b.add(static_cast<int>(r), t);
  for (int h = 0; h < a.group().order(); ++h)
    for (int x = 0; x < d.size(); ++x) b.set(h, x, a.act(x, h));
  return b.build();
}

Structure forget_action(const Structure& m) {
  StructureBuilder b(make_signature(m.signature().relations()), m.size());
  for (std::size_t r = 0; r < m.signature().relations().size(); ++r)
    for (const Tuple& t : m.relation(static_cast<int>(r)).tuples()) b.add(static_cast<int>(r), t);
  return b.build();
}

namespace {

struct DivInfo {
  ClassPtr base;
  SignaturePtr base_sig;
  SignaturePtr sig;
  std::shared_ptr<const GroupTable> group;  // null for plain D
  int order = 1;
  std::vector<int> rel_of;
};

std::shared_ptr<const DivInfo> make_info(ClassPtr base, const GroupTable* g) {
  if (!base->signature->relational())
    throw PreconditionError("diversification needs a relational base; " + base->name +
                            " has functions");
  if (!base->claims_disjoint)
    throw PreconditionError("diversification needs a base with disjoint amalgamation; " +
                            base->name + " does not claim it");
  auto info = std::make_shared<DivInfo>();
  info->base = base;
  info->base_sig = base->signature;
  SignaturePtr d = diversified_signature(*base->signature);
  if (g) {
    if (!g->violations().empty())
      throw PreconditionError("group table is not a group: " + g->violations().front());
    info->group = std::make_shared<const GroupTable>(*g);
    info->order = g->order();
    info->sig = action_signature(*d, g->order());
  } else {
    info->sig = d;
  }
  info->rel_of = slice_relations(*base->signature);
  return info;
}

// x^h in a structure of the class (identity for plain D).
int act(const DivInfo& info, const Structure& m, int x, int h) {
  return info.group ? m.apply(h, x) : x;
}

Placed slice_of(const DivInfo& info, const Structure& m, int c) {
  return place_part(m, *info.base_sig, info.base_sig, products(m), info.rel_of, c);
}

std::optional<std::string> div_violation(const DivInfo& info, const Structure& m) {
  for (int x = 0; x < m.size(); ++x)
    if (m.in(0, x) == m.in(1, x))
      return "element " + std::to_string(x) + " is not in exactly one of P, C";
  for (std::size_t r = 0; r < info.rel_of.size(); ++r) {
    const Relation& rel = m.relation(info.rel_of[r]);
    for (std::size_t i = 0; i < rel.size(); ++i) {
      auto t = rel.tuple(i);
      for (std::size_t j = 0; j + 1 < t.size(); ++j)
        if (!m.in(0, t[j]))
          return m.signature().relations()[info.rel_of[r]].name + " tuple with non-product " +
                 std::to_string(t[j]);
      if (!m.in(1, t.back()))
        return m.signature().relations()[info.rel_of[r]].name + " tuple with non-consumer " +
               std::to_string(t.back());
    }
  }
  for (int c : consumers(m)) {
    Placed s = slice_of(info, m, c);
    if (auto why = info.base->membership_violation(s.s))
      return "slice of consumer " + std::to_string(c) + ": " + *why;
  }
  if (info.group) {
    GAction a = action_of(m, *info.group);
    auto bad = a.violations();
    if (!bad.empty()) return "action: " + bad.front();
    if (auto fp = fixed_point(a))
      return "action is not free: " + std::to_string(fp->point) + " is fixed by " +
             std::to_string(fp->element);
    if (auto w = action_violation(a, forget_action(m))) {
      std::string t;
      for (int v : w->tuple) t += (t.empty() ? "" : ",") + std::to_string(v);
      return "group element " + std::to_string(w->element) + " does not preserve " + w->symbol +
             " at (" + t + ")";
    }
  }
  return std::nullopt;
}

// Writes the slice `s` (covering all products) for consumer rep c and, by
// transport along the action, for every c^h.
void write_orbit_slices(const DivInfo& info, StructureBuilder& b, const Placed& s, int c,
                        const std::function<int(int, int)>& act_w) {
  for (int h = 0; h < info.order; ++h) {
    const int target = act_w(c, h);
    for (std::size_t r = 0; r < info.rel_of.size(); ++r) {
      const Relation& rel = s.s.relation(static_cast<int>(r));
      for (std::size_t i = 0; i < rel.size(); ++i) {
        auto t = rel.tuple(i);
        Tuple mapped;
        for (int v : t) mapped.push_back(act_w(s.at[v], h));
        mapped.push_back(target);
        b.add(info.rel_of[r], std::move(mapped));
      }
    }
  }
}

std::vector<int> orbit_reps(const std::vector<int>& elems, int order,
                            const std::function<int(int, int)>& act_w, int size) {
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  std::vector<int> reps;
  for (int c : elems) {
    if (seen[c]) continue;
    reps.push_back(c);
    for (int h = 0; h < order; ++h) seen[act_w(c, h)] = 1;
  }
  return reps;
}

Amalgam div_amalgamate(const DivInfo& info, const Structure& x, const Embedding& f,
                       const Structure& y, const Embedding& g) {
  auto l = disjoint_layout(x, f, y, g);
  StructureBuilder b(info.sig, l.size);
  std::vector<int> act_table(static_cast<std::size_t>(l.size * info.order));
  for (int v = 0; v < x.size(); ++v) {
    if (x.in(0, v)) b.add(0, {v});
    if (x.in(1, v)) b.add(1, {v});
    for (int h = 0; h < info.order; ++h)
      act_table[static_cast<std::size_t>(v * info.order + h)] = act(info, x, v, h);
  }
  for (int v = 0; v < y.size(); ++v) {
    if (!l.y_new[v]) continue;
    const int w = l.gy[v];
    if (y.in(0, v)) b.add(0, {w});
    if (y.in(1, v)) b.add(1, {w});
    for (int h = 0; h < info.order; ++h)
      act_table[static_cast<std::size_t>(w * info.order + h)] = l.gy[act(info, y, v, h)];
  }
  if (info.group)
    for (int w = 0; w < l.size; ++w)
      for (int h = 0; h < info.order; ++h)
        b.set(h, w, act_table[static_cast<std::size_t>(w * info.order + h)]);
  auto act_w = [&](int w, int h) { return act_table[static_cast<std::size_t>(w * info.order + h)]; };

  std::vector<int> y_of(static_cast<std::size_t>(l.size), -1);
  for (int v = 0; v < y.size(); ++v) y_of[l.gy[v]] = v;
  std::vector<int> x_new_products, y_new_products, w_consumers;
  for (int v = 0; v < x.size(); ++v)
    if (x.in(0, v) && !l.x_old[v]) x_new_products.push_back(v);
  for (int v = 0; v < y.size(); ++v)
    if (y.in(0, v) && l.y_new[v]) y_new_products.push_back(l.gy[v]);
  for (int v = 0; v < x.size(); ++v)
    if (x.in(1, v)) w_consumers.push_back(v);
  for (int v = 0; v < y.size(); ++v)
    if (y.in(1, v) && l.y_new[v]) w_consumers.push_back(l.gy[v]);

  auto y_slice = [&](int v) {
    Placed p = slice_of(info, y, v);
    for (int& a : p.at) a = l.gy[a];
    return p;
  };
  for (int c : orbit_reps(w_consumers, info.order, act_w, l.size)) {
    Placed s{Structure::empty(info.base_sig), {}};
    if (c < x.size() && l.x_old[c])
      s = place_amalgam(*info.base, slice_of(info, x, c), y_slice(y_of[c]));
    else if (c < x.size())
      s = place_extension(*info.base, slice_of(info, x, c), y_new_products);
    else
      s = place_extension(*info.base, y_slice(y_of[c]), x_new_products);
    write_orbit_slices(info, b, s, c, act_w);
  }
  return Amalgam{b.build(), identity_prefix(x.size()), Embedding{l.gy}};
}

// Adds k/|G| new product orbits.
Extension div_extend(const DivInfo& info, const Structure& m, int k) {
  if (k % info.order != 0)
    throw PreconditionError("extension of " + std::to_string(k) + " elements is not a union of " +
                            std::to_string(info.order) + "-element orbits");
  const int n = m.size();
  StructureBuilder b(info.sig, n + k);
  copy_into(b, m, identity_prefix(n).map);
  std::vector<int> fresh;
  for (int v = n; v < n + k; ++v) {
    b.add(0, {v});
    fresh.push_back(v);
  }
  auto act_w = [&](int w, int h) {
    if (w < n) return act(info, m, w, h);
    const int orbit = (w - n) / info.order, pos = (w - n) % info.order;
    return n + orbit * info.order + (info.group ? info.group->mul(pos, h) : pos);
  };
  if (info.group)
    for (int v = n; v < n + k; ++v)
      for (int h = 0; h < info.order; ++h) b.set(h, v, act_w(v, h));
  for (int c : orbit_reps(consumers(m), info.order, act_w, n + k))
    write_orbit_slices(info, b, place_extension(*info.base, slice_of(info, m, c), fresh), c, act_w);
  return Extension{b.build(), identity_prefix(n)};
}

// Candidates: products are orbits 0..po-1, consumers the following orbits,
// element (orbit i, position h) is i*|G| + h and (i,h)^g = (i, hg). Slices
// of consumer-orbit representatives range over labelled base members
// (multisets, since consumer orbits are interchangeable); for plain D the
// first consumer only needs one slice per isomorphism type.
void div_generate(const DivInfo& info, int n, const std::function<bool(const Structure&)>& visit) {
  const int m = info.order;
  if (n % m != 0) return;
  const int orbits = n / m;
  auto act_w = [&](int w, int h) {
    const int pos = w % m;
    return w - pos + (info.group ? info.group->mul(pos, h) : pos);
  };
  for (int po = orbits; po >= 0; --po) {
    const int co = orbits - po;
    const int np = po * m;
    std::vector<Structure> labelled, first;
    if (co > 0) {
      labelled = detail::labelled_members(*info.base, np, 200000);
      first = info.group ? labelled : members(*info.base, np);
    }
    std::vector<int> choice(static_cast<std::size_t>(co), 0);
    while (true) {
      StructureBuilder b(info.sig, n);
      for (int v = 0; v < n; ++v) {
        b.add(v < np ? 0 : 1, {v});
        if (info.group)
          for (int h = 0; h < m; ++h) b.set(h, v, act_w(v, h));
      }
      std::vector<int> all_products(static_cast<std::size_t>(np));
      std::iota(all_products.begin(), all_products.end(), 0);
      for (int j = 0; j < co; ++j) {
        const Structure& s = j == 0 ? first[choice[0]] : labelled[choice[j]];
        write_orbit_slices(info, b, Placed{s, all_products}, np + j * m, act_w);
      }
      if (!visit(b.build())) return;
      // Next choice: a nondecreasing sequence, except that for plain D the
      // first index ranges over `first` independently of the rest.
      int j = co - 1;
      for (; j >= 0; --j) {
        const int limit = static_cast<int>(j == 0 ? first.size() : labelled.size());
        if (choice[j] + 1 < limit) break;
      }
      if (j < 0) break;
      ++choice[j];
      const int reset = j == 0 && !info.group ? 0 : choice[j];
      for (int t = j + 1; t < co; ++t) choice[t] = reset;
    }
  }
}

ClassPtr make_div_class(std::shared_ptr<const DivInfo> info, std::string name) {
  ClassSpec c;
  c.name = std::move(name);
  c.signature = info->sig;
  c.violation = [info](const Structure& m) { return div_violation(*info, m); };
  c.amalgamate = [info](const Structure&, const Structure& x, const Embedding& f,
                        const Structure& y, const Embedding& g) {
    return div_amalgamate(*info, x, f, y, g);
  };
  c.generic_extend = [info](const Structure& m, int k) { return div_extend(*info, m, k); };
  c.generate = [info](int n, const std::function<bool(const Structure&)>& visit) {
    div_generate(*info, n, visit);
  };
  c.claims_disjoint = true;
  c.parts = {info->base};
  c.group = info->group;
  return finalize(std::move(c));
}

}  // namespace

ClassPtr diversify(ClassPtr base) {
  auto info = make_info(base, nullptr);
  return make_div_class(info, "div:" + base->name);
}

ClassPtr diversify_with_action(ClassPtr base, const GroupTable& g) {
  auto info = make_info(base, &g);
  return make_div_class(info, "divg:" + base->name + ":" + (g.name().empty() ? "G" : g.name()));
}

OrbitCompletion orbit_completion(const ClassSpec& base_spec, const Structure& x,
                                 const GroupTable& g, const std::optional<FixedPart>& fixed) {
  if (x.size() == 0) throw PreconditionError("orbit_completion: X is empty");
  // A non-owning handle is enough: the info does not outlive this call.
  ClassPtr base(std::shared_ptr<const ClassSpec>(), &base_spec);
  auto plain = make_info(base, nullptr);
  if (!(x.signature() == *plain->sig))
    throw PreconditionError("orbit_completion: X is not over the diversified signature");
  if (auto why = div_violation(*plain, x))
    throw PreconditionError("orbit_completion: X is not a member: " + *why);
  auto info = make_info(base, &g);
  const int m = g.order();

  std::vector<int> fixed_pos(static_cast<std::size_t>(x.size()), -1);
  if (fixed) {
    const auto& el = fixed->elements;
    if (fixed->action.carrier() != static_cast<int>(el.size()) || fixed->action.group().order() != m)
      throw PreconditionError("orbit_completion: fixed part action has the wrong shape");
    if (!fixed->action.violations().empty() || fixed_point(fixed->action))
      throw PreconditionError("orbit_completion: fixed part action is not a free action");
    for (std::size_t i = 0; i < el.size(); ++i) {
      if (el[i] < 0 || el[i] >= x.size() || fixed_pos[el[i]] >= 0)
        throw PreconditionError("orbit_completion: bad fixed part element");
      fixed_pos[el[i]] = static_cast<int>(i);
    }
    for (int h = 0; h < m; ++h)
      for (std::size_t i = 0; i < el.size(); ++i)
        if (x.in(0, el[i]) != x.in(0, el[fixed->action.act(static_cast<int>(i), h)]))
          throw PreconditionError("orbit_completion: fixed action mixes products and consumers");
    if (action_violation(fixed->action, induced_substructure(x, el)))
      throw PreconditionError("orbit_completion: fixed action is not by automorphisms");
  }

  std::vector<int> moving;  // elements of X outside the fixed part
  for (int v = 0; v < x.size(); ++v)
    if (fixed_pos[v] < 0) moving.push_back(v);
  const int n = x.size() + static_cast<int>(moving.size()) * (m - 1);
  // copy_index[v*m + h] = index of v^h for moving v.
  std::vector<int> copy_index(static_cast<std::size_t>(x.size() * m), -1);
  int next = x.size();
  for (int v : moving) {
    copy_index[static_cast<std::size_t>(v * m)] = v;
    for (int h = 1; h < m; ++h) copy_index[static_cast<std::size_t>(v * m + h)] = next++;
  }
  std::vector<int> origin(static_cast<std::size_t>(n)), origin_pos(static_cast<std::size_t>(n));
  for (int v : moving)
    for (int h = 0; h < m; ++h) {
      origin[copy_index[static_cast<std::size_t>(v * m + h)]] = v;
      origin_pos[copy_index[static_cast<std::size_t>(v * m + h)]] = h;
    }
  auto act_w = [&](int w, int h) {
    if (w < x.size() && fixed_pos[w] >= 0)
      return fixed->elements[fixed->action.act(fixed_pos[w], h)];
    return copy_index[static_cast<std::size_t>(origin[w] * m + g.mul(origin_pos[w], h))];
  };

  StructureBuilder b(info->sig, n);
  std::vector<int> new_products;
  for (int w = 0; w < n; ++w) {
    const int src = w < x.size() ? w : origin[w];
    b.add(x.in(0, src) ? 0 : 1, {w});
    if (w >= x.size() && x.in(0, src)) new_products.push_back(w);
    for (int h = 0; h < m; ++h) b.set(h, w, act_w(w, h));
  }
  std::vector<int> all_consumers;
  for (int w = 0; w < n; ++w)
    if ((w < x.size() ? x.in(1, w) : x.in(1, origin[w]))) all_consumers.push_back(w);
  for (int c : orbit_reps(all_consumers, m, act_w, n)) {
    Placed s{Structure::empty(info->base_sig), {}};
    if (fixed_pos[c] < 0) {
      s = place_extension(*info->base, slice_of(*info, x, c), new_products);
    } else {
      // Iterated disjoint amalgam of the slices of c^h moved back by h^-1;
      // they share exactly the fixed products.
      for (int h = 0; h < m; ++h) {
        Placed t = slice_of(*info, x, act_w(c, h));
        for (int& a : t.at) a = act_w(a, g.inverse(h));
        s = h == 0 ? t : place_amalgam(*info->base, s, t);
      }
    }
    write_orbit_slices(*info, b, s, c, act_w);
  }
  Structure xg = b.build();
  GAction action = action_of(xg, g);
  return OrbitCompletion{std::move(xg), identity_prefix(x.size()), std::move(action)};
}

std::vector<int> preference(const Structure& m, int c) {
  auto ps = products(m);
  std::vector<int> rank(static_cast<std::size_t>(m.size()), 0);
  for (int p : ps)
    for (int q : ps)
      if (m.holds(2, {p, q, c})) ++rank[q];
  std::stable_sort(ps.begin(), ps.end(), [&](int a, int b) { return rank[a] < rank[b]; });
  return ps;
}

PreferenceReport cp_preference_distinct(const Structure& m, const std::vector<int>& among) {
  auto ps = products(m);
  for (std::size_t i = 0; i < among.size(); ++i)
    for (std::size_t j = i + 1; j < among.size(); ++j) {
      const int c = among[i], d = among[j];
      bool differ = false;
      for (int p : ps) {
        for (int q : ps)
          if (m.holds(2, {p, q, c}) && m.holds(2, {q, p, d})) {
            differ = true;
            break;
          }
        if (differ) break;
      }
      if (!differ) return PreferenceReport{false, c, d};
    }
  return {};
}

PreferenceReport cp_preference_distinct(const Structure& m) {
  return cp_preference_distinct(m, consumers(m));
}

}  // namespace fwb
