#include <doctest.h>

#include <numeric>
#include <random>

#include "fwb/catalog.hpp"
#include "fwb/error.hpp"
#include "fwb/groups.hpp"
#include "oracle.hpp"

using namespace fwb;

namespace {

// Calls visit(perm) for every permutation of `items`.
void for_each_order(std::vector<int> items, const std::function<void(const std::vector<int>&)>& visit) {
  std::sort(items.begin(), items.end());
  do visit(items);
  while (std::next_permutation(items.begin(), items.end()));
}

// Isomorphism types of D(LO) of size n: every P/C split, every choice of a
// linear order on the products per consumer.
std::size_t brute_div_lo_count(int n) {
  SignaturePtr sig = class_by_name("div:lo")->signature;
  std::set<std::string> seen;
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    std::vector<int> ps, cs;
    for (int x = 0; x < n; ++x) (mask >> x & 1 ? cs : ps).push_back(x);
    std::vector<std::vector<int>> orders;
    for_each_order(ps, [&](const std::vector<int>& o) { orders.push_back(o); });
    std::vector<std::size_t> pick(cs.size(), 0);
    while (true) {
      StructureBuilder b(sig, n);
      for (int p : ps) b.add(0, {p});
      for (int c : cs) b.add(1, {c});
      for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto& o = orders[pick[i]];
        for (std::size_t a = 0; a < o.size(); ++a)
          for (std::size_t z = a + 1; z < o.size(); ++z) b.add(2, {o[a], o[z], cs[i]});
      }
      seen.insert(oracle::canonical(b.build()));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == orders.size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
  }
  return seen.size();
}

// Isomorphism types of bipartite graphs with sides L, R of size n.
std::size_t brute_bipartite_count(int n) {
  SignaturePtr sig = bipartite_signature();
  std::set<std::string> seen;
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    std::vector<std::pair<int, int>> cross;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (!(mask >> a & 1) && (mask >> b & 1)) cross.emplace_back(a, b);
    for (unsigned e = 0; e < (1U << cross.size()); ++e) {
      StructureBuilder b(sig, n);
      for (int x = 0; x < n; ++x) b.add(mask >> x & 1 ? 1 : 0, {x});
      for (std::size_t i = 0; i < cross.size(); ++i)
        if (e >> i & 1) {
          b.add(2, {cross[i].first, cross[i].second});
          b.add(2, {cross[i].second, cross[i].first});
        }
      seen.insert(oracle::canonical(b.build()));
    }
  }
  return seen.size();
}

// sets ⋈ LO: bipartite L/R with adjacency, and a linear order on R.
std::size_t brute_mix_sets_lo_count(int n) {
  SignaturePtr sig = class_by_name("mix:sets:lo")->signature;
  std::set<std::string> seen;
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    std::vector<int> rs;
    for (int x = 0; x < n; ++x)
      if (mask >> x & 1) rs.push_back(x);
    std::vector<std::pair<int, int>> cross;
    for (int a = 0; a < n; ++a)
      for (int b : rs)
        if (!(mask >> a & 1)) cross.emplace_back(a, b);
    for (unsigned e = 0; e < (1U << cross.size()); ++e)
      for_each_order(rs, [&](const std::vector<int>& o) {
        StructureBuilder b(sig, n);
        for (int x = 0; x < n; ++x) b.add(mask >> x & 1 ? 1 : 0, {x});
        for (std::size_t i = 0; i < cross.size(); ++i)
          if (e >> i & 1) {
            b.add(2, {cross[i].first, cross[i].second});
            b.add(2, {cross[i].second, cross[i].first});
          }
        for (std::size_t a = 0; a < o.size(); ++a)
          for (std::size_t z = a + 1; z < o.size(); ++z) b.add(3, {o[a], o[z]});
        seen.insert(oracle::canonical(b.build()));
      });
  }
  return seen.size();
}

// A D(LO) structure: products 0..p-1, then one consumer per given order.
Structure cp_model(int p, const std::vector<std::vector<int>>& orders) {
  const int n = p + static_cast<int>(orders.size());
  StructureBuilder b(class_by_name("div:lo")->signature, n);
  for (int x = 0; x < p; ++x) b.add(0, {x});
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const int c = p + static_cast<int>(i);
    b.add(1, {c});
    for (std::size_t a = 0; a < orders[i].size(); ++a)
      for (std::size_t z = a + 1; z < orders[i].size(); ++z) b.add(2, {orders[i][a], orders[i][z], c});
  }
  return b.build();
}

// Free action, by automorphisms, checked pointwise.
void check_action(const Structure& m, const GroupTable& g) {
  const int fns = static_cast<int>(m.signature().functions().size());
  REQUIRE(fns == g.order());
  Structure plain = forget_action(m);
  for (int h = 0; h < g.order(); ++h) {
    std::vector<int> img = m.function(h);
    CHECK(oracle::embeds(plain, plain, img));
    for (int x = 0; x < m.size(); ++x) {
      if (h != 0) CHECK(img[x] != x);
      for (int k = 0; k < g.order(); ++k) CHECK(m.apply(k, m.apply(h, x)) == m.apply(g.mul(h, k), x));
    }
  }
}

}  // namespace

TEST_CASE("membership") {
  CHECK(class_linear_orders()->member(members(*class_linear_orders(), 4)[0]));
  StructureBuilder cyc(linear_order_signature(), 2);
  cyc.add(0, {0, 1}).add(0, {1, 0});
  CHECK_FALSE(class_linear_orders()->member(cyc.build()));
  for (int n = 1; n <= 4; ++n)
    for (int k = 1; k <= 3; ++k) CHECK(class_rotating_machines()->member(gadget(n, k)));
  CHECK(class_rotating_machines()->member(wheel(5)));
  CHECK_FALSE(class_linear_orders()->member(wheel(2)));
}

TEST_CASE("member counts agree with brute-force isomorphism types") {
  for (int n = 0; n <= 4; ++n) {
    CAPTURE(n);
    CHECK(members(*class_pure_sets(), n).size() == 1);
    CHECK(members(*class_linear_orders(), n).size() == 1);
    CHECK(members(*class_by_name("div:lo"), n).size() == brute_div_lo_count(n));
    CHECK(members(*class_bipartite(), n).size() == brute_bipartite_count(n));
  }
  for (int n = 0; n <= 3; ++n)
    CHECK(members(*class_by_name("mix:sets:lo"), n).size() == brute_mix_sets_lo_count(n));
  for (int n = 1; n <= 5; ++n) {
    std::set<std::string> seen;
    for (const auto& c : compositions(n))
      for (unsigned long long mask = 0; mask < (1ULL << edge_orbit_count(c)); ++mask) {
        Structure m = machine(c, mask);
        CHECK(class_rotating_machines()->member(m));
        seen.insert(oracle::canonical(m));
      }
    CHECK(members(*class_rotating_machines(), n).size() == seen.size());
  }
}

TEST_CASE("members are valid, in the class and pairwise non-isomorphic") {
  for (const char* name : {"div:lo", "divg:lo:Z2", "bipartite", "mix:lo:sets", "rot"}) {
    ClassPtr c = class_by_name(name);
    CAPTURE(name);
    for (int n = 0; n <= 4; ++n) {
      const auto& ms = members(*c, n);
      std::set<std::string> keys;
      for (const auto& m : ms) {
        CHECK(validate(m).empty());
        CHECK(c->member(m));
        keys.insert(oracle::canonical(m));
      }
      CHECK(keys.size() == ms.size());
    }
  }
}

TEST_CASE("D_G members carry a free action by automorphisms") {
  for (const char* spec : {"Z2", "Z3", "S3"}) {
    GroupTable g = parse_group_spec(spec);
    ClassPtr c = class_by_name(std::string("divg:lo:") + spec);
    CAPTURE(spec);
    for (int n = 0; n <= 6; ++n) {
      const auto& ms = members(*c, n);
      if (n % g.order() != 0) CHECK(ms.empty());
      for (const auto& m : ms) {
        check_action(m, g);
        CHECK(class_by_name("div:lo")->member(forget_action(m)));
      }
    }
  }
  // Two products swapped, or two consumers swapped.
  CHECK(members(*class_by_name("divg:lo:Z2"), 2).size() == 2);
}

TEST_CASE("diversification guards") {
  CHECK_THROWS_AS(diversify(class_rotating_machines()), PreconditionError);
  CHECK_THROWS_AS(class_by_name("div:rot"), PreconditionError);
  CHECK_THROWS_AS(action_of(members(*class_by_name("div:lo"), 2)[0], GroupTable::cyclic(2)),
                  PreconditionError);
}

TEST_CASE("orbit completion without a fixed part") {
  ClassPtr lo = class_linear_orders();
  for (const char* spec : {"Z2", "Z3", "S3"}) {
    GroupTable g = parse_group_spec(spec);
    ClassPtr dg = class_by_name(std::string("divg:lo:") + spec);
    for (int n = 1; n <= 3; ++n)
      for (const Structure& x : members(*class_by_name("div:lo"), n)) {
        OrbitCompletion oc = orbit_completion(*lo, x, g);
        CAPTURE(spec);
        CAPTURE(x.serialize());
        CHECK(oc.xg.size() == n * g.order());
        CHECK(dg->member(oc.xg));
        check_action(oc.xg, g);
        std::vector<int> prefix(static_cast<std::size_t>(n));
        std::iota(prefix.begin(), prefix.end(), 0);
        CHECK(oc.embedding.map == prefix);
        CHECK(oracle::embeds(x, forget_action(oc.xg), prefix));
      }
  }
  CHECK_THROWS_AS(orbit_completion(*lo, Structure::empty(class_by_name("div:lo")->signature),
                                   GroupTable::cyclic(2)),
                  PreconditionError);
}

TEST_CASE("orbit completion with a fixed part") {
  ClassPtr lo = class_linear_orders();
  GroupTable z2 = GroupTable::cyclic(2);
  // Products 0,1 and a third product 4; consumers 2 (0<4<1) and 3 (1<4<0).
  Structure x = cp_model(2, {{0, 1}, {1, 0}});
  StructureBuilder b(x.signature_ptr(), 5);
  for (int p : {0, 1, 4}) b.add(0, {p});
  for (int c : {2, 3}) b.add(1, {c});
  for (auto [p, q, c] : std::vector<std::array<int, 3>>{
           {0, 4, 2}, {4, 1, 2}, {0, 1, 2}, {1, 4, 3}, {4, 0, 3}, {1, 0, 3}})
    b.add(2, {p, q, c});
  Structure x5 = b.build();
  REQUIRE(class_by_name("div:lo")->member(x5));

  FixedPart fixed{{0, 1, 2, 3}, GAction(4, z2, {0, 1, 1, 0, 2, 3, 3, 2})};
  OrbitCompletion small = orbit_completion(*lo, x, z2, fixed);
  CHECK(small.xg.size() == 4);
  CHECK(small.xg.function(1) == std::vector<int>{1, 0, 3, 2});

  OrbitCompletion oc = orbit_completion(*lo, x5, z2, fixed);
  CHECK(oc.xg.size() == 6);
  CHECK(class_by_name("divg:lo:Z2")->member(oc.xg));
  check_action(oc.xg, z2);
  CHECK(oracle::embeds(x5, forget_action(oc.xg), {0, 1, 2, 3, 4}));
  for (int v = 0; v < 4; ++v) CHECK(oc.xg.apply(1, v) == fixed.action.act(v, 1));

  FixedPart stuck{{0, 1}, GAction(2, z2, {0, 0, 1, 1})};
  CHECK_THROWS_AS(orbit_completion(*lo, x, z2, stuck), PreconditionError);
  // Both consumers prefer 0 to 1, so the swap is not an automorphism.
  CHECK_THROWS_AS(orbit_completion(*lo, cp_model(2, {{0, 1}, {0, 1}}), z2, fixed),
                  PreconditionError);
}

TEST_CASE("preferences") {
  Structure m = cp_model(3, {{2, 0, 1}, {2, 0, 1}, {0, 1, 2}});
  CHECK(preference(m, 3) == std::vector<int>{2, 0, 1});
  CHECK(preference(m, 5) == std::vector<int>{0, 1, 2});
  PreferenceReport r = cp_preference_distinct(m);
  CHECK_FALSE(r.distinct);
  CHECK(r.c == 3);
  CHECK(r.d == 4);
  CHECK(cp_preference_distinct(m, {3, 5}).distinct);
  CHECK(cp_preference_distinct(cp_model(2, {{0, 1}, {1, 0}})).distinct);
}

TEST_CASE("wheels and gadgets") {
  for (int n = 1; n <= 3; ++n)
    for (int k = 1; k <= 3; ++k) {
      if (n + k * n > 8) continue;
      Structure g = gadget(n, k);
      CAPTURE(n);
      CAPTURE(k);
      CHECK(g.size() == n + k * n);
      auto wheels = machine_wheels(g);
      REQUIRE(wheels.size() == 2);
      CHECK(wheels[0].size() == static_cast<std::size_t>(n));
      CHECK(wheels[1].size() == static_cast<std::size_t>(k * n));
      auto auts = oracle::automorphisms(g);
      CHECK(auts.size() == static_cast<std::size_t>(k * n));
      long max_order = 0;
      for (const auto& a : auts) {
        max_order = std::max(max_order, oracle::order_of(a));
        bool moves_c = false;
        for (int x = 0; x < n; ++x) moves_c |= a[x] != x;
        if (moves_c) CHECK(k % oracle::order_of(a) != 0);
      }
      CHECK(max_order == k * n);
    }
  for (int n = 1; n <= 6; ++n) CHECK(oracle::automorphisms(wheel(n)).size() == static_cast<std::size_t>(n));
}

TEST_CASE("compositions and edge orbits") {
  for (int n = 1; n <= 8; ++n) {
    auto cs = compositions(n);
    CHECK(cs.size() == (1UL << (n - 1)));
    std::set<std::vector<int>> distinct(cs.begin(), cs.end());
    CHECK(distinct.size() == cs.size());
    for (const auto& c : cs) CHECK(std::accumulate(c.begin(), c.end(), 0) == n);
  }
  for (const auto& sizes : std::vector<std::vector<int>>{{1}, {2, 4}, {3, 5}, {2, 2, 6}, {4, 6, 3}}) {
    int expect = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i)
      for (std::size_t j = i + 1; j < sizes.size(); ++j) expect += std::gcd(sizes[i], sizes[j]);
    CHECK(edge_orbit_count(sizes) == expect);
  }
}

TEST_CASE("mixed sums: sides and distinguishing witnesses") {
  for (const char* name : {"mix:lo:sets", "mix:sets:sets", "mix:lo:lo"}) {
    ClassPtr c = class_by_name(name);
    CAPTURE(name);
    const int adj = 2;
    long cases = 0;
    for (int n = 1; n <= 4; ++n)
      for (const Structure& m : members(*c, n)) {
        CHECK(c->parts[0]->member(mixed_side(*c, m, true)));
        CHECK(c->parts[1]->member(mixed_side(*c, m, false)));
        for (const auto& h : oracle::automorphisms(m))
          for (int b0 = 0; b0 < n; ++b0) {
            if (!m.in(1, b0) || h[b0] == b0) continue;
            ++cases;
            DistinguishingWitness w = distinguishing_witness(*c, m, Perm(h), b0);
            CHECK(c->member(w.m));
            std::vector<int> prefix(static_cast<std::size_t>(n));
            std::iota(prefix.begin(), prefix.end(), 0);
            CHECK(oracle::induced(w.m, prefix) == m);
            CHECK(w.m.in(0, w.a0));
            CHECK(w.m.holds(adj, {w.a0, b0}));
            CHECK_FALSE(w.m.holds(adj, {w.a0, h[b0]}));
          }
      }
    if (std::string(name) != "mix:lo:lo") CHECK(cases > 0);
  }
  ClassPtr c = class_by_name("mix:sets:sets");
  const Structure& m = members(*c, 2)[0];
  CHECK_THROWS_AS(distinguishing_witness(*c, m, Perm::identity(2), 0), PreconditionError);
  CHECK_THROWS_AS(mixed_sum(class_rotating_machines(), class_pure_sets()), PreconditionError);
}

TEST_CASE("registry") {
  CHECK(class_by_name("div:lo") == class_by_name("div:lo"));
  CHECK(class_by_name("mix:div:lo:sets")->name == "mix:div:lo:sets");
  CHECK(class_by_name("divg:lo:prod:Z2,Z2")->group->order() == 4);
  for (const char* bad : {"", "foo", "div:", "mix:sets", "lo:extra", "divg:lo:Q8", "divg:lo"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(class_by_name(bad), ParseError);
  }
}
