#include <doctest.h>

#include <random>

#include "fwb/catalog.hpp"
#include "fwb/error.hpp"
#include "fwb/groups.hpp"
#include "oracle.hpp"

using namespace fwb;

namespace {

PermGroup cayley_group(const GroupTable& g) {
  std::vector<Perm> elems;
  for (int a = 0; a < g.order(); ++a) {
    std::vector<int> img(static_cast<std::size_t>(g.order()));
    for (int x = 0; x < g.order(); ++x) img[x] = g.mul(x, a);
    elems.emplace_back(img);
  }
  std::sort(elems.begin(), elems.end());
  return PermGroup(g.order(), elems);
}

// Brute-force associativity, identity and inverses.
bool table_is_group(const GroupTable& g) {
  const int n = g.order();
  for (int a = 0; a < n; ++a) {
    if (g.mul(0, a) != a || g.mul(a, 0) != a) return false;
    bool has_inverse = false;
    for (int b = 0; b < n; ++b) has_inverse |= g.mul(a, b) == 0 && g.mul(b, a) == 0;
    if (!has_inverse) return false;
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c))) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("standard tables are groups") {
  for (int n = 1; n <= 8; ++n) {
    CHECK(table_is_group(GroupTable::cyclic(n)));
    CHECK(GroupTable::cyclic(n).violations().empty());
  }
  for (int n = 1; n <= 4; ++n) CHECK(table_is_group(GroupTable::symmetric(n)));
  CHECK(table_is_group(GroupTable::product(GroupTable::cyclic(2), GroupTable::symmetric(3))));
  CHECK(GroupTable::symmetric(3).order() == 6);
  CHECK(GroupTable::symmetric(4).order() == 24);
}

TEST_CASE("broken tables are reported") {
  // Z3 with one entry changed.
  GroupTable bad(3, {0, 1, 2, 1, 2, 0, 2, 0, 0});
  CHECK_FALSE(bad.violations().empty());
  CHECK_FALSE(table_is_group(bad));
  CHECK_THROWS(GroupTable(2, {0, 1, 1}));
  CHECK_THROWS(GroupTable(2, {0, 1, 1, 5}));
}

TEST_CASE("group specs and table files") {
  CHECK(parse_group_spec("Z4").order() == 4);
  CHECK(parse_group_spec("cyclic:5").order() == 5);
  CHECK(parse_group_spec("S3").order() == 6);
  CHECK(parse_group_spec("sym:3").order() == 6);
  CHECK(parse_group_spec("prod:Z2,Z3").order() == 6);
  CHECK_THROWS_AS(parse_group_spec("Q8"), ParseError);
  GroupTable s3 = GroupTable::symmetric(3);
  GroupTable back = parse_group_table(serialize_group_table(s3));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) CHECK(back.mul(a, b) == s3.mul(a, b));
  CHECK_THROWS_AS(parse_group_table("order 2\nmul 0 0 0\n"), ParseError);
}

TEST_CASE("identification of small groups") {
  CHECK(identify(cayley_group(GroupTable::cyclic(6))).describe() == "cyclic order 6");
  CHECK(identify(cayley_group(GroupTable::symmetric(3))).describe() == "order 6 non-abelian");
  CHECK(identify(cayley_group(GroupTable::product(GroupTable::cyclic(2), GroupTable::cyclic(2))))
            .describe() == "abelian order 4 invariant factors [2,2]");
  CHECK(identify(automorphisms(wheel(6))).describe() == "cyclic order 6");
  CHECK(identify(automorphisms(members(*class_pure_sets(), 3)[0])).describe() ==
        "order 6 non-abelian");
  CHECK(identify(automorphisms(gadget(2, 2))).describe() == "cyclic order 4");
  GroupIdentity trivial = identify(automorphisms(members(*class_linear_orders(), 3)[0]));
  CHECK(trivial.order == 1);
  CHECK(trivial.is_cyclic);
}

TEST_CASE("invariant factors match Smith normal form") {
  // Every multiset of cyclic factors with orders 2..6, up to three factors.
  for (int a = 1; a <= 6; ++a)
    for (int b = a; b <= 6; ++b)
      for (int c = b; c <= 6; ++c) {
        GroupTable g = GroupTable::product(GroupTable::cyclic(a),
                                           GroupTable::product(GroupTable::cyclic(b), GroupTable::cyclic(c)));
        GroupIdentity id = identify(cayley_group(g));
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(c);
        CHECK(id.is_abelian);
        CHECK(id.invariant_factors == oracle::smith_factors({a, b, c}));
      }
}

TEST_CASE("element orders and order detection") {
  PermGroup s4 = cayley_group(GroupTable::symmetric(4));
  std::vector<long> orders;
  for (const Perm& p : s4.elements()) orders.push_back(oracle::order_of(p.images()));
  std::sort(orders.begin(), orders.end());
  CHECK(element_orders(s4) == orders);
  for (long k = 1; k <= 24; ++k)
    CHECK(has_element_of_order(s4, k) ==
          (std::find(orders.begin(), orders.end(), k) != orders.end()));
  CHECK_FALSE(is_abelian(s4));
  CHECK(is_abelian(cayley_group(GroupTable::cyclic(7))));
  CHECK(has_element_of_order(automorphisms(members(*class_pure_sets(), 2)[0]), 2));
}

TEST_CASE("actions: laws, freeness and automorphism condition") {
  GroupTable s3 = GroupTable::symmetric(3);
  GAction reg = GAction::cayley(s3);
  CHECK(reg.violations().empty());
  CHECK(is_free_action(reg));
  // Right action: (x^g)^h = x^(gh).
  for (int x = 0; x < 6; ++x)
    for (int g = 0; g < 6; ++g)
      for (int h = 0; h < 6; ++h) CHECK(reg.act(reg.act(x, g), h) == reg.act(x, s3.mul(g, h)));

  // Z2 swapping two points of a pure set: free, by automorphisms.
  GroupTable z2 = GroupTable::cyclic(2);
  GAction swap(2, z2, {0, 1, 1, 0});
  CHECK(is_free_action(swap));
  CHECK(acts_by_automorphisms(swap, members(*class_pure_sets(), 2)[0]));
  // The same action on a 2-chain is not by automorphisms.
  auto w = action_violation(swap, members(*class_linear_orders(), 2)[0]);
  REQUIRE(w.has_value());
  CHECK(w->element == 1);
  CHECK(w->symbol == "lt");
  // Trivial action of Z2 has fixed points.
  GAction trivial(1, z2, {0, 0});
  CHECK(fixed_point(trivial).has_value());
  CHECK_THROWS_AS(action_violation(swap, members(*class_pure_sets(), 3)[0]), PreconditionError);
}

TEST_CASE("h_A gadget: homomorphism and trivial kernel") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    IntSet a, b;
    for (long x = 1; x <= 8; ++x) {
      if (rng() & 1) a.push_back(x);
      if (rng() & 1) b.push_back(x);
    }
    IntPermutation ha = h_embed(a), hb = h_embed(b);
    IntPermutation hab = h_embed(symdiff_compose(a, b));
    for (long x = -9; x <= 9; ++x) {
      CHECK(ha(x) == oracle::h_apply(a, x));
      CHECK(ha.then(hb)(x) == oracle::h_apply(b, oracle::h_apply(a, x)));
      CHECK(hab(x) == ha.then(hb)(x));
    }
    CHECK(ha.is_identity() == a.empty());
    if (!a.empty()) CHECK(ha.order() == 2);
  }
  CHECK_THROWS_AS(h_embed({0, 1}), PreconditionError);
  CHECK_THROWS_AS(h_embed({-2}), PreconditionError);
  CHECK(symdiff_compose({1, 2, 3}, {2, 4}) == IntSet{1, 3, 4});
}
