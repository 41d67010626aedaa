#include <doctest.h>

#include <random>

#include "fwb/catalog.hpp"
#include "fwb/error.hpp"
#include "fwb/text_format.hpp"
#include "oracle.hpp"

using namespace fwb;

namespace {

std::vector<SignaturePtr> all_signatures() {
  return {class_pure_sets()->signature,
          linear_order_signature(),
          bipartite_signature(),
          machine_signature(),
          class_by_name("div:lo")->signature,
          class_by_name("divg:lo:Z2")->signature,
          class_by_name("mix:sets:lo")->signature,
          make_signature({{"E", 2}, {"T", 3}}, {"f", "g"})};
}

std::vector<std::vector<int>> sorted_images(const PermGroup& g) {
  std::vector<std::vector<int>> out;
  for (const Perm& p : g.elements()) out.push_back(p.images());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("parse and serialize round trip") {
  std::mt19937_64 rng(11);
  for (const auto& sig : all_signatures())
    for (int n = 0; n <= 4; ++n) {
      Structure m = oracle::random_structure(sig, n, rng);
      CHECK(validate(m).empty());
      Structure back = parse_structure(serialize_structure(m));
      CHECK(back == m);
      CHECK(serialize_structure(back) == serialize_structure(m));
    }
  CHECK(parse_structure(serialize_structure(gadget(3, 2))) == gadget(3, 2));
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_structure("sig rel E 2\nsize 2\nrel E 0\n"), ParseError);
  CHECK_THROWS_AS(parse_structure("sig rel E 2\nsize 2\nrel E 0 5\n"), ParseError);
  CHECK_THROWS_AS(parse_structure("sig fun f\nsize 2\nfun f 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_structure("size 2\nbogus 1\n"), ParseError);
  CHECK_THROWS_AS(parse_structure("size -1\n"), ParseError);
  CHECK_NOTHROW(parse_structure("# comment\nsize 3 # trailing\n"));
}

TEST_CASE("embedding check agrees with brute force") {
  std::mt19937_64 rng(5);
  for (const auto& sig : all_signatures())
    for (int trial = 0; trial < 6; ++trial) {
      Structure a = oracle::random_structure(sig, 2, rng);
      Structure b = oracle::random_structure(sig, 3, rng);
      std::vector<std::vector<int>> mine;
      for (const auto& e : all_embeddings(a, b)) mine.push_back(e.map);
      std::sort(mine.begin(), mine.end());
      CHECK(mine == oracle::embeddings(a, b));
      for (const auto& e : mine) CHECK(is_embedding(a, b, Embedding{e}));
    }
}

TEST_CASE("automorphism search agrees with permutation filter") {
  std::mt19937_64 rng(7);
  for (const auto& sig : all_signatures())
    for (int n = 1; n <= 5; ++n) {
      Structure m = oracle::random_structure(sig, n, rng);
      CHECK(sorted_images(automorphisms(m)) == oracle::automorphisms(m));
    }
}

TEST_CASE("isomorphism and invariant key") {
  std::mt19937_64 rng(3);
  for (const auto& sig : all_signatures())
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 4);
      Structure a = oracle::random_structure(sig, n, rng);
      std::vector<int> p(static_cast<std::size_t>(n));
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
      Structure b = relabel(a, p);
      auto iso = isomorphic(a, b);
      REQUIRE(iso.has_value());
      CHECK(oracle::embeds(a, b, iso->map));
      CHECK(invariant_key(a) == invariant_key(b));
      Structure c = oracle::random_structure(sig, n, rng);
      CHECK(isomorphic(a, c).has_value() == oracle::isomorphic(a, c));
    }
}

TEST_CASE("fixed coordinates restrict the search") {
  Structure lo3 = members(*class_linear_orders(), 3)[0];
  Structure lo2 = members(*class_linear_orders(), 2)[0];
  std::vector<int> fixed{-1, 2};
  auto e = find_embedding(lo2, lo3, fixed);
  REQUIRE(e.has_value());
  CHECK(e->map[1] == 2);
  std::vector<int> bad_fixed{1, 0};
  CHECK_FALSE(find_embedding(lo2, lo3, bad_fixed).has_value());
  std::vector<int> wrong_length{0};
  CHECK_THROWS_AS(find_embedding(lo2, lo3, wrong_length), std::invalid_argument);
}

TEST_CASE("closure and generated substructures") {
  Structure m = machine({2, 3}, 1);
  std::vector<int> seed{2};
  CHECK(closure(m, seed) == std::vector<int>{2, 3, 4});
  std::vector<int> open{0};
  CHECK_FALSE(is_closed(m, open));
  auto sub = generated_substructure(m, seed);
  CHECK(sub.structure.size() == 3);
  CHECK(is_embedding(sub.structure, m, sub.inclusion));
  CHECK_THROWS_AS(induced_substructure(m, open), PreconditionError);
}

TEST_CASE("validate reports broken structures") {
  auto sig = make_signature({{"E", 2}}, {"f"});
  Structure bad(sig, 2, {{{0, 3}}}, {{0, 1}});
  CHECK_FALSE(validate(bad).empty());
  Structure partial(sig, 2, {{}}, {{0, -1}});
  CHECK_FALSE(validate(partial).empty());
}
