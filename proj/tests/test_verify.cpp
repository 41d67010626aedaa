#include <doctest.h>

#include <random>

#include "fwb/catalog.hpp"
#include "fwb/error.hpp"
#include "fwb/sweep.hpp"
#include "fwb/verify.hpp"
#include "oracle.hpp"

using namespace fwb;

namespace {

// Every way of colouring the first `prefix` elements A, B or neither.
bool brute_star(const Structure& m, int prefix, int max_union) {
  long total = 1;
  for (int i = 0; i < prefix; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    std::vector<int> colour(static_cast<std::size_t>(prefix));
    long c = code;
    int used = 0;
    for (int i = 0; i < prefix; ++i) {
      colour[i] = static_cast<int>(c % 3);
      c /= 3;
      used += colour[i] != 0;
    }
    if (used > max_union) continue;
    for (int side : {0, 1}) {
      bool found = false;
      for (int p = 0; p < m.size() && !found; ++p) {
        if (!m.in(side, p) || (p < prefix && colour[p] != 0)) continue;
        bool good = true;
        for (int y = 0; y < prefix; ++y) {
          if (colour[y] == 0 || !m.in(1 - side, y)) continue;
          if (m.holds(2, {p, y}) != (colour[y] == 1)) good = false;
        }
        found = good;
      }
      if (!found) return false;
    }
  }
  return true;
}

Structure random_bipartite(int n, std::mt19937_64& rng) {
  StructureBuilder b(bipartite_signature(), n);
  std::vector<int> side(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    side[x] = static_cast<int>(rng() % 2);
    b.add(side[x], {x});
  }
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (side[x] != side[y] && rng() % 2) {
        b.add(2, {x, y});
        b.add(2, {y, x});
      }
  return b.build();
}

SuiteBounds small_bounds() {
  SuiteBounds b;
  b.law_size = 2;
  b.group_law_size = 4;
  b.max_group_order = 3;
  b.sample_size = 2;
  b.max_products = 2;
  b.max_consumers = 2;
  b.max_wheel = 3;
  b.max_k = 2;
  b.max_machine = 4;
  b.max_mixed = 3;
  b.max_set = 5;
  b.samples = 20;
  b.steps = 40;
  return b;
}

}  // namespace

TEST_CASE("report text and lines") {
  SuiteReport r{"demo", {{"size", "3"}}, {}};
  r.checks.push_back({"a.one", Status::pass, "", "12 cases", 0.5});
  r.checks.push_back({"a.two", Status::fail, "X=[size 1]", "", 0});
  r.checks.push_back({"a.three", Status::skip, "", "", 0});
  CHECK(r.count(Status::pass) == 1);
  CHECK(r.count(Status::fail) == 1);
  CHECK_FALSE(r.ok());
  CHECK(r.text() ==
        "suite demo\nbounds size=3\n  [pass] a.one: 12 cases\n  [fail] a.two\n"
        "      witness: X=[size 1]\n  [skip] a.three\nsummary 1 pass, 1 fail, 1 skip\n");
  CHECK(r.text(true).find("(500 ms)") != std::string::npos);
  CHECK(r.lines() == "check a.one pass -\ncheck a.two fail X=[size 1]\ncheck a.three skip -\n");
}

TEST_CASE("bounds and suite names") {
  CHECK_NOTHROW(check_bounds(SuiteBounds{}));
  SuiteBounds b;
  b.law_size = 0;
  CHECK_THROWS_AS(check_bounds(b), PreconditionError);
  b = SuiteBounds{};
  b.max_wheel = 1;
  CHECK_THROWS_AS(check_bounds(b), PreconditionError);
  b = SuiteBounds{};
  b.max_products = 6;
  b.max_consumers = 6;
  CHECK_THROWS_AS(check_bounds(b), PreconditionError);
  CHECK(suite_names().size() == 5);
  CHECK_THROWS_AS(run_suite("nope", SuiteBounds{}), PreconditionError);
  CHECK_THROWS_AS(run_suite("groups", b), PreconditionError);
}

TEST_CASE("star condition agrees with brute force") {
  std::mt19937_64 rng(23);
  int satisfied = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    Structure m = random_bipartite(n, rng);
    const int prefix = std::min(n, 3);
    for (int u = 0; u <= 2; ++u) {
      const bool brute = brute_star(m, prefix, u);
      satisfied += brute;
      CHECK(star_violation(m, 0, 1, 2, prefix, u).has_value() == !brute);
    }
  }
  CHECK(satisfied > 0);
}

TEST_CASE("cyclic product factors match Smith normal form") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> sizes;
    std::vector<long> as_long;
    const int r = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < r; ++i) {
      sizes.push_back(1 + static_cast<int>(rng() % 36));
      as_long.push_back(sizes.back());
    }
    CHECK(cyclic_product_factors(sizes) == oracle::smith_factors(as_long));
  }
}

TEST_CASE("machine sweep: serial and parallel agree") {
  MachineSweep s = machine_abelian_sweep(5, Exec::serial);
  MachineSweep p = machine_abelian_sweep(5, Exec::parallel);
  CHECK(s.machines == p.machines);
  CHECK(s.non_abelian == p.non_abelian);
  CHECK(s.first_witness == p.first_witness);
  long expect = 0;
  for (int n = 1; n <= 5; ++n)
    for (const auto& c : compositions(n)) expect += 1L << edge_orbit_count(c);
  CHECK(s.machines == expect);
  CHECK(s.non_abelian == 0);
}

TEST_CASE("parallel_for runs every index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, [&](long i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
  CHECK_THROWS_AS(parallel_for(50, [](long i) {
                    if (i == 17) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  set_max_jobs(1);
  CHECK(max_jobs() == 1);
  set_max_jobs(0);
}

TEST_CASE("suites pass at small bounds and repeat byte for byte") {
  for (const auto& name : suite_names()) {
    CAPTURE(name);
    SuiteReport a = run_suite(name, small_bounds());
    SuiteReport b = run_suite(name, small_bounds());
    for (const auto& c : a.checks) {
      CAPTURE(c.id);
      CAPTURE(c.witness);
      CHECK(c.status != Status::fail);
    }
    CHECK(a.count(Status::pass) > 0);
    CHECK(a.text() == b.text());
  }
}
