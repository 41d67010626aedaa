#include <doctest.h>

#include <filesystem>

#include "fwb/catalog.hpp"
#include "fwb/error.hpp"
#include "fwb/fraisse.hpp"
#include "fwb/text_format.hpp"
#include "oracle.hpp"

using namespace fwb;

namespace {

SignaturePtr graph_signature() {
  static const SignaturePtr sig = make_signature({{"E", 2}});
  return sig;
}

// All symmetric irreflexive graphs on n vertices.
void all_graphs(int n, const std::function<bool(const Structure&)>& visit) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  for (unsigned long mask = 0; mask < (1UL << pairs.size()); ++mask) {
    StructureBuilder b(graph_signature(), n);
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (mask >> i & 1) {
        b.add(0, {pairs[i].first, pairs[i].second});
        b.add(0, {pairs[i].second, pairs[i].first});
      }
    if (!visit(b.build())) return;
  }
}

// Disjoint union of X and Y over Z with no new tuples.
Amalgam free_amalgam(const Structure& z, const Structure& x, const Embedding& f,
                     const Structure& y, const Embedding& g) {
  std::vector<int> gy(static_cast<std::size_t>(y.size()), -1);
  for (int i = 0; i < z.size(); ++i) gy[g(i)] = f(i);
  int next = x.size();
  for (int& v : gy)
    if (v < 0) v = next++;
  StructureBuilder b(x.signature_ptr(), next);
  for (std::size_t r = 0; r < x.signature().relations().size(); ++r) {
    for (auto t : x.relation(static_cast<int>(r)).tuples()) b.add(static_cast<int>(r), t);
    for (auto t : y.relation(static_cast<int>(r)).tuples()) {
      for (int& v : t) v = gy[v];
      b.add(static_cast<int>(r), t);
    }
  }
  return Amalgam{b.build(), identity_embedding(x.size()), Embedding{gy}};
}

Extension add_points(const Structure& m, int k) {
  StructureBuilder b(m.signature_ptr(), m.size() + k);
  for (auto t : m.relation(0).tuples()) b.add(0, t);
  return Extension{b.build(), identity_embedding(m.size())};
}

// Graphs with at most one edge: hereditary, joint embedding by identifying
// edges, but two edges sharing a vertex over a common 3-set cannot be
// amalgamated.
ClassPtr at_most_one_edge() {
  static const ClassPtr c = [] {
    ClassSpec s;
    s.name = "one-edge";
    s.signature = graph_signature();
    s.violation = [](const Structure& m) -> std::optional<std::string> {
      auto ts = oracle::tuple_set(m, 0);
      for (const auto& t : ts)
        if (t[0] == t[1] || !ts.count({t[1], t[0]})) return "not a graph";
      if (ts.size() > 2) return "more than one edge";
      return std::nullopt;
    };
    s.amalgamate = free_amalgam;
    s.generic_extend = add_points;
    s.generate = all_graphs;
    return finalize(std::move(s));
  }();
  return c;
}

// Pure sets of even size: not hereditary.
ClassPtr even_sets() {
  static const ClassPtr c = [] {
    ClassSpec s = *class_pure_sets();
    s.name = "even-sets";
    s.violation = [](const Structure& m) -> std::optional<std::string> {
      if (m.size() % 2) return "odd size";
      return std::nullopt;
    };
    return finalize(std::move(s));
  }();
  return c;
}

// Unary U on all or none of the elements: hereditary, no joint embedding.
ClassPtr uniform_colour() {
  static const ClassPtr c = [] {
    ClassSpec s;
    s.name = "uniform";
    s.signature = make_signature({{"U", 1}});
    s.violation = [](const Structure& m) -> std::optional<std::string> {
      const auto u = m.relation(0).size();
      if (u != 0 && u != static_cast<std::size_t>(m.size())) return "mixed colours";
      return std::nullopt;
    };
    s.amalgamate = free_amalgam;
    s.generate = [sig = s.signature](int n, const std::function<bool(const Structure&)>& visit) {
      for (int colour = 0; colour < 2; ++colour) {
        StructureBuilder b(sig, n);
        if (colour)
          for (int x = 0; x < n; ++x) b.add(0, {x});
        if (!visit(b.build())) return;
      }
    };
    return finalize(std::move(s));
  }();
  return c;
}

// Linear orders whose amalgam operator puts Y's new points in reverse order.
ClassPtr broken_orders() {
  static const ClassPtr c = [] {
    ClassSpec s = *class_linear_orders();
    s.name = "broken-lo";
    auto good = s.amalgamate;
    s.amalgamate = [good](const Structure& z, const Structure& x, const Embedding& f,
                          const Structure& y, const Embedding& g) {
      Amalgam a = good(z, x, f, y, g);
      std::vector<int> perm(static_cast<std::size_t>(a.w.size()));
      std::iota(perm.begin(), perm.end(), 0);
      std::reverse(perm.begin(), perm.end());
      a.w = relabel(a.w, perm);
      for (int& v : a.fx.map) v = perm[v];
      return a;
    };
    return finalize(std::move(s));
  }();
  return c;
}

void check_ledger(const ClassSpec& c, const LimitApproximation& apx) {
  CHECK(c.member(apx.top));
  for (std::size_t i = 1; i < apx.sizes.size(); ++i) CHECK(apx.sizes[i - 1] <= apx.sizes[i]);
  CHECK(apx.sizes.back() == apx.top.size());
  for (const Task& t : apx.ledger) {
    if (t.created_at <= apx.settled) CHECK(t.fulfilled_at >= 0);
    if (t.fulfilled_at < 0) continue;
    const PairType& type = apx.types[t.type];
    CHECK(t.fulfilled_at >= t.created_at);
    Structure stage = apx.stage(t.fulfilled_at);
    CHECK(oracle::embeds(type.b, stage, t.witness));
    for (std::size_t j = 0; j < type.a_in_b.size(); ++j) CHECK(t.witness[type.a_in_b[j]] == t.e[j]);
  }
}

}  // namespace

TEST_CASE("catalog classes satisfy the laws at size 3") {
  for (const char* name : {"sets", "lo", "bipartite", "rot"}) {
    ClassPtr c = class_by_name(name);
    CAPTURE(name);
    CHECK(check_hereditary(*c, 3).ok());
    CHECK(check_jep(*c, 3).ok());
    LawReport ap = check_amalgamation(*c, 3);
    CHECK(ap.ok());
    CHECK(ap.cases > 0);
    CHECK(c->claims_disjoint);
  }
}

TEST_CASE("a wrong amalgam operator is caught") {
  LawReport r = check_amalgamation(*broken_orders(), 2);
  CHECK_FALSE(r.ok());
  bool disagree = false;
  for (const auto& f : r.failures) disagree |= f.find("layers disagree") != std::string::npos;
  CHECK(disagree);
}

TEST_CASE("a class without amalgamation is caught by the oracle") {
  ClassPtr c = at_most_one_edge();
  CHECK(check_hereditary(*c, 3).ok());
  LawReport r = check_amalgamation(*c, 3);
  CHECK_FALSE(r.ok());
  bool exhaustive = false;
  for (const auto& f : r.failures) exhaustive |= f.find("no amalgam exists") != std::string::npos;
  CHECK(exhaustive);
}

TEST_CASE("hereditary and joint embedding failures") {
  CHECK_FALSE(check_hereditary(*even_sets(), 3).ok());
  CHECK(check_hereditary(*uniform_colour(), 3).ok());
  CHECK_FALSE(check_jep(*uniform_colour(), 2).ok());
}

TEST_CASE("amalgam validator") {
  ClassPtr lo = class_linear_orders();
  Structure one = members(*lo, 1)[0], two = members(*lo, 2)[0];
  Embedding low{{0}}, high{{1}};
  Amalgam a = lo->amalgamate(one, two, low, two, high);
  CHECK_FALSE(amalgam_violation(*lo, one, two, low, two, high, a, true).has_value());
  Amalgam bad = a;
  bad.gy = bad.fx;
  CHECK(amalgam_violation(*lo, one, two, low, two, high, bad, false).has_value());
  auto found = oracle_amalgam(*lo, two, low, two, high, 2, 3);
  REQUIRE(found.has_value());
  CHECK(found->w.size() == 3);
}

TEST_CASE("pair types are one per automorphism orbit") {
  // Sets: A ⊂ B up to Aut(B) is just |A| < |B|.
  auto sets = pair_types(*class_pure_sets(), 3);
  CHECK(sets.size() == 1 + 2 + 3);
  // Chains: every subset of an n-chain is its own orbit.
  auto chains = pair_types(*class_linear_orders(), 3);
  CHECK(chains.size() == 1 + 3 + 7);
  for (const auto& p : chains) CHECK(oracle::induced(p.b, p.a_in_b) == p.a);
}

TEST_CASE("limit construction: determinism and ledger") {
  for (const char* name : {"lo", "bipartite", "rot", "div:lo"}) {
    ClassPtr c = class_by_name(name);
    CAPTURE(name);
    LimitApproximation a = build_limit(*c, 25, 2);
    LimitApproximation b = build_limit(*c, 25, 2);
    CHECK(serialize_structure(a.top) == serialize_structure(b.top));
    CHECK(serialize_ledger(a) == serialize_ledger(b));
    check_ledger(*c, a);
    LimitApproximation s1 = build_limit(*c, 25, 2, 9);
    LimitApproximation s2 = build_limit(*c, 25, 2, 9);
    CHECK(serialize_ledger(s1) == serialize_ledger(s2));
    check_ledger(*c, s1);
  }
}

TEST_CASE("certification matches an independent audit") {
  for (const char* name : {"lo", "bipartite", "sets"}) {
    ClassPtr c = class_by_name(name);
    CAPTURE(name);
    LimitApproximation apx = build_limit(*c, 40, 2);
    Certificate cert = certify_extension_level(*c, apx, 2);
    std::vector<Structure> types;
    for (int n = 1; n <= 2; ++n)
      for (const Structure& m : members(*c, n)) types.push_back(m);
    auto audit = oracle::audit_extensions(types, apx.stage(cert.stage), apx.top);
    CHECK(cert.audited == audit.audited);
    CHECK(cert.missing_count == audit.missing);
    CHECK(cert.ok == (audit.missing == 0));
  }
  CHECK_THROWS_AS(certify_extension_level(*class_linear_orders(),
                                          build_limit(*class_linear_orders(), 5, 1), 2),
                  PreconditionError);
}

TEST_CASE("certification reports missing extensions") {
  LimitApproximation fake{.class_name = "lo",
                          .task_size_cap = 2,
                          .sizes = {0, 3},
                          .top = members(*class_linear_orders(), 3)[0],
                          .settled = 1};
  Certificate cert = certify_extension_level(*class_linear_orders(), fake, 2);
  CHECK_FALSE(cert.ok);
  auto audit = oracle::audit_extensions(
      {members(*class_linear_orders(), 1)[0], members(*class_linear_orders(), 2)[0]}, fake.top,
      fake.top);
  CHECK(cert.missing_count == audit.missing);
  CHECK(audit.missing == 2);  // nothing above the top, nothing below the bottom
}

TEST_CASE("limit save and load round trip") {
  LimitApproximation apx = build_limit(*class_by_name("bipartite"), 30, 2, 4);
  auto dir = std::filesystem::temp_directory_path() / "fwb_test_limit";
  std::filesystem::remove_all(dir);
  save_limit(apx, dir);
  LimitApproximation back = load_limit(dir);
  CHECK(back.class_name == apx.class_name);
  CHECK(back.steps == apx.steps);
  CHECK(back.task_size_cap == apx.task_size_cap);
  CHECK(back.seed == apx.seed);
  CHECK(back.sizes == apx.sizes);
  CHECK(back.top == apx.top);
  CHECK(back.settled == apx.settled);
  CHECK(back.certified_level == apx.certified_level);
  CHECK(certify_extension_level(*class_by_name("bipartite"), back, 2).ok == (apx.certified_level >= 2));
  std::filesystem::remove_all(dir);
  CHECK_THROWS(load_limit(dir));
}
