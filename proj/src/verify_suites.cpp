// The five verification suites. Checks run one after another in report
// order; the case sweeps inside a check run on the parallel_for pool.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <random>

#include "fwb/catalog.hpp"
#include "fwb/error.hpp"
#include "fwb/fraisse.hpp"
#include "fwb/sweep.hpp"
#include "fwb/text_format.hpp"
#include "fwb/verify.hpp"

namespace fwb {

namespace {

struct Outcome {
  Status status = Status::pass;
  std::string witness;
  std::string detail;
};

Outcome pass(std::string detail = {}) { return {Status::pass, {}, std::move(detail)}; }
Outcome fail(std::string witness, std::string detail = {}) {
  return {Status::fail, witness.empty() ? "?" : std::move(witness), std::move(detail)};
}
Outcome skip(std::string detail) { return {Status::skip, {}, std::move(detail)}; }

struct CheckDef {
  std::string id;
  std::function<Outcome()> run;
};

SuiteReport run_checks(std::string suite, std::vector<std::pair<std::string, std::string>> bounds,
                       const std::vector<CheckDef>& defs) {
  SuiteReport report{std::move(suite), std::move(bounds), {}};
  for (const CheckDef& d : defs) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = d.run();
    } catch (const CapExceeded& e) {
      o = skip(std::string("enumeration cap: ") + e.what());
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.checks.push_back(CheckRecord{d.id, o.status, o.witness, o.detail, secs});
  }
  return report;
}

Outcome law_outcome(const LawReport& r) {
  if (!r.ok()) return fail(r.failures.front(), r.summary());
  return pass(r.summary());
}

void add_laws(std::vector<CheckDef>& defs, const std::string& name, int n) {
  defs.push_back({"laws." + name + ".hereditary", [name, n] {
                    return law_outcome(check_hereditary(*class_by_name(name), n));
                  }});
  defs.push_back({"laws." + name + ".jep", [name, n] {
                    return law_outcome(check_jep(*class_by_name(name), n));
                  }});
  defs.push_back({"laws." + name + ".amalgamation", [name, n] {
                    return law_outcome(check_amalgamation(*class_by_name(name), n));
                  }});
}

// Keeps the witness of the smallest failing case index of a parallel sweep.
class FirstFailure {
 public:
  void report(long index, std::string witness) {
    std::lock_guard lock(mu_);
    if (index_ < 0 || index < index_) {
      index_ = index;
      witness_ = std::move(witness);
    }
  }
  bool failed() const { return index_ >= 0; }
  const std::string& witness() const { return witness_; }

 private:
  std::mutex mu_;
  long index_ = -1;
  std::string witness_;
};

std::string ints(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

std::string longs(const std::vector<long>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

// All members of sizes lo..hi, in size then serialization order.
std::vector<Structure> members_upto(const ClassSpec& c, int lo, int hi) {
  std::vector<Structure> out;
  for (int n = lo; n <= hi; ++n) {
    const auto& ms = members(c, n);
    out.insert(out.end(), ms.begin(), ms.end());
  }
  return out;
}

PermGroup regular_representation(const GroupTable& g) {
  std::vector<Perm> elems;
  for (int a = 0; a < g.order(); ++a) {
    std::vector<int> img(static_cast<std::size_t>(g.order()));
    for (int x = 0; x < g.order(); ++x) img[x] = g.mul(x, a);
    elems.emplace_back(std::move(img));
  }
  std::sort(elems.begin(), elems.end());
  return PermGroup(g.order(), std::move(elems));
}

IntSet random_subset(std::mt19937_64& rng, int max_set) {
  IntSet s;
  for (long x = 1; x <= max_set; ++x)
    if (rng() & 1ULL) s.push_back(x);
  return s;
}

std::string show_set(const IntSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

std::vector<std::pair<std::string, GroupTable>> test_groups(int max_order) {
  std::vector<std::pair<std::string, GroupTable>> out;
  for (const char* spec : {"Z2", "Z3", "Z4", "S3"}) {
    GroupTable g = parse_group_spec(spec);
    if (g.order() <= max_order) out.emplace_back(spec, std::move(g));
  }
  return out;
}

}  // namespace

// ---- groups ----

SuiteReport suite_groups(const SuiteBounds& b) {
  check_bounds(b);
  std::vector<CheckDef> defs;
  defs.push_back({"h-embed.homomorphism", [b] {
                    std::mt19937_64 rng(b.seed);
                    for (int i = 0; i < b.samples; ++i) {
                      IntSet x = random_subset(rng, b.max_set), y = random_subset(rng, b.max_set);
                      if (!(h_embed(x).then(h_embed(y)) == h_embed(symdiff_compose(x, y))))
                        return fail("A=" + show_set(x) + " B=" + show_set(y));
                    }
                    return pass(std::to_string(b.samples) + " pairs over subsets of {1.." +
                                std::to_string(b.max_set) + "}");
                  }});
  defs.push_back({"h-embed.kernel", [b] {
                    const long total = 1L << b.max_set;
                    FirstFailure bad;
                    parallel_for(total, [&](long mask) {
                      IntSet a;
                      for (int i = 0; i < b.max_set; ++i)
                        if (mask >> i & 1L) a.push_back(i + 1);
                      if (h_embed(a).is_identity() != a.empty()) bad.report(mask, "A=" + show_set(a));
                    });
                    if (bad.failed()) return fail(bad.witness());
                    return pass("identity only for the empty set, " + std::to_string(total) +
                                " subsets");
                  }});
  defs.push_back({"h-embed.order-two", [b] {
                    const long total = 1L << b.max_set;
                    for (long mask = 1; mask < total; ++mask) {
                      IntSet a;
                      for (int i = 0; i < b.max_set; ++i)
                        if (mask >> i & 1L) a.push_back(i + 1);
                      if (h_embed(a).order() != 2) return fail("A=" + show_set(a));
                    }
                    return pass("every nonempty A gives an element of order 2");
                  }});
  defs.push_back({"symdiff.laws", [b] {
                    std::mt19937_64 rng(b.seed + 1);
                    for (int i = 0; i < b.samples; ++i) {
                      IntSet x = random_subset(rng, b.max_set), y = random_subset(rng, b.max_set),
                             z = random_subset(rng, b.max_set);
                      const std::string w =
                          "A=" + show_set(x) + " B=" + show_set(y) + " C=" + show_set(z);
                      if (symdiff_compose(symdiff_compose(x, y), z) !=
                          symdiff_compose(x, symdiff_compose(y, z)))
                        return fail(w, "associativity");
                      if (!symdiff_compose(x, x).empty()) return fail(w, "self-inverse");
                      if (symdiff_compose(x, {}) != x) return fail(w, "identity");
                      if (symdiff_compose(x, y) != symdiff_compose(y, x)) return fail(w, "commutativity");
                    }
                    return pass(std::to_string(b.samples) + " triples");
                  }});
  defs.push_back({"order-detection", [] {
                    std::vector<std::pair<std::string, Structure>> cases;
                    for (int n = 1; n <= 4; ++n)
                      cases.emplace_back("set" + std::to_string(n), members(*class_pure_sets(), n)[0]);
                    cases.emplace_back("lo4", members(*class_linear_orders(), 4)[0]);
                    for (int n = 1; n <= 6; ++n) cases.emplace_back("wheel" + std::to_string(n), wheel(n));
                    cases.emplace_back("gadget(2,2)", gadget(2, 2));
                    cases.emplace_back("gadget(3,2)", gadget(3, 2));
                    int checked = 0;
                    for (const auto& [name, m] : cases) {
                      PermGroup g = automorphisms(m);
                      std::vector<char> seen(g.order() + 1, 0);
                      for (const Perm& p : g.elements()) seen[p.order()] = 1;
                      for (long k = 1; k <= static_cast<long>(g.order()); ++k, ++checked)
                        if (has_element_of_order(g, k) != static_cast<bool>(seen[k]))
                          return fail(name + " order " + std::to_string(k));
                    }
                    if (!has_element_of_order(automorphisms(members(*class_pure_sets(), 2)[0]), 2))
                      return fail("set2 order 2");
                    return pass(std::to_string(checked) + " (structure, order) queries");
                  }});
  defs.push_back({"group-tables", [b] {
                    std::vector<std::pair<GroupTable, std::string>> cases;
                    for (int n = 1; n <= b.max_group_order; ++n)
                      cases.emplace_back(GroupTable::cyclic(n), "cyclic order " + std::to_string(n));
                    cases.emplace_back(GroupTable::symmetric(3), "order 6 non-abelian");
                    cases.emplace_back(GroupTable::product(GroupTable::cyclic(2), GroupTable::cyclic(2)),
                                       "abelian order 4 invariant factors [2,2]");
                    cases.emplace_back(GroupTable::product(GroupTable::cyclic(2), GroupTable::cyclic(3)),
                                       "cyclic order 6");
                    for (const auto& [g, want] : cases) {
                      if (!g.violations().empty()) return fail(g.name() + ": " + g.violations().front());
                      const std::string got = identify(regular_representation(g)).describe();
                      if (got != want) return fail(g.name() + ": " + got + " expected " + want);
                    }
                    return pass(std::to_string(cases.size()) + " tables");
                  }});
  return run_checks("groups",
                    {{"max-set", std::to_string(b.max_set)},
                     {"samples", std::to_string(b.samples)},
                     {"max-group-order", std::to_string(b.max_group_order)},
                     {"seed", std::to_string(b.seed)}},
                    defs);
}

// ---- diversification ----

SuiteReport suite_diversification(const SuiteBounds& b) {
  check_bounds(b);
  std::vector<CheckDef> defs;
  add_laws(defs, "div:lo", b.law_size);
  const auto groups = test_groups(b.max_group_order);
  for (const auto& [spec, g] : groups) add_laws(defs, "divg:lo:" + spec, b.group_law_size);
  for (const auto& [spec, g] : groups)
    defs.push_back({"orbit-completion." + spec, [b, spec, g] {
                      auto lo = class_linear_orders();
                      auto dg = class_by_name("divg:lo:" + spec);
                      auto xs = members_upto(*class_by_name("div:lo"), 1, b.sample_size);
                      FirstFailure bad;
                      parallel_for(static_cast<long>(xs.size()), [&](long i) {
                        const Structure& x = xs[i];
                        auto oc = orbit_completion(*lo, x, g);
                        const std::string w = compact_structure(x);
                        if (oc.xg.size() != g.order() * x.size())
                          bad.report(i, w + " | size " + std::to_string(oc.xg.size()));
                        else if (auto fp = fixed_point(oc.action))
                          bad.report(i, w + " | fixed point " + std::to_string(fp->point));
                        else if (action_violation(oc.action, forget_action(oc.xg)))
                          bad.report(i, w + " | action not by automorphisms");
                        else if (auto why = dg->membership_violation(oc.xg))
                          bad.report(i, w + " | " + *why);
                        else if (!is_embedding(x, forget_action(oc.xg), oc.embedding))
                          bad.report(i, w + " | embedding");
                      });
                      if (bad.failed()) return fail(bad.witness());
                      return pass(std::to_string(xs.size()) + " members with 1 <= |X| <= " +
                                  std::to_string(b.sample_size));
                    }});
  for (const auto& [spec, g] : groups)
    defs.push_back({"reduct." + spec, [b, spec] {
                      auto d = class_by_name("div:lo");
                      auto xs = members_upto(*class_by_name("divg:lo:" + spec), 0, b.group_law_size);
                      for (const Structure& x : xs)
                        if (auto why = d->membership_violation(forget_action(x)))
                          return fail(compact_structure(x), *why);
                      return pass(std::to_string(xs.size()) + " members forget to D(LO) members");
                    }});
  defs.push_back({"reduct.trivial-group", [b] {
                    auto d = class_by_name("div:lo");
                    auto d1 = class_by_name("divg:lo:Z1");
                    for (int n = 0; n <= b.law_size; ++n) {
                      const auto& plain = members(*d, n);
                      const auto& acted = members(*d1, n);
                      if (plain.size() != acted.size())
                        return fail("size " + std::to_string(n), std::to_string(plain.size()) +
                                                                   " vs " + std::to_string(acted.size()));
                      for (const Structure& x : acted) {
                        Structure r = forget_action(x);
                        if (std::none_of(plain.begin(), plain.end(),
                                         [&](const Structure& y) { return isomorphic(r, y).has_value(); }))
                          return fail(compact_structure(x));
                      }
                    }
                    return pass("D with the trivial group matches D up to size " +
                                std::to_string(b.law_size));
                  }});
  defs.push_back({"certificate.Z2-as-D", [b] {
                    auto dg = class_by_name("divg:lo:Z2");
                    LimitApproximation apx = build_limit(*dg, b.steps, 4, b.seed);
                    apx.top = forget_action(apx.top);
                    Certificate cert = certify_extension_level(*class_by_name("div:lo"), apx, 2);
                    const std::string d = "stage " + std::to_string(cert.stage) + ", " +
                                          std::to_string(cert.audited) + " extensions audited";
                    if (!cert.ok) return fail(cert.missing.empty() ? "?" : cert.missing.front(), d);
                    return pass(d);
                  }});
  defs.push_back({"guard.no-disjoint-ap", [] {
                    ClassSpec broken = *class_linear_orders();
                    broken.name = "lo-without-disjoint-ap";
                    broken.claims_disjoint = false;
                    try {
                      diversify(finalize(std::move(broken)));
                    } catch (const PreconditionError&) {
                      return pass("rejected");
                    }
                    return fail("diversify accepted a base without disjoint amalgamation");
                  }});
  defs.push_back({"guard.functions", [] {
                    try {
                      diversify(class_rotating_machines());
                    } catch (const PreconditionError&) {
                      return pass("rejected");
                    }
                    return fail("diversify accepted a base with functions");
                  }});
  return run_checks("diversification",
                    {{"law-size", std::to_string(b.law_size)},
                     {"group-law-size", std::to_string(b.group_law_size)},
                     {"max-group-order", std::to_string(b.max_group_order)},
                     {"sample-size", std::to_string(b.sample_size)},
                     {"steps", std::to_string(b.steps)},
                     {"seed", std::to_string(b.seed)}},
                    defs);
}

// ---- consumer-product ----

namespace {

struct CpCase {
  std::string model;
  bool distinct;
  std::string injective;    // empty when fine
  std::string stabilizer;
  std::string extension;
};

// For a consumer-product model: restriction of Aut(M) to the products,
// consumer stabilizers, and automorphisms inducing a nontrivial consumer
// permutation with a fixed consumer.
CpCase examine_cp(const Structure& m) {
  CpCase out{compact_structure(m), cp_preference_distinct(m).distinct, {}, {}, {}};
  if (!out.distinct) return out;
  PermGroup aut = automorphisms(m);
  const auto ps = products(m), cs = consumers(m);
  std::vector<std::vector<int>> restrictions;
  for (const Perm& h : aut.elements()) {
    std::vector<int> r;
    for (int p : ps) r.push_back(h(p));
    restrictions.push_back(std::move(r));
    bool moves_consumer = false, fixes_consumer = false;
    for (int c : cs) (h(c) == c ? fixes_consumer : moves_consumer) = true;
    if (!h.is_identity() && fixes_consumer && out.stabilizer.empty())
      out.stabilizer = "automorphism " + ints(h.images()) + " fixes a consumer";
    if (moves_consumer && fixes_consumer && out.extension.empty())
      out.extension = "automorphism " + ints(h.images()) + " permutes consumers around a fixed one";
  }
  std::sort(restrictions.begin(), restrictions.end());
  if (std::adjacent_find(restrictions.begin(), restrictions.end()) != restrictions.end())
    out.injective = "two automorphisms agree on the products";
  return out;
}

}  // namespace

SuiteReport suite_consumer_product(const SuiteBounds& b) {
  check_bounds(b);
  // One sweep shared by the three model checks.
  auto cases = std::make_shared<std::vector<CpCase>>();
  auto sweep = std::make_shared<std::once_flag>();
  auto run_sweep = [b, cases, sweep] {
    std::call_once(*sweep, [&] {
      auto d = class_by_name("div:lo");
      std::vector<Structure> models;
      for (int n = 2; n <= b.max_products + b.max_consumers; ++n)
        for (const Structure& m : members(*d, n)) {
          const int p = static_cast<int>(products(m).size()), c = n - p;
          if (p >= 1 && p <= b.max_products && c >= 1 && c <= b.max_consumers) models.push_back(m);
        }
      cases->resize(models.size());
      parallel_for(static_cast<long>(models.size()),
                   [&](long i) { (*cases)[i] = examine_cp(models[i]); });
    });
  };
  auto model_check = [run_sweep, cases](std::string CpCase::*field, std::string what) {
    return [=] {
      run_sweep();
      long distinct = 0;
      for (const CpCase& c : *cases) {
        if (!c.distinct) continue;
        ++distinct;
        if (!(c.*field).empty()) return fail(c.model, c.*field);
      }
      return pass(what + " for " + std::to_string(distinct) + " preference-distinct models (" +
                  std::to_string(cases->size() - distinct) + " others skipped)");
    };
  };
  std::vector<CheckDef> defs;
  defs.push_back({"restriction-injective",
                  model_check(&CpCase::injective, "h -> h restricted to P is injective")});
  defs.push_back({"consumer-stabilizers-trivial",
                  model_check(&CpCase::stabilizer, "every consumer stabilizer is trivial")});
  defs.push_back({"no-consumer-fixing-extension",
                  model_check(&CpCase::extension,
                              "no automorphism moves consumers while fixing one")});
  defs.push_back({"degenerate.equal-orders", [] {
                    // Two products, two consumers with the same preference.
                    StructureBuilder sb(diversified_signature(*linear_order_signature()), 4);
                    sb.add(0, {0});
                    sb.add(0, {1});
                    sb.add(1, {2});
                    sb.add(1, {3});
                    sb.add(2, {0, 1, 2});
                    sb.add(2, {0, 1, 3});
                    Structure m = sb.build();
                    const bool swap = automorphisms(m).contains(Perm({0, 1, 3, 2}));
                    if (cp_preference_distinct(m).distinct || !swap)
                      return fail(compact_structure(m), "expected a non-distinct model with the swap");
                    return skip("not preference-distinct; the consumer swap is an automorphism");
                  }});
  auto limit = std::make_shared<std::optional<LimitApproximation>>();
  auto limit_once = std::make_shared<std::once_flag>();
  auto get_limit = [b, limit, limit_once]() -> const LimitApproximation& {
    std::call_once(*limit_once, [&] { *limit = build_limit(*class_by_name("div:lo"), b.steps, 3, b.seed); });
    return **limit;
  };
  defs.push_back({"limit.preference-distinct", [get_limit] {
                    const auto& apx = get_limit();
                    auto r = cp_preference_distinct(apx.top);
                    const std::string d = std::to_string(consumers(apx.top).size()) + " consumers, " +
                                          std::to_string(products(apx.top).size()) + " products";
                    if (!r.distinct)
                      return fail("consumers " + std::to_string(r.c) + "," + std::to_string(r.d), d);
                    return pass(d);
                  }});
  defs.push_back({"limit.certified", [get_limit] {
                    const auto& apx = get_limit();
                    Certificate cert = certify_extension_level(*class_by_name("div:lo"), apx, 2);
                    const std::string d = "level 2 at stage " + std::to_string(cert.stage) + ", " +
                                          std::to_string(cert.audited) + " extensions audited";
                    if (!cert.ok) return fail(cert.missing.empty() ? "?" : cert.missing.front(), d);
                    return pass(d);
                  }});
  return run_checks("consumer-product",
                    {{"max-products", std::to_string(b.max_products)},
                     {"max-consumers", std::to_string(b.max_consumers)},
                     {"steps", std::to_string(b.steps)},
                     {"task-cap", "3"},
                     {"seed", std::to_string(b.seed)}},
                    defs);
}

// ---- mixed-sum ----

SuiteReport suite_mixed_sum(const SuiteBounds& b) {
  check_bounds(b);
  std::vector<CheckDef> defs;
  add_laws(defs, "mix:sets:lo", b.law_size);
  for (const char* name : {"mix:sets:lo", "mix:lo:sets", "mix:sets:sets"})
    defs.push_back({std::string("witness.") + name, [b, name = std::string(name)] {
                      auto mix = class_by_name(name);
                      auto ms = members_upto(*mix, 1, b.max_mixed);
                      std::atomic<long> cases{0};
                      FirstFailure bad;
                      parallel_for(static_cast<long>(ms.size()), [&](long i) {
                        const Structure& m = ms[i];
                        const PermGroup aut = automorphisms(m);
                        for (const Perm& h : aut.elements())
                          for (int b0 = 0; b0 < m.size(); ++b0) {
                            if (!m.in(1, b0) || h(b0) == b0) continue;
                            ++cases;
                            auto w = distinguishing_witness(*mix, m, h, b0);
                            const std::string tag = compact_structure(m) + " | h=" + ints(h.images()) +
                                                    " b0=" + std::to_string(b0);
                            if (!mix->member(w.m)) {
                              bad.report(i, tag + " | M' not a member");
                              return;
                            }
                            const PermGroup aut_w = automorphisms(w.m);
                            for (const Perm& k : aut_w.elements()) {
                              bool extends = k(w.a0) == w.a0;
                              for (int x = 0; x < m.size() && extends; ++x) extends = k(x) == h(x);
                              if (extends) {
                                bad.report(i, tag + " | extension " + ints(k.images()) + " fixes a0");
                                return;
                              }
                            }
                          }
                      });
                      if (bad.failed()) return fail(bad.witness());
                      std::string d = std::to_string(cases.load()) + " (M, h, b0) cases over " +
                                      std::to_string(ms.size()) + " members";
                      if (cases.load() == 0) d += "; vacuous, the right side is rigid";
                      return pass(d);
                    }});
  defs.push_back({"star.reduct", [b] {
                    auto mix = class_by_name("mix:sets:lo");
                    LimitApproximation apx = build_limit(*mix, b.steps, 3, b.seed);
                    if (apx.certified_level < 3)
                      return fail("certified level " + std::to_string(apx.certified_level));
                    const int s = std::max(apx.settled, 0);
                    const int prefix = apx.sizes[s];
                    // L, R and adj keep their indices in the bipartite reduct.
                    if (auto why = star_violation(apx.top, 0, 1, 2, prefix, apx.certified_level - 1))
                      return fail(*why);
                    return pass("|A u B| <= " + std::to_string(apx.certified_level - 1) + " over the " +
                                std::to_string(prefix) + "-element settled stage");
                  }});
  defs.push_back({"rigidity.lo", [b] {
                    for (int n = 0; n <= b.max_mixed + 1; ++n)
                      for (const Structure& m : members(*class_linear_orders(), n))
                        if (automorphisms(m).order() != 1) return fail(compact_structure(m));
                    return pass("finite linear orders up to size " + std::to_string(b.max_mixed + 1) +
                                " are rigid");
                  }});
  defs.push_back({"symmetric-groups", [b] {
                    auto mix = class_by_name("mix:sets:lo");
                    long factorial = 1;
                    for (int n = 1; n <= b.max_mixed; ++n) {
                      factorial *= n;
                      StructureBuilder sb(mix->signature, n);
                      for (int x = 0; x < n; ++x) sb.add(0, {x});
                      Structure m = sb.build();
                      if (!mix->member(m)) return fail(compact_structure(m), "not a member");
                      if (static_cast<long>(automorphisms(m).order()) != factorial)
                        return fail(compact_structure(m), "Aut order differs from n!");
                    }
                    return pass("edge-free |L| = n, R empty: order n! for n <= " +
                                std::to_string(b.max_mixed));
                  }});
  return run_checks("mixed-sum",
                    {{"law-size", std::to_string(b.law_size)},
                     {"max-mixed", std::to_string(b.max_mixed)},
                     {"steps", std::to_string(b.steps)},
                     {"seed", std::to_string(b.seed)}},
                    defs);
}

// ---- rotating-machines ----

MachineSweep machine_abelian_sweep(int max_size, Exec exec) {
  struct Chunk {
    std::vector<int> sizes;
    unsigned long long lo, hi;
  };
  std::vector<Chunk> chunks;
  for (int n = 1; n <= max_size; ++n)
    for (const auto& comp : compositions(n)) {
      const unsigned long long total = 1ULL << edge_orbit_count(comp);
      const unsigned long long step = 4096;
      for (unsigned long long lo = 0; lo < total; lo += step)
        chunks.push_back({comp, lo, std::min(total, lo + step)});
    }
  std::vector<long> machines(chunks.size(), 0), bad(chunks.size(), 0);
  std::vector<std::string> witness(chunks.size());
  auto body = [&](long i) {
    const Chunk& c = chunks[i];
    for (unsigned long long mask = c.lo; mask < c.hi; ++mask) {
      ++machines[i];
      if (!is_abelian(automorphisms(machine(c.sizes, mask), max_size))) {
        if (bad[i]++ == 0) witness[i] = "wheels " + ints(c.sizes) + " mask " + std::to_string(mask);
      }
    }
  };
  if (exec == Exec::parallel)
    parallel_for(static_cast<long>(chunks.size()), body);
  else
    serial_for(static_cast<long>(chunks.size()), body);
  MachineSweep out;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    out.machines += machines[i];
    out.non_abelian += bad[i];
    if (out.first_witness.empty()) out.first_witness = witness[i];
  }
  return out;
}

SuiteReport suite_rotating_machines(const SuiteBounds& b) {
  check_bounds(b);
  std::vector<CheckDef> defs;
  add_laws(defs, "rot", b.law_size);
  for (int n = 2; n <= b.max_wheel; ++n)
    for (int k = 1; k <= b.max_k; ++k)
      defs.push_back({"gadget." + std::to_string(n) + "." + std::to_string(k), [n, k] {
                        Structure m = gadget(n, k);
                        if (auto why = class_rotating_machines()->membership_violation(m))
                          return fail("gadget not a machine", *why);
                        PermGroup aut = automorphisms(m, n + n * k);
                        GroupIdentity id = identify(aut);
                        if (!id.is_cyclic || id.order != static_cast<std::size_t>(n * k))
                          return fail(id.describe(), "expected cyclic order " + std::to_string(n * k));
                        for (const Perm& h : aut.elements()) {
                          bool moves_c = false;
                          for (int x = 0; x < n; ++x) moves_c |= h(x) != x;
                          if (moves_c && k % h.order() == 0)
                            return fail(ints(h.images()),
                                        "order " + std::to_string(h.order()) + " divides k");
                        }
                        return pass("cyclic order " + std::to_string(n * k) +
                                    "; orders of elements moving C do not divide k");
                      }});
  defs.push_back({"wheels.cyclic", [b] {
                    for (int n = 1; n <= b.max_machine; ++n) {
                      GroupIdentity id = identify(automorphisms(wheel(n), b.max_machine));
                      if (!id.is_cyclic || id.order != static_cast<std::size_t>(n))
                        return fail("wheel(" + std::to_string(n) + ")", id.describe());
                    }
                    return pass("wheel(n) has Aut cyclic of order n for n <= " +
                                std::to_string(b.max_machine));
                  }});
  defs.push_back({"edge-free.products", [b] {
                    long count = 0;
                    // Sets of distinct wheel sizes with total at most max_machine.
                    std::vector<int> sizes;
                    std::optional<Outcome> bad;
                    std::function<void(int, int)> rec = [&](int from, int left) {
                      if (bad) return;
                      if (!sizes.empty()) {
                        ++count;
                        GroupIdentity id = identify(automorphisms(machine(sizes, 0), b.max_machine));
                        auto want = cyclic_product_factors(sizes);
                        if (!id.is_abelian || id.invariant_factors != want)
                          bad = fail("wheels " + ints(sizes),
                                     id.describe() + ", expected factors " + longs(want));
                      }
                      for (int s = from; s <= left; ++s) {
                        sizes.push_back(s);
                        rec(s + 1, left - s);
                        sizes.pop_back();
                      }
                    };
                    rec(1, b.max_machine);
                    if (bad) return *bad;
                    return pass(std::to_string(count) + " wheel-size sets, Aut matches the cyclic product");
                  }});
  defs.push_back({"abelian.sweep", [b] {
                    MachineSweep r = machine_abelian_sweep(b.max_machine, Exec::parallel);
                    if (r.non_abelian > 0)
                      return fail(r.first_witness, std::to_string(r.non_abelian) + " non-abelian");
                    return pass(std::to_string(r.machines) + " labelled machines with |M| <= " +
                                std::to_string(b.max_machine) + ", every Aut(M) abelian");
                  }});
  return run_checks("rotating-machines",
                    {{"law-size", std::to_string(b.law_size)},
                     {"max-wheel", std::to_string(b.max_wheel)},
                     {"max-k", std::to_string(b.max_k)},
                     {"max-machine", std::to_string(b.max_machine)}},
                    defs);
}

}  // namespace fwb
