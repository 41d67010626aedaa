#include <algorithm>
#include <map>
#include <sstream>

#include "fwb/error.hpp"
#include "fwb/verify.hpp"

namespace fwb {

const char* status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skip: return "skip";
  }
  return "?";
}

long SuiteReport::count(Status s) const {
  return std::count_if(checks.begin(), checks.end(),
                       [s](const CheckRecord& r) { return r.status == s; });
}

std::string SuiteReport::text(bool timings) const {
  std::ostringstream out;
  out << "suite " << suite << "\n";
  out << "bounds";
  for (const auto& [k, v] : bounds) out << " " << k << "=" << v;
  out << "\n";
  for (const CheckRecord& r : checks) {
    out << "  [" << status_name(r.status) << "] " << r.id;
    if (!r.detail.empty()) out << ": " << r.detail;
    if (timings) out << " (" << static_cast<long>(r.seconds * 1000) << " ms)";
    out << "\n";
    if (!r.witness.empty()) out << "      witness: " << r.witness << "\n";
  }
  out << "summary " << count(Status::pass) << " pass, " << count(Status::fail) << " fail, "
      << count(Status::skip) << " skip\n";
  return out.str();
}

std::string SuiteReport::lines() const {
  std::string out;
  for (const CheckRecord& r : checks)
    out += "check " + r.id + " " + status_name(r.status) + " " +
           (r.witness.empty() ? "-" : r.witness) + "\n";
  return out;
}

void check_bounds(const SuiteBounds& b) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw PreconditionError(std::string("bound out of range: ") + what);
  };
  need(b.law_size >= 1 && b.law_size <= 6, "law size must be in 1..6");
  need(b.group_law_size >= 1 && b.group_law_size <= 8, "group law size must be in 1..8");
  need(b.max_group_order >= 1 && b.max_group_order <= 6, "group order must be in 1..6");
  need(b.sample_size >= 1 && b.sample_size <= 6, "sample size must be in 1..6");
  need(b.max_products >= 1 && b.max_products <= 6, "products must be in 1..6");
  need(b.max_consumers >= 1 && b.max_consumers <= 6, "consumers must be in 1..6");
  need(b.max_products + b.max_consumers <= 9, "products + consumers must be at most 9");
  need(b.max_wheel >= 2 && b.max_wheel <= 6, "gadget n must be in 2..6");
  need(b.max_k >= 1 && b.max_k <= 6, "gadget k must be in 1..6");
  need(b.max_wheel * (b.max_k + 1) <= 40, "gadget too large");
  need(b.max_machine >= 1 && b.max_machine <= 8, "machine size must be in 1..8");
  need(b.max_mixed >= 1 && b.max_mixed <= 6, "mixed size must be in 1..6");
  need(b.max_set >= 1 && b.max_set <= 16, "set bound must be in 1..16");
  need(b.samples >= 1 && b.samples <= 1000000, "samples must be in 1..1000000");
  need(b.steps >= 1 && b.steps <= 100000, "steps must be in 1..100000");
}

std::vector<std::string> suite_names() {
  return {"groups", "diversification", "consumer-product", "mixed-sum", "rotating-machines"};
}

SuiteReport run_suite(std::string_view name, const SuiteBounds& b) {
  if (name == "groups") return suite_groups(b);
  if (name == "diversification") return suite_diversification(b);
  if (name == "consumer-product") return suite_consumer_product(b);
  if (name == "mixed-sum") return suite_mixed_sum(b);
  if (name == "rotating-machines") return suite_rotating_machines(b);
  throw PreconditionError("unknown suite '" + std::string(name) + "'");
}

std::optional<std::string> star_violation(const Structure& m, int l_rel, int r_rel, int adj_rel,
                                          int prefix, int max_union) {
  std::vector<int> left, right;
  for (int x = 0; x < m.size(); ++x) {
    if (m.in(l_rel, x)) left.push_back(x);
    if (m.in(r_rel, x)) right.push_back(x);
  }
  // Looks for a point of `side` outside A ∪ B, adjacent to every element of
  // A on the other side and to none of B on the other side.
  auto realized = [&](const std::vector<int>& side, int other_rel, const std::vector<int>& a,
                      const std::vector<int>& bset) {
    for (int p : side) {
      if (std::find(a.begin(), a.end(), p) != a.end() ||
          std::find(bset.begin(), bset.end(), p) != bset.end())
        continue;
      bool good = true;
      for (int y : a)
        if (m.in(other_rel, y) && !m.holds(adj_rel, {p, y})) good = false;
      for (int y : bset)
        if (m.in(other_rel, y) && m.holds(adj_rel, {p, y})) good = false;
      if (good) return true;
    }
    return false;
  };
  auto show = [](const std::vector<int>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
  };
  std::vector<int> chosen;
  std::optional<std::string> bad;
  // Subsets in lexicographic order, each split into A and B every way.
  std::function<void(int)> rec = [&](int from) {
    if (bad) return;
    const int u = static_cast<int>(chosen.size());
    for (unsigned mask = 0; mask < (1u << u) && !bad; ++mask) {
      std::vector<int> a, bset;
      for (int i = 0; i < u; ++i) (mask >> i & 1u ? a : bset).push_back(chosen[i]);
      if (!realized(left, r_rel, a, bset))
        bad = "A=" + show(a) + " B=" + show(bset) + " has no l";
      else if (!realized(right, l_rel, a, bset))
        bad = "A=" + show(a) + " B=" + show(bset) + " has no r";
    }
    if (u == max_union) return;
    for (int x = from; x < prefix && !bad; ++x) {
      chosen.push_back(x);
      rec(x + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  return bad;
}

std::vector<long> cyclic_product_factors(const std::vector<int>& sizes) {
  // Prime-power parts of every size, grouped by prime.
  std::map<long, std::vector<long>> powers;
  for (int n : sizes) {
    long rest = n;
    for (long p = 2; p * p <= rest || rest > 1; ++p) {
      if (p * p > rest) p = rest;
      long q = 1;
      while (rest % p == 0) {
        rest /= p;
        q *= p;
      }
      if (q > 1) powers[p].push_back(q);
    }
  }
  std::size_t count = 0;
  for (auto& [p, qs] : powers) {
    std::sort(qs.rbegin(), qs.rend());
    count = std::max(count, qs.size());
  }
  // The i-th largest factor multiplies the i-th largest power of each prime.
  std::vector<long> factors(count, 1);
  for (const auto& [p, qs] : powers)
    for (std::size_t i = 0; i < qs.size(); ++i) factors[i] *= qs[i];
  std::reverse(factors.begin(), factors.end());
  return factors;
}

}  // namespace fwb
