#include "fwb/fraisse.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "fwb/error.hpp"
#include "fwb/sweep.hpp"
#include "fwb/text_format.hpp"

namespace fwb {

class MemberCache {
 public:
  std::recursive_mutex mutex;
  std::map<int, std::unique_ptr<const std::vector<Structure>>> by_size;
  std::map<int, long> exceeded;  // size -> candidate limit that was hit
};

namespace {

std::string join(const std::vector<int>& v) {
  if (v.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> mask_elements(unsigned long mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (mask >> i & 1UL) out.push_back(i);
  return out;
}

std::string problem(const Structure& z, const Structure& x, const Embedding& f,
                    const Structure& y, const Embedding& g) {
  return "Z=[" + compact_structure(z) + "] X=[" + compact_structure(x) + "] f=" + join(f.map) +
         " Y=[" + compact_structure(y) + "] g=" + join(g.map);
}

}  // namespace

ClassPtr finalize(ClassSpec spec) {
  spec.cache = std::make_shared<MemberCache>();
  return std::make_shared<const ClassSpec>(std::move(spec));
}

std::optional<std::string> ClassSpec::membership_violation(const Structure& m) const {
  if (!(m.signature() == *signature)) return "signature differs from class " + name;
  auto problems = validate(m);
  if (!problems.empty()) return problems.front();
  return violation(m);
}

bool ClassSpec::member(const Structure& m) const { return !membership_violation(m).has_value(); }

const std::vector<Structure>& members(const ClassSpec& c, int n, const EnumerationLimits& limits) {
  if (n < 0) throw std::invalid_argument("members: negative size");
  if (n > limits.max_size)
    throw CapExceeded("enumeration of " + c.name + ": size " + std::to_string(n) +
                      " exceeds cap " + std::to_string(limits.max_size));
  MemberCache& cache = *c.cache;
  std::lock_guard lock(cache.mutex);
  if (auto it = cache.by_size.find(n); it != cache.by_size.end()) return *it->second;
  if (auto it = cache.exceeded.find(n); it != cache.exceeded.end() && it->second >= limits.max_candidates)
    throw CapExceeded("enumeration of " + c.name + " at size " + std::to_string(n) +
                      ": more than " + std::to_string(limits.max_candidates) + " candidates");

  std::vector<Structure> reps;
  std::vector<std::string> text;
  std::unordered_map<std::string, std::vector<std::size_t>> buckets;
  long count = 0;
  bool over = false;
  c.generate(n, [&](const Structure& s) {
    if (++count > limits.max_candidates) {
      over = true;
      return false;
    }
    if (s.size() != n || !c.member(s)) return true;
    auto& bucket = buckets[invariant_key(s)];
    for (std::size_t idx : bucket)
      if (isomorphic(s, reps[idx])) {
        std::string t = s.serialize();
        if (t < text[idx]) {
          reps[idx] = s;
          text[idx] = std::move(t);
        }
        return true;
      }
    bucket.push_back(reps.size());
    reps.push_back(s);
    text.push_back(s.serialize());
    return true;
  });
  if (over) {
    cache.exceeded[n] = limits.max_candidates;
    throw CapExceeded("enumeration of " + c.name + " at size " + std::to_string(n) +
                      ": more than " + std::to_string(limits.max_candidates) + " candidates");
  }
  std::vector<std::size_t> order(reps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return text[a] < text[b]; });
  auto sorted = std::make_unique<std::vector<Structure>>();
  sorted->reserve(reps.size());
  for (auto i : order) sorted->push_back(std::move(reps[i]));
  auto& slot = cache.by_size[n];
  slot = std::move(sorted);
  return *slot;
}

std::vector<Structure> enumerate_members(const ClassSpec& c, int n, const EnumerationLimits& limits) {
  return members(c, n, limits);
}

std::string LawReport::summary() const {
  std::ostringstream os;
  os << law << ' ' << class_name << " max_n=" << max_n << ": " << cases << " cases, " << skipped
     << " skipped, " << failures.size() << " failures";
  return os.str();
}

LawReport check_hereditary(const ClassSpec& c, int max_n) {
  LawReport rep{"hereditary", c.name, max_n};
  for (int n = 0; n <= max_n; ++n) {
    const auto& ms = members(c, n);
    std::vector<LawReport> part(ms.size());
    parallel_for(static_cast<long>(ms.size()), [&](long i) {
      const Structure& m = ms[i];
      for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
        auto subset = mask_elements(mask, n);
        if (!is_closed(m, subset)) continue;
        ++part[i].cases;
        Structure s = generated_substructure(m, subset).structure;
        if (auto why = c.membership_violation(s))
          part[i].failures.push_back("M=[" + compact_structure(m) + "] S={" + join(subset) +
                                     "}: " + *why);
      }
    });
    for (auto& p : part) {
      rep.cases += p.cases;
      rep.failures.insert(rep.failures.end(), p.failures.begin(), p.failures.end());
    }
  }
  return rep;
}

std::optional<std::string> amalgam_violation(const ClassSpec& c, const Structure& z,
                                             const Structure& x, const Embedding& f,
                                             const Structure& y, const Embedding& g,
                                             const Amalgam& a, bool require_disjoint) {
  if (auto why = c.membership_violation(a.w)) return "W not a member: " + *why;
  if (auto why = embedding_violation(x, a.w, a.fx)) return "f' is not an embedding: " + *why;
  if (auto why = embedding_violation(y, a.w, a.gy)) return "g' is not an embedding: " + *why;
  for (int i = 0; i < z.size(); ++i)
    if (a.fx(f(i)) != a.gy(g(i)))
      return "f'f and g'g differ at " + std::to_string(i);
  if (require_disjoint) {
    std::vector<char> in_fx(static_cast<std::size_t>(a.w.size()), 0);
    for (int v : a.fx.map) in_fx[v] = 1;
    std::vector<char> in_g(static_cast<std::size_t>(y.size()), 0);
    for (int v : g.map) in_g[v] = 1;
    for (int v = 0; v < y.size(); ++v)
      if (!in_g[v] && in_fx[a.gy(v)])
        return "images of f' and g' overlap outside Z at W element " + std::to_string(a.gy(v));
  }
  return std::nullopt;
}

std::optional<Amalgam> oracle_amalgam(const ClassSpec& c, const Structure& x, const Embedding& f,
                                      const Structure& y, const Embedding& g, int lo, int hi,
                                      const EnumerationLimits& limits) {
  for (int s = std::max(lo, 0); s <= hi; ++s) {
    for (const Structure& w : members(c, s, limits)) {
      EmbeddingIndex index(w);
      std::optional<Amalgam> found;
      std::vector<int> fixed(static_cast<std::size_t>(y.size()), -1);
      index.for_each(x, {}, [&](std::span<const int> fx) {
        for (std::size_t i = 0; i < g.map.size(); ++i) fixed[g.map[i]] = fx[f.map[i]];
        if (auto gy = index.find(y, fixed)) {
          found = Amalgam{w, Embedding{std::vector<int>(fx.begin(), fx.end())}, *gy};
          return false;
        }
        return true;
      });
      if (found) return found;
    }
  }
  return std::nullopt;
}

namespace {

struct Triple {
  const Structure* z;
  const Structure* x;
  const Structure* y;
};

std::vector<Triple> triples(const std::vector<const std::vector<Structure>*>& by_size, int max_n,
                            bool empty_z_only) {
  std::vector<Triple> out;
  for (int zn = 0; zn <= (empty_z_only ? 0 : max_n); ++zn)
    for (const Structure& z : *by_size[zn])
      for (int xn = zn; xn <= max_n; ++xn)
        for (const Structure& x : *by_size[xn])
          for (int yn = zn; yn <= max_n; ++yn)
            for (const Structure& y : *by_size[yn]) out.push_back({&z, &x, &y});
  return out;
}

}  // namespace

LawReport check_amalgamation(const ClassSpec& c, int max_n, const AmalgamationOptions& opt) {
  LawReport rep{"amalgamation", c.name, max_n};
  std::vector<const std::vector<Structure>*> by_size;
  for (int n = 0; n <= max_n; ++n) by_size.push_back(&members(c, n, opt.limits));
  if (opt.oracle)
    for (int s = 0; s <= std::min(2 * max_n, opt.oracle_size_cap); ++s) {
      try {
        members(c, s, opt.limits);
      } catch (const CapExceeded&) {
        rep.notes.push_back("oracle cannot enumerate size " + std::to_string(s));
        break;
      }
    }
  auto work = triples(by_size, max_n, false);
  std::vector<LawReport> part(work.size());
  parallel_for(static_cast<long>(work.size()), [&](long i) {
    const Structure& z = *work[i].z;
    const Structure& x = *work[i].x;
    const Structure& y = *work[i].y;
    LawReport& out = part[i];
    auto fs = all_embeddings(z, x);
    auto gs = all_embeddings(z, y);
    for (const auto& f : fs)
      for (const auto& g : gs) {
        ++out.cases;
        bool op_ok = false;
        std::string op_why;
        try {
          Amalgam a = c.amalgamate(z, x, f, y, g);
          auto why = amalgam_violation(c, z, x, f, y, g, a, c.claims_disjoint);
          op_ok = !why;
          if (why) op_why = *why;
        } catch (const std::exception& e) {
          op_why = std::string("operator threw: ") + e.what();
        }
        if (!op_ok) out.failures.push_back(problem(z, x, f, y, g) + ": " + op_why);
        if (!opt.oracle) continue;
        int lo = std::max(x.size(), y.size());
        int full = x.size() + y.size();
        int hi = std::min(full, opt.oracle_size_cap);
        std::optional<Amalgam> found;
        bool complete = hi == full;
        try {
          found = oracle_amalgam(c, x, f, y, g, lo, hi, opt.limits);
        } catch (const CapExceeded&) {
          complete = false;
        }
        if (found) {
          if (!op_ok)
            out.failures.push_back(problem(z, x, f, y, g) +
                                   ": layers disagree, oracle found W=[" +
                                   compact_structure(found->w) + "]");
        } else if (complete) {
          if (op_ok)
            out.failures.push_back(problem(z, x, f, y, g) +
                                   ": layers disagree, oracle found no amalgam up to size " +
                                   std::to_string(full));
          else
            out.failures.push_back(problem(z, x, f, y, g) + ": no amalgam exists up to size " +
                                   std::to_string(full));
        } else {
          ++out.skipped;
        }
      }
  });
  for (auto& p : part) {
    rep.cases += p.cases;
    rep.skipped += p.skipped;
    rep.failures.insert(rep.failures.end(), p.failures.begin(), p.failures.end());
  }
  return rep;
}

LawReport check_jep(const ClassSpec& c, int max_n, const AmalgamationOptions& opt) {
  LawReport rep{"jep", c.name, max_n};
  Structure empty = Structure::empty(c.signature);
  bool via_empty = c.member(empty);
  if (!via_empty) rep.notes.push_back("empty structure is not a member; JEP checked by direct search");
  std::vector<const std::vector<Structure>*> by_size;
  for (int n = 0; n <= max_n; ++n) by_size.push_back(&members(c, n, opt.limits));
  std::vector<std::pair<const Structure*, const Structure*>> work;
  for (int xn = 0; xn <= max_n; ++xn)
    for (const Structure& x : *by_size[xn])
      for (int yn = 0; yn <= max_n; ++yn)
        for (const Structure& y : *by_size[yn]) work.emplace_back(&x, &y);
  std::vector<LawReport> part(work.size());
  const Embedding none;
  parallel_for(static_cast<long>(work.size()), [&](long i) {
    const Structure& x = *work[i].first;
    const Structure& y = *work[i].second;
    LawReport& out = part[i];
    ++out.cases;
    if (via_empty) {
      try {
        Amalgam a = c.amalgamate(empty, x, none, y, none);
        if (auto why = amalgam_violation(c, empty, x, none, y, none, a, c.claims_disjoint))
          out.failures.push_back(problem(empty, x, none, y, none) + ": " + *why);
      } catch (const std::exception& e) {
        out.failures.push_back(problem(empty, x, none, y, none) + ": operator threw: " + e.what());
      }
      return;
    }
    int full = x.size() + y.size();
    try {
      if (!oracle_amalgam(c, x, none, y, none, std::max(x.size(), y.size()),
                          std::min(full, opt.oracle_size_cap), opt.limits)) {
        if (full <= opt.oracle_size_cap)
          out.failures.push_back("X=[" + compact_structure(x) + "] Y=[" + compact_structure(y) +
                                 "]: no joint embedding");
        else
          ++out.skipped;
      }
    } catch (const CapExceeded&) {
      ++out.skipped;
    }
  });
  for (auto& p : part) {
    rep.cases += p.cases;
    rep.skipped += p.skipped;
    rep.failures.insert(rep.failures.end(), p.failures.begin(), p.failures.end());
  }
  return rep;
}

std::vector<PairType> pair_types(const ClassSpec& c, int cap) {
  std::vector<PairType> out;
  for (int n = 0; n <= cap; ++n)
    for (const Structure& b : members(c, n)) {
      PermGroup aut = automorphisms(b, n);
      for (unsigned long mask = 0; mask + 1 < (1UL << n); ++mask) {
        auto subset = mask_elements(mask, n);
        if (!is_closed(b, subset)) continue;
        bool least = true;
        for (const Perm& p : aut.elements()) {
          unsigned long image = 0;
          for (int v : subset) image |= 1UL << p(v);
          if (image < mask) {
            least = false;
            break;
          }
        }
        if (!least) continue;
        Structure a = induced_substructure(b, subset);
        out.push_back(PairType{b, std::move(subset), std::move(a)});
      }
    }
  return out;
}

Structure LimitApproximation::stage(int i) const {
  std::vector<int> prefix(static_cast<std::size_t>(sizes.at(static_cast<std::size_t>(i))));
  std::iota(prefix.begin(), prefix.end(), 0);
  return induced_substructure(top, prefix);
}

LimitApproximation build_limit(const ClassSpec& c, int steps, int task_size_cap,
                               std::optional<std::uint64_t> seed) {
  if (steps < 1) throw PreconditionError("build_limit: steps must be at least 1");
  if (task_size_cap < 0) throw PreconditionError("build_limit: negative task size cap");
  LimitApproximation apx{.class_name = c.name,
                         .steps = 0,
                         .task_size_cap = task_size_cap,
                         .seed = seed,
                         .sizes = {0},
                         .top = Structure::empty(c.signature)};
  if (!c.member(apx.top)) throw ConstructionFailure(c.name + ": empty structure is not a member");
  apx.types = pair_types(c, task_size_cap);
  std::mt19937_64 rng(seed.value_or(0));

  std::deque<int> queue;
  auto index = std::make_unique<EmbeddingIndex>(apx.top);

  auto enqueue_new = [&](int old_size) {
    const int stage = apx.stage_count() - 1;
    const int top_size = apx.top.size();
    std::vector<Task> batch;
    for (int t = 0; t < static_cast<int>(apx.types.size()); ++t) {
      const Structure& a = apx.types[t].a;
      const int k = a.size();
      if (k == 0) {
        if (stage == 0) batch.push_back(Task{t, stage, {}});
        continue;
      }
      std::vector<int> fixed(static_cast<std::size_t>(k), -1);
      for (int i = 0; i < k; ++i)
        for (int v = old_size; v < top_size; ++v) {
          std::fill(fixed.begin(), fixed.end(), -1);
          fixed[i] = v;
          index->for_each(a, fixed, [&](std::span<const int> e) {
            for (int j = 0; j < i; ++j)
              if (e[j] >= old_size) return true;
            batch.push_back(Task{t, stage, std::vector<int>(e.begin(), e.end())});
            return true;
          });
        }
    }
    std::sort(batch.begin(), batch.end(), [](const Task& p, const Task& q) {
      return std::tie(p.type, p.e) < std::tie(q.type, q.e);
    });
    if (seed)
      for (std::size_t i = batch.size(); i > 1; --i)
        std::swap(batch[i - 1], batch[rng() % i]);
    for (auto& task : batch) {
      queue.push_back(static_cast<int>(apx.ledger.size()));
      apx.ledger.push_back(std::move(task));
    }
  };

  enqueue_new(0);
  while (apx.steps < steps && !queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    Task& task = apx.ledger[id];
    const PairType& type = apx.types[task.type];
    std::vector<int> fixed(static_cast<std::size_t>(type.b.size()), -1);
    for (std::size_t j = 0; j < type.a_in_b.size(); ++j) fixed[type.a_in_b[j]] = task.e[j];
    if (auto w = index->find(type.b, fixed)) {
      task.fulfilled_at = apx.stage_count() - 1;
      task.witness = w->map;
      continue;
    }
    Embedding f{task.e};
    Embedding g{type.a_in_b};
    Amalgam am = [&] {
      try {
        return c.amalgamate(type.a, apx.top, f, type.b, g);
      } catch (const Error& e) {
        throw ConstructionFailure(c.name + ": amalgamation failed on task " + std::to_string(id) +
                                  " " + problem(type.a, apx.top, f, type.b, g) + ": " + e.what());
      }
    }();
    if (auto why = amalgam_violation(c, type.a, apx.top, f, type.b, g, am, false))
      throw ConstructionFailure(c.name + ": invalid amalgam on task " + std::to_string(id) + " " +
                                problem(type.a, apx.top, f, type.b, g) + ": " + *why);
    const int old_size = apx.top.size();
    std::vector<int> perm(static_cast<std::size_t>(am.w.size()), -1);
    for (int x = 0; x < old_size; ++x) perm[am.fx(x)] = x;
    int next = old_size;
    for (int& p : perm)
      if (p < 0) p = next++;
    apx.top = relabel(am.w, perm);
    apx.sizes.push_back(apx.top.size());
    ++apx.steps;
    index = std::make_unique<EmbeddingIndex>(apx.top);
    Task& done = apx.ledger[id];
    done.fulfilled_at = apx.stage_count() - 1;
    done.by_step = true;
    done.witness.clear();
    for (int v : am.gy.map) done.witness.push_back(perm[v]);
    enqueue_new(old_size);
  }

  int first_pending = apx.stage_count();
  for (const Task& t : apx.ledger)
    if (t.fulfilled_at < 0) first_pending = std::min(first_pending, t.created_at);
  apx.settled = std::min(first_pending, apx.stage_count()) - 1;

  apx.certified_level = 0;
  for (int k = 1; k <= task_size_cap; ++k) {
    if (!certify_extension_level(c, apx, k).ok) break;
    apx.certified_level = k;
  }
  return apx;
}

Certificate certify_extension_level(const ClassSpec& c, const LimitApproximation& apx, int k) {
  if (k > apx.task_size_cap)
    throw PreconditionError("certify: level " + std::to_string(k) + " exceeds the task size cap " +
                            std::to_string(apx.task_size_cap));
  Certificate cert;
  cert.stage = std::max(apx.settled, 0);
  Structure es = apx.stage(cert.stage);
  EmbeddingIndex into_stage(es);
  EmbeddingIndex into_top(apx.top);
  for (int n = 1; n <= k; ++n)
    for (const Structure& b : members(c, n)) {
      for (unsigned long mask = 0; mask + 1 < (1UL << n); ++mask) {
        auto subset = mask_elements(mask, n);
        if (!is_closed(b, subset)) continue;
        Structure a = induced_substructure(b, subset);
        std::vector<int> fixed(static_cast<std::size_t>(n));
        into_stage.for_each(a, {}, [&](std::span<const int> e) {
          ++cert.audited;
          std::fill(fixed.begin(), fixed.end(), -1);
          for (std::size_t j = 0; j < subset.size(); ++j) fixed[subset[j]] = e[j];
          if (!into_top.find(b, fixed)) {
            cert.ok = false;
            ++cert.missing_count;
            if (cert.missing.size() < 20)
              cert.missing.push_back("B=[" + compact_structure(b) + "] A={" + join(subset) +
                                     "} e=" + join(std::vector<int>(e.begin(), e.end())));
          }
          return true;
        });
      }
    }
  return cert;
}

std::string serialize_ledger(const LimitApproximation& apx) {
  std::ostringstream os;
  for (std::size_t id = 0; id < apx.ledger.size(); ++id) {
    const Task& t = apx.ledger[id];
    os << "task " << id << " type " << t.type << " created " << t.created_at << " e " << join(t.e);
    if (t.fulfilled_at < 0)
      os << " pending\n";
    else
      os << (t.by_step ? " step " : " found ") << t.fulfilled_at << " witness " << join(t.witness)
         << '\n';
  }
  return os.str();
}

namespace {

std::string stage_file(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "stage_%04d.txt", i);
  return buf;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace

void save_limit(const LimitApproximation& apx, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream man;
  man << "class " << apx.class_name << '\n'
      << "steps " << apx.steps << '\n'
      << "cap " << apx.task_size_cap << '\n'
      << "seed " << (apx.seed ? std::to_string(*apx.seed) : std::string("none")) << '\n'
      << "settled " << apx.settled << '\n'
      << "certified " << apx.certified_level << '\n';
  for (int i = 0; i < apx.stage_count(); ++i) {
    man << "stage " << i << ' ' << apx.sizes[i] << ' ' << stage_file(i) << '\n';
    write_structure_file(dir / stage_file(i), apx.stage(i));
  }
  write_text(dir / "manifest.txt", man.str());
  std::ostringstream types;
  for (std::size_t t = 0; t < apx.types.size(); ++t)
    types << "type " << t << " a_in_b " << join(apx.types[t].a_in_b) << '\n'
          << apx.types[t].b.serialize() << "end\n";
  write_text(dir / "types.txt", types.str());
  write_text(dir / "ledger.txt", serialize_ledger(apx));
}

LimitApproximation load_limit(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) throw ParseError("cannot read " + (dir / "manifest.txt").string());
  std::string line, kw, last_file;
  std::string cls;
  int steps = 0, cap = 0, settled = -1, certified = 0, lineno = 0;
  std::optional<std::uint64_t> seed;
  std::vector<int> sizes;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    if (!(ls >> kw)) continue;
    if (kw == "class") {
      ls >> cls;
    } else if (kw == "steps") {
      ls >> steps;
    } else if (kw == "cap") {
      ls >> cap;
    } else if (kw == "seed") {
      std::string s;
      ls >> s;
      if (s != "none") seed = std::stoull(s);
    } else if (kw == "settled") {
      ls >> settled;
    } else if (kw == "certified") {
      ls >> certified;
    } else if (kw == "stage") {
      int i, size;
      if (!(ls >> i >> size >> last_file) || i != static_cast<int>(sizes.size()))
        throw ParseError(lineno, "malformed stage line");
      sizes.push_back(size);
    } else {
      throw ParseError(lineno, "unknown manifest directive '" + kw + "'");
    }
    if (ls.fail()) throw ParseError(lineno, "malformed manifest line");
  }
  if (sizes.empty()) throw ParseError("manifest lists no stages");
  Structure top = read_structure_file(dir / last_file);
  if (top.size() != sizes.back()) throw ParseError("top stage size differs from manifest");
  return LimitApproximation{.class_name = cls,
                            .steps = steps,
                            .task_size_cap = cap,
                            .seed = seed,
                            .sizes = std::move(sizes),
                            .top = std::move(top),
                            .types = {},
                            .ledger = {},
                            .settled = settled,
                            .certified_level = certified};
}

}  // namespace fwb
