// fwb: command-line front end.
//
// Exit codes: 0 success, 1 check failures, 2 usage or parse errors,
// 3 construction failures.

#include <unistd.h>

#include <array>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fwb/catalog.hpp"
#include "fwb/error.hpp"
#include "fwb/fraisse.hpp"
#include "fwb/groups.hpp"
#include "fwb/sweep.hpp"
#include "fwb/text_format.hpp"
#include "fwb/verify.hpp"

using namespace fwb;

namespace {

constexpr int kOk = 0, kChecksFailed = 1, kUsage = 2, kConstruction = 3;

std::vector<int> parse_map(const std::string& text) {
  std::vector<int> out;
  if (text.empty() || text == "-") return out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ParseError("bad map entry '" + item + "'");
    }
  }
  return out;
}

std::string show_map(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s.empty() ? "-" : s;
}

void emit_structure(const Structure& m, const std::string& out) {
  if (out.empty())
    std::cout << serialize_structure(m);
  else
    write_structure_file(out, m);
}

bool use_color() { return std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO); }

std::string colorize(const std::string& report) {
  std::string out;
  std::stringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    for (auto [tag, code] : {std::pair{"[pass]", "32"}, {"[fail]", "31"}, {"[skip]", "33"}}) {
      auto at = line.find(tag);
      if (at != std::string::npos)
        line.replace(at, 6, std::string("\033[") + code + "m" + tag + "\033[0m");
    }
    out += line + "\n";
  }
  return out;
}

// Fixed part file: `elements e1 e2 ...` then `act <pos> <g> <pos'>` lines.
FixedPart read_fixed_part(const std::string& path, const GroupTable& g) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<int> elements;
  std::vector<std::array<int, 3>> acts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::stringstream ls(line.substr(0, line.find('#')));
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "elements") {
      int v;
      while (ls >> v) elements.push_back(v);
    } else if (word == "act") {
      std::array<int, 3> a{};
      if (!(ls >> a[0] >> a[1] >> a[2])) throw ParseError(lineno, "act needs three integers");
      acts.push_back(a);
    } else {
      throw ParseError(lineno, "unknown directive '" + word + "'");
    }
  }
  const int n = static_cast<int>(elements.size());
  std::vector<int> table(static_cast<std::size_t>(n * g.order()), -1);
  for (auto [x, h, y] : acts) {
    if (x < 0 || x >= n || h < 0 || h >= g.order() || y < 0 || y >= n)
      throw ParseError("act entry out of range");
    table[static_cast<std::size_t>(x * g.order() + h)] = y;
  }
  for (int x = 0; x < n; ++x) table[static_cast<std::size_t>(x * g.order())] = x;
  for (int v : table)
    if (v < 0) throw ParseError("fixed part action is incomplete");
  return FixedPart{elements, GAction(n, g, std::move(table))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite Fraisse-class workbench"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads for sweeps (0 = all)")->check(CLI::NonNegativeNumber);

  std::string file_a, file_b, out, class_name, group_spec, dir, map_f, map_g, fixed_file, suite;
  std::string file_z;
  int steps = 0, cap = 0, level = 0, size = 0, n = 0, k = 0;
  std::optional<std::uint64_t> seed;
  bool all = false, print = false, lines = false, timings = false;
  SuiteBounds bounds;

  auto* aut = app.add_subcommand("aut", "Identify the automorphism group of a structure");
  aut->add_option("file", file_a)->required();

  auto* iso = app.add_subcommand("iso", "Test two structures for isomorphism");
  iso->add_option("a", file_a)->required();
  iso->add_option("b", file_b)->required();

  auto* embed = app.add_subcommand("embed", "Find embeddings of one structure into another");
  embed->add_option("dom", file_a)->required();
  embed->add_option("cod", file_b)->required();
  embed->add_flag("--all", all, "List every embedding");

  auto* amalg = app.add_subcommand("amalg", "Amalgamate f: Z -> X and g: Z -> Y in a class");
  amalg->add_option("class", class_name)->required();
  amalg->add_option("z", file_z)->required();
  amalg->add_option("x", file_a)->required();
  amalg->add_option("y", file_b)->required();
  amalg->add_option("--f", map_f, "Images of Z in X, comma separated")->required();
  amalg->add_option("--g", map_g, "Images of Z in Y, comma separated")->required();
  amalg->add_option("--out", out, "Write W here instead of stdout");

  auto* enumerate = app.add_subcommand("enum", "Enumerate class members of one size");
  enumerate->add_option("class", class_name)->required();
  enumerate->add_option("size", size)->required()->check(CLI::NonNegativeNumber);
  enumerate->add_flag("--print", print, "Print every member");

  auto* limit = app.add_subcommand("limit", "Build a limit approximation");
  limit->add_option("class", class_name)->required();
  limit->add_option("steps", steps)->required()->check(CLI::PositiveNumber);
  limit->add_option("cap", cap)->required()->check(CLI::PositiveNumber);
  limit->add_option("--seed", seed, "Shuffle task batches with this seed");
  limit->add_option("--out", dir, "Output directory")->default_val("limit_out");

  auto* certify = app.add_subcommand("certify", "Re-audit a saved approximation");
  certify->add_option("class", class_name)->required();
  certify->add_option("dir", dir)->required();
  certify->add_option("level", level)->required()->check(CLI::PositiveNumber);

  auto* gad = app.add_subcommand("gadget", "Write the rotating-machine gadget for n and k");
  gad->add_option("n", n)->required();
  gad->add_option("k", k)->required();
  gad->add_option("--out", out, "Write here instead of stdout");

  auto* orbit = app.add_subcommand("orbit-complete", "Orbit completion X^G of X in D(base)");
  orbit->add_option("base", class_name)->required();
  orbit->add_option("group", group_spec, "Group spec (Z3, S3, prod:Z2,Z2) or table file")->required();
  orbit->add_option("file", file_a)->required();
  orbit->add_option("--fixed", fixed_file, "Fixed part with its action");
  orbit->add_option("--out", out, "Write here instead of stdout");

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "Suite name or 'all'")->required();
  verify->add_option("--seed", bounds.seed, "Seed for sampled checks");
  verify->add_option("--law-size", bounds.law_size);
  verify->add_option("--group-law-size", bounds.group_law_size);
  verify->add_option("--max-group-order", bounds.max_group_order);
  verify->add_option("--sample-size", bounds.sample_size);
  verify->add_option("--max-products", bounds.max_products);
  verify->add_option("--max-consumers", bounds.max_consumers);
  verify->add_option("--max-wheel", bounds.max_wheel);
  verify->add_option("--max-k", bounds.max_k);
  verify->add_option("--max-machine", bounds.max_machine);
  verify->add_option("--max-mixed", bounds.max_mixed);
  verify->add_option("--max-set", bounds.max_set);
  verify->add_option("--samples", bounds.samples);
  verify->add_option("--steps", bounds.steps);
  verify->add_option("--report", out, "Also write the report to this file");
  verify->add_flag("--lines", lines, "Print `check <id> <status> <witness>` lines");
  verify->add_flag("--timings", timings, "Include per-check times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  set_max_jobs(jobs);

  try {
    if (*aut) {
      Structure m = read_structure_file(file_a);
      GroupIdentity id = identify(automorphisms(m, m.size()));
      std::cout << id.describe() << "\n";
      std::cout << "order " << id.order << "\n";
      std::cout << "abelian " << (id.is_abelian ? "yes" : "no") << "\n";
      std::string orders;
      for (long o : id.element_orders) orders += (orders.empty() ? "" : ",") + std::to_string(o);
      if (id.is_abelian) {
        std::string f;
        for (long d : id.invariant_factors) f += (f.empty() ? "" : ",") + std::to_string(d);
        std::cout << "invariant factors [" << f << "]\n";
      } else {
        std::cout << "element orders [" << orders << "]\n";
      }
    } else if (*iso) {
      auto e = isomorphic(read_structure_file(file_a), read_structure_file(file_b));
      if (e)
        std::cout << "isomorphic " << show_map(e->map) << "\n";
      else
        std::cout << "not isomorphic\n";
    } else if (*embed) {
      Structure a = read_structure_file(file_a), b = read_structure_file(file_b);
      if (all) {
        auto es = all_embeddings(a, b);
        for (const auto& e : es) std::cout << show_map(e.map) << "\n";
        std::cout << es.size() << " embeddings\n";
      } else if (auto e = find_embedding(a, b)) {
        std::cout << show_map(e->map) << "\n";
      } else {
        std::cout << "none\n";
      }
    } else if (*amalg) {
      ClassPtr c = class_by_name(class_name);
      Structure z = read_structure_file(file_z), x = read_structure_file(file_a),
                y = read_structure_file(file_b);
      Embedding f{parse_map(map_f)}, g{parse_map(map_g)};
      for (const Structure* s : {&z, &x, &y})
        if (auto why = c->membership_violation(*s))
          throw PreconditionError("input is not a member of " + c->name + ": " + *why);
      if (auto why = embedding_violation(z, x, f)) throw PreconditionError("f: " + *why);
      if (auto why = embedding_violation(z, y, g)) throw PreconditionError("g: " + *why);
      Amalgam w = c->amalgamate(z, x, f, y, g);
      if (auto why = amalgam_violation(*c, z, x, f, y, g, w, c->claims_disjoint))
        throw ConstructionFailure(c->name + " amalgam unusable: " + *why);
      std::cerr << "fx " << show_map(w.fx.map) << "\ngy " << show_map(w.gy.map) << "\n";
      emit_structure(w.w, out);
    } else if (*enumerate) {
      ClassPtr c = class_by_name(class_name);
      const auto& ms = members(*c, size);
      if (print)
        for (const Structure& m : ms) std::cout << serialize_structure(m) << "\n";
      std::cout << ms.size() << " members of size " << size << "\n";
    } else if (*limit) {
      ClassPtr c = class_by_name(class_name);
      LimitApproximation apx = build_limit(*c, steps, cap, seed);
      save_limit(apx, dir);
      std::cout << "stages " << apx.stage_count() << " top " << apx.top.size() << " settled "
                << apx.settled << "\n";
      std::cout << "certified level " << apx.certified_level << "\n";
      if (c->name == "div:lo") {
        auto r = cp_preference_distinct(apx.top);
        std::cout << "preference-distinct " << (r.distinct ? "yes" : "no");
        if (!r.distinct) std::cout << " (consumers " << r.c << " and " << r.d << " agree)";
        std::cout << "\n";
      }
    } else if (*certify) {
      ClassPtr c = class_by_name(class_name);
      LimitApproximation apx = load_limit(dir);
      Certificate cert = certify_extension_level(*c, apx, level);
      std::cout << "level " << level << " at stage " << cert.stage << ": "
                << (cert.ok ? "certified" : "not certified") << ", " << cert.audited
                << " extensions audited, " << cert.missing_count << " missing\n";
      for (const auto& m : cert.missing) std::cout << "  missing " << m << "\n";
      return cert.ok ? kOk : kChecksFailed;
    } else if (*gad) {
      if (n < 1 || k < 1) throw PreconditionError("gadget: n and k must be at least 1");
      emit_structure(gadget(n, k), out);
    } else if (*orbit) {
      ClassPtr base = class_by_name(class_name);
      GroupTable g = [&] {
        std::ifstream in(group_spec);
        if (!in) return parse_group_spec(group_spec);
        std::stringstream text;
        text << in.rdbuf();
        return parse_group_table(text.str());
      }();
      Structure x = read_structure_file(file_a);
      std::optional<FixedPart> fixed;
      if (!fixed_file.empty()) fixed = read_fixed_part(fixed_file, g);
      OrbitCompletion oc = orbit_completion(*base, x, g, fixed);
      std::cerr << "|X| = " << x.size() << ", |X^G| = " << oc.xg.size() << "\n";
      emit_structure(oc.xg, out);
    } else if (*verify) {
      std::vector<std::string> names =
          suite == "all" ? suite_names() : std::vector<std::string>{suite};
      std::string report;
      bool ok = true;
      for (const auto& name : names) {
        SuiteReport r = run_suite(name, bounds);
        ok = ok && r.ok();
        report += lines ? r.lines() : r.text(timings);
      }
      if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw PreconditionError("cannot write " + out);
        f << report;
      }
      std::cout << (use_color() && !lines ? colorize(report) : report);
      return ok ? kOk : kChecksFailed;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SignatureMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConstructionFailure& e) {
    std::cerr << "construction failure: " << e.what() << "\n";
    return kConstruction;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
