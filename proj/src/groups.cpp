#include "fwb/groups.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fwb/error.hpp"

namespace fwb {

GroupTable::GroupTable(int order, std::vector<int> table, std::string name)
    : order_(order), table_(std::move(table)), name_(std::move(name)) {
  if (order_ < 1) throw std::invalid_argument("group order must be positive");
  if (table_.size() != static_cast<std::size_t>(order_) * static_cast<std::size_t>(order_))
    throw std::invalid_argument("multiplication table has wrong size");
  for (int v : table_)
    if (v < 0 || v >= order_) throw std::invalid_argument("multiplication table entry out of range");
  inverse_.assign(static_cast<std::size_t>(order_), -1);
  for (int a = 0; a < order_; ++a)
    for (int b = 0; b < order_; ++b)
      if (mul(a, b) == 0 && mul(b, a) == 0) {
        inverse_[a] = b;
        break;
      }
}

std::vector<std::string> GroupTable::violations() const {
  std::vector<std::string> out;
  for (int a = 0; a < order_; ++a) {
    if (mul(0, a) != a || mul(a, 0) != a)
      out.push_back("0 is not an identity for " + std::to_string(a));
    if (inverse_[a] < 0) out.push_back("no inverse for " + std::to_string(a));
  }
  for (int a = 0; a < order_; ++a)
    for (int b = 0; b < order_; ++b)
      for (int c = 0; c < order_; ++c)
        if (mul(mul(a, b), c) != mul(a, mul(b, c))) {
          out.push_back("not associative at (" + std::to_string(a) + "," + std::to_string(b) +
                        "," + std::to_string(c) + ")");
          return out;
        }
  return out;
}

GroupTable GroupTable::cyclic(int n) {
  if (n < 1) throw std::invalid_argument("cyclic group order must be positive");
  std::vector<int> t(static_cast<std::size_t>(n * n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[static_cast<std::size_t>(a * n + b)] = (a + b) % n;
  return GroupTable(n, std::move(t), "Z" + std::to_string(n));
}

GroupTable GroupTable::symmetric(int n) {
  if (n < 1 || n > 6) throw std::invalid_argument("symmetric group degree must be in 1..6");
  std::vector<Perm> elems;
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do elems.emplace_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const int m = static_cast<int>(elems.size());
  std::vector<int> t(static_cast<std::size_t>(m * m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Perm c = elems[a].then(elems[b]);
      t[static_cast<std::size_t>(a * m + b)] =
          static_cast<int>(std::lower_bound(elems.begin(), elems.end(), c) - elems.begin());
    }
  return GroupTable(m, std::move(t), "S" + std::to_string(n));
}

GroupTable GroupTable::product(const GroupTable& a, const GroupTable& b) {
  const int m = a.order() * b.order();
  std::vector<int> t(static_cast<std::size_t>(m * m));
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      int xa = x / b.order(), xb = x % b.order();
      int ya = y / b.order(), yb = y % b.order();
      t[static_cast<std::size_t>(x * m + y)] = a.mul(xa, ya) * b.order() + b.mul(xb, yb);
    }
  return GroupTable(m, std::move(t), a.name() + "x" + b.name());
}

namespace {

class SpecParser {
 public:
  explicit SpecParser(std::string_view s) : s_(s) {}

  GroupTable parse() {
    GroupTable g = spec();
    if (pos_ != s_.size()) fail("trailing characters");
    return g;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("group spec '" + std::string(s_) + "': " + why);
  }
  bool eat(std::string_view lit) {
    if (s_.substr(pos_, lit.size()) == lit) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }
  int number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
    if (start == pos_) fail("expected a number");
    int v = 0;
    std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (v < 1) fail("order must be positive");
    return v;
  }
  GroupTable spec() {
    if (eat("prod:")) {
      GroupTable a = spec();
      if (!eat(",")) fail("expected ','");
      GroupTable b = spec();
      return GroupTable::product(a, b);
    }
    if (eat("cyclic:") || eat("Z")) return GroupTable::cyclic(number());
    if (eat("sym:") || eat("S")) {
      int n = number();
      if (n > 6) fail("symmetric degree above 6");
      return GroupTable::symmetric(n);
    }
    fail("unknown group");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

GroupTable parse_group_spec(std::string_view spec) { return SpecParser(spec).parse(); }

GroupTable parse_group_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int order = -1, lineno = 0;
  std::vector<int> table;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "order") {
      if (order >= 0) throw ParseError(lineno, "duplicate 'order'");
      if (!(ls >> order) || order < 1) throw ParseError(lineno, "bad order");
      table.assign(static_cast<std::size_t>(order * order), -1);
    } else if (kw == "mul") {
      if (order < 0) throw ParseError(lineno, "'mul' before 'order'");
      int i, j, k;
      if (!(ls >> i >> j >> k)) throw ParseError(lineno, "malformed mul line");
      if (i < 0 || j < 0 || k < 0 || i >= order || j >= order || k >= order)
        throw ParseError(lineno, "entry out of range");
      table[static_cast<std::size_t>(i * order + j)] = k;
    } else {
      throw ParseError(lineno, "unknown directive '" + kw + "'");
    }
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, "trailing tokens");
  }
  if (order < 0) throw ParseError("missing 'order'");
  if (std::find(table.begin(), table.end(), -1) != table.end())
    throw ParseError("incomplete multiplication table");
  return GroupTable(order, std::move(table));
}

std::string serialize_group_table(const GroupTable& g) {
  std::ostringstream os;
  os << "order " << g.order() << '\n';
  for (int a = 0; a < g.order(); ++a)
    for (int b = 0; b < g.order(); ++b) os << "mul " << a << ' ' << b << ' ' << g.mul(a, b) << '\n';
  return os.str();
}

GAction::GAction(int carrier, GroupTable group, std::vector<int> act)
    : carrier_(carrier), group_(std::move(group)), act_(std::move(act)) {
  if (act_.size() != static_cast<std::size_t>(carrier_) * static_cast<std::size_t>(group_.order()))
    throw std::invalid_argument("action table has wrong size");
  for (int v : act_)
    if (v < 0 || v >= carrier_) throw std::invalid_argument("action table entry out of range");
}

std::vector<std::string> GAction::violations() const {
  std::vector<std::string> out;
  for (int x = 0; x < carrier_; ++x) {
    if (act(x, 0) != x) out.push_back("identity moves " + std::to_string(x));
    for (int g = 0; g < group_.order(); ++g)
      for (int h = 0; h < group_.order(); ++h)
        if (act(act(x, g), h) != act(x, group_.mul(g, h))) {
          out.push_back("(x^g)^h != x^(gh) at x=" + std::to_string(x) + " g=" + std::to_string(g) +
                        " h=" + std::to_string(h));
          return out;
        }
  }
  return out;
}

GAction GAction::cayley(const GroupTable& g) {
  std::vector<int> act(static_cast<std::size_t>(g.order() * g.order()));
  for (int x = 0; x < g.order(); ++x)
    for (int h = 0; h < g.order(); ++h) act[static_cast<std::size_t>(x * g.order() + h)] = g.mul(x, h);
  return GAction(g.order(), g, std::move(act));
}

std::optional<FixedPointWitness> fixed_point(const GAction& a) {
  for (int x = 0; x < a.carrier(); ++x)
    for (int g = 1; g < a.group().order(); ++g)
      if (a.act(x, g) == x) return FixedPointWitness{x, g};
  return std::nullopt;
}

std::optional<ActionWitness> action_violation(const GAction& a, const Structure& m) {
  if (a.carrier() != m.size())
    throw PreconditionError("action carrier size differs from structure size");
  const auto& sig = m.signature();
  Tuple img;
  for (int g = 0; g < a.group().order(); ++g) {
    std::vector<int> p(static_cast<std::size_t>(m.size()));
    for (int x = 0; x < m.size(); ++x) p[x] = a.act(x, g);
    if (!is_permutation(p)) return ActionWitness{g, "bijection", {}};
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
      const Relation& rel = m.relation(static_cast<int>(r));
      for (std::size_t i = 0; i < rel.size(); ++i) {
        auto t = rel.tuple(i);
        img.assign(t.begin(), t.end());
        for (int& v : img) v = p[v];
        if (!rel.contains(img))
          return ActionWitness{g, sig.relations()[r].name, Tuple(t.begin(), t.end())};
      }
    }
    for (std::size_t f = 0; f < sig.functions().size(); ++f)
      for (int x = 0; x < m.size(); ++x)
        if (p[m.apply(static_cast<int>(f), x)] != m.apply(static_cast<int>(f), p[x]))
          return ActionWitness{g, sig.functions()[f], Tuple{x}};
  }
  return std::nullopt;
}

std::vector<long> element_orders(const PermGroup& g) {
  std::vector<long> out;
  out.reserve(g.order());
  for (const Perm& p : g.elements()) out.push_back(p.order());
  std::sort(out.begin(), out.end());
  return out;
}

bool is_abelian(const PermGroup& g) {
  const auto& e = g.elements();
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j)
      if (e[i].then(e[j]) != e[j].then(e[i])) return false;
  return true;
}

bool has_element_of_order(const PermGroup& g, long k) {
  return std::any_of(g.elements().begin(), g.elements().end(),
                     [&](const Perm& p) { return p.order() == k; });
}

std::vector<long> invariant_factors_from_orders(const std::vector<long>& orders) {
  long n = static_cast<long>(orders.size());
  std::vector<std::vector<long>> exponents;  // per prime, descending
  std::vector<long> primes;
  long rest = n;
  for (long p = 2; rest > 1; ++p) {
    if (rest % p) continue;
    int a = 0;
    while (rest % p == 0) {
      rest /= p;
      ++a;
    }
    // s[k] = log_p #{g : g^(p^k) = 1}
    std::vector<int> s(static_cast<std::size_t>(a + 1), 0);
    long pk = 1;
    for (int k = 1; k <= a; ++k) {
      pk *= p;
      long count = std::count_if(orders.begin(), orders.end(), [&](long o) { return pk % o == 0; });
      int e = 0;
      for (long c = count; c > 1; c /= p) {
        if (c % p) throw std::invalid_argument("element orders are not those of an abelian group");
        ++e;
      }
      s[k] = e;
    }
    std::vector<long> at_least(static_cast<std::size_t>(a + 1), 0);  // #factors with exp >= k
    for (int k = 1; k <= a; ++k) at_least[k] = s[k] - s[k - 1];
    std::vector<long> exps;
    for (long i = 1; i <= at_least[1]; ++i) {
      long e = 0;
      for (int k = 1; k <= a; ++k)
        if (at_least[k] >= i) e = k;
      exps.push_back(e);
    }
    primes.push_back(p);
    exponents.push_back(std::move(exps));
  }
  std::size_t t = 0;
  for (const auto& e : exponents) t = std::max(t, e.size());
  std::vector<long> factors(t, 1);
  for (std::size_t i = 0; i < primes.size(); ++i)
    for (std::size_t j = 0; j < exponents[i].size(); ++j)
      for (long k = 0; k < exponents[i][j]; ++k) factors[t - 1 - j] *= primes[i];
  return factors;
}

GroupIdentity identify(const PermGroup& g) {
  GroupIdentity id;
  id.order = g.order();
  id.element_orders = element_orders(g);
  id.is_abelian = is_abelian(g);
  id.is_cyclic = !id.element_orders.empty() &&
                 id.element_orders.back() == static_cast<long>(id.order);
  if (id.is_abelian) id.invariant_factors = invariant_factors_from_orders(id.element_orders);
  return id;
}

std::string GroupIdentity::describe() const {
  std::ostringstream os;
  if (is_cyclic) {
    os << "cyclic order " << order;
  } else if (is_abelian) {
    os << "abelian order " << order << " invariant factors [";
    for (std::size_t i = 0; i < invariant_factors.size(); ++i)
      os << (i ? "," : "") << invariant_factors[i];
    os << ']';
  } else {
    os << "order " << order << " non-abelian";
  }
  return os.str();
}

IntSet symdiff_compose(const IntSet& a, const IntSet& b) {
  IntSet out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IntPermutation::IntPermutation(std::map<long, long> support) {
  std::vector<long> keys, values;
  for (auto [x, y] : support) {
    if (x == y) continue;
    support_.emplace(x, y);
    keys.push_back(x);
    values.push_back(y);
  }
  std::sort(values.begin(), values.end());
  if (keys != values || std::adjacent_find(values.begin(), values.end()) != values.end())
    throw std::invalid_argument("support map is not a bijection of its support");
}

long IntPermutation::operator()(long x) const {
  auto it = support_.find(x);
  return it == support_.end() ? x : it->second;
}

IntPermutation IntPermutation::then(const IntPermutation& q) const {
  std::map<long, long> out;
  for (auto [x, y] : support_) out[x] = q(y);
  for (auto [x, y] : q.support_)
    if (!support_.count(x)) out[x] = y;
  return IntPermutation(std::move(out));
}

long IntPermutation::order() const {
  long result = 1;
  std::map<long, bool> seen;
  for (auto [x, y] : support_) {
    if (seen[x]) continue;
    long len = 0;
    for (long z = x; !seen[z]; z = (*this)(z)) {
      seen[z] = true;
      ++len;
    }
    result = std::lcm(result, len);
  }
  return result;
}

IntPermutation h_embed(const IntSet& a) {
  std::map<long, long> support;
  for (long x : a) {
    if (x <= 0) throw PreconditionError("h_embed: set must consist of positive integers");
    support[x] = -x;
    support[-x] = x;
  }
  return IntPermutation(std::move(support));
}

}  // namespace fwb
