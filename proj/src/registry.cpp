#include <map>
#include <mutex>

#include "fwb/catalog.hpp"
#include "fwb/error.hpp"

namespace fwb {

namespace {

std::vector<std::string> split_colon(std::string_view s) {
  std::vector<std::string> out(1);
  for (char ch : s) {
    if (ch == ':')
      out.emplace_back();
    else
      out.back() += ch;
  }
  return out;
}

// Parses one class name starting at tokens[pos]; a divg group takes the rest.
ClassPtr parse(const std::vector<std::string>& tokens, std::size_t& pos) {
  if (pos >= tokens.size()) throw ParseError("class name ends early");
  const std::string& head = tokens[pos++];
  if (head == "sets") return class_pure_sets();
  if (head == "lo") return class_linear_orders();
  if (head == "bipartite") return class_bipartite();
  if (head == "rot") return class_rotating_machines();
  if (head == "div") return diversify(parse(tokens, pos));
  if (head == "mix") {
    ClassPtr left = parse(tokens, pos);
    return mixed_sum(left, parse(tokens, pos));
  }
  if (head == "divg") {
    ClassPtr base = parse(tokens, pos);
    std::string group;
    for (; pos < tokens.size(); ++pos) group += (group.empty() ? "" : ":") + tokens[pos];
    if (group.empty()) throw ParseError("divg needs a group");
    return diversify_with_action(base, parse_group_spec(group));
  }
  throw ParseError("unknown class '" + head + "'");
}

}  // namespace

ClassPtr class_by_name(std::string_view name) {
  static std::mutex mu;
  static std::map<std::string, ClassPtr, std::less<>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(name); it != cache.end()) return it->second;
  }
  auto tokens = split_colon(name);
  std::size_t pos = 0;
  ClassPtr c = parse(tokens, pos);
  if (pos != tokens.size())
    throw ParseError("trailing text in class name '" + std::string(name) + "'");
  std::lock_guard lock(mu);
  return cache.emplace(std::string(name), c).first->second;
}

}  // namespace fwb
