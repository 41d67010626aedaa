#include "fwb/text_format.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "fwb/error.hpp"

namespace fwb {

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' &&
           line[j] != '#')
      ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

int to_int(std::string_view tok, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || v < 0)
    throw ParseError(line, "expected a non-negative integer, got '" + std::string(tok) + "'");
  return v;
}

}  // namespace

Structure parse_structure(std::string_view text) {
  std::vector<RelationSymbol> rels;
  std::vector<std::string> funs;
  SignaturePtr sig;
  int size = -1;
  std::vector<std::vector<Tuple>> tuples;
  std::vector<std::vector<int>> graphs;

  int lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    auto tok = split_tokens(line);
    if (tok.empty()) continue;

    if (tok[0] == "sig") {
      if (sig) throw ParseError(lineno, "signature line after 'size'");
      if (tok.size() == 4 && tok[1] == "rel") {
        int arity = to_int(tok[3], lineno);
        if (arity < 1) throw ParseError(lineno, "relation arity must be positive");
        rels.push_back({std::string(tok[2]), arity});
      } else if (tok.size() == 3 && tok[1] == "fun") {
        funs.emplace_back(tok[2]);
      } else {
        throw ParseError(lineno, "malformed signature line");
      }
    } else if (tok[0] == "size") {
      if (sig) throw ParseError(lineno, "duplicate 'size'");
      if (tok.size() != 2) throw ParseError(lineno, "malformed size line");
      size = to_int(tok[1], lineno);
      try {
        sig = make_signature(rels, funs);
      } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
      }
      tuples.resize(rels.size());
      graphs.assign(funs.size(), std::vector<int>(static_cast<std::size_t>(size), -1));
    } else if (tok[0] == "rel") {
      if (!sig) throw ParseError(lineno, "'rel' before 'size'");
      if (tok.size() < 2) throw ParseError(lineno, "malformed rel line");
      auto r = sig->relation_index(tok[1]);
      if (!r) throw ParseError(lineno, "unknown relation '" + std::string(tok[1]) + "'");
      int arity = sig->relations()[*r].arity;
      if (static_cast<int>(tok.size()) - 2 != arity)
        throw ParseError(lineno, "arity mismatch for '" + std::string(tok[1]) + "'");
      Tuple t;
      for (std::size_t i = 2; i < tok.size(); ++i) {
        int v = to_int(tok[i], lineno);
        if (v >= size) throw ParseError(lineno, "entry out of range");
        t.push_back(v);
      }
      tuples[*r].push_back(std::move(t));
    } else if (tok[0] == "fun") {
      if (!sig) throw ParseError(lineno, "'fun' before 'size'");
      if (tok.size() != 4) throw ParseError(lineno, "malformed fun line");
      auto f = sig->function_index(tok[1]);
      if (!f) throw ParseError(lineno, "unknown function '" + std::string(tok[1]) + "'");
      int x = to_int(tok[2], lineno), y = to_int(tok[3], lineno);
      if (x >= size || y >= size) throw ParseError(lineno, "entry out of range");
      if (graphs[*f][x] >= 0)
        throw ParseError(lineno, "function '" + std::string(tok[1]) + "' defined twice at " +
                                     std::to_string(x));
      graphs[*f][x] = y;
    } else {
      throw ParseError(lineno, "unknown directive '" + std::string(tok[0]) + "'");
    }
  }
  if (!sig) throw ParseError("missing 'size' line");
  for (std::size_t f = 0; f < graphs.size(); ++f)
    for (int x = 0; x < size; ++x)
      if (graphs[f][x] < 0)
        throw ParseError("partial function graph: '" + funs[f] + "' undefined at " +
                         std::to_string(x));
  return Structure(sig, size, std::move(tuples), std::move(graphs));
}

std::string serialize_structure(const Structure& m) {
  std::ostringstream os;
  const auto& sig = m.signature();
  for (const auto& r : sig.relations()) os << "sig rel " << r.name << ' ' << r.arity << '\n';
  for (const auto& f : sig.functions()) os << "sig fun " << f << '\n';
  os << "size " << m.size() << '\n';
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    const Relation& rel = m.relation(static_cast<int>(r));
    for (std::size_t i = 0; i < rel.size(); ++i) {
      os << "rel " << sig.relations()[r].name;
      for (int v : rel.tuple(i)) os << ' ' << v;
      os << '\n';
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f)
    for (int x = 0; x < m.size(); ++x)
      os << "fun " << sig.functions()[f] << ' ' << x << ' ' << m.apply(static_cast<int>(f), x)
         << '\n';
  return os.str();
}

std::string compact_structure(const Structure& m) {
  std::string s = serialize_structure(m);
  if (!s.empty() && s.back() == '\n') s.pop_back();
  std::string out;
  for (char ch : s) {
    if (ch == '\n')
      out += "; ";
    else
      out += ch;
  }
  return out;
}

std::string Structure::serialize() const { return serialize_structure(*this); }

Structure read_structure_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_structure(buf.str());
}

void write_structure_file(const std::filesystem::path& path, const Structure& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << serialize_structure(m);
}

}  // namespace fwb
