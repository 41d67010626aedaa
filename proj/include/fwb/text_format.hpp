#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fwb/structures.hpp"

namespace fwb {

// Line-based structure format:
//
//   sig rel <name> <arity>     one line per relation symbol
//   sig fun <name>             one line per function symbol
//   size <n>
//   rel <name> <i1> ... <ik>   one line per tuple
//   fun <name> <i> <j>         f(i) = j; every i exactly once
//
// `#` starts a comment. Parsing is strict: unknown directives, arity
// mismatches, out-of-range entries and partial function graphs throw
// ParseError.
Structure parse_structure(std::string_view text);
std::string serialize_structure(const Structure& m);
// The same content on one line, with "; " between directives. For witnesses
// in reports; parse_structure does not read it back.
std::string compact_structure(const Structure& m);

Structure read_structure_file(const std::filesystem::path& path);
void write_structure_file(const std::filesystem::path& path, const Structure& m);

}  // namespace fwb
