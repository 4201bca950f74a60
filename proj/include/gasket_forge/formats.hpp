#pragma once

#include <stdexcept>
#include <string>

#include "gasket_forge/subdivision.hpp"

namespace gf {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-oriented text formats; `#` starts a comment.
//   polygon <id> sides=<k>
//   interior <id> <v,...>
//   cell <id>.<j> type=<t> walk=<v0,v1,...>
//   corr <id>.<j> <type-vertex>-><walk-vertex> ...
SubdivisionRule parse_rule(const std::string& text);
std::string format_rule(const SubdivisionRule& rule);

//   level <n>
//   vertex <id>
//   rot <id> = <cyclic neighbor list>
//   face <fid> type=<t> walk=<...>
//   external <fid>
PlanarComplex parse_complex(const std::string& text);
std::string format_complex(const PlanarComplex& complex);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace gf
