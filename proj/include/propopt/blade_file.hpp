#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "propopt/blade_geometry.hpp"

namespace propopt {

// Line-oriented blade definition ("blade.def"):
//
//   # comment
//   r0 = 0.1
//   R = 0.5
//   n_blades = 6
//
//   [section]
//   radius_fraction = 0.2
//   pitch = 1.0
//   chord = 0.225
//   rake = 0          (optional, default 0)
//   skew = 0          (optional, default 0, radians)
//   chord_fraction,camber,thickness
//   0,0,0
//   ...
//   [end]
//
// One [section] block per section, in increasing radius order. Numbers are
// written with 17 significant digits so a write/read cycle is lossless.

BladeDefinition parse_blade(std::istream& in, const std::string& source = "<stream>");
BladeDefinition read_blade(const std::filesystem::path& path);

void write_blade(std::ostream& out, const BladeDefinition& blade);
void write_blade(const std::filesystem::path& path, const BladeDefinition& blade);

}  // namespace propopt
