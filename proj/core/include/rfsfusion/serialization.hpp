#pragma once

#include "rfsfusion/densities.hpp"

#include <iosfwd>
#include <string>

namespace rfs {

/// Plain-text density dumps, one hypothesis per record. The format is line
/// oriented and round-trips exactly (doubles are written with 17 significant
/// digits):
///
///   rfs-density glmb 1
///   component <history> <weight> <n> <t:i> ...
///   track <t:i> <ncomp>
///   g <weight> <dim> <mean...> <cov row-major...>
///
///   rfs-density gmb 1
///   indexset <n> <i> ...
///   hypothesis <phi> <weight> <n> <i> ...
///   density <i> <ncomp>
///   g <weight> <dim> <mean...> <cov row-major...>
///
///   rfs-density sogmb 1
///   indexset <n> <i> ...
///   hypothesis <weight> <n> <i> ...
///   density <i> <ncomp>
///   g ...
///
/// Lines starting with '#' and blank lines are ignored on read.

void write_text(std::ostream& os, const GlmbDensity& d);
void write_text(std::ostream& os, const GmbDensity& d);
void write_text(std::ostream& os, const SoGmbDensity& d);

std::string to_text(const GlmbDensity& d);
std::string to_text(const GmbDensity& d);
std::string to_text(const SoGmbDensity& d);

GlmbDensity read_glmb_text(std::istream& is);
GmbDensity read_gmb_text(std::istream& is);
SoGmbDensity read_sogmb_text(std::istream& is);

GlmbDensity glmb_from_text(const std::string& text);
GmbDensity gmb_from_text(const std::string& text);
SoGmbDensity sogmb_from_text(const std::string& text);

} // namespace rfs
