#pragma once

#include <iosfwd>
#include <string>

#include "lud/formation.h"

namespace lud {

// Formation text format:
//   d n m
//   i j g_1 ... g_d        (m lines, i < j, 17 significant digits)
//
// LocationSet text format:
//   d n
//   x_1 ... x_d            (n lines)
//
// Blank lines and lines starting with '#' are ignored on input. Directions
// that are unit within 1e-12 are kept bit-for-bit; other nonzero directions
// are normalized.
void write_formation(std::ostream& out, const Formation& formation);
Formation read_formation(std::istream& in);

void write_locations(std::ostream& out, const LocationSet& locations);
LocationSet read_locations(std::istream& in);

Formation load_formation(const std::string& path);
void save_formation(const std::string& path, const Formation& formation);
LocationSet load_locations(const std::string& path);
void save_locations(const std::string& path, const LocationSet& locations);

// "%.17g" formatting shared by every text writer.
std::string format_double(double value);

}  // namespace lud
