#pragma once

#include "ltree/gaussian.hpp"

#include <iosfwd>
#include <string>

namespace ltree {

/// Dense matrix CSV: comma separated, no header, one row per line, all rows
/// the same width. Values are written with 17 significant digits so every
/// double round-trips exactly.
Matrix parse_matrix_csv(std::istream& in, const std::string& source = "<stream>");
Matrix read_matrix_csv(const std::string& path);

void format_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::string& path, const Matrix& m);

/// Shortest round-trip text for a double ("%.17g").
std::string format_double(double x);

}  // namespace ltree
