#include "ltree/csv.hpp"

#include "ltree/error.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace ltree {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, const std::string& source,
                  std::size_t line) {
  const std::string cell = trim(raw);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
    std::ostringstream msg;
    msg << source << ":" << line << ": cannot parse '" << cell << "' as a number";
    throw Error(ErrorCode::Io, msg.str());
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Matrix parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_cell(cell, source, lineno));
    if (!line.empty() && line.back() == ',') row.push_back(parse_cell("", source, lineno));
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << source << ":" << lineno << ": expected " << rows.front().size()
          << " columns, got " << row.size();
      throw Error(ErrorCode::Io, msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::Io, source + ": no data rows");

  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
  return parse_matrix_csv(in, path);
}

void format_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  format_matrix_csv(out, m);
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace ltree
