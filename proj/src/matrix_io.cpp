#include "pcq/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace pcq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string at_line(const std::string& source, int line) {
  return source + ":" + std::to_string(line);
}

double parse_number(const std::string& cell, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(where + ": cell '" + cell + "' is not a number");
  }
}

int parse_int(const std::string& cell, const std::string& where) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(cell, &used);
    if (used != cell.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(where + ": '" + cell + "' is not an integer");
  }
}

bool next_nonblank(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) return true;
  }
  return false;
}

bool read_block(std::istream& in, const std::string& source, int& line_no, IncompleteMatrix& out) {
  std::string line;
  if (!next_nonblank(in, line, line_no)) return false;
  const int n = parse_int(trim(line), at_line(source, line_no));
  if (n < 1) throw Error(at_line(source, line_no) + ": matrix size must be positive");

  std::vector<std::vector<std::optional<double>>> cells(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw Error(source + ": expected " + std::to_string(n) + " rows, found " + std::to_string(i));
    ++line_no;
    const std::string where = at_line(source, line_no) + " (row " + std::to_string(i) + ")";
    auto row = split_csv_line(line);
    if (static_cast<int>(row.size()) != n)
      throw Error(where + ": expected " + std::to_string(n) + " cells, found " + std::to_string(row.size()));
    for (int j = 0; j < n; ++j) {
      const std::string cell = trim(row[j]);
      if (cell.empty() || cell == "*") {
        cells[i].emplace_back();
      } else {
        cells[i].emplace_back(parse_number(cell, where));
      }
    }
  }

  IncompleteMatrix m(n);
  for (int i = 0; i < n; ++i) {
    const std::string where = source + " row " + std::to_string(i);
    if (cells[i][i] && std::abs(*cells[i][i] - 1.0) > kFileReciprocityTolerance)
      throw Error(where + ": diagonal entry must be 1");
    for (int j = i + 1; j < n; ++j) {
      const auto& upper = cells[i][j];
      const auto& lower = cells[j][i];
      const std::string pair = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (upper.has_value() != lower.has_value())
        throw Error(where + ": pair " + pair + " is known on one side only");
      if (!upper) continue;
      if (!(*upper > 0) || !(*lower > 0) || !std::isfinite(*upper) || !std::isfinite(*lower))
        throw Error(where + ": pair " + pair + " must be positive and finite");
      if (std::abs(*upper * *lower - 1.0) > kFileReciprocityTolerance)
        throw Error(where + ": entries of pair " + pair + " are not reciprocal");
      m.set(i, j, *upper);
    }
  }
  out = std::move(m);
  return true;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(pos));
      break;
    }
    cells.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return cells;
}

bool read_matrix_csv(std::istream& in, const std::string& source, IncompleteMatrix& out) {
  int line_no = 0;
  return read_block(in, source, line_no, out);
}

std::vector<IncompleteMatrix> read_matrices_csv(std::istream& in, const std::string& source) {
  std::vector<IncompleteMatrix> out;
  int line_no = 0;
  IncompleteMatrix m;
  while (read_block(in, source, line_no, m)) out.push_back(m);
  return out;
}

IncompleteMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  IncompleteMatrix m;
  if (!read_matrix_csv(in, path, m)) throw Error(path + ": empty file");
  return m;
}

void write_matrix_csv(std::ostream& out, const IncompleteMatrix& m) {
  const auto old = out.precision(17);
  out << m.size() << '\n';
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) {
      if (j > 0) out << ',';
      if (const auto v = m.at(i, j)) out << *v;
      else out << '*';
    }
    out << '\n';
  }
  out.precision(old);
}

void write_matrix_csv(std::ostream& out, const PairwiseComparisonMatrix& m) {
  write_matrix_csv(out, IncompleteMatrix(m));
}

std::vector<VerbalJudgment> read_verbal_csv(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  if (!next_nonblank(in, line, line_no)) throw Error(source + ": empty verbal judgment file");
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header != std::vector<std::string>{"i", "j", "category", "direction"})
    throw Error(at_line(source, line_no) + ": expected header i,j,category,direction");
  std::vector<VerbalJudgment> out;
  while (next_nonblank(in, line, line_no)) {
    const std::string where = at_line(source, line_no);
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw Error(where + ": expected 4 cells");
    VerbalJudgment j;
    j.first = parse_int(trim(cells[0]), where);
    j.second = parse_int(trim(cells[1]), where);
    try {
      j.category = parse_category(cells[2]);
      j.direction = j.category == Category::Equal ? Direction::FirstPreferred
                                                  : parse_direction(cells[3]);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    out.push_back(j);
  }
  return out;
}

std::vector<VerbalJudgment> read_verbal_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_verbal_csv(in, path);
}

void write_verbal_csv(std::ostream& out, const std::vector<VerbalJudgment>& judgments) {
  out << "i,j,category,direction\n";
  for (const auto& j : judgments)
    out << j.first << ',' << j.second << ',' << to_string(j.category) << ',' << to_string(j.direction) << '\n';
}

}  // namespace pcq
