#include "cclust/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cclust {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc()) {
    throw validation_error("bad number '" + s + "' in " + context);
  }
  for (const char* p = res.ptr; p != last; ++p) {
    if (*p != ' ' && *p != '\t' && *p != '\r') {
      throw validation_error("bad number '" + s + "' in " + context);
    }
  }
  return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

ObservationTable read_table_csv(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw validation_error("empty table file: " + path);
  auto header = split_line(lines[0]);
  if (header.size() < 3 || header[0] != "y" || header[1] != "a") {
    throw validation_error("table header must be y,a,x1,...,xd in " + path);
  }
  const int d = static_cast<int>(header.size()) - 2;
  for (int j = 0; j < d; ++j) {
    if (header[2 + j] != "x" + std::to_string(j + 1)) {
      throw validation_error("table header must be y,a,x1,...,xd in " + path);
    }
  }
  ObservationTable t;
  t.d = d;
  int max_arm = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split_line(lines[i]);
    if (cells.size() != header.size()) {
      throw validation_error("row " + std::to_string(i) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(header.size()) + " in " + path);
    }
    const std::string ctx = path + " row " + std::to_string(i);
    t.y.push_back(parse_double(cells[0], ctx));
    double arm = parse_double(cells[1], ctx);
    int ai = static_cast<int>(arm);
    if (static_cast<double>(ai) != arm) {
      throw validation_error("non-integer arm at row " + std::to_string(i) + " in " + path);
    }
    t.a.push_back(ai);
    if (ai > max_arm) max_arm = ai;
    for (int j = 0; j < d; ++j) t.x.push_back(parse_double(cells[2 + j], ctx));
  }
  t.q = max_arm;
  return t;
}

void write_table_csv(const std::string& path, const ObservationTable& table) {
  std::ostringstream out;
  out << "y,a";
  for (int j = 1; j <= table.d; ++j) out << ",x" << j;
  out << "\n";
  for (std::size_t i = 0; i < table.n(); ++i) {
    out << format_double(table.y[i]) << ',' << table.a[i];
    const double* xi = table.row(i);
    for (int j = 0; j < table.d; ++j) out << ',' << format_double(xi[j]);
    out << "\n";
  }
  write_text_file(path, out.str());
}

CounterfactualMatrix read_matrix_csv(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw validation_error("empty matrix file: " + path);
  auto header = split_line(lines[0]);
  if (header.empty()) throw validation_error("missing matrix header in " + path);
  CounterfactualMatrix m;
  if (header[0] == "mu1") {
    m.parametrization = Parametrization::levels;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] != "mu" + std::to_string(j + 1)) {
        throw validation_error("matrix header must be mu1,...,muq in " + path);
      }
    }
  } else if (header[0] == "tau2") {
    m.parametrization = Parametrization::contrasts;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] != "tau" + std::to_string(j + 2)) {
        throw validation_error("matrix header must be tau2,...,tauq in " + path);
      }
    }
  } else {
    throw validation_error("matrix header must start with mu1 or tau2 in " + path);
  }
  m.q = static_cast<int>(header.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split_line(lines[i]);
    if (cells.size() != header.size()) {
      throw validation_error("row " + std::to_string(i) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(header.size()) + " in " + path);
    }
    const std::string ctx = path + " row " + std::to_string(i);
    for (auto& c : cells) {
      double v = parse_double(c, ctx);
      if (!std::isfinite(v)) {
        throw validation_error("non-finite matrix entry at row " + std::to_string(i) + " in " + path);
      }
      m.points.push_back(v);
    }
  }
  m.n = m.points.size() / static_cast<std::size_t>(m.q);
  return m;
}

void write_matrix_csv(const std::string& path, const CounterfactualMatrix& matrix,
                      bool write_truth) {
  if (write_truth && !matrix.truth) {
    throw validation_error("matrix has no truth columns to write: " + path);
  }
  const std::vector<double>& data = write_truth ? *matrix.truth : matrix.points;
  std::ostringstream out;
  const bool levels = matrix.parametrization == Parametrization::levels;
  for (int j = 0; j < matrix.q; ++j) {
    if (j) out << ',';
    if (levels) {
      out << "mu" << (j + 1);
    } else {
      out << "tau" << (j + 2);
    }
  }
  out << "\n";
  for (std::size_t i = 0; i < matrix.n; ++i) {
    const double* r = data.data() + i * static_cast<std::size_t>(matrix.q);
    for (int j = 0; j < matrix.q; ++j) {
      if (j) out << ',';
      out << format_double(r[j]);
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

ClusterLabeling read_labels_csv(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty() || split_line(lines[0]) != std::vector<std::string>{"label"}) {
    throw validation_error("labels header must be `label` in " + path);
  }
  ClusterLabeling l;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string ctx = path + " row " + std::to_string(i);
    double v = parse_double(lines[i], ctx);
    int lab = static_cast<int>(v);
    if (static_cast<double>(lab) != v || lab < 0) {
      throw validation_error("labels must be integers >= 0 at row " + std::to_string(i) + " in " + path);
    }
    l.labels.push_back(lab);
    if (lab > l.k_max) l.k_max = lab;
  }
  return l;
}

void write_labels_csv(const std::string& path, const ClusterLabeling& labeling) {
  std::ostringstream out;
  out << "label\n";
  for (int lab : labeling.labels) out << lab << "\n";
  write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw validation_error("write failed: " + path);
}

}  // namespace cclust
