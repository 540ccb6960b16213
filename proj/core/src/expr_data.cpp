#include "tnmf/expr_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <unordered_map>
#include <unordered_set>

#include "tnmf/error.hpp"

namespace tnmf {

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

// Parses a numeric entry and checks the matrix invariants on it.
double parse_entry(std::string_view field, const std::string& source, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(source, line, "cannot parse number '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(source, line, "NaN/Inf entry");
  if (v < 0.0) throw ParseError(source, line, "negative entry");
  return v;
}

template <typename Int>
Int parse_index(std::string_view field, const std::string& source, std::size_t line) {
  Int v{};
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(source, line, "cannot parse integer '" + std::string(field) + "'");
  }
  return v;
}

ExpressionMatrix read_dense(std::istream& in, char delim, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;

  // Header: empty corner cell followed by cell ids.
  bool have_header = false;
  std::vector<std::string> cell_ids;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (is_blank(line)) continue;
    auto fields = split(line, delim);
    if (fields.size() < 3) throw ParseError(source, lineno, "header needs at least two cell ids");
    for (std::size_t f = 1; f < fields.size(); ++f) cell_ids.push_back(unquote(fields[f]));
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError(source, lineno, "empty input");

  const std::size_t m = cell_ids.size();
  std::vector<std::string> gene_ids;
  std::vector<double> flat;  // row-major
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (is_blank(line)) continue;
    auto fields = split(line, delim);
    if (fields.size() != m + 1) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(m + 1) + " fields, found " +
                           std::to_string(fields.size()));
    }
    auto id = unquote(fields[0]);
    if (!seen.insert(id).second) throw ParseError(source, lineno, "duplicate gene id '" + id + "'");
    gene_ids.push_back(std::move(id));
    for (std::size_t f = 1; f <= m; ++f) flat.push_back(parse_entry(fields[f], source, lineno));
  }
  if (gene_ids.empty()) throw ParseError(source, lineno, "no gene rows");

  ExpressionMatrix x;
  x.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), static_cast<Eigen::Index>(gene_ids.size()), static_cast<Eigen::Index>(m));
  x.gene_ids = std::move(gene_ids);
  x.cell_ids = std::move(cell_ids);
  return x;
}

ExpressionMatrix read_coo(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  Eigen::Index rows = 0, cols = 0;
  std::size_t nnz = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (is_blank(line)) continue;
    const auto fields = split_whitespace(line);
    if (fields.size() != 3) throw ParseError(source, lineno, "header must be 'rows cols nnz'");
    rows = parse_index<Eigen::Index>(fields[0], source, lineno);
    cols = parse_index<Eigen::Index>(fields[1], source, lineno);
    nnz = parse_index<std::size_t>(fields[2], source, lineno);
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError(source, lineno, "empty input");
  if (rows < 1 || cols < 2) throw ParseError(source, lineno, "shape must be at least 1 x 2");

  ExpressionMatrix x;
  x.values = Eigen::MatrixXd::Zero(rows, cols);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (is_blank(line)) continue;
    const auto fields = split_whitespace(line);
    if (fields.size() != 3) throw ParseError(source, lineno, "expected 'i j v'");
    const auto i = parse_index<Eigen::Index>(fields[0], source, lineno);
    const auto j = parse_index<Eigen::Index>(fields[1], source, lineno);
    const double v = parse_entry(fields[2], source, lineno);
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      throw ParseError(source, lineno, "index out of range");
    }
    // Repeated coordinates accumulate.
    x.values(i, j) += v;
    ++seen;
  }
  if (seen != nnz) {
    throw ParseError(source, lineno,
                     "header declares " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
  }
  x.gene_ids.reserve(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) x.gene_ids.push_back("g" + std::to_string(i));
  x.cell_ids.reserve(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j) x.cell_ids.push_back("c" + std::to_string(j));
  return x;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

ExpressionMatrix select_columns(const ExpressionMatrix& x, const std::vector<Eigen::Index>& keep) {
  ExpressionMatrix out;
  out.values.resize(x.genes(), static_cast<Eigen::Index>(keep.size()));
  out.gene_ids = x.gene_ids;
  out.cell_ids.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.values.col(static_cast<Eigen::Index>(k)) = x.values.col(keep[k]);
    out.cell_ids.push_back(x.cell_ids[static_cast<std::size_t>(keep[k])]);
  }
  return out;
}

}  // namespace

void ExpressionMatrix::validate() const {
  if (genes() < 1) throw InvariantError("expression matrix needs at least one gene");
  if (cells() < 2) throw InvariantError("expression matrix needs at least two cells");
  if (gene_ids.size() != static_cast<std::size_t>(genes())) {
    throw InvariantError("gene id count does not match row count");
  }
  if (cell_ids.size() != static_cast<std::size_t>(cells())) {
    throw InvariantError("cell id count does not match column count");
  }
  if (!values.allFinite()) throw InvariantError("NaN/Inf entry");
  if ((values.array() < 0.0).any()) throw InvariantError("negative entry");
}

LabelVector::LabelVector(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::unordered_map<std::string, int> index;
  codes_.reserve(labels_.size());
  for (const auto& l : labels_) {
    auto [it, inserted] = index.try_emplace(l, static_cast<int>(classes_.size()));
    if (inserted) classes_.push_back(l);
    codes_.push_back(it->second);
  }
}

MatrixFormat parse_matrix_format(std::string_view name) {
  if (name == "dense-csv" || name == "csv") return MatrixFormat::DenseCsv;
  if (name == "dense-tsv" || name == "tsv") return MatrixFormat::DenseTsv;
  if (name == "coo-triplets" || name == "coo") return MatrixFormat::CooTriplets;
  throw InvariantError("unknown matrix format '" + std::string(name) + "'");
}

std::string_view to_string(MatrixFormat format) {
  switch (format) {
    case MatrixFormat::DenseCsv: return "dense-csv";
    case MatrixFormat::DenseTsv: return "dense-tsv";
    case MatrixFormat::CooTriplets: return "coo-triplets";
  }
  return "unknown";
}

ExpressionMatrix read_matrix(std::istream& in, MatrixFormat format, const std::string& source_name) {
  ExpressionMatrix x;
  switch (format) {
    case MatrixFormat::DenseCsv: x = read_dense(in, ',', source_name); break;
    case MatrixFormat::DenseTsv: x = read_dense(in, '\t', source_name); break;
    case MatrixFormat::CooTriplets: x = read_coo(in, source_name); break;
  }
  x.validate();
  return x;
}

ExpressionMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  auto in = open_input(path);
  return read_matrix(in, format, path.string());
}

LabelVector read_labels(std::istream& in, const std::string& source_name) {
  std::vector<std::string> labels;
  std::string line;
  std::size_t lineno = 0;
  std::size_t pending_blank = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (is_blank(line)) {
      ++pending_blank;
      continue;
    }
    if (pending_blank > 0) throw ParseError(source_name, lineno - 1, "blank label line");
    labels.push_back(unquote(line));
  }
  if (labels.empty()) throw ParseError(source_name, 0, "no labels");
  return LabelVector(std::move(labels));
}

LabelVector load_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_labels(in, path.string());
}

std::pair<ExpressionMatrix, LabelVector> filter_rare_classes(const ExpressionMatrix& x,
                                                             const LabelVector& y,
                                                             std::size_t min_cells) {
  if (y.size() != static_cast<std::size_t>(x.cells())) {
    throw InvariantError("label count " + std::to_string(y.size()) + " does not match cell count " +
                         std::to_string(x.cells()));
  }
  std::vector<std::size_t> counts(y.num_classes(), 0);
  for (int c : y.codes()) ++counts[static_cast<std::size_t>(c)];

  std::vector<Eigen::Index> keep;
  std::vector<std::string> kept_labels;
  for (std::size_t m = 0; m < y.size(); ++m) {
    if (counts[static_cast<std::size_t>(y.codes()[m])] >= min_cells) {
      keep.push_back(static_cast<Eigen::Index>(m));
      kept_labels.push_back(y.labels()[m]);
    }
  }
  if (keep.empty()) {
    throw InvariantError("every class has fewer than " + std::to_string(min_cells) +
                         " cells; nothing left after filtering");
  }
  return {select_columns(x, keep), LabelVector(std::move(kept_labels))};
}

ExpressionMatrix filter_low_abundance_genes(const ExpressionMatrix& x, std::size_t min_cells) {
  if (min_cells == 0) return x;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index g = 0; g < x.genes(); ++g) {
    const auto expressed = static_cast<std::size_t>((x.values.row(g).array() > 0.0).count());
    if (expressed >= min_cells) keep.push_back(g);
  }
  if (keep.empty()) throw InvariantError("gene filter removed every gene");
  ExpressionMatrix out;
  out.values.resize(static_cast<Eigen::Index>(keep.size()), x.cells());
  out.cell_ids = x.cell_ids;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.values.row(static_cast<Eigen::Index>(k)) = x.values.row(keep[k]);
    out.gene_ids.push_back(x.gene_ids[static_cast<std::size_t>(keep[k])]);
  }
  return out;
}

ExpressionMatrix log_normalize(const ExpressionMatrix& x) {
  ExpressionMatrix out = x;
  out.values = x.values.array().log1p().matrix();
  return out;
}

ExpressionMatrix unit_scale_columns(const ExpressionMatrix& x) {
  ExpressionMatrix out = x;
  for (Eigen::Index j = 0; j < x.cells(); ++j) {
    const double norm = x.values.col(j).norm();
    if (norm == 0.0) {
      throw InvariantError("cell '" + x.cell_ids[static_cast<std::size_t>(j)] +
                           "' is an all-zero column and cannot be scaled to unit length");
    }
    out.values.col(j) /= norm;
  }
  return out;
}

}  // namespace tnmf
