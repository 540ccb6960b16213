#include "tnmf/matrix_io.hpp"

#include <array>
#include <charconv>
#include <ostream>

#include "tnmf/error.hpp"

namespace tnmf {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

void write_dense(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& row_ids,
                 const std::vector<std::string>& col_ids, char delimiter) {
  if (row_ids.size() != static_cast<std::size_t>(m.rows()) ||
      col_ids.size() != static_cast<std::size_t>(m.cols())) {
    throw InvariantError("id lists do not match matrix shape");
  }
  for (const auto& c : col_ids) out << delimiter << c;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << row_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << delimiter << format_double(m(i, j));
    out << '\n';
  }
}

void save_dense_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                    const std::vector<std::string>& row_ids, const std::vector<std::string>& col_ids) {
  auto out = open_output(path);
  write_dense(out, m, row_ids, col_ids, ',');
}

void write_coo(std::ostream& out, const Eigen::MatrixXd& m) {
  const auto nnz = (m.array() != 0.0).count();
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) out << i << ' ' << j << ' ' << format_double(m(i, j)) << '\n';
    }
  }
}

void save_coo(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = open_output(path);
  write_coo(out, m);
}

void save_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  auto out = open_output(path);
  for (const auto& l : lines) out << l << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace tnmf
