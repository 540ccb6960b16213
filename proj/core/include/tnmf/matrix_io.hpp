#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

namespace tnmf {

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

// Dense table: header row is an empty cell followed by col_ids, then one row per row_id.
void write_dense(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& row_ids,
                 const std::vector<std::string>& col_ids, char delimiter = ',');
void save_dense_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                    const std::vector<std::string>& row_ids, const std::vector<std::string>& col_ids);

// "rows cols nnz" header followed by "i j v" lines, 0-based, row-major order.
void write_coo(std::ostream& out, const Eigen::MatrixXd& m);
void save_coo(const std::filesystem::path& path, const Eigen::MatrixXd& m);

void save_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

// Opens path for writing, creating parent directories. Throws Error on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace tnmf
