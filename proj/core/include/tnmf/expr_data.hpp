#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tnmf {

// Genes x cells expression matrix. All entries are finite and nonnegative.
struct ExpressionMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> gene_ids;
  std::vector<std::string> cell_ids;

  Eigen::Index genes() const noexcept { return values.rows(); }
  Eigen::Index cells() const noexcept { return values.cols(); }

  // Throws InvariantError if the shape, id lists, or entries are invalid.
  void validate() const;
};

// One class label per cell. classes holds the distinct labels in first-appearance order.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  // codes()[m] is the index of labels()[m] within classes().
  const std::vector<int>& codes() const noexcept { return codes_; }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t num_classes() const noexcept { return classes_.size(); }

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> classes_;
  std::vector<int> codes_;
};

enum class MatrixFormat { DenseCsv, DenseTsv, CooTriplets };

// Accepts "dense-csv", "csv", "dense-tsv", "tsv", "coo-triplets", "coo".
MatrixFormat parse_matrix_format(std::string_view name);
std::string_view to_string(MatrixFormat format);

// Reads an expression matrix. source_name is only used in error messages.
ExpressionMatrix read_matrix(std::istream& in, MatrixFormat format,
                             const std::string& source_name = "<stream>");
ExpressionMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);

// One label per line; blank trailing lines are ignored.
LabelVector read_labels(std::istream& in, const std::string& source_name = "<stream>");
LabelVector load_labels(const std::filesystem::path& path);

// Drops cells whose class has fewer than min_cells members. Column order is kept.
std::pair<ExpressionMatrix, LabelVector> filter_rare_classes(const ExpressionMatrix& x,
                                                             const LabelVector& y,
                                                             std::size_t min_cells = 15);

// Drops genes with a nonzero value in fewer than min_cells cells. min_cells = 0 keeps all.
ExpressionMatrix filter_low_abundance_genes(const ExpressionMatrix& x, std::size_t min_cells);

// v -> ln(1 + v)
ExpressionMatrix log_normalize(const ExpressionMatrix& x);

// Scales each cell (column) to unit Euclidean norm.
ExpressionMatrix unit_scale_columns(const ExpressionMatrix& x);

}  // namespace tnmf
