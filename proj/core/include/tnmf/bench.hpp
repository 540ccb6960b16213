#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tnmf/cluster_eval.hpp"
#include "tnmf/expr_data.hpp"
#include "tnmf/nmf.hpp"

namespace tnmf {

// How the factorization rank is chosen for a dataset.
struct RankPolicy {
  enum class Kind { NumClasses, SqrtCells, Explicit };
  Kind kind = Kind::NumClasses;
  int value = 0;  // used by Explicit

  // "classes", "sqrt" or a positive integer.
  static RankPolicy parse(std::string_view text);
  std::string to_string() const;
  int resolve(std::size_t cells, std::size_t classes) const;
};

// floor(sqrt(cells)), computed exactly.
int sqrt_rank(std::size_t cells);

struct PreprocessOptions {
  std::size_t min_cells_per_class = 15;  // 0 disables the class filter
  std::size_t min_cells_per_gene = 0;    // 0 disables the gene filter
  bool log_normalize = true;
  bool unit_scale = true;
};

enum class ZetaMode { Fixed, BinarySweep };

struct RunSpec {
  std::string dataset_name;  // defaults to the data file stem
  std::filesystem::path data_path;
  MatrixFormat format = MatrixFormat::DenseCsv;
  std::filesystem::path labels_path;  // empty: labels withheld

  PreprocessOptions preprocess;
  std::vector<Variant> methods{std::begin(kAllVariants), std::end(kAllVariants)};

  double lambda = 1.0;
  std::size_t knn = 8;          // heat-kernel neighbors and kNN filtration levels
  std::size_t filtrations = 8;  // cutoff filtration levels
  ZetaMode zeta_mode = ZetaMode::Fixed;
  std::vector<double> zeta;  // fixed mode; empty means all ones
  std::optional<double> sigma;  // empty: mean squared kNN distance
  RankPolicy rank;
  std::optional<int> clusters;  // k-means clusters when labels are withheld

  std::size_t max_iters = 500;
  double rel_tol = 1e-6;
  double eps = 1e-10;
  std::size_t kmeans_restarts = 10;

  std::filesystem::path out_dir = "tnmf-out";
  std::uint64_t seed = 0;
  unsigned threads = 1;

  // Overrides fields present in a JSON document with the same field names.
  void merge_json(std::string_view json_text);
  std::string to_json() const;
};

RunSpec load_run_spec(const std::filesystem::path& path);

struct Dataset {
  std::string name;
  ExpressionMatrix x;
  std::optional<LabelVector> labels;
};

Dataset load_dataset(const RunSpec& spec);

// Filter classes, filter genes, log, unit-scale. `steps` records what ran, in order.
struct PreparedData {
  ExpressionMatrix x;
  std::optional<LabelVector> labels;
  std::vector<std::string> steps;
};

PreparedData preprocess(const Dataset& data, const PreprocessOptions& options);

// Nonnegative Gaussian blobs (unit noise) around class centers at pairwise
// distance >= separation. Genes are rows, one class per blob.
Dataset generate_blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double separation,
                       std::uint64_t seed);

// One (dataset, method, zeta) run. Metrics are NaN when labels are withheld.
struct ResultRow {
  std::string dataset;
  Variant method = Variant::NMF;
  std::string zeta;  // "-" for methods without a filtration
  double ari = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  double accuracy = 0.0;
  double final_objective = 0.0;
  std::size_t iterations = 0;
  double inertia = 0.0;
  double wall_seconds = 0.0;
};

struct MethodOutcome {
  ResultRow row;
  FactorPair factors;
  ClusterAssignment clusters;
  std::optional<EvalReport> report;
};

struct BenchmarkResult {
  PreparedData data;
  int rank = 0;
  int num_clusters = 0;
  double sigma = 0.0;
  std::vector<MethodOutcome> outcomes;  // one per configured method, in method order
  std::vector<ResultRow> candidates;    // every sweep candidate (sweep mode only)
  std::vector<std::string> warnings;
};

BenchmarkResult run_benchmark(const RunSpec& spec);
BenchmarkResult run_benchmark(const RunSpec& spec, const Dataset& data);

// results.csv, sweep.csv (sweep mode), timings.csv, metadata.json, scores_<method>.csv.
void write_benchmark_outputs(const BenchmarkResult& result, const RunSpec& spec,
                             const std::filesystem::path& out_dir);

std::string results_csv(const std::vector<ResultRow>& rows);

// Writes H (rank x cells) as dense-csv with cell ids as the header.
void export_metagenes(const FactorPair& wh, const std::vector<std::string>& cell_ids,
                      const std::filesystem::path& out);

// Per-sample scores: sample id, true label, cluster, aligned label, R, S.
void write_sample_scores(const EvalReport& report, const std::filesystem::path& out);

// Reads a file written by write_sample_scores. Only the per-sample fields are restored.
EvalReport read_sample_scores(const std::filesystem::path& path);

// One RS scatter (SVG) plus its backing CSV per true class. Returns the files written.
std::vector<std::filesystem::path> emit_plots(const EvalReport& report, const std::filesystem::path& out_dir,
                                              const std::string& prefix = "rs");

}  // namespace tnmf
