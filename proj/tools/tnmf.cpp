// tnmf: command-line front end for the topological NMF benchmark.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tnmf/bench.hpp"
#include "tnmf/error.hpp"
#include "tnmf/matrix_io.hpp"

namespace {

// Flags shared by every subcommand that runs factorizations. Anything left
// unset keeps the value from --config (or the built-in default).
struct RunFlags {
  std::optional<std::string> config;
  std::optional<std::string> data;
  std::optional<std::string> labels;
  std::optional<std::string> format;
  std::optional<std::string> name;
  std::vector<std::string> methods;
  std::optional<std::string> rank;
  std::optional<int> clusters;
  std::optional<double> lambda;
  std::optional<std::size_t> knn;
  std::optional<std::size_t> filtrations;
  std::optional<std::string> zeta;
  std::optional<std::string> sigma;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> max_iters;
  std::optional<double> tol;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> min_cells;
  std::optional<std::size_t> gene_min_cells;
  std::optional<unsigned> threads;
  bool no_log = false;
  bool no_scale = false;
};

void add_data_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config, "JSON run configuration; flags override it")->check(CLI::ExistingFile);
  app->add_option("--data", f.data, "expression matrix (genes x cells)");
  app->add_option("--labels", f.labels, "one cell-type label per line, in cell order");
  app->add_option("--format", f.format, "dense-csv | dense-tsv | coo-triplets");
  app->add_option("--name", f.name, "dataset name used in the result tables");
  app->add_option("--min-cells", f.min_cells, "drop classes with fewer cells (default 15, 0 = keep all)");
  app->add_option("--gene-min-cells", f.gene_min_cells, "drop genes expressed in fewer cells (default 0)");
  app->add_flag("--no-log", f.no_log, "skip ln(1+x)");
  app->add_flag("--no-scale", f.no_scale, "skip unit-norm column scaling");
  app->add_option("--out", f.out, "output directory");
}

void add_method_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--method", f.methods, "method to run (repeatable; default: all eight)");
  app->add_option("--rank", f.rank, "classes | sqrt | <int>");
  app->add_option("--clusters", f.clusters, "k-means clusters when labels are withheld");
  app->add_option("--lambda", f.lambda, "graph regularization weight (default 1.0)");
  app->add_option("--knn", f.knn, "neighbors for the heat kernel and kNN filtration levels (default 8)");
  app->add_option("--filtrations", f.filtrations, "cutoff filtration levels (default 8)");
  app->add_option("--zeta", f.zeta, "comma-separated level weights, e.g. 1,0,1, or 'sweep'");
  app->add_option("--sigma", f.sigma, "heat-kernel width: auto | <float>");
  app->add_option("--seed", f.seed, "master seed (default 0)");
  app->add_option("--max-iters", f.max_iters, "iteration cap per factorization (default 500)");
  app->add_option("--tol", f.tol, "relative objective tolerance (default 1e-6)");
  app->add_option("--restarts", f.restarts, "k-means restarts (default 10)");
  app->add_option("--threads", f.threads, "concurrent (method, zeta) runs (default 1)");
}

tnmf::RunSpec build_spec(const RunFlags& f) {
  tnmf::RunSpec spec = f.config ? tnmf::load_run_spec(*f.config) : tnmf::RunSpec{};
  if (f.data) spec.data_path = *f.data;
  if (f.labels) spec.labels_path = *f.labels;
  if (f.format) spec.format = tnmf::parse_matrix_format(*f.format);
  if (f.name) spec.dataset_name = *f.name;
  if (!f.methods.empty()) {
    spec.methods.clear();
    for (const auto& m : f.methods) spec.methods.push_back(tnmf::parse_variant(m));
  }
  if (f.rank) spec.rank = tnmf::RankPolicy::parse(*f.rank);
  if (f.clusters) spec.clusters = *f.clusters;
  if (f.lambda) spec.lambda = *f.lambda;
  if (f.knn) spec.knn = *f.knn;
  if (f.filtrations) spec.filtrations = *f.filtrations;
  // Same parser as the config file, so "1,0,1" and "sweep" behave identically in both.
  if (f.zeta) spec.merge_json(nlohmann::json{{"zeta", *f.zeta}}.dump());
  if (f.sigma) {
    if (*f.sigma == "auto") {
      spec.sigma.reset();
    } else {
      try {
        spec.sigma = std::stod(*f.sigma);
      } catch (const std::exception&) {
        throw tnmf::InvariantError("--sigma must be 'auto' or a number");
      }
    }
  }
  if (f.seed) spec.seed = *f.seed;
  if (f.out) spec.out_dir = *f.out;
  if (f.max_iters) spec.max_iters = *f.max_iters;
  if (f.tol) spec.rel_tol = *f.tol;
  if (f.restarts) spec.kmeans_restarts = *f.restarts;
  if (f.min_cells) spec.preprocess.min_cells_per_class = *f.min_cells;
  if (f.gene_min_cells) spec.preprocess.min_cells_per_gene = *f.gene_min_cells;
  if (f.no_log) spec.preprocess.log_normalize = false;
  if (f.no_scale) spec.preprocess.unit_scale = false;
  if (f.threads) spec.threads = *f.threads;
  if (spec.data_path.empty()) throw tnmf::InvariantError("no input matrix: pass --data or set \"data\" in --config");
  return spec;
}

void print_summary(const tnmf::BenchmarkResult& result) {
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::vector<tnmf::ResultRow> rows;
  for (const auto& o : result.outcomes) rows.push_back(o.row);
  std::cout << tnmf::results_csv(rows);
}

int cmd_run(const RunFlags& flags, bool force_sweep, bool plots) {
  tnmf::RunSpec spec = build_spec(flags);
  if (force_sweep) {
    spec.zeta_mode = tnmf::ZetaMode::BinarySweep;
    spec.zeta.clear();
  }
  const auto result = tnmf::run_benchmark(spec);
  tnmf::write_benchmark_outputs(result, spec, spec.out_dir);
  if (plots) {
    for (const auto& o : result.outcomes) {
      if (o.report) tnmf::emit_plots(*o.report, spec.out_dir / "plots", std::string(tnmf::to_string(o.row.method)));
    }
  }
  print_summary(result);
  return 0;
}

int cmd_prep(const RunFlags& flags) {
  const tnmf::RunSpec spec = build_spec(flags);
  const auto data = tnmf::load_dataset(spec);
  const auto prepared = tnmf::preprocess(data, spec.preprocess);
  tnmf::save_dense_csv(spec.out_dir / "matrix.csv", prepared.x.values, prepared.x.gene_ids, prepared.x.cell_ids);
  if (prepared.labels) tnmf::save_lines(spec.out_dir / "labels.txt", prepared.labels->labels());
  tnmf::save_lines(spec.out_dir / "steps.txt", prepared.steps);
  std::cout << prepared.x.genes() << " genes x " << prepared.x.cells() << " cells written to "
            << (spec.out_dir / "matrix.csv").string() << '\n';
  return 0;
}

int cmd_export(const RunFlags& flags) {
  tnmf::RunSpec spec = build_spec(flags);
  if (!flags.rank) spec.rank = tnmf::RankPolicy::parse("sqrt");
  if (flags.methods.empty()) spec.methods = {tnmf::Variant::krTNMF};
  const auto result = tnmf::run_benchmark(spec);
  for (const auto& o : result.outcomes) {
    const auto path = spec.out_dir / ("metagenes_" + std::string(tnmf::to_string(o.row.method)) + ".csv");
    tnmf::export_metagenes(o.factors, result.data.x.cell_ids, path);
    std::cout << path.string() << " (" << o.factors.H.rows() << " meta-genes)\n";
  }
  return 0;
}

int cmd_plot(const std::string& scores, const std::string& out, const std::string& prefix) {
  const auto report = tnmf::read_sample_scores(scores);
  for (const auto& p : tnmf::emit_plots(report, out, prefix)) std::cout << p.string() << '\n';
  return 0;
}

int cmd_blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double separation, std::uint64_t seed,
              const std::string& out) {
  const auto d = tnmf::generate_blobs(classes, per_class, dim, separation, seed);
  const std::filesystem::path dir(out);
  tnmf::save_dense_csv(dir / "matrix.csv", d.x.values, d.x.gene_ids, d.x.cell_ids);
  tnmf::save_lines(dir / "labels.txt", d.labels->labels());
  std::cout << (dir / "matrix.csv").string() << '\n' << (dir / "labels.txt").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological and graph-regularized NMF for single-cell clustering"};
  app.require_subcommand(1);

  RunFlags prep_flags;
  auto* prep = app.add_subcommand("prep", "load, filter, log and scale a dataset, then write it back out");
  add_data_flags(prep, prep_flags);

  RunFlags run_flags;
  bool run_plots = false;
  auto* run = app.add_subcommand("run", "benchmark factorization methods and score their clusterings");
  add_data_flags(run, run_flags);
  add_method_flags(run, run_flags);
  run->add_flag("--plots", run_plots, "also write RS plots under <out>/plots");

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "run with every binary filtration weighting");
  add_data_flags(sweep, sweep_flags);
  add_method_flags(sweep, sweep_flags);

  RunFlags export_flags;
  auto* exp = app.add_subcommand("export", "write H as meta-genes (rank defaults to floor(sqrt(cells)))");
  add_data_flags(exp, export_flags);
  add_method_flags(exp, export_flags);

  std::string scores_path, plot_out = "plots", plot_prefix = "rs";
  auto* plot = app.add_subcommand("plot", "render RS scatter plots from a per-sample scores CSV");
  plot->add_option("scores", scores_path, "scores_<method>.csv from 'run'")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "output directory");
  plot->add_option("--prefix", plot_prefix, "file name prefix");

  std::size_t blob_classes = 3, blob_per_class = 50, blob_dim = 30;
  double blob_sep = 10.0;
  std::uint64_t blob_seed = 0;
  std::string blob_out = "blobs";
  auto* blobs = app.add_subcommand("blobs", "generate a synthetic Gaussian-blob dataset");
  blobs->add_option("--classes", blob_classes, "number of blobs")->capture_default_str();
  blobs->add_option("--per-class", blob_per_class, "cells per blob")->capture_default_str();
  blobs->add_option("--dim", blob_dim, "genes")->capture_default_str();
  blobs->add_option("--separation", blob_sep, "minimum distance between centers")->capture_default_str();
  blobs->add_option("--seed", blob_seed)->capture_default_str();
  blobs->add_option("--out", blob_out, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prep) return cmd_prep(prep_flags);
    if (*run) return cmd_run(run_flags, false, run_plots);
    if (*sweep) return cmd_run(sweep_flags, true, false);
    if (*exp) return cmd_export(export_flags);
    if (*plot) return cmd_plot(scores_path, plot_out, plot_prefix);
    if (*blobs) return cmd_blobs(blob_classes, blob_per_class, blob_dim, blob_sep, blob_seed, blob_out);
  } catch (const tnmf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
