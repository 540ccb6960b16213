#include "tnmf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tnmf/error.hpp"
#include "tnmf/graph_laplacian.hpp"
#include "tnmf/matrix_io.hpp"

namespace tnmf {

using nlohmann::json;

namespace {

std::vector<double> parse_zeta_list(std::string_view text) {
  std::vector<double> z;
  std::string cur;
  std::istringstream in{std::string(text)};
  while (std::getline(in, cur, ',')) {
    try {
      std::size_t used = 0;
      z.push_back(std::stod(cur, &used));
      if (used != cur.size()) throw std::invalid_argument(cur);
    } catch (const std::exception&) {
      throw InvariantError("cannot parse zeta entry '" + cur + "'");
    }
  }
  if (z.empty()) throw InvariantError("empty zeta list");
  return z;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box-Muller on the engine's raw bits keeps the stream identical across standard libraries.
double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, n))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

struct Job {
  Variant method;
  std::optional<FiltrationWeights> zeta;
};

std::string zeta_key(const Job& job) { return job.zeta ? job.zeta->to_string() : "-"; }

std::string nan_or(double v) { return std::isnan(v) ? "NA" : format_double(v); }

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "_" : out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RankPolicy

RankPolicy RankPolicy::parse(std::string_view text) {
  if (text == "classes") return {Kind::NumClasses, 0};
  if (text == "sqrt" || text == "sqrt-M") return {Kind::SqrtCells, 0};
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InvariantError("rank must be 'classes', 'sqrt' or a positive integer, got '" + std::string(text) + "'");
  }
  if (v < 1) throw InvariantError("rank must be positive");
  return {Kind::Explicit, v};
}

std::string RankPolicy::to_string() const {
  switch (kind) {
    case Kind::NumClasses: return "classes";
    case Kind::SqrtCells: return "sqrt";
    case Kind::Explicit: return std::to_string(value);
  }
  return "classes";
}

int sqrt_rank(std::size_t cells) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(cells)));
  while (r * r > cells) --r;
  while ((r + 1) * (r + 1) <= cells) ++r;
  return static_cast<int>(r);
}

int RankPolicy::resolve(std::size_t cells, std::size_t classes) const {
  switch (kind) {
    case Kind::NumClasses:
      if (classes == 0) throw InvariantError("rank policy 'classes' needs labels or an explicit cluster count");
      return static_cast<int>(classes);
    case Kind::SqrtCells: return sqrt_rank(cells);
    case Kind::Explicit: return value;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// RunSpec <-> JSON

void RunSpec::merge_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError("<config>", 0, e.what());
  }
  if (!j.is_object()) throw ParseError("<config>", 0, "config must be a JSON object");
  try {
    if (j.contains("dataset_name")) dataset_name = j["dataset_name"].get<std::string>();
    if (j.contains("data")) data_path = j["data"].get<std::string>();
    if (j.contains("format")) format = parse_matrix_format(j["format"].get<std::string>());
    if (j.contains("labels")) labels_path = j["labels"].get<std::string>();
    if (j.contains("min_cells")) preprocess.min_cells_per_class = j["min_cells"].get<std::size_t>();
    if (j.contains("gene_min_cells")) preprocess.min_cells_per_gene = j["gene_min_cells"].get<std::size_t>();
    if (j.contains("log")) preprocess.log_normalize = j["log"].get<bool>();
    if (j.contains("scale")) preprocess.unit_scale = j["scale"].get<bool>();
    if (j.contains("methods")) {
      methods.clear();
      for (const auto& m : j["methods"]) methods.push_back(parse_variant(m.get<std::string>()));
    }
    if (j.contains("lambda")) lambda = j["lambda"].get<double>();
    if (j.contains("knn")) knn = j["knn"].get<std::size_t>();
    if (j.contains("filtrations")) filtrations = j["filtrations"].get<std::size_t>();
    if (j.contains("zeta")) {
      const auto& z = j["zeta"];
      if (z.is_string() && z.get<std::string>() == "sweep") {
        zeta_mode = ZetaMode::BinarySweep;
        zeta.clear();
      } else if (z.is_string()) {
        zeta_mode = ZetaMode::Fixed;
        zeta = parse_zeta_list(z.get<std::string>());
      } else {
        zeta_mode = ZetaMode::Fixed;
        zeta = z.get<std::vector<double>>();
      }
    }
    if (j.contains("sigma")) {
      const auto& s = j["sigma"];
      if (s.is_string() && s.get<std::string>() == "auto") {
        sigma.reset();
      } else {
        sigma = s.get<double>();
      }
    }
    if (j.contains("rank")) {
      const auto& r = j["rank"];
      rank = r.is_number_integer() ? RankPolicy::parse(std::to_string(r.get<int>()))
                                   : RankPolicy::parse(r.get<std::string>());
    }
    if (j.contains("clusters")) clusters = j["clusters"].get<int>();
    if (j.contains("max_iters")) max_iters = j["max_iters"].get<std::size_t>();
    if (j.contains("rel_tol")) rel_tol = j["rel_tol"].get<double>();
    if (j.contains("eps")) eps = j["eps"].get<double>();
    if (j.contains("restarts")) kmeans_restarts = j["restarts"].get<std::size_t>();
    if (j.contains("out")) out_dir = j["out"].get<std::string>();
    if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) threads = j["threads"].get<unsigned>();
  } catch (const json::exception& e) {
    throw ParseError("<config>", 0, e.what());
  }
}

std::string RunSpec::to_json() const {
  json j;
  j["dataset_name"] = dataset_name;
  j["data"] = data_path.string();
  j["format"] = std::string(tnmf::to_string(format));
  j["labels"] = labels_path.string();
  j["min_cells"] = preprocess.min_cells_per_class;
  j["gene_min_cells"] = preprocess.min_cells_per_gene;
  j["log"] = preprocess.log_normalize;
  j["scale"] = preprocess.unit_scale;
  j["methods"] = json::array();
  for (auto m : methods) j["methods"].push_back(std::string(tnmf::to_string(m)));
  j["lambda"] = lambda;
  j["knn"] = knn;
  j["filtrations"] = filtrations;
  if (zeta_mode == ZetaMode::BinarySweep) {
    j["zeta"] = "sweep";
  } else if (zeta.empty()) {
    j["zeta"] = "ones";
  } else {
    j["zeta"] = zeta;
  }
  if (sigma) {
    j["sigma"] = *sigma;
  } else {
    j["sigma"] = "auto";
  }
  j["rank"] = rank.to_string();
  if (clusters) j["clusters"] = *clusters;
  j["max_iters"] = max_iters;
  j["rel_tol"] = rel_tol;
  j["eps"] = eps;
  j["restarts"] = kmeans_restarts;
  j["out"] = out_dir.string();
  j["seed"] = seed;
  j["threads"] = threads;
  return j.dump(2);
}

RunSpec load_run_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open config");
  std::stringstream buf;
  buf << in.rdbuf();
  RunSpec spec;
  try {
    spec.merge_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Data preparation

Dataset load_dataset(const RunSpec& spec) {
  Dataset d;
  d.x = load_matrix(spec.data_path, spec.format);
  d.name = spec.dataset_name.empty() ? spec.data_path.stem().string() : spec.dataset_name;
  if (!spec.labels_path.empty()) {
    d.labels = load_labels(spec.labels_path);
    if (d.labels->size() != static_cast<std::size_t>(d.x.cells())) {
      throw InvariantError("labels file has " + std::to_string(d.labels->size()) + " entries but the matrix has " +
                           std::to_string(d.x.cells()) + " cells");
    }
  }
  return d;
}

PreparedData preprocess(const Dataset& data, const PreprocessOptions& options) {
  PreparedData p;
  p.x = data.x;
  p.labels = data.labels;
  if (p.labels && options.min_cells_per_class > 0) {
    auto [x, y] = filter_rare_classes(p.x, *p.labels, options.min_cells_per_class);
    p.x = std::move(x);
    p.labels = std::move(y);
    p.steps.push_back("filter_rare_classes(min_cells=" + std::to_string(options.min_cells_per_class) + ")");
  }
  if (options.min_cells_per_gene > 0) {
    p.x = filter_low_abundance_genes(p.x, options.min_cells_per_gene);
    p.steps.push_back("filter_low_abundance_genes(min_cells=" + std::to_string(options.min_cells_per_gene) + ")");
  }
  if (options.log_normalize) {
    p.x = log_normalize(p.x);
    p.steps.push_back("log_normalize(ln(1+v))");
  }
  if (options.unit_scale) {
    p.x = unit_scale_columns(p.x);
    p.steps.push_back("unit_scale_columns");
  }
  p.x.validate();
  return p;
}

Dataset generate_blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double separation,
                       std::uint64_t seed) {
  if (classes < 1 || per_class < 1 || dim < 1) throw InvariantError("blob counts must be >= 1");
  if (classes * per_class < 2) throw InvariantError("blobs need at least two cells");
  std::mt19937_64 rng(seed);
  const auto d = static_cast<Eigen::Index>(dim);

  std::vector<Eigen::VectorXd> centers;
  if (classes <= dim) {
    // Scaled axis vectors sit sqrt(2) * separation apart.
    for (std::size_t l = 0; l < classes; ++l) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
      c(static_cast<Eigen::Index>(l)) = separation;
      centers.push_back(std::move(c));
    }
  } else {
    double box = std::max(1.0, separation * static_cast<double>(classes));
    while (centers.size() < classes) {
      bool placed = false;
      for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
        Eigen::VectorXd c(d);
        for (Eigen::Index i = 0; i < d; ++i) c(i) = box * uniform01(rng);
        placed = std::all_of(centers.begin(), centers.end(),
                             [&](const Eigen::VectorXd& o) { return (o - c).norm() >= separation; });
        if (placed) centers.push_back(std::move(c));
      }
      if (!placed) box *= 2.0;
    }
  }

  Dataset out;
  out.name = "blobs";
  const auto m = static_cast<Eigen::Index>(classes * per_class);
  out.x.values.resize(d, m);
  std::vector<std::string> labels;
  Eigen::Index col = 0;
  for (std::size_t l = 0; l < classes; ++l) {
    for (std::size_t p = 0; p < per_class; ++p, ++col) {
      for (Eigen::Index i = 0; i < d; ++i) {
        out.x.values(i, col) = std::max(0.0, centers[l](i) + standard_normal(rng));
      }
      out.x.cell_ids.push_back("cell" + std::to_string(col));
      labels.push_back("type" + std::to_string(l));
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) out.x.gene_ids.push_back("gene" + std::to_string(i));
  out.labels = LabelVector(std::move(labels));
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark

BenchmarkResult run_benchmark(const RunSpec& spec) { return run_benchmark(spec, load_dataset(spec)); }

BenchmarkResult run_benchmark(const RunSpec& spec, const Dataset& data) {
  if (spec.methods.empty()) throw InvariantError("no methods configured");
  BenchmarkResult result;
  result.data = preprocess(data, spec.preprocess);
  const auto& prepared = result.data;
  const Eigen::MatrixXd& x = prepared.x.values;
  const auto cells = static_cast<std::size_t>(x.cols());
  const bool labelled = prepared.labels.has_value();

  if (labelled) {
    result.num_clusters = static_cast<int>(prepared.labels->num_classes());
  } else if (spec.clusters) {
    result.num_clusters = *spec.clusters;
  } else if (spec.rank.kind == RankPolicy::Kind::Explicit) {
    result.num_clusters = spec.rank.value;
  } else {
    throw InvariantError("labels are withheld: set an explicit rank or cluster count");
  }
  result.rank = spec.rank.resolve(cells, static_cast<std::size_t>(result.num_clusters));

  const bool any_topological = std::any_of(spec.methods.begin(), spec.methods.end(), is_topological);
  const bool any_heat = std::any_of(spec.methods.begin(), spec.methods.end(), [](Variant v) {
    return v == Variant::GNMF || v == Variant::rGNMF;
  });

  DistanceMatrix dist;
  if (any_topological || any_heat) dist = pairwise_distances(x, spec.threads);

  std::shared_ptr<const GraphRegularizer> heat_graph;
  if (any_heat) {
    result.sigma = spec.sigma ? *spec.sigma : mean_squared_knn_distance(dist, spec.knn);
    if (!(result.sigma > 0.0)) {
      result.sigma = 1.0;
      result.warnings.push_back("kNN distances are all zero; heat-kernel sigma set to 1");
    }
    heat_graph = std::make_shared<const GraphRegularizer>(heat_kernel_knn_graph(dist, spec.knn, result.sigma));
  }

  std::optional<FiltrationWeights> fixed_zeta;
  if (spec.zeta_mode == ZetaMode::Fixed && !spec.zeta.empty()) fixed_zeta = FiltrationWeights(spec.zeta);

  // Same initialization for every method.
  const FactorPair init = nndsvda_init(x, result.rank);

  std::vector<Job> jobs;
  std::vector<std::size_t> job_method;  // index into spec.methods
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    const Variant v = spec.methods[mi];
    if (!is_topological(v)) {
      jobs.push_back({v, std::nullopt});
      job_method.push_back(mi);
      continue;
    }
    const std::size_t levels = uses_knn_filtration(v) ? spec.knn : spec.filtrations;
    if (spec.zeta_mode == ZetaMode::BinarySweep) {
      if (levels >= 63) throw InvariantError("too many filtration levels for a binary sweep");
      const unsigned long long count = (1ULL << levels) - 1;
      for (unsigned long long mask = 1; mask <= count; ++mask) {
        jobs.push_back({v, FiltrationWeights::from_mask(mask, levels)});
        job_method.push_back(mi);
      }
    } else {
      if (fixed_zeta && fixed_zeta->levels() != levels) {
        throw InvariantError(std::string(to_string(v)) + " uses " + std::to_string(levels) +
                             " filtration levels but zeta has " + std::to_string(fixed_zeta->levels()));
      }
      jobs.push_back({v, fixed_zeta ? *fixed_zeta : FiltrationWeights::ones(levels)});
      job_method.push_back(mi);
    }
  }

  const bool keep_all = spec.zeta_mode == ZetaMode::Fixed;
  auto run_job = [&](const Job& job, bool keep) {
    MethodOutcome out;
    out.row.dataset = data.name;
    out.row.method = job.method;
    out.row.zeta = zeta_key(job);
    try {
      MethodConfig cfg;
      cfg.variant = job.method;
      cfg.rank = result.rank;
      cfg.lambda = spec.lambda;
      cfg.max_iters = spec.max_iters;
      cfg.rel_tol = spec.rel_tol;
      cfg.eps = spec.eps;
      cfg.seed = spec.seed;
      if (job.method == Variant::GNMF || job.method == Variant::rGNMF) {
        cfg.graph = heat_graph;
      } else if (is_topological(job.method)) {
        cfg.graph = std::make_shared<const GraphRegularizer>(uses_knn_filtration(job.method)
                                                                 ? knn_persistent_laplacian(dist, *job.zeta)
                                                                 : cutoff_persistent_laplacian(dist, *job.zeta));
      }
      const auto start = std::chrono::steady_clock::now();
      FactorPair f = factorize(x, cfg, init);
      out.row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out.row.final_objective = f.objective_trace.back();
      out.row.iterations = f.iters_run;

      out.clusters = kmeans(f.H, result.num_clusters, spec.seed, KMeansOptions{spec.kmeans_restarts, 300});
      out.row.inertia = out.clusters.inertia;
      if (labelled) {
        const auto table = contingency(*prepared.labels, out.clusters);
        out.row.ari = ari(table);
        out.row.nmi = nmi(table);
        out.row.purity = purity(table);
        out.row.accuracy = accuracy(table);
        if (keep) out.report = evaluate(f.H, prepared.x.cell_ids, *prepared.labels, out.clusters);
      } else {
        out.row.ari = out.row.nmi = out.row.purity = out.row.accuracy = std::nan("");
      }
      if (keep) out.factors = std::move(f);
    } catch (const Error& e) {
      throw Error("[" + data.name + " " + std::string(to_string(job.method)) + " zeta=" + out.row.zeta + "] " +
                  e.what());
    }
    return out;
  };

  std::vector<MethodOutcome> done(jobs.size());
  parallel_for(jobs.size(), spec.threads, [&](std::size_t i) { done[i] = run_job(jobs[i], keep_all); });

  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (job_method[i] != mi) continue;
      if (spec.zeta_mode == ZetaMode::BinarySweep && is_topological(jobs[i].method)) {
        result.candidates.push_back(done[i].row);
      }
      if (!best) {
        best = i;
        continue;
      }
      const auto& cand = done[i].row;
      const auto& cur = done[*best].row;
      const bool better = labelled ? cand.ari > cur.ari : cand.inertia < cur.inertia;
      if (better) best = i;
    }
    if (keep_all || !is_topological(jobs[*best].method)) {
      if (!keep_all) {
        result.outcomes.push_back(run_job(jobs[*best], true));
      } else {
        result.outcomes.push_back(std::move(done[*best]));
      }
    } else {
      // Sweep candidates were run without keeping factors; rerunning is deterministic.
      result.outcomes.push_back(run_job(jobs[*best], true));
    }
  }

  for (const auto& o : result.outcomes) {
    if (o.report && !o.report->rs.warning.empty()) {
      result.warnings.push_back(std::string(to_string(o.row.method)) + ": " + o.report->rs.warning);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Outputs

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "dataset,method,zeta,ARI,NMI,purity,ACC,objective,iterations\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << to_string(r.method) << ",\"" << r.zeta << "\"," << nan_or(r.ari) << ','
        << nan_or(r.nmi) << ',' << nan_or(r.purity) << ',' << nan_or(r.accuracy) << ','
        << format_double(r.final_objective) << ',' << r.iterations << '\n';
  }
  return out.str();
}

void write_benchmark_outputs(const BenchmarkResult& result, const RunSpec& spec,
                             const std::filesystem::path& out_dir) {
  std::vector<ResultRow> rows;
  for (const auto& o : result.outcomes) rows.push_back(o.row);
  open_output(out_dir / "results.csv") << results_csv(rows);
  if (spec.zeta_mode == ZetaMode::BinarySweep) open_output(out_dir / "sweep.csv") << results_csv(result.candidates);

  {
    auto t = open_output(out_dir / "timings.csv");
    t << "dataset,method,zeta,wall_seconds\n";
    for (const auto& r : rows) {
      t << r.dataset << ',' << to_string(r.method) << ",\"" << r.zeta << "\"," << r.wall_seconds << '\n';
    }
  }

  json meta;
  meta["spec"] = json::parse(spec.to_json());
  meta["preprocessing"] = result.data.steps;
  meta["genes"] = result.data.x.genes();
  meta["cells"] = result.data.x.cells();
  meta["rank"] = result.rank;
  meta["clusters"] = result.num_clusters;
  if (result.sigma > 0.0) meta["sigma"] = result.sigma;
  meta["solver_threads"] = 1;
  meta["job_threads"] = spec.threads;
  meta["warnings"] = result.warnings;
  meta["runs"] = json::array();
  for (const auto& o : result.outcomes) {
    json r;
    r["method"] = std::string(to_string(o.row.method));
    r["zeta"] = o.row.zeta;
    r["iterations"] = o.row.iterations;
    r["final_objective"] = o.row.final_objective;
    r["wall_seconds"] = o.row.wall_seconds;
    r["kmeans_inertia"] = o.row.inertia;
    if (o.report) {
      r["ARI"] = o.report->ari;
      r["NMI"] = o.report->nmi;
      r["purity"] = o.report->purity;
      r["ACC"] = o.report->accuracy;
      r["RI"] = o.report->rs.ri;
      r["SI"] = o.report->rs.si;
      r["RSD"] = o.report->rs.rsd;
      r["RSI"] = o.report->rs.rsi;
      r["CRI"] = o.report->rs.cri;
      r["CSI"] = o.report->rs.csi;
    }
    meta["runs"].push_back(std::move(r));
  }
  open_output(out_dir / "metadata.json") << meta.dump(2) << '\n';

  for (const auto& o : result.outcomes) {
    const auto base = sanitize(std::string(to_string(o.row.method)));
    if (o.report) write_sample_scores(*o.report, out_dir / ("scores_" + base + ".csv"));
  }
}

void export_metagenes(const FactorPair& wh, const std::vector<std::string>& cell_ids,
                      const std::filesystem::path& out) {
  std::vector<std::string> rows;
  for (Eigen::Index i = 0; i < wh.H.rows(); ++i) rows.push_back("metagene" + std::to_string(i + 1));
  save_dense_csv(out, wh.H, rows, cell_ids);
}

void write_sample_scores(const EvalReport& report, const std::filesystem::path& out) {
  auto f = open_output(out);
  f << "sample,true_label,cluster,aligned_label,R,S\n";
  for (std::size_t m = 0; m < report.sample_ids.size(); ++m) {
    f << report.sample_ids[m] << ',' << report.classes[static_cast<std::size_t>(report.true_codes[m])] << ','
      << report.cluster_labels[m] << ',' << report.aligned_name(m) << ',' << format_double(report.rs.r_scores[m])
      << ',' << format_double(report.rs.s_scores[m]) << '\n';
  }
}

EvalReport read_sample_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open scores file");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing header");
  struct Row {
    std::string sample, truth, aligned;
    int cluster;
    double r, s;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw ParseError(path.string(), line_no, "expected 6 fields");
    try {
      rows.push_back({f[0], f[1], f[3], std::stoi(f[2]), std::stod(f[4]), std::stod(f[5])});
    } catch (const std::exception&) {
      throw ParseError(path.string(), line_no, "malformed number");
    }
  }
  EvalReport rep;
  std::vector<std::string> truth;
  for (const auto& r : rows) truth.push_back(r.truth);
  const LabelVector y(truth);
  rep.classes = y.classes();
  rep.true_codes = y.codes();
  for (const auto& r : rows) {
    rep.sample_ids.push_back(r.sample);
    rep.cluster_labels.push_back(r.cluster);
    const auto it = std::find(rep.classes.begin(), rep.classes.end(), r.aligned);
    rep.aligned_codes.push_back(it == rep.classes.end() ? -1 : static_cast<int>(it - rep.classes.begin()));
    rep.rs.r_scores.push_back(r.r);
    rep.rs.s_scores.push_back(r.s);
  }
  return rep;
}

}  // namespace tnmf
