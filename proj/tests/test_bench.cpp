#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tnmf/bench.hpp"
#include "tnmf/error.hpp"

using namespace tnmf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tnmf_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunSpec quick_spec() {
  RunSpec spec;
  spec.max_iters = 100;
  spec.kmeans_restarts = 3;
  return spec;
}

}  // namespace

TEST_CASE("rank policy") {
  CHECK(sqrt_rank(758) == 27);
  CHECK(sqrt_rank(49) == 7);
  CHECK(sqrt_rank(4) == 2);
  CHECK(sqrt_rank(48) == 6);
  CHECK(RankPolicy::parse("sqrt").resolve(758, 5) == 27);
  CHECK(RankPolicy::parse("classes").resolve(758, 5) == 5);
  CHECK(RankPolicy::parse("12").resolve(758, 5) == 12);
  CHECK_THROWS_AS(RankPolicy::parse("0"), InvariantError);
  CHECK_THROWS_AS(RankPolicy::parse("many"), InvariantError);
  CHECK_THROWS_AS(RankPolicy::parse("classes").resolve(10, 0), InvariantError);
}

TEST_CASE("run spec JSON") {
  RunSpec spec;
  spec.merge_json(R"({"methods": ["kTNMF", "NMF"], "lambda": 0.5, "zeta": "1,0,1", "rank": "sqrt", "seed": 9,
                      "sigma": 2.0, "min_cells": 3})");
  CHECK(spec.methods == std::vector<Variant>{Variant::kTNMF, Variant::NMF});
  CHECK(spec.lambda == 0.5);
  CHECK(spec.zeta == std::vector<double>{1, 0, 1});
  CHECK(spec.rank.kind == RankPolicy::Kind::SqrtCells);
  CHECK(spec.seed == 9);
  CHECK(spec.sigma == 2.0);
  CHECK(spec.preprocess.min_cells_per_class == 3);

  RunSpec round;
  round.merge_json(spec.to_json());
  CHECK(round.to_json() == spec.to_json());

  spec.merge_json(R"({"zeta": "sweep", "sigma": "auto"})");
  CHECK(spec.zeta_mode == ZetaMode::BinarySweep);
  CHECK(!spec.sigma);
  CHECK_THROWS_AS(spec.merge_json("{not json"), ParseError);
  CHECK_THROWS_AS(spec.merge_json(R"({"lambda": "big"})"), ParseError);
  CHECK_THROWS_AS(spec.merge_json(R"({"methods": ["SVD"]})"), InvariantError);
}

TEST_CASE("blob generator") {
  const auto b = generate_blobs(3, 50, 30, 10.0, 0);
  CHECK(b.x.genes() == 30);
  CHECK(b.x.cells() == 150);
  CHECK((b.x.values.array() >= 0.0).all());
  CHECK(b.labels->num_classes() == 3);

  SUBCASE("raw k-means already recovers the blobs") {
    const auto c = kmeans(b.x.values, 3, 0);
    CHECK(ari(contingency(*b.labels, c)) == 1.0);
  }
  SUBCASE("more classes than dimensions") {
    const auto many = generate_blobs(6, 4, 2, 5.0, 3);
    CHECK(many.x.cells() == 24);
    CHECK((many.x.values.array() >= 0.0).all());
  }
  SUBCASE("single class and the rare-class filter") {
    const auto one = generate_blobs(1, 15, 4, 10.0, 0);
    CHECK_NOTHROW(filter_rare_classes(one.x, *one.labels, 15));
    const auto small = generate_blobs(1, 14, 4, 10.0, 0);
    CHECK_THROWS_AS(filter_rare_classes(small.x, *small.labels, 15), InvariantError);
  }
  SUBCASE("zero separation is close to chance") {
    const auto null = generate_blobs(3, 50, 30, 0.0, 0);
    const auto c = kmeans(null.x.values, 3, 0);
    CHECK(std::abs(ari(contingency(*null.labels, c))) < 0.1);
  }
  SUBCASE("seeded") {
    CHECK(generate_blobs(2, 5, 3, 4.0, 7).x.values == generate_blobs(2, 5, 3, 4.0, 7).x.values);
    CHECK(generate_blobs(2, 5, 3, 4.0, 7).x.values != generate_blobs(2, 5, 3, 4.0, 8).x.values);
  }
}

TEST_CASE("benchmark on blobs") {
  const auto data = generate_blobs(3, 20, 12, 10.0, 2);
  auto spec = quick_spec();
  const auto result = run_benchmark(spec, data);
  REQUIRE(result.outcomes.size() == 8);
  CHECK(result.rank == 3);
  CHECK(result.num_clusters == 3);
  CHECK(result.sigma > 0.0);
  for (const auto& o : result.outcomes) {
    CAPTURE(to_string(o.row.method));
    CHECK(o.row.ari == 1.0);
    CHECK(o.row.purity >= o.row.accuracy);
    CHECK(o.factors.H.cols() == 60);
    REQUIRE(o.report);
    CHECK(o.report->ari == o.row.ari);
  }
  CHECK(results_csv({result.outcomes[0].row}) == results_csv({run_benchmark(spec, data).outcomes[0].row}));
}

TEST_CASE("binary sweep enumerates every nonzero mask") {
  const auto data = generate_blobs(2, 15, 6, 8.0, 4);
  auto spec = quick_spec();
  spec.methods = {Variant::TNMF, Variant::krTNMF, Variant::NMF};
  spec.zeta_mode = ZetaMode::BinarySweep;
  spec.filtrations = 3;
  spec.knn = 3;
  spec.threads = 3;
  const auto result = run_benchmark(spec, data);
  CHECK(result.candidates.size() == 14);
  std::set<std::string> tnmf_masks;
  for (const auto& r : result.candidates) {
    CHECK(is_topological(r.method));
    if (r.method == Variant::TNMF) tnmf_masks.insert(r.zeta);
  }
  CHECK(tnmf_masks.size() == 7);
  CHECK(result.outcomes.size() == 3);
  CHECK(result.outcomes[2].row.zeta == "-");

  // Serial and threaded runs agree.
  spec.threads = 1;
  const auto serial = run_benchmark(spec, data);
  CHECK(results_csv(serial.candidates) == results_csv(result.candidates));
}

TEST_CASE("fixed zeta must match the filtration length") {
  const auto data = generate_blobs(2, 15, 6, 8.0, 4);
  auto spec = quick_spec();
  spec.methods = {Variant::kTNMF};
  spec.zeta = {1, 1};
  CHECK_THROWS_AS(run_benchmark(spec, data), InvariantError);
}

TEST_CASE("withheld labels") {
  auto data = generate_blobs(2, 15, 6, 8.0, 4);
  data.labels.reset();
  auto spec = quick_spec();
  spec.methods = {Variant::NMF};
  CHECK_THROWS_AS(run_benchmark(spec, data), InvariantError);
  spec.clusters = 2;
  spec.rank = RankPolicy::parse("2");
  const auto result = run_benchmark(spec, data);
  CHECK(std::isnan(result.outcomes[0].row.ari));
  CHECK(results_csv({result.outcomes[0].row}).find("NA") != std::string::npos);
}

TEST_CASE("errors are tagged with the run") {
  const auto data = generate_blobs(2, 15, 6, 8.0, 4);
  auto spec = quick_spec();
  spec.methods = {Variant::GNMF};
  spec.lambda = -1;
  try {
    run_benchmark(spec, data);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("GNMF") != std::string::npos);
  }
}

TEST_CASE("outputs") {
  const auto dir = scratch("outputs");
  const auto data = generate_blobs(2, 16, 5, 8.0, 5);
  auto spec = quick_spec();
  spec.methods = {Variant::NMF, Variant::kTNMF};
  const auto result = run_benchmark(spec, data);
  write_benchmark_outputs(result, spec, dir);
  for (const char* f : {"results.csv", "timings.csv", "metadata.json", "scores_NMF.csv", "scores_kTNMF.csv"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK(!fs::exists(dir / "sweep.csv"));
  const auto csv = slurp(dir / "results.csv");
  CHECK(csv.rfind("dataset,method,zeta,ARI,NMI,purity,ACC,objective,iterations\n", 0) == 0);

  SUBCASE("meta-genes") {
    export_metagenes(result.outcomes[0].factors, result.data.x.cell_ids, dir / "h.csv");
    const auto back = load_matrix(dir / "h.csv", MatrixFormat::DenseCsv);
    CHECK(back.values == result.outcomes[0].factors.H);
    CHECK(back.gene_ids.front() == "metagene1");
    CHECK(back.cell_ids == result.data.x.cell_ids);
  }
  SUBCASE("scores round trip") {
    const auto back = read_sample_scores(dir / "scores_NMF.csv");
    const auto& rep = *result.outcomes[0].report;
    CHECK(back.sample_ids == rep.sample_ids);
    CHECK(back.aligned_codes == rep.aligned_codes);
    CHECK(back.rs.r_scores == rep.rs.r_scores);
    CHECK(back.rs.s_scores == rep.rs.s_scores);
  }
}

TEST_CASE("plots") {
  const auto dir = scratch("plots");
  EvalReport rep;
  rep.sample_ids = {"a", "b", "c", "d"};
  rep.classes = {"t1", "t2", "t3"};
  rep.true_codes = {0, 0, 1, 1};
  rep.cluster_labels = {0, 0, 1, 1};
  rep.aligned_codes = {0, 0, 1, 1};
  rep.rs.r_scores = {1, 0.5, 0.2, 0.9};
  rep.rs.s_scores = {0.3, 0.4, 0.8, 1};
  const auto files = emit_plots(rep, dir);
  CHECK(files.size() == 6);
  int svg = 0, csv = 0;
  for (const auto& f : files) {
    CHECK(fs::exists(f));
    svg += f.extension() == ".svg";
    csv += f.extension() == ".csv";
  }
  CHECK(svg == 3);
  CHECK(csv == 3);
  // The third class has no samples: header-only CSV and an SVG without points.
  CHECK(slurp(files[4]) == "sample_id,S,R,predicted\n");
  CHECK(slurp(files[5]).find("<circle") == std::string::npos);
  CHECK(slurp(files[5]).find("<svg") != std::string::npos);
  // Correct predictions: one colour per panel.
  const auto panel = slurp(files[1]);
  CHECK(panel.find("#1f77b4") != std::string::npos);
  CHECK(panel.find("#ff7f0e") == std::string::npos);

  rep.rs.r_scores.pop_back();
  CHECK_THROWS_AS(emit_plots(rep, dir), InvariantError);
}
