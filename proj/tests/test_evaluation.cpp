#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "oracles.hpp"
#include "pcq/evaluation.hpp"
#include "pcq/llsm.hpp"
#include "pcq/matrix_io.hpp"
#include "pcq/metrics.hpp"

using namespace pcq;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pcq_eval_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

ClassStatistics row(const PatternCatalog& cat, const std::string& name, double d, double t) {
  ClassStatistics r;
  r.pattern = cat.at(cat.index_of_name(name));
  r.mean_distance = d;
  r.mean_tau = t;
  r.samples = 1;
  return r;
}

}  // namespace

TEST_CASE("simulation is deterministic per index") {
  SimulationConfig cfg;
  const auto a = simulate_sample(cfg, 7);
  const auto b = simulate_sample(cfg, 7);
  CHECK(a.pcm == b.pcm);
  CHECK(a.true_weights == b.true_weights);
  CHECK_FALSE(simulate_pcm(cfg, 8) == a.pcm);
  cfg.seed = 43;
  CHECK_FALSE(simulate_pcm(cfg, 7) == a.pcm);
  CHECK(std::abs(a.true_weights.sum() - 1.0) <= 1e-15);
  CHECK(a.true_weights.maxCoeff() / a.true_weights.minCoeff() <= 9.0);
}

TEST_CASE("consistent simulation recovers the generating weights") {
  SimulationConfig cfg;
  cfg.delta = 1.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto sample = simulate_sample(cfg, s);
    CHECK(is_consistent(sample.pcm));
    CHECK((llsm_weights(sample.pcm) - sample.true_weights).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("perturbed simulation deviates from the generating weights") {
  SimulationConfig cfg;
  double total = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto sample = simulate_sample(cfg, s);
    total += euclidean_distance(llsm_weights(sample.pcm), sample.true_weights);
  }
  const double mean = total / 1000;
  CHECK(mean > 0.0);
  CHECK(mean == doctest::Approx(0.059613339063).epsilon(1e-9));
}

TEST_CASE("discretized simulation stays on the scale") {
  SimulationConfig cfg;
  cfg.discretize = Scale{};
  std::set<double> allowed;
  for (double v : Scale{}.value_set()) allowed.insert(v);
  const auto m = simulate_pcm(cfg, 3);
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) {
      if (i == j) continue;
      const double a = m(i, j);
      const bool on_scale = std::any_of(allowed.begin(), allowed.end(),
                                        [&](double v) { return std::abs(v - a) <= 1e-15; });
      CHECK(on_scale);
    }
}

TEST_CASE("simulation config validation") {
  SimulationConfig cfg;
  cfg.delta = 0.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.spread = 0.9;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.samples = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(SimulationConfig{}.describe().find("delta=2") != std::string::npos);
}

TEST_CASE("single relabeling matches a direct restrict-and-solve loop") {
  const auto cat = enumerate_connected_classes(5);
  SimulationConfig cfg;
  cfg.n = 5;
  cfg.samples = 30;
  const auto pcms = simulate_population(cfg);
  EvaluationOptions options;
  options.seed = 9;
  options.permutations = 1;
  const auto table = evaluate_patterns(pcms, cat, options);
  for (const auto& c : cat.classes()) {
    double d = 0, t = 0;
    for (std::size_t s = 0; s < pcms.size(); ++s) {
      const auto perm = random_permutation(5, derive_seed(derive_seed(9, s, 2), 0));
      const auto p = permute(pcms[s], perm);
      const auto v = oracle::row_geometric_means(p);
      const auto u = oracle::normalized(oracle::coordinate_descent_log_weights(restrict(p, c.representative())));
      d += euclidean_distance(u, v);
      t += kendall_tau(u, v);
    }
    const auto* r = table.find(c.form);
    REQUIRE(r != nullptr);
    CHECK(r->samples == 30);
    CHECK(r->mean_distance == doctest::Approx(d / 30).epsilon(1e-9));
    CHECK(r->mean_tau == doctest::Approx(t / 30).epsilon(1e-9));
  }
}

TEST_CASE("complete pattern is exact and statistics are in range") {
  const auto cat = enumerate_connected_classes(5);
  SimulationConfig cfg;
  cfg.n = 5;
  cfg.samples = 40;
  const auto table = evaluate_patterns(simulate_population(cfg), cat, 1);
  const auto* complete = table.find(canonical_form(PatternGraph::complete(5)));
  REQUIRE(complete != nullptr);
  CHECK(complete->mean_distance == 0.0);
  CHECK(complete->mean_tau == 1.0);
  CHECK(complete->flags == (kOptimalBoth | kOptimalDistance | kOptimalTau));
  for (const auto& r : table.rows()) {
    CHECK(r.mean_distance >= 0.0);
    CHECK(r.mean_tau <= 1.0);
    CHECK(r.se_distance >= 0.0);
  }
}

TEST_CASE("consistent population ties every pattern") {
  const auto cat = enumerate_connected_classes(5);
  SimulationConfig cfg;
  cfg.n = 5;
  cfg.delta = 1.0;
  cfg.samples = 20;
  const auto table = evaluate_patterns(simulate_population(cfg), cat, 3);
  for (const auto& r : table.rows()) {
    CHECK(r.mean_distance <= 1e-14);
    CHECK(r.mean_tau == 1.0);
    CHECK(r.rank_distance == 1);
    CHECK(r.rank_tau == 1);
    CHECK((r.flags & kOptimalBoth) != 0);
  }
}

TEST_CASE("all-ones matrices give zero tau contributions") {
  const auto cat = enumerate_connected_classes(4);
  const std::vector<PairwiseComparisonMatrix> pcms(5, PairwiseComparisonMatrix(Eigen::MatrixXd::Ones(4, 4)));
  EvaluationOptions options;
  options.permutations = 3;
  const auto table = evaluate_patterns(pcms, cat, options);
  for (const auto& r : table.rows()) {
    CHECK(r.mean_tau == 0.0);
    CHECK(r.mean_distance == 0.0);
  }
}

TEST_CASE("evaluation rejects mismatched sizes and bad options") {
  const auto cat = enumerate_connected_classes(4);
  SimulationConfig cfg;
  cfg.n = 5;
  cfg.samples = 2;
  CHECK_THROWS_AS(evaluate_patterns(simulate_population(cfg), cat, 1), Error);
  cfg.n = 4;
  EvaluationOptions options;
  options.permutations = 0;
  CHECK_THROWS_AS(evaluate_patterns(simulate_population(cfg), cat, options), Error);
}

TEST_CASE("ranking flags") {
  const auto cat = enumerate_connected_classes(4);
  // e=3: star e3.0 and path e3.1; e=4: e4.0, e4.1; e=5 and e=6 single.
  std::vector<ClassStatistics> rows = {
      row(cat, "e3.0", 0.10, 0.50), row(cat, "e3.1", 0.20, 0.60),
      row(cat, "e4.0", 0.05, 0.80), row(cat, "e4.1", 0.05 + 1e-14, 0.70),
      row(cat, "e5.0", 0.01, 0.90), row(cat, "e6.0", 0.0, 1.0),
  };
  const EvaluationTable table(4, rows, "hand");
  auto get = [&](const std::string& name) { return *table.find(cat.at(cat.index_of_name(name)).form); };
  CHECK(get("e3.0").rank_distance == 1);
  CHECK(get("e3.0").rank_tau == 2);
  CHECK(get("e3.0").flags == (kOptimalDistance | kSplit | kSecondBest));
  CHECK(get("e3.1").flags == (kOptimalTau | kSplit | kSecondBest));
  CHECK(table.is_split(3));
  // A distance tie makes the rank-1 sets differ.
  CHECK(table.is_split(4));
  CHECK(get("e4.1").rank_distance == 1);
  CHECK(get("e4.0").flags == (kOptimalBoth | kOptimalDistance | kOptimalTau | kSplit));
  CHECK(get("e4.1").flags == (kOptimalDistance | kSplit | kSecondBest));
  const unsigned both = kOptimalBoth | kOptimalDistance | kOptimalTau;
  CHECK(get("e5.0").flags == both);
  CHECK(get("e6.0").flags == both);
  CHECK_FALSE(table.is_split(5));

  const auto report = rank_report(table);
  REQUIRE(report.size() == 4);
  CHECK(report[0].e == 3);
  CHECK(report[0].split);
  CHECK(report[1].best_distance.size() == 2);
  CHECK(report[1].best_tau.size() == 1);
  CHECK(report[1].split);
  CHECK(report[2].optimal_both);
  CHECK(report[3].optimal_both);
  CHECK(report_to_csv(table).find("6,OPTIMAL_BOTH,e6.0,e6.0") != std::string::npos);
}

TEST_CASE("flag strings round trip") {
  for (unsigned f = 0; f < 32; ++f) CHECK(flags_from_string(flags_to_string(f)) == f);
  CHECK(flags_to_string(kOptimalBoth | kSplit) == "OPTIMAL_BOTH|SPLIT");
  CHECK_THROWS_AS(flags_from_string("GREEN"), Error);
}

TEST_CASE("table serialization round trips byte for byte") {
  const auto cat = enumerate_connected_classes(5);
  SimulationConfig cfg;
  cfg.n = 5;
  cfg.samples = 25;
  const auto table = evaluate_patterns(simulate_population(cfg), cat, 5, "sim");
  const std::string csv = to_csv(table);
  const std::string json = to_json(table);
  CHECK(csv == to_csv(evaluate_patterns(simulate_population(cfg), cat, 5, "sim")));
  CHECK(to_csv(table_from_csv(csv)) == csv);
  CHECK(to_json(table_from_json(json)) == json);
  CHECK(csv.rfind("n,e,class_ordinal,canonical_encoding,mean_distance,se_distance,mean_tau,se_tau,rank_distance,"
                  "rank_tau,flags\n",
                  0) == 0);
  const auto dir = scratch_dir("tables");
  write_file(dir / "t.csv", csv);
  CHECK(to_csv(load_table((dir / "t.csv").string())) == csv);
  CHECK_THROWS_AS(table_from_csv("a,b\n"), Error);
  CHECK_THROWS_AS(table_from_json("{"), Error);
}

TEST_CASE("ingest a directory of matrices") {
  const auto dir = scratch_dir("ingest");
  SimulationConfig cfg;
  cfg.n = 4;
  for (int s = 0; s < 3; ++s) {
    std::ofstream out(dir / ("m" + std::to_string(s) + ".csv"));
    write_matrix_csv(out, simulate_pcm(cfg, s));
  }
  const auto pcms = ingest_dataset(dir.string());
  REQUIRE(pcms.size() == 3);
  for (int s = 0; s < 3; ++s) CHECK((pcms[s].entries() - simulate_pcm(cfg, s).entries()).cwiseAbs().maxCoeff() <= 1e-15);

  write_file(dir / "m9.csv", "3\n1,2,1\n0.5,1,1\n1,1,1\n");
  CHECK_THROWS_WITH_AS(ingest_dataset(dir.string()), doctest::Contains("differs"), Error);
}

TEST_CASE("ingest rejects non-reciprocal and incomplete files") {
  const auto dir = scratch_dir("bad");
  write_file(dir / "bad.csv", "3\n1,2,1\n0.4,1,1\n1,1,1\n");
  CHECK_THROWS_WITH_AS(ingest_dataset((dir / "bad.csv").string()), doctest::Contains("bad.csv"), Error);
  write_file(dir / "gap.csv", "3\n1,2,*\n0.5,1,1\n*,1,1\n");
  CHECK_THROWS_WITH_AS(ingest_dataset((dir / "gap.csv").string()), doctest::Contains("missing"), Error);
  write_file(dir / "two.csv", "2\n1,2\n0.5,1\n\n2\n1,3\n0.3333333333333333,1\n");
  CHECK(ingest_dataset((dir / "two.csv").string()).size() == 2);
}

TEST_CASE("ingest verbal judgments") {
  const auto dir = scratch_dir("verbal");
  write_file(dir / "r1.csv", "i,j,category,direction\n0,1,L,1\n0,2,EQ,1\n1,2,S,2\n");
  write_file(dir / "r2.csv", "i,j,category,direction\n0,1,M,2\n0,2,S,1\n1,2,EQUAL,1\n");
  const auto pcms = ingest_verbal_dataset(dir.string(), Scale{});
  REQUIRE(pcms.size() == 2);
  CHECK(pcms[0](0, 1) == 2.0);
  CHECK(pcms[0](1, 2) == 1.0 / 1.5);
  CHECK(pcms[1](0, 1) == 1.0 / 1.7);
  CHECK(pcms[1](2, 1) == 1.0);
  write_file(dir / "r3.csv", "i,j,category,direction\n0,1,L,1\n");
  CHECK_THROWS_WITH_AS(ingest_verbal_dataset(dir.string(), Scale{}), doctest::Contains("r3.csv"), Error);
}

TEST_CASE("default population ranks the star and the 6-cycle first") {
  const auto cat = enumerate_connected_classes(6);
  const auto table = evaluate_patterns(simulate_population(SimulationConfig{}), cat, 42);
  CHECK(table.find(canonical_form(PatternGraph::star(6)))->rank_distance == 1);
  const auto* cycle = table.find(canonical_form(PatternGraph::cycle(6)));
  CHECK(cycle->rank_distance == 1);
  CHECK(cycle->rank_tau == 1);
}
