#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcq/pcm.hpp"
#include "pcq/patterns.hpp"

namespace pcq {

/// Population model for simulated respondents: weights log-uniform on
/// [1, spread], ratio matrix perturbed entrywise by a log-uniform factor in
/// [1/delta, delta], optionally snapped to a verbal scale.
struct SimulationConfig {
  int n = 6;
  double spread = 9.0;
  double delta = 2.0;
  std::optional<Scale> discretize;
  int samples = 1000;
  std::uint64_t seed = 42;

  void validate() const;
  /// One-line description used in reports.
  std::string describe() const;
};

struct SimulatedSample {
  PairwiseComparisonMatrix pcm;
  WeightVector true_weights;
};

/// Deterministic in (cfg.seed, index).
SimulatedSample simulate_sample(const SimulationConfig& cfg, std::uint64_t index);
PairwiseComparisonMatrix simulate_pcm(const SimulationConfig& cfg, std::uint64_t index);
std::vector<PairwiseComparisonMatrix> simulate_population(const SimulationConfig& cfg);

/// Complete matrices from a directory of matrix files (sorted by name) or a
/// single file holding one or more blocks.
std::vector<PairwiseComparisonMatrix> ingest_dataset(const std::string& path);

/// One respondent per verbal-judgment file (directory sorted by name, or a
/// single file). Every respondent must answer all pairs.
std::vector<PairwiseComparisonMatrix> ingest_verbal_dataset(const std::string& path, const Scale& scale);

/// Row flags of an evaluation table.
enum RankFlag : unsigned {
  kOptimalBoth = 1U << 0,    // rank 1 on both metrics
  kOptimalDistance = 1U << 1,
  kOptimalTau = 1U << 2,
  kSplit = 1U << 3,          // rank 1 on one metric in a stratum whose metrics disagree
  kSecondBest = 1U << 4,     // rank <= 2 on both metrics without being optimal on both
};

std::string flags_to_string(unsigned flags);
unsigned flags_from_string(const std::string& text);

struct ClassStatistics {
  PatternClassId pattern;
  double mean_distance = 0;
  double se_distance = 0;
  double mean_tau = 0;
  double se_tau = 0;
  int samples = 0;
  int rank_distance = 0;
  int rank_tau = 0;
  unsigned flags = 0;
};

/// Means closer than this are reported as tied.
inline constexpr double kTieThreshold = 1e-12;

class EvaluationTable {
 public:
  EvaluationTable() = default;
  /// Rows in catalog order; ranks and flags are recomputed here.
  EvaluationTable(int n, std::vector<ClassStatistics> rows, std::string source);

  int n() const { return n_; }
  const std::string& source() const { return source_; }
  const std::vector<ClassStatistics>& rows() const { return rows_; }

  /// Row for a pattern, or nullptr.
  const ClassStatistics* find(const CanonicalForm& form) const;
  std::vector<const ClassStatistics*> stratum(int e) const;
  bool is_split(int e) const;

 private:
  void rank();

  int n_ = 0;
  std::vector<ClassStatistics> rows_;
  std::string source_;
};

/// Random relabelings drawn per matrix. Every relabeling is shared by all
/// pattern classes; per-matrix results are averaged over them.
inline constexpr int kDefaultPermutations = 32;

struct EvaluationOptions {
  std::uint64_t seed = 42;
  int permutations = kDefaultPermutations;
  std::string source = "dataset";
};

/// Paired evaluation: each matrix is relabeled by permutations seeded from
/// (seed, matrix index), every class representative is restricted from the
/// same relabeled matrix and compared with the complete-data weights.
EvaluationTable evaluate_patterns(const std::vector<PairwiseComparisonMatrix>& pcms,
                                  const PatternCatalog& catalog, const EvaluationOptions& options);
EvaluationTable evaluate_patterns(const std::vector<PairwiseComparisonMatrix>& pcms,
                                  const PatternCatalog& catalog, std::uint64_t seed,
                                  std::string source = "dataset");

struct StratumReport {
  int e = 0;
  /// Row indices ordered by ascending mean distance / descending mean tau.
  std::vector<int> by_distance;
  std::vector<int> by_tau;
  std::vector<int> best_distance;
  std::vector<int> best_tau;
  std::vector<int> second_distance;
  std::vector<int> second_tau;
  bool optimal_both = false;
  bool split = false;
};

std::vector<StratumReport> rank_report(const EvaluationTable& table);

/// `n,e,class_ordinal,canonical_encoding,mean_distance,se_distance,mean_tau,se_tau,rank_distance,rank_tau,flags`
std::string to_csv(const EvaluationTable& table);
std::string to_json(const EvaluationTable& table);
std::string report_to_csv(const EvaluationTable& table);
EvaluationTable table_from_csv(const std::string& text);
EvaluationTable table_from_json(const std::string& text);
/// Picks the parser from the file extension (.csv or .json).
EvaluationTable load_table(const std::string& path);

}  // namespace pcq
