#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcq/evaluation.hpp"
#include "pcq/graph.hpp"
#include "pcq/patterns.hpp"

namespace pcq {

/// Ordered so that a larger score is a better path: more optimal NODEs, then
/// more NODEs ranked <= 2 on both metrics, then a smaller rank sum.
struct PathScore {
  int optimal = 0;
  int near_optimal = 0;
  int rank_sum = 0;

  PathScore& operator+=(const PathScore& other);
  friend PathScore operator+(PathScore a, const PathScore& b) { return a += b; }
  friend bool operator==(const PathScore&, const PathScore&) = default;
  friend bool operator<(const PathScore& a, const PathScore& b);
};

/// Contribution of a single NODE. In a SPLIT stratum the distance optimum
/// counts as optimal.
PathScore node_score(const EvaluationTable& table, const ClassStatistics& row);
PathScore path_score(const EvaluationTable& table, const std::vector<PatternClassId>& path);

/// Best-scoring upward path from stratum `start_e` to the complete graph.
/// Ties go to the smaller canonical form, first at the start and then at
/// every step.
std::vector<PatternClassId> optimal_path(const GraphOfGraphs& gog, const EvaluationTable& table, int start_e);

struct FillingSequence {
  int n = 0;
  /// Comparisons in the first path NODE; they may be asked in any order.
  int start_e = 0;
  std::vector<CanonicalForm> path;
  std::vector<Pair> pairs;

  /// Representing graph of the first k comparisons.
  PatternGraph prefix(int k) const;
  friend bool operator==(const FillingSequence&, const FillingSequence&) = default;
};

struct RealizeOptions {
  /// Labeled graph for the first NODE; must be isomorphic to it.
  std::optional<PatternGraph> seed;
  /// Pairs tried first, in this order, before the lexicographic fallback.
  std::vector<Pair> preferred_order;
};

/// Labeled realization of a path: starts from the seed (or the first NODE's
/// canonical representative), lists its edges lexicographically, then adds one
/// edge per step, choosing the first candidate whose addition lands in the
/// next NODE. Pairs left after the last NODE follow lexicographically.
FillingSequence realize_sequence(const std::vector<PatternClassId>& path, const RealizeOptions& options = {});

/// Per prefix length k = 1..pairs.size(): the class of the prefix, or
/// nothing while it is disconnected.
std::vector<std::optional<PatternClassId>> prefix_classes(const FillingSequence& seq,
                                                          const PatternCatalog& catalog);

/// Upper-triangle rank table in markdown, rows A1..A(n-1), columns A2..An.
std::string to_markdown(const FillingSequence& seq, const std::vector<std::string>& names = {});
/// `{n, start_e, path:[encoding], comparisons:[{rank, i, j}]}`, 0-based i < j.
std::string to_json(const FillingSequence& seq);
FillingSequence sequence_from_json(const std::string& text);
/// One cluster per path step, the added comparison drawn bold.
std::string to_dot(const FillingSequence& seq);

/// Everything the default questionnaire for n is built from.
struct SequencePipeline {
  PatternCatalog catalog;
  GraphOfGraphs gog;
  EvaluationTable table;
  std::vector<PatternClassId> path;
  FillingSequence sequence;
};

/// Default start stratum: e = n, clamped to the complete graph.
int default_start_e(int n);

/// Simulated default population (seed 42) -> evaluation -> path -> sequence.
SequencePipeline build_default_pipeline(int n, int permutations = kDefaultPermutations);

}  // namespace pcq
