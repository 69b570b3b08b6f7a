#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pcq/graph.hpp"

namespace pcq {

/// Largest vertex count accepted by canonical_form (n! relabelings).
inline constexpr int kMaxCanonicalVertices = 8;

/// Adjacency bitstring over the lexicographic pair order, minimized over
/// relabelings. Pair k occupies bit (pair_count(n) - 1 - k), so integer
/// order on `bits` equals lexicographic order on the bitstring.
struct CanonicalForm {
  int n = 0;
  std::uint64_t bits = 0;

  int edge_count() const;
  /// The canonical labeled representative.
  PatternGraph graph() const;
  /// "0110..." of length n(n-1)/2.
  std::string to_string() const;
  static CanonicalForm parse(int n, const std::string& bitstring);

  friend auto operator<=>(const CanonicalForm&, const CanonicalForm&) = default;
};

/// Adjacency code of `g` exactly as labeled (no minimization).
CanonicalForm labeled_code(const PatternGraph& g);

/// Minimal labeled code over all relabelings that list vertices in
/// non-decreasing degree order. Isomorphic graphs, and only those, share it.
CanonicalForm canonical_form(const PatternGraph& g);

/// Permutation p with g.relabeled(p) == canonical_form(g).graph().
std::vector<int> canonical_labeling(const PatternGraph& g);

bool are_isomorphic(const PatternGraph& a, const PatternGraph& b);

/// Isomorphism class of a connected comparison pattern.
struct PatternClassId {
  int n = 0;
  int e = 0;
  CanonicalForm form;
  /// Position within the e-stratum, 0-based, by ascending canonical form.
  int ordinal = 0;

  PatternGraph representative() const { return form.graph(); }
  /// Short stable name such as "e7.3".
  std::string name() const;

  friend bool operator==(const PatternClassId& a, const PatternClassId& b) { return a.form == b.form; }
};

/// All connected pattern classes on n vertices, ordered by (e, form).
class PatternCatalog {
 public:
  PatternCatalog() = default;
  PatternCatalog(int n, std::vector<PatternClassId> classes);

  int n() const { return n_; }
  int min_edges() const { return n_ - 1; }
  int max_edges() const { return pair_count(n_); }

  const std::vector<PatternClassId>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }

  /// Classes with exactly e edges; empty outside [n-1, n(n-1)/2].
  std::span<const PatternClassId> stratum(int e) const;
  std::vector<int> stratum_counts() const;

  /// Index into classes(), or -1.
  int index_of(const CanonicalForm& f) const;
  int index_of_name(const std::string& name) const;
  const PatternClassId& at(int index) const { return classes_.at(static_cast<std::size_t>(index)); }
  /// Class of a connected graph; throws if `g` is disconnected or foreign.
  const PatternClassId& classify(const PatternGraph& g) const;

 private:
  int n_ = 0;
  std::vector<PatternClassId> classes_;
  std::vector<std::size_t> stratum_begin_;
  std::map<CanonicalForm, int> index_;
};

/// One representative per isomorphism class of connected graphs on n
/// vertices, for every e in [n-1, n(n-1)/2]. Requires 2 <= n <= 8.
PatternCatalog enumerate_connected_classes(int n);

/// Meta-graph on pattern classes: D is adjacent above C when adding one
/// comparison to C's representative gives a graph isomorphic to D.
class GraphOfGraphs {
 public:
  GraphOfGraphs() = default;
  explicit GraphOfGraphs(PatternCatalog catalog);

  const PatternCatalog& catalog() const { return catalog_; }
  int n() const { return catalog_.n(); }

  /// Indices into catalog().classes().
  const std::vector<int>& up(int index) const { return up_.at(static_cast<std::size_t>(index)); }
  const std::vector<int>& down(int index) const { return down_.at(static_cast<std::size_t>(index)); }

  /// Meta-edges as (lower index, upper index), sorted.
  std::vector<std::pair<int, int>> meta_edges() const;

 private:
  PatternCatalog catalog_;
  std::vector<std::vector<int>> up_;
  std::vector<std::vector<int>> down_;
};

GraphOfGraphs build_graph_of_graphs(const PatternCatalog& catalog);

enum class Stratum { Up, Down };

/// Classes adjacent to `c` one stratum above or below. Throws for a class
/// that is not a NODE of `gog`.
std::vector<PatternClassId> neighbors(const GraphOfGraphs& gog, const PatternClassId& c, Stratum direction);

/// Graphviz export with one cluster per stratum.
std::string to_dot(const GraphOfGraphs& gog);
/// `{n, nodes:[{id, e, edges}], meta_edges:[[idA, idB]]}` as text.
std::string to_json(const GraphOfGraphs& gog);

/// Catalog document `{n, classes:[{id, e, ordinal, encoding, edges}]}`.
std::string catalog_to_json(const PatternCatalog& catalog);
PatternCatalog catalog_from_json(const std::string& text);

}  // namespace pcq
