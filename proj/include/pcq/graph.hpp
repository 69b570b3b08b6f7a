#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pcq/error.hpp"

namespace pcq {

/// Unordered pair of alternatives, stored with first < second.
struct Pair {
  int first = 0;
  int second = 0;

  constexpr Pair() = default;
  constexpr Pair(int a, int b) : first(a < b ? a : b), second(a < b ? b : a) {}

  friend constexpr auto operator<=>(const Pair&, const Pair&) = default;
};

/// Number of unordered pairs on n vertices.
constexpr int pair_count(int n) { return n * (n - 1) / 2; }

/// Position of {i, j} in the lexicographic order (0,1), (0,2), ..., (n-2,n-1).
constexpr int pair_index(int n, Pair p) {
  return p.first * (2 * n - p.first - 1) / 2 + (p.second - p.first - 1);
}

/// All unordered pairs of an n-set in lexicographic order.
std::vector<Pair> all_pairs(int n);

/// Simple undirected graph on labeled vertices 0..n-1. Adjacency is a
/// bitmask per vertex, so n is limited to 64.
class PatternGraph {
 public:
  static constexpr int kMaxVertices = 64;

  PatternGraph() = default;
  explicit PatternGraph(int n);
  PatternGraph(int n, const std::vector<Pair>& edges);

  static PatternGraph complete(int n);
  static PatternGraph star(int n, int center = 0);
  static PatternGraph path(int n);
  static PatternGraph cycle(int n);

  int vertex_count() const { return n_; }
  int edge_count() const { return edges_; }

  bool has_edge(int u, int v) const {
    return u != v && ((rows_[u] >> v) & 1U) != 0;
  }
  std::uint64_t neighbors_mask(int v) const { return rows_[v]; }
  int degree(int v) const { return std::popcount(rows_[v]); }

  /// Adds {u, v}. Rejects self-loops, duplicates and out-of-range labels.
  void add_edge(int u, int v);
  void remove_edge(int u, int v);

  PatternGraph with_edge(int u, int v) const;
  PatternGraph without_edge(int u, int v) const;

  /// Edges in lexicographic order.
  std::vector<Pair> edges() const;
  /// Missing pairs in lexicographic order.
  std::vector<Pair> non_edges() const;

  /// Graph with vertex v renamed to perm[v].
  PatternGraph relabeled(const std::vector<int>& perm) const;

  friend bool operator==(const PatternGraph&, const PatternGraph&) = default;

 private:
  void check_vertex(int v) const;

  int n_ = 0;
  int edges_ = 0;
  std::vector<std::uint64_t> rows_;
};

bool is_connected(const PatternGraph& g);

/// Component index per vertex, numbered in order of smallest member.
std::vector<int> connected_components(const PatternGraph& g);

/// Edge list as "(0,1) (0,2) ..." for messages and logs.
std::string to_string(const PatternGraph& g);

}  // namespace pcq
