#include "pcq/graph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace pcq {

std::vector<Pair> all_pairs(int n) {
  std::vector<Pair> out;
  out.reserve(static_cast<std::size_t>(pair_count(n)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

PatternGraph::PatternGraph(int n) : n_(n) {
  if (n < 0 || n > kMaxVertices)
    throw Error("graph vertex count must be in [0, 64], got " + std::to_string(n));
  rows_.assign(static_cast<std::size_t>(n), 0);
}

PatternGraph::PatternGraph(int n, const std::vector<Pair>& edges) : PatternGraph(n) {
  for (const Pair& p : edges) add_edge(p.first, p.second);
}

PatternGraph PatternGraph::complete(int n) { return PatternGraph(n, all_pairs(n)); }

PatternGraph PatternGraph::star(int n, int center) {
  PatternGraph g(n);
  for (int v = 0; v < n; ++v)
    if (v != center) g.add_edge(center, v);
  return g;
}

PatternGraph PatternGraph::path(int n) {
  PatternGraph g(n);
  for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  return g;
}

PatternGraph PatternGraph::cycle(int n) {
  PatternGraph g = path(n);
  if (n >= 3) g.add_edge(n - 1, 0);
  return g;
}

void PatternGraph::check_vertex(int v) const {
  if (v < 0 || v >= n_)
    throw Error("vertex " + std::to_string(v) + " out of range for n=" + std::to_string(n_));
}

void PatternGraph::add_edge(int u, int v) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) throw Error("self-loop at vertex " + std::to_string(u));
  if (has_edge(u, v))
    throw Error("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  rows_[u] |= std::uint64_t{1} << v;
  rows_[v] |= std::uint64_t{1} << u;
  ++edges_;
}

void PatternGraph::remove_edge(int u, int v) {
  check_vertex(u);
  check_vertex(v);
  if (!has_edge(u, v))
    throw Error("no edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  rows_[u] &= ~(std::uint64_t{1} << v);
  rows_[v] &= ~(std::uint64_t{1} << u);
  --edges_;
}

PatternGraph PatternGraph::with_edge(int u, int v) const {
  PatternGraph g = *this;
  g.add_edge(u, v);
  return g;
}

PatternGraph PatternGraph::without_edge(int u, int v) const {
  PatternGraph g = *this;
  g.remove_edge(u, v);
  return g;
}

std::vector<Pair> PatternGraph::edges() const {
  std::vector<Pair> out;
  out.reserve(static_cast<std::size_t>(edges_));
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<Pair> PatternGraph::non_edges() const {
  std::vector<Pair> out;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (!has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

PatternGraph PatternGraph::relabeled(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_) throw Error("permutation length mismatch");
  PatternGraph g(n_);
  for (const Pair& p : edges()) g.add_edge(perm[p.first], perm[p.second]);
  return g;
}

std::vector<int> connected_components(const PatternGraph& g) {
  const int n = g.vertex_count();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::uint64_t frontier = std::uint64_t{1} << s;
    std::uint64_t seen = frontier;
    while (frontier != 0) {
      const int v = std::countr_zero(frontier);
      frontier &= frontier - 1;
      const std::uint64_t fresh = g.neighbors_mask(v) & ~seen;
      seen |= fresh;
      frontier |= fresh;
    }
    for (std::uint64_t m = seen; m != 0; m &= m - 1) comp[std::countr_zero(m)] = next;
    ++next;
  }
  return comp;
}

bool is_connected(const PatternGraph& g) {
  const auto comp = connected_components(g);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

std::string to_string(const PatternGraph& g) {
  std::ostringstream os;
  bool first = true;
  for (const Pair& p : g.edges()) {
    if (!first) os << ' ';
    os << '(' << p.first << ',' << p.second << ')';
    first = false;
  }
  return os.str();
}

}  // namespace pcq
