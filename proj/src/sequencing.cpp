#include "pcq/sequencing.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "pcq/error.hpp"

namespace pcq {

namespace {

using Json = nlohmann::json;

const ClassStatistics& row_for(const EvaluationTable& table, const PatternClassId& c) {
  const ClassStatistics* row = table.find(c.form);
  if (row == nullptr) throw Error("evaluation table has no row for pattern " + c.name());
  return *row;
}

std::string default_name(int i) { return "A" + std::to_string(i + 1); }

}  // namespace

PathScore& PathScore::operator+=(const PathScore& other) {
  optimal += other.optimal;
  near_optimal += other.near_optimal;
  rank_sum += other.rank_sum;
  return *this;
}

bool operator<(const PathScore& a, const PathScore& b) {
  return std::tie(a.optimal, a.near_optimal, b.rank_sum) < std::tie(b.optimal, b.near_optimal, a.rank_sum);
}

PathScore node_score(const EvaluationTable& table, const ClassStatistics& row) {
  PathScore s;
  const bool optimal = row.rank_distance == 1 && (row.rank_tau == 1 || table.is_split(row.pattern.e));
  s.optimal = optimal ? 1 : 0;
  s.near_optimal = row.rank_distance <= 2 && row.rank_tau <= 2 ? 1 : 0;
  s.rank_sum = row.rank_distance + row.rank_tau;
  return s;
}

PathScore path_score(const EvaluationTable& table, const std::vector<PatternClassId>& path) {
  PathScore total;
  for (const auto& c : path) total += node_score(table, row_for(table, c));
  return total;
}

std::vector<PatternClassId> optimal_path(const GraphOfGraphs& gog, const EvaluationTable& table, int start_e) {
  const PatternCatalog& cat = gog.catalog();
  if (start_e < cat.min_edges() || start_e > cat.max_edges())
    throw Error("start_e must lie in [" + std::to_string(cat.min_edges()) + ", " +
                std::to_string(cat.max_edges()) + "] for n=" + std::to_string(cat.n()));
  const int count = static_cast<int>(cat.size());
  std::vector<PathScore> best(cat.size());
  std::vector<int> next(cat.size(), -1);
  // Classes are ordered by (e, form): walking indices downwards visits
  // every upper neighbour first, and within a stratum smaller index means
  // smaller form.
  for (int k = count - 1; k >= 0; --k) {
    PathScore suffix;
    for (int u : gog.up(k))
      if (next[k] < 0 || suffix < best[u]) {
        suffix = best[u];
        next[k] = u;
      }
    assert(next[k] >= 0 || cat.at(k).e == cat.max_edges());
    best[k] = node_score(table, row_for(table, cat.at(k))) + suffix;
  }
  int start = -1;
  for (const auto& c : cat.stratum(start_e)) {
    const int k = cat.index_of(c.form);
    if (start < 0 || best[start] < best[k]) start = k;
  }
  std::vector<PatternClassId> path;
  for (int k = start; k >= 0; k = next[k]) path.push_back(cat.at(k));
  return path;
}

PatternGraph FillingSequence::prefix(int k) const {
  if (k < 0 || k > static_cast<int>(pairs.size()))
    throw Error("prefix length " + std::to_string(k) + " outside [0, " + std::to_string(pairs.size()) + "]");
  PatternGraph g(n);
  for (int t = 0; t < k; ++t) g.add_edge(pairs[t].first, pairs[t].second);
  return g;
}

FillingSequence realize_sequence(const std::vector<PatternClassId>& path, const RealizeOptions& options) {
  if (path.empty()) throw Error("empty path");
  FillingSequence seq;
  seq.n = path.front().n;
  seq.start_e = path.front().e;
  for (const auto& c : path) seq.path.push_back(c.form);

  PatternGraph g = path.front().representative();
  if (options.seed) {
    if (options.seed->vertex_count() != seq.n || canonical_form(*options.seed) != path.front().form)
      throw Error("seed graph is not isomorphic to the first path NODE " + path.front().name());
    g = *options.seed;
  }
  seq.pairs = g.edges();

  for (std::size_t step = 1; step < path.size(); ++step) {
    const CanonicalForm& target = path[step].form;
    if (path[step].e != path[step - 1].e + 1)
      throw Error("path NODEs " + path[step - 1].name() + " and " + path[step].name() + " are not adjacent");
    std::vector<Pair> candidates;
    for (const Pair& p : options.preferred_order)
      if (!g.has_edge(p.first, p.second)) candidates.push_back(p);
    for (const Pair& p : g.non_edges()) candidates.push_back(p);
    const auto hit = std::find_if(candidates.begin(), candidates.end(),
                                  [&](const Pair& p) { return canonical_form(g.with_edge(p.first, p.second)) == target; });
    if (hit == candidates.end())
      throw Error("path NODEs " + path[step - 1].name() + " and " + path[step].name() + " are not adjacent");
    g.add_edge(hit->first, hit->second);
    seq.pairs.push_back(*hit);
  }
  for (const Pair& p : g.non_edges()) seq.pairs.push_back(p);
  return seq;
}

std::vector<std::optional<PatternClassId>> prefix_classes(const FillingSequence& seq,
                                                          const PatternCatalog& catalog) {
  std::vector<std::optional<PatternClassId>> out;
  PatternGraph g(seq.n);
  for (const Pair& p : seq.pairs) {
    g.add_edge(p.first, p.second);
    if (is_connected(g)) out.emplace_back(catalog.classify(g));
    else out.emplace_back(std::nullopt);
  }
  return out;
}

std::string to_markdown(const FillingSequence& seq, const std::vector<std::string>& names) {
  const int n = seq.n;
  if (!names.empty() && static_cast<int>(names.size()) != n)
    throw Error("expected " + std::to_string(n) + " names, got " + std::to_string(names.size()));
  auto name = [&](int i) { return names.empty() ? default_name(i) : names[i]; };
  std::vector<std::vector<int>> rank(n, std::vector<int>(n, 0));
  for (std::size_t k = 0; k < seq.pairs.size(); ++k)
    rank[seq.pairs[k].first][seq.pairs[k].second] = static_cast<int>(k) + 1;
  std::ostringstream os;
  os << "|   |";
  for (int j = 1; j < n; ++j) os << ' ' << name(j) << " |";
  os << "\n|---|";
  for (int j = 1; j < n; ++j) os << "---|";
  os << '\n';
  for (int i = 0; i + 1 < n; ++i) {
    os << "| " << name(i) << " |";
    for (int j = 1; j < n; ++j) {
      if (j > i && rank[i][j] > 0) os << " #" << rank[i][j] << " |";
      else os << "   |";
    }
    os << '\n';
  }
  return os.str();
}

std::string to_json(const FillingSequence& seq) {
  Json path = Json::array();
  for (const auto& f : seq.path) path.push_back(f.to_string());
  Json comparisons = Json::array();
  for (std::size_t k = 0; k < seq.pairs.size(); ++k)
    comparisons.push_back({{"rank", k + 1}, {"i", seq.pairs[k].first}, {"j", seq.pairs[k].second}});
  Json doc = {{"n", seq.n}, {"start_e", seq.start_e}, {"path", path}, {"comparisons", comparisons}};
  return doc.dump(2) + "\n";
}

FillingSequence sequence_from_json(const std::string& text) {
  try {
    const Json doc = Json::parse(text);
    FillingSequence seq;
    seq.n = doc.at("n").get<int>();
    seq.start_e = doc.at("start_e").get<int>();
    for (const Json& f : doc.at("path")) seq.path.push_back(CanonicalForm::parse(seq.n, f.get<std::string>()));
    PatternGraph seen(seq.n);
    int expected_rank = 1;
    for (const Json& c : doc.at("comparisons")) {
      if (c.at("rank").get<int>() != expected_rank)
        throw Error("comparison ranks must run 1, 2, ...; found " + c.at("rank").dump() + " at position " +
                    std::to_string(expected_rank));
      ++expected_rank;
      const int i = c.at("i").get<int>();
      const int j = c.at("j").get<int>();
      if (i >= j) throw Error("comparison #" + c.at("rank").dump() + " must have i < j");
      seen.add_edge(i, j);
      seq.pairs.push_back(Pair{i, j});
    }
    return seq;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed sequence document: ") + e.what());
  }
}

std::string to_dot(const FillingSequence& seq) {
  std::ostringstream os;
  os << "graph sequence {\n  node [shape=circle, fontsize=10];\n";
  const int first = seq.start_e;
  const int last = first + static_cast<int>(seq.path.size()) - 1;
  for (int e = first; e <= last; ++e) {
    os << "  subgraph cluster_e" << e << " {\n    label=\"e=" << e << "\";\n";
    for (int v = 0; v < seq.n; ++v) os << "    s" << e << "_" << v << " [label=\"" << default_name(v) << "\"];\n";
    for (int k = 0; k < e; ++k) {
      const Pair& p = seq.pairs[k];
      os << "    s" << e << "_" << p.first << " -- s" << e << "_" << p.second;
      if (e > first && k == e - 1) os << " [color=red, penwidth=3]";
      os << ";\n";
    }
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

int default_start_e(int n) { return std::min(n, pair_count(n)); }

SequencePipeline build_default_pipeline(int n, int permutations) {
  SequencePipeline out;
  SimulationConfig cfg;
  cfg.n = n;
  out.catalog = enumerate_connected_classes(n);
  out.gog = GraphOfGraphs(out.catalog);
  EvaluationOptions options;
  options.seed = cfg.seed;
  options.permutations = permutations;
  options.source = cfg.describe();
  out.table = evaluate_patterns(simulate_population(cfg), out.catalog, options);
  out.path = optimal_path(out.gog, out.table, default_start_e(n));
  out.sequence = realize_sequence(out.path);
  return out;
}

}  // namespace pcq
