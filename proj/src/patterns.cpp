#include "pcq/patterns.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pcq {

namespace {

using Json = nlohmann::json;

// bit_of[a][b]: mask of pair {a, b} in a code for n vertices.
struct BitTable {
  std::array<std::array<std::uint64_t, kMaxCanonicalVertices>, kMaxCanonicalVertices> bit{};

  explicit BitTable(int n) {
    const int total = pair_count(n);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const int shift = total - 1 - pair_index(n, Pair(a, b));
        bit[a][b] = bit[b][a] = std::uint64_t{1} << shift;
      }
  }
};

const BitTable& bit_table(int n) {
  static const std::array<BitTable, kMaxCanonicalVertices + 1> tables = [] {
    return std::array<BitTable, kMaxCanonicalVertices + 1>{
        BitTable(0), BitTable(1), BitTable(2), BitTable(3), BitTable(4),
        BitTable(5), BitTable(6), BitTable(7), BitTable(8)};
  }();
  return tables[static_cast<std::size_t>(n)];
}

void check_canonical_bound(int n) {
  if (n > kMaxCanonicalVertices)
    throw Error("canonical form is computed by brute force over relabelings and supports n <= " +
                std::to_string(kMaxCanonicalVertices) + "; got n=" + std::to_string(n));
}

struct CanonicalResult {
  CanonicalForm form;
  std::vector<int> labeling;
};

CanonicalResult canonicalize(const PatternGraph& g) {
  const int n = g.vertex_count();
  check_canonical_bound(n);
  const BitTable& table = bit_table(n);
  const std::vector<Pair> edges = g.edges();

  // Positions are filled by vertices of ascending degree; only vertices of
  // equal degree are permuted among themselves.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return g.degree(a) < g.degree(b); });
  std::vector<std::pair<int, int>> groups;  // [begin, end) in `order`
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && g.degree(order[j]) == g.degree(order[i])) ++j;
    groups.emplace_back(i, j);
    i = j;
  }

  std::vector<int> label(static_cast<std::size_t>(n));
  CanonicalResult best;
  best.form.n = n;
  best.form.bits = ~std::uint64_t{0};
  while (true) {
    for (int pos = 0; pos < n; ++pos) label[order[pos]] = pos;
    std::uint64_t code = 0;
    for (const Pair& e : edges) code |= table.bit[label[e.first]][label[e.second]];
    if (code < best.form.bits) {
      best.form.bits = code;
      best.labeling = label;
    }
    // Odometer over the per-group permutations.
    bool advanced = false;
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
      if (std::next_permutation(order.begin() + it->first, order.begin() + it->second)) {
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  if (n == 0) best.form.bits = 0;
  return best;
}

}  // namespace

int CanonicalForm::edge_count() const { return std::popcount(bits); }

PatternGraph CanonicalForm::graph() const {
  PatternGraph g(n);
  const int total = pair_count(n);
  for (const Pair& p : all_pairs(n)) {
    const int shift = total - 1 - pair_index(n, p);
    if ((bits >> shift) & 1U) g.add_edge(p.first, p.second);
  }
  return g;
}

std::string CanonicalForm::to_string() const {
  const int total = pair_count(n);
  std::string s(static_cast<std::size_t>(total), '0');
  for (int k = 0; k < total; ++k)
    if ((bits >> (total - 1 - k)) & 1U) s[static_cast<std::size_t>(k)] = '1';
  return s;
}

CanonicalForm CanonicalForm::parse(int n, const std::string& bitstring) {
  if (n < 0 || pair_count(n) > 64 || static_cast<int>(bitstring.size()) != pair_count(n))
    throw Error("encoding '" + bitstring + "' does not have n(n-1)/2 bits for n=" + std::to_string(n));
  CanonicalForm f{n, 0};
  for (char c : bitstring) {
    if (c != '0' && c != '1') throw Error("encoding '" + bitstring + "' must consist of 0 and 1");
    f.bits = (f.bits << 1) | (c == '1' ? 1U : 0U);
  }
  return f;
}

CanonicalForm labeled_code(const PatternGraph& g) {
  const int n = g.vertex_count();
  if (pair_count(n) > 64) throw Error("labeled code supports at most 11 vertices");
  const int total = pair_count(n);
  CanonicalForm f{n, 0};
  for (const Pair& p : g.edges()) f.bits |= std::uint64_t{1} << (total - 1 - pair_index(n, p));
  return f;
}

CanonicalForm canonical_form(const PatternGraph& g) { return canonicalize(g).form; }

std::vector<int> canonical_labeling(const PatternGraph& g) { return canonicalize(g).labeling; }

bool are_isomorphic(const PatternGraph& a, const PatternGraph& b) {
  if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
  return canonical_form(a) == canonical_form(b);
}

std::string PatternClassId::name() const {
  return "e" + std::to_string(e) + "." + std::to_string(ordinal);
}

PatternCatalog::PatternCatalog(int n, std::vector<PatternClassId> classes)
    : n_(n), classes_(std::move(classes)) {
  std::sort(classes_.begin(), classes_.end(), [](const PatternClassId& a, const PatternClassId& b) {
    return std::pair(a.e, a.form) < std::pair(b.e, b.form);
  });
  // stratum_begin_[e] = number of classes with fewer than e edges.
  stratum_begin_.assign(static_cast<std::size_t>(max_edges() + 2), 0);
  int ordinal = 0;
  int last_e = -1;
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    PatternClassId& c = classes_[k];
    if (c.n != n || c.form.n != n) throw Error("pattern class belongs to a different n");
    if (c.e != c.form.edge_count()) throw Error("pattern class edge count does not match its encoding");
    if (c.e != last_e) {
      ordinal = 0;
      last_e = c.e;
    }
    c.ordinal = ordinal++;
    for (int e = c.e + 1; e <= max_edges() + 1; ++e) ++stratum_begin_[static_cast<std::size_t>(e)];
    if (!index_.emplace(c.form, static_cast<int>(k)).second)
      throw Error("duplicate pattern class " + c.form.to_string());
  }
}

std::span<const PatternClassId> PatternCatalog::stratum(int e) const {
  if (e < 0 || e > max_edges()) return {};
  const std::size_t b = stratum_begin_[static_cast<std::size_t>(e)];
  const std::size_t end = stratum_begin_[static_cast<std::size_t>(e) + 1];
  return std::span<const PatternClassId>(classes_).subspan(b, end - b);
}

std::vector<int> PatternCatalog::stratum_counts() const {
  std::vector<int> counts;
  for (int e = min_edges(); e <= max_edges(); ++e) counts.push_back(static_cast<int>(stratum(e).size()));
  return counts;
}

int PatternCatalog::index_of(const CanonicalForm& f) const {
  const auto it = index_.find(f);
  return it == index_.end() ? -1 : it->second;
}

int PatternCatalog::index_of_name(const std::string& name) const {
  for (std::size_t k = 0; k < classes_.size(); ++k)
    if (classes_[k].name() == name) return static_cast<int>(k);
  return -1;
}

const PatternClassId& PatternCatalog::classify(const PatternGraph& g) const {
  if (g.vertex_count() != n_) throw Error("graph has a different vertex count than the catalog");
  if (!is_connected(g)) throw Error("pattern " + pcq::to_string(g) + " is disconnected");
  const int k = index_of(canonical_form(g));
  if (k < 0) throw Error("pattern " + pcq::to_string(g) + " is not in the catalog");
  return classes_[static_cast<std::size_t>(k)];
}

namespace {

// Labeled trees via Pruefer sequences; every tree on n vertices arises.
void for_each_labeled_tree(int n, const auto& visit) {
  if (n == 2) {
    visit(PatternGraph(2, {Pair(0, 1)}));
    return;
  }
  const int len = n - 2;
  std::vector<int> seq(static_cast<std::size_t>(len), 0);
  while (true) {
    std::vector<int> degree(static_cast<std::size_t>(n), 1);
    for (int v : seq) ++degree[v];
    PatternGraph tree(n);
    for (int v : seq) {
      int leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      tree.add_edge(leaf, v);
      --degree[leaf];
      --degree[v];
    }
    int u = -1;
    for (int w = 0; w < n; ++w)
      if (degree[w] == 1) {
        if (u < 0) u = w;
        else tree.add_edge(u, w);
      }
    visit(tree);
    int pos = len - 1;
    while (pos >= 0 && ++seq[pos] == n) seq[pos--] = 0;
    if (pos < 0) break;
  }
}

}  // namespace

PatternCatalog enumerate_connected_classes(int n) {
  if (n < 2) throw Error("pattern enumeration needs n >= 2");
  check_canonical_bound(n);
  std::set<CanonicalForm> layer;
  for_each_labeled_tree(n, [&](const PatternGraph& t) { layer.insert(canonical_form(t)); });

  // Every connected graph with a cycle keeps connectivity after deleting a
  // cycle edge, so each stratum is reached from the one below.
  std::vector<PatternClassId> classes;
  for (int e = n - 1; e <= pair_count(n); ++e) {
    std::set<CanonicalForm> next;
    for (const CanonicalForm& f : layer) {
      classes.push_back(PatternClassId{n, e, f, 0});
      if (e == pair_count(n)) continue;
      const PatternGraph g = f.graph();
      for (const Pair& p : g.non_edges()) next.insert(canonical_form(g.with_edge(p.first, p.second)));
    }
    layer = std::move(next);
  }
  return PatternCatalog(n, std::move(classes));
}

GraphOfGraphs::GraphOfGraphs(PatternCatalog catalog) : catalog_(std::move(catalog)) {
  const auto& classes = catalog_.classes();
  up_.resize(classes.size());
  down_.resize(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const PatternGraph g = classes[k].representative();
    std::set<int> targets;
    for (const Pair& p : g.non_edges()) {
      const int t = catalog_.index_of(canonical_form(g.with_edge(p.first, p.second)));
      if (t < 0) throw Error("catalog is not closed under edge addition");
      targets.insert(t);
    }
    for (int t : targets) {
      up_[k].push_back(t);
      down_[static_cast<std::size_t>(t)].push_back(static_cast<int>(k));
    }
  }
  for (auto& d : down_) std::sort(d.begin(), d.end());
}

std::vector<std::pair<int, int>> GraphOfGraphs::meta_edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t k = 0; k < up_.size(); ++k)
    for (int t : up_[k]) out.emplace_back(static_cast<int>(k), t);
  return out;
}

GraphOfGraphs build_graph_of_graphs(const PatternCatalog& catalog) { return GraphOfGraphs(catalog); }

std::vector<PatternClassId> neighbors(const GraphOfGraphs& gog, const PatternClassId& c, Stratum direction) {
  const int k = gog.catalog().index_of(c.form);
  if (k < 0 || c.n != gog.n()) throw Error("pattern " + c.form.to_string() + " is not a NODE of this graph");
  std::vector<PatternClassId> out;
  for (int t : direction == Stratum::Up ? gog.up(k) : gog.down(k)) out.push_back(gog.catalog().at(t));
  return out;
}

namespace {

Json edges_json(const PatternGraph& g) {
  Json edges = Json::array();
  for (const Pair& p : g.edges()) edges.push_back({p.first, p.second});
  return edges;
}

}  // namespace

std::string to_dot(const GraphOfGraphs& gog) {
  const PatternCatalog& cat = gog.catalog();
  std::ostringstream os;
  os << "graph graph_of_graphs_n" << cat.n() << " {\n";
  os << "  node [shape=box, fontsize=10];\n";
  for (int e = cat.min_edges(); e <= cat.max_edges(); ++e) {
    os << "  subgraph cluster_e" << e << " {\n";
    os << "    label=\"e=" << e << "\";\n";
    os << "    rank=same;\n";
    for (const PatternClassId& c : cat.stratum(e))
      os << "    \"" << c.name() << "\" [label=\"" << c.name() << "\\n" << to_string(c.representative()) << "\"];\n";
    os << "  }\n";
  }
  for (const auto& [a, b] : gog.meta_edges())
    os << "  \"" << cat.at(a).name() << "\" -- \"" << cat.at(b).name() << "\";\n";
  os << "}\n";
  return os.str();
}

std::string to_json(const GraphOfGraphs& gog) {
  const PatternCatalog& cat = gog.catalog();
  Json nodes = Json::array();
  for (const PatternClassId& c : cat.classes())
    nodes.push_back({{"id", c.name()}, {"e", c.e}, {"edges", edges_json(c.representative())}});
  Json meta = Json::array();
  for (const auto& [a, b] : gog.meta_edges()) meta.push_back({cat.at(a).name(), cat.at(b).name()});
  Json doc = {{"n", cat.n()}, {"nodes", nodes}, {"meta_edges", meta}};
  return doc.dump(2) + "\n";
}

std::string catalog_to_json(const PatternCatalog& catalog) {
  Json classes = Json::array();
  for (const PatternClassId& c : catalog.classes())
    classes.push_back({{"id", c.name()},
                       {"e", c.e},
                       {"ordinal", c.ordinal},
                       {"encoding", c.form.to_string()},
                       {"edges", edges_json(c.representative())}});
  Json doc = {{"n", catalog.n()}, {"classes", classes}};
  return doc.dump(2) + "\n";
}

PatternCatalog catalog_from_json(const std::string& text) {
  try {
    const Json doc = Json::parse(text);
    const int n = doc.at("n").get<int>();
    std::vector<PatternClassId> classes;
    for (const Json& c : doc.at("classes")) {
      const CanonicalForm f = CanonicalForm::parse(n, c.at("encoding").get<std::string>());
      if (n <= kMaxCanonicalVertices && canonical_form(f.graph()) != f)
        throw Error("encoding " + f.to_string() + " is not canonical");
      classes.push_back(PatternClassId{n, f.edge_count(), f, 0});
    }
    return PatternCatalog(n, std::move(classes));
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed pattern catalog: ") + e.what());
  }
}

}  // namespace pcq
