#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "pcq/patterns.hpp"

using namespace pcq;

namespace {

// Labeled brute force: every graph on n vertices, keep connected ones,
// group by canonical form.
std::map<int, std::set<CanonicalForm>> brute_force_classes(int n) {
  const auto pairs = all_pairs(n);
  std::map<int, std::set<CanonicalForm>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
    PatternGraph g(n);
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if ((mask >> k) & 1U) g.add_edge(pairs[k].first, pairs[k].second);
    if (is_connected(g)) out[g.edge_count()].insert(canonical_form(g));
  }
  return out;
}

bool isomorphic_by_search(const PatternGraph& a, const PatternGraph& b) {
  const int n = a.vertex_count();
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do {
    if (a.relabeled(p) == b) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

}  // namespace

TEST_CASE("canonical form is invariant under every relabeling") {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + static_cast<int>(rng.below(5));
    PatternGraph g(n);
    for (const Pair& p : all_pairs(n))
      if (rng.uniform01() < 0.5) g.add_edge(p.first, p.second);
    const CanonicalForm f = canonical_form(g);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      REQUIRE(canonical_form(g.relabeled(perm)) == f);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(g.relabeled(canonical_labeling(g)) == f.graph());
  }
}

TEST_CASE("canonical form separates non-isomorphic graphs") {
  CHECK(canonical_form(PatternGraph::star(6)) != canonical_form(PatternGraph::path(6)));
  const PatternGraph c6 = PatternGraph::cycle(6);
  CHECK(canonical_form(c6.relabeled({1, 2, 3, 4, 5, 0})) == canonical_form(c6));
  // Same degree sequence, different graphs: C6 versus two triangles.
  const PatternGraph triangles(6, {Pair(0, 1), Pair(1, 2), Pair(0, 2), Pair(3, 4), Pair(4, 5), Pair(3, 5)});
  CHECK(canonical_form(triangles) != canonical_form(c6));

  Rng rng(23);
  for (int t = 0; t < 300; ++t) {
    const int n = 5;
    const auto a = oracle::random_connected_graph(rng, n);
    const auto b = oracle::random_connected_graph(rng, n);
    if (a.edge_count() != b.edge_count()) continue;
    CHECK((canonical_form(a) == canonical_form(b)) == isomorphic_by_search(a, b));
  }
}

TEST_CASE("canonical form rejects n above the brute-force bound") {
  CHECK_THROWS_WITH_AS(canonical_form(PatternGraph(9)), doctest::Contains("n <= 8"), Error);
  CHECK_NOTHROW(canonical_form(PatternGraph::cycle(8)));
}

TEST_CASE("encoding text round trip") {
  const CanonicalForm f = canonical_form(PatternGraph::cycle(6));
  CHECK(f.to_string().size() == 15);
  CHECK(CanonicalForm::parse(6, f.to_string()) == f);
  CHECK(f.graph().edge_count() == 6);
  CHECK_THROWS_AS(CanonicalForm::parse(6, "0101"), Error);
}

TEST_CASE("n=6 enumeration matches labeled brute force stratum by stratum") {
  const PatternCatalog cat = enumerate_connected_classes(6);
  CHECK(cat.stratum_counts() == std::vector<int>{6, 13, 19, 22, 20, 14, 9, 5, 2, 1, 1});
  CHECK(cat.size() == 112);
  CHECK(cat.stratum(7).size() == 19);

  const auto oracle_classes = brute_force_classes(6);
  for (int e = 5; e <= 15; ++e) {
    std::set<CanonicalForm> got;
    for (const auto& c : cat.stratum(e)) got.insert(c.form);
    CHECK(got == oracle_classes.at(e));
  }
}

TEST_CASE("enumeration for small n against brute force") {
  for (int n = 2; n <= 5; ++n) {
    const PatternCatalog cat = enumerate_connected_classes(n);
    const auto oracle_classes = brute_force_classes(n);
    std::size_t total = 0;
    for (const auto& [e, s] : oracle_classes) total += s.size();
    CHECK(cat.size() == total);
    for (const auto& c : cat.classes()) CHECK(oracle_classes.at(c.e).count(c.form) == 1);
  }
  // Known totals of connected graphs: 1, 2, 6, 21, 112, 853.
  CHECK(enumerate_connected_classes(3).size() == 2);
  CHECK(enumerate_connected_classes(4).size() == 6);
  CHECK(enumerate_connected_classes(5).size() == 21);
  CHECK(enumerate_connected_classes(7).size() == 853);
}

TEST_CASE("catalog ordering and lookup") {
  const PatternCatalog cat = enumerate_connected_classes(6);
  for (int e = 5; e <= 15; ++e) {
    const auto s = cat.stratum(e);
    for (std::size_t k = 0; k < s.size(); ++k) {
      CHECK(s[k].e == e);
      CHECK(s[k].ordinal == static_cast<int>(k));
      CHECK(is_connected(s[k].representative()));
      if (k > 0) CHECK(s[k - 1].form < s[k].form);
    }
  }
  CHECK(cat.classify(PatternGraph::star(6, 3)).e == 5);
  CHECK(cat.classify(PatternGraph::cycle(6)) == cat.classify(PatternGraph::cycle(6).relabeled({3, 1, 4, 0, 5, 2})));
  CHECK_THROWS_AS(cat.classify(PatternGraph(6)), Error);
  CHECK(cat.index_of_name("e15.0") == static_cast<int>(cat.size()) - 1);

  const PatternCatalog back = catalog_from_json(catalog_to_json(cat));
  CHECK(back.size() == cat.size());
  for (std::size_t k = 0; k < cat.size(); ++k) CHECK(back.classes()[k].form == cat.classes()[k].form);
}

TEST_CASE("graph of graphs structure for n=6") {
  const GraphOfGraphs gog = build_graph_of_graphs(enumerate_connected_classes(6));
  const PatternCatalog& cat = gog.catalog();
  const PatternClassId& k6 = cat.stratum(15)[0];
  const PatternClassId& k6_minus = cat.stratum(14)[0];
  const PatternClassId& star = cat.classify(PatternGraph::star(6));
  const PatternClassId& c6 = cat.classify(PatternGraph::cycle(6));

  CHECK(neighbors(gog, k6, Stratum::Up).empty());
  CHECK(neighbors(gog, k6, Stratum::Down) == std::vector<PatternClassId>{k6_minus});
  CHECK(neighbors(gog, k6_minus, Stratum::Up) == std::vector<PatternClassId>{k6});

  // All ten leaf-leaf additions to a star are isomorphic.
  const auto star_up = neighbors(gog, star, Stratum::Up);
  REQUIRE(star_up.size() == 1);
  CHECK(star_up[0].form == canonical_form(PatternGraph::star(6).with_edge(1, 2)));

  // C6 plus one chord (antipodal or not) is an upward neighbour of C6.
  const auto c6_up = neighbors(gog, c6, Stratum::Up);
  const auto long_chord = canonical_form(PatternGraph::cycle(6).with_edge(0, 3));
  const auto short_chord = canonical_form(PatternGraph::cycle(6).with_edge(0, 2));
  CHECK(c6_up.size() == 2);
  CHECK(std::any_of(c6_up.begin(), c6_up.end(), [&](const auto& c) { return c.form == long_chord; }));
  CHECK(std::any_of(c6_up.begin(), c6_up.end(), [&](const auto& c) { return c.form == short_chord; }));

  PatternClassId foreign = k6;
  foreign.form.bits ^= 1;
  CHECK_THROWS_AS(neighbors(gog, foreign, Stratum::Up), Error);
}

TEST_CASE("graph of graphs invariants") {
  for (int n = 3; n <= 6; ++n) {
    const GraphOfGraphs gog = build_graph_of_graphs(enumerate_connected_classes(n));
    const auto& classes = gog.catalog().classes();
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const auto& c = classes[k];
      const int idx = static_cast<int>(k);
      for (int t : gog.up(idx)) CHECK(classes[static_cast<std::size_t>(t)].e == c.e + 1);
      if (c.e < pair_count(n)) CHECK_FALSE(gog.up(idx).empty());
      // Deletion duality: D is above C iff some deletion from D gives C.
      std::set<int> below;
      const PatternGraph g = c.representative();
      for (const Pair& p : g.edges()) {
        const PatternGraph h = g.without_edge(p.first, p.second);
        if (is_connected(h)) below.insert(gog.catalog().index_of(canonical_form(h)));
      }
      CHECK(std::vector<int>(below.begin(), below.end()) == gog.down(idx));
      // Trees are exactly the NODEs without downward EDGEs.
      CHECK(gog.down(idx).empty() == (c.e == n - 1));
    }
  }
}

TEST_CASE("graph of graphs exports") {
  const GraphOfGraphs gog = build_graph_of_graphs(enumerate_connected_classes(4));
  const auto doc = nlohmann::json::parse(to_json(gog));
  CHECK(doc["n"] == 4);
  CHECK(doc["nodes"].size() == 6);
  CHECK(doc["nodes"][0]["id"] == "e3.0");
  CHECK(doc["meta_edges"].size() == gog.meta_edges().size());
  const std::string dot = to_dot(gog);
  CHECK(dot.find("subgraph cluster_e3") != std::string::npos);
  CHECK(dot.find("subgraph cluster_e6") != std::string::npos);
  CHECK(dot.find("\"e5.0\" -- \"e6.0\"") != std::string::npos);
}
