// pcq: pairwise-comparison questionnaire tool.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcq/evaluation.hpp"
#include "pcq/matrix_io.hpp"
#include "pcq/patterns.hpp"
#include "pcq/sequencing.hpp"
#include "pcq/service.hpp"
#include "pcq/text_io.hpp"

using namespace pcq;
using Json = nlohmann::json;

namespace {

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text_file(out, text);
}

std::string matrices_csv(const std::vector<PairwiseComparisonMatrix>& pcms) {
  std::ostringstream os;
  for (std::size_t k = 0; k < pcms.size(); ++k) {
    if (k > 0) os << '\n';
    write_matrix_csv(os, pcms[k]);
  }
  return os.str();
}

// "1-4 1-5,2-4": 1-based pairs separated by spaces or commas.
std::vector<Pair> parse_pair_list(const std::string& text, int n) {
  std::vector<Pair> out;
  std::string token;
  std::istringstream in(text);
  while (in >> token) {
    std::istringstream parts(token);
    std::string piece;
    while (std::getline(parts, piece, ',')) {
      if (piece.empty()) continue;
      const auto dash = piece.find('-');
      if (dash == std::string::npos) throw Error("pair '" + piece + "' must look like 1-4");
      int a = 0, b = 0;
      try {
        a = std::stoi(piece.substr(0, dash)) - 1;
        b = std::stoi(piece.substr(dash + 1)) - 1;
      } catch (const std::exception&) {
        throw Error("pair '" + piece + "' must look like 1-4");
      }
      if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw Error("pair '" + piece + "' out of range");
      out.push_back(a < b ? Pair{a, b} : Pair{b, a});
    }
  }
  return out;
}

struct SimOptions {
  int n = 6;
  int samples = 1000;
  double delta = 2.0;
  double spread = 9.0;
  std::uint64_t seed = 42;
  std::string discretize;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--n", n, "Number of alternatives")->capture_default_str();
    cmd->add_option("--N", samples, "Number of simulated matrices")->capture_default_str();
    cmd->add_option("--delta", delta, "Perturbation factor bound (1 = consistent)")->capture_default_str();
    cmd->add_option("--r", spread, "Weight spread")->capture_default_str();
    cmd->add_option("--discretize", discretize, "Snap entries to a scale, e.g. S=1.5,M=1.7,L=2");
  }
  SimulationConfig config(std::uint64_t master) const {
    SimulationConfig cfg;
    cfg.n = n;
    cfg.samples = samples;
    cfg.delta = delta;
    cfg.spread = spread;
    cfg.seed = master;
    if (!discretize.empty()) cfg.discretize = parse_scale(discretize);
    cfg.validate();
    return cfg;
  }
};

Json path_doc(const EvaluationTable& table, const std::vector<PatternClassId>& path) {
  Json nodes = Json::array();
  for (const auto& c : path) {
    const auto* r = table.find(c.form);
    nodes.push_back({{"id", c.name()},
                     {"e", c.e},
                     {"encoding", c.form.to_string()},
                     {"rank_distance", r->rank_distance},
                     {"rank_tau", r->rank_tau},
                     {"flags", flags_to_string(r->flags)}});
  }
  const PathScore s = path_score(table, path);
  return {{"n", table.n()},
          {"start_e", path.front().e},
          {"path", nodes},
          {"score", {{"optimal", s.optimal}, {"near_optimal", s.near_optimal}, {"rank_sum", s.rank_sum}}}};
}

std::vector<PatternClassId> path_from_doc(const Json& doc, const PatternCatalog& cat) {
  std::vector<PatternClassId> path;
  for (const Json& node : doc.at("path")) {
    const int k = cat.index_of(CanonicalForm::parse(cat.n(), node.at("encoding").get<std::string>()));
    if (k < 0) throw Error("path NODE " + node.at("encoding").get<std::string>() + " is not a connected pattern class");
    path.push_back(cat.at(k));
  }
  if (path.empty()) throw Error("path document has no NODEs");
  return path;
}

int run(int argc, char** argv) {
  CLI::App app{"Plan, evaluate and administer pairwise-comparison questionnaires"};
  app.require_subcommand(1);

  int n = 6;
  std::string out;

  auto* enumerate = app.add_subcommand("enumerate", "Connected comparison patterns per number of comparisons");
  enumerate->add_option("--n", n, "Number of alternatives (2..8)")->capture_default_str();
  enumerate->add_option("--out", out, "Write the pattern catalog JSON here");

  std::string format = "dot";
  auto* gog = app.add_subcommand("gog", "Graph of graphs export");
  gog->add_option("--n", n, "Number of alternatives (2..8)")->capture_default_str();
  gog->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}))->capture_default_str();
  gog->add_option("--out", out, "Output file (default stdout)");

  SimOptions sim;
  std::uint64_t seed = 42;
  auto* simulate = app.add_subcommand("simulate", "Write a simulated population of complete matrices");
  sim.add_to(simulate);
  simulate->add_option("--seed", seed, "Master seed")->capture_default_str();
  simulate->add_option("--out", out, "Output file (default stdout)");

  std::string dir, verbal, scale_text;
  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and write it as one matrix file");
  auto* ingest_dir = ingest->add_option("--dir", dir, "Matrix file or directory of matrix files");
  auto* ingest_verbal = ingest->add_option("--verbal", verbal, "Verbal judgment file or directory");
  ingest_dir->excludes(ingest_verbal);
  ingest->add_option("--scale", scale_text, "Verbal scale, e.g. S=1.5,M=1.7,L=2");
  ingest->add_option("--out", out, "Output file (default stdout)");

  std::string data, patterns_file, json_out;
  bool use_sim = false;
  int permutations = kDefaultPermutations;
  auto* evaluate = app.add_subcommand("evaluate", "Rank every pattern against complete-data weights");
  auto* eval_data = evaluate->add_option("--data", data, "Matrix file or directory");
  auto* eval_sim = evaluate->add_flag("--sim", use_sim, "Use a simulated population");
  eval_data->excludes(eval_sim);
  evaluate->add_option("--verbal", verbal, "Verbal judgment file or directory")->excludes(eval_data)->excludes(eval_sim);
  evaluate->add_option("--scale", scale_text, "Verbal scale for --verbal");
  evaluate->add_option("--patterns", patterns_file, "Pattern catalog JSON (default: enumerate)");
  evaluate->add_option("--seed", seed, "Seed for simulation and relabelings")->capture_default_str();
  evaluate->add_option("--permutations", permutations, "Random relabelings per matrix")->capture_default_str();
  sim.add_to(evaluate);
  evaluate->add_option("--out", out, "CSV output (default stdout)");
  evaluate->add_option("--json", json_out, "JSON output");
  std::string report_out;
  evaluate->add_option("--report", report_out, "Per-stratum ranking CSV");

  std::string table_file;
  int start_e = -1;
  auto* path_cmd = app.add_subcommand("path", "Optimal path through the graph of graphs");
  path_cmd->add_option("--table", table_file, "Evaluation table (.csv or .json)")->required();
  path_cmd->add_option("--start-e", start_e, "First stratum (default n)");
  path_cmd->add_option("--out", out, "Path JSON output (default stdout)");

  std::string path_file, prefer, seed_graph;
  auto* sequence = app.add_subcommand("sequence", "Labeled filling sequence and questionnaire exports");
  sequence->add_option("--path", path_file, "Path JSON from `path` (default: simulated default pipeline)");
  sequence->add_option("--n", n, "Number of alternatives for the default pipeline")->capture_default_str();
  sequence->add_option("--seed-graph", seed_graph, "Labels for the first NODE, e.g. \"1-4 1-5 2-4\"");
  sequence->add_option("--prefer", prefer, "Pairs tried first when adding edges, e.g. \"2-5 3-4\"");
  sequence->add_option("--out", out, "Output directory for sequence.json, sequence.md, sequence.dot");

  std::string names_text;
  bool free_order = false;
  std::string data_dir;
  auto* ask = app.add_subcommand("ask", "Answer a questionnaire in the terminal");
  ask->add_option("--n", n, "Number of alternatives")->capture_default_str();
  ask->add_option("--names", names_text, "Comma-separated alternative names");
  ask->add_option("--scale", scale_text, "Verbal scale");
  ask->add_flag("--free-order", free_order, "Accept answers in any order");
  ask->add_option("--data-dir", data_dir, "Session storage (default $PCQ_DATA_DIR)");

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "HTTP questionnaire service under /v1");
  serve->add_option("--port", port, "Port")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Session storage (default $PCQ_DATA_DIR)");
  serve->add_option("--permutations", permutations, "Relabelings per matrix for default sequences")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*enumerate) {
    const auto cat = enumerate_connected_classes(n);
    const auto counts = cat.stratum_counts();
    std::ostringstream line;
    for (int e = cat.min_edges(); e <= cat.max_edges(); ++e) {
      std::cout << "e=" << e << ": " << counts[e - cat.min_edges()] << "\n";
      line << (e > cat.min_edges() ? "," : "") << counts[e - cat.min_edges()];
    }
    std::cout << "counts: " << line.str() << "\ntotal: " << cat.size() << "\n";
    if (!out.empty()) write_text_file(out, catalog_to_json(cat));
    return 0;
  }
  if (*gog) {
    const GraphOfGraphs g(enumerate_connected_classes(n));
    emit(format == "dot" ? to_dot(g) : to_json(g), out);
    return 0;
  }
  if (*simulate) {
    emit(matrices_csv(simulate_population(sim.config(seed))), out);
    return 0;
  }
  if (*ingest) {
    std::vector<PairwiseComparisonMatrix> pcms;
    if (!dir.empty()) pcms = ingest_dataset(dir);
    else if (!verbal.empty()) pcms = ingest_verbal_dataset(verbal, scale_text.empty() ? Scale{} : parse_scale(scale_text));
    else throw Error("ingest needs --dir or --verbal");
    std::cerr << "ingested " << pcms.size() << " matrices of size " << pcms.front().size() << "\n";
    emit(matrices_csv(pcms), out);
    return 0;
  }
  if (*evaluate) {
    std::vector<PairwiseComparisonMatrix> pcms;
    std::string source;
    if (!data.empty()) {
      pcms = ingest_dataset(data);
      source = "data " + data;
    } else if (!verbal.empty()) {
      pcms = ingest_verbal_dataset(verbal, scale_text.empty() ? Scale{} : parse_scale(scale_text));
      source = "verbal " + verbal;
    } else if (use_sim) {
      const SimulationConfig cfg = sim.config(seed);
      pcms = simulate_population(cfg);
      source = cfg.describe();
    } else {
      throw Error("evaluate needs --data, --verbal or --sim");
    }
    const PatternCatalog cat = patterns_file.empty() ? enumerate_connected_classes(pcms.front().size())
                                                     : catalog_from_json(read_text_file(patterns_file));
    EvaluationOptions options;
    options.seed = seed;
    options.permutations = permutations;
    options.source = source + " permutations=" + std::to_string(permutations);
    const EvaluationTable table = evaluate_patterns(pcms, cat, options);
    emit(to_csv(table), out);
    if (!json_out.empty()) write_text_file(json_out, to_json(table));
    if (!report_out.empty()) write_text_file(report_out, report_to_csv(table));
    return 0;
  }
  if (*path_cmd) {
    const EvaluationTable table = load_table(table_file);
    const GraphOfGraphs g(enumerate_connected_classes(table.n()));
    if (start_e < 0) start_e = default_start_e(table.n());
    const auto path = optimal_path(g, table, start_e);
    for (const auto& c : path) {
      const auto* r = table.find(c.form);
      std::cerr << c.name() << " (distance rank " << r->rank_distance << ", tau rank " << r->rank_tau << ")\n";
    }
    emit(path_doc(table, path).dump(2) + "\n", out);
    return 0;
  }
  if (*sequence) {
    std::vector<PatternClassId> path;
    if (path_file.empty()) {
      path = build_default_pipeline(n).path;
    } else {
      const Json doc = Json::parse(read_text_file(path_file));
      path = path_from_doc(doc, enumerate_connected_classes(doc.at("n").get<int>()));
    }
    const int size = path.front().n;
    RealizeOptions options;
    if (!seed_graph.empty()) {
      PatternGraph g(size);
      for (const Pair& p : parse_pair_list(seed_graph, size)) g.add_edge(p.first, p.second);
      options.seed = g;
    }
    options.preferred_order = parse_pair_list(prefer, size);
    const FillingSequence seq = realize_sequence(path, options);
    if (out.empty()) {
      std::cout << to_markdown(seq);
      return 0;
    }
    const std::filesystem::path dir_out(out);
    write_text_file((dir_out / "sequence.json").string(), to_json(seq));
    write_text_file((dir_out / "sequence.md").string(), to_markdown(seq));
    write_text_file((dir_out / "sequence.dot").string(), to_dot(seq));
    std::cout << to_markdown(seq);
    return 0;
  }
  if (*ask || *serve) {
    std::optional<std::filesystem::path> storage = data_dir_from_env();
    if (!data_dir.empty()) storage = std::filesystem::path(data_dir);
    QuestionnaireService service(storage, {}, permutations);
    if (*serve) {
      HttpServer server(service);
      const int bound = server.bind(host, port);
      std::cerr << "serving /v1 on http://" << host << ":" << bound << "\n";
      server.listen();
      return 0;
    }
    SessionConfig config;
    config.n = n;
    if (!names_text.empty()) {
      std::stringstream ss(names_text);
      for (std::string name; std::getline(ss, name, ',');) config.names.push_back(name);
      config.n = static_cast<int>(config.names.size());
    } else {
      for (int i = 0; i < n; ++i) config.names.push_back("A" + std::to_string(i + 1));
    }
    if (!scale_text.empty()) config.scale = parse_scale(scale_text);
    config.free_order = free_order;
    const auto pipeline = service.pipeline(config.n);
    config.sequence = pipeline->sequence;
    const Session s = service.store().create(config);
    std::cout << "session " << s.id() << "\n";
    run_terminal_session(service.store(), s.id(), std::cin, std::cout, pipeline->catalog);
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
