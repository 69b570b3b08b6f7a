#include "pcq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pcq/llsm.hpp"
#include "pcq/matrix_io.hpp"
#include "pcq/metrics.hpp"
#include "pcq/text_io.hpp"

namespace pcq {

namespace {

using Json = nlohmann::json;

constexpr std::uint64_t kSimulationStream = 1;
constexpr std::uint64_t kPermutationStream = 2;

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

struct MeanAccumulator {
  CompensatedSum sum;
  CompensatedSum sum_sq;
  int count = 0;

  void add(double x) {
    sum.add(x);
    sum_sq.add(x * x);
    ++count;
  }
  double mean() const { return count == 0 ? 0.0 : sum.value() / count; }
  double standard_error() const {
    if (count < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq.value() - count * m * m) / (count - 1));
    return std::sqrt(var / count);
  }
};

double snap_to_scale(double value, const Scale& scale) {
  double best = 1.0;
  double best_gap = std::abs(std::log(value));
  for (double candidate : scale.value_set()) {
    const double gap = std::abs(std::log(value) - std::log(candidate));
    if (gap < best_gap) {
      best = candidate;
      best_gap = gap;
    }
  }
  return best;
}

std::vector<std::filesystem::path> sorted_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

PairwiseComparisonMatrix require_complete(const IncompleteMatrix& m, const std::string& source) {
  if (!m.is_complete()) throw Error(source + ": matrix has missing entries; complete matrices are required");
  return m.to_complete();
}

void check_common_size(const std::vector<PairwiseComparisonMatrix>& pcms, const std::string& source) {
  if (!pcms.empty() && pcms.back().size() != pcms.front().size())
    throw Error(source + ": matrix size " + std::to_string(pcms.back().size()) + " differs from " +
                std::to_string(pcms.front().size()) + " in earlier input");
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

void SimulationConfig::validate() const {
  if (n < 2) throw Error("simulation needs n >= 2");
  if (!(spread >= 1.0)) throw Error("weight spread r must be >= 1");
  if (!(delta >= 1.0)) throw Error("perturbation delta must be >= 1");
  if (samples < 1) throw Error("sample count N must be >= 1");
  if (discretize) discretize->validate();
}

std::string SimulationConfig::describe() const {
  std::ostringstream os;
  os << "simulated n=" << n << " N=" << samples << " delta=" << delta << " r=" << spread
     << " seed=" << seed;
  if (discretize) os << " discretize=" << to_string(*discretize);
  os << " (log-uniform weights, log-uniform multiplicative noise; model defaults of this tool)";
  return os.str();
}

SimulatedSample simulate_sample(const SimulationConfig& cfg, std::uint64_t index) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, index, kSimulationStream));
  const int n = cfg.n;
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = std::exp(rng.uniform(0.0, std::log(cfg.spread)));
  w /= w.sum();
  const double log_delta = std::log(cfg.delta);
  Eigen::MatrixXd upper = Eigen::MatrixXd::Ones(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double noise = rng.uniform(-log_delta, log_delta);
      double a = w(i) / w(j);
      if (cfg.delta > 1.0) a *= std::exp(noise);
      if (cfg.discretize) a = snap_to_scale(a, *cfg.discretize);
      upper(i, j) = a;
    }
  return SimulatedSample{PairwiseComparisonMatrix::from_upper(upper), w};
}

PairwiseComparisonMatrix simulate_pcm(const SimulationConfig& cfg, std::uint64_t index) {
  return simulate_sample(cfg, index).pcm;
}

std::vector<PairwiseComparisonMatrix> simulate_population(const SimulationConfig& cfg) {
  cfg.validate();
  std::vector<PairwiseComparisonMatrix> out;
  out.reserve(static_cast<std::size_t>(cfg.samples));
  for (int s = 0; s < cfg.samples; ++s) out.push_back(simulate_pcm(cfg, static_cast<std::uint64_t>(s)));
  return out;
}

std::vector<PairwiseComparisonMatrix> ingest_dataset(const std::string& path) {
  std::vector<PairwiseComparisonMatrix> out;
  if (std::filesystem::is_directory(path)) {
    for (const auto& file : sorted_files(path)) {
      const std::string name = file.string();
      out.push_back(require_complete(read_matrix_file(name), name));
      check_common_size(out, name);
    }
  } else {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    int block = 0;
    for (const auto& m : read_matrices_csv(in, path)) {
      out.push_back(require_complete(m, path + " matrix " + std::to_string(block++)));
      check_common_size(out, path);
    }
  }
  if (out.empty()) throw Error(path + ": no matrices found");
  return out;
}

std::vector<PairwiseComparisonMatrix> ingest_verbal_dataset(const std::string& path, const Scale& scale) {
  std::vector<std::string> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& f : sorted_files(path)) files.push_back(f.string());
  } else {
    files.push_back(path);
  }
  std::vector<PairwiseComparisonMatrix> out;
  for (const auto& file : files) {
    const auto judgments = read_verbal_file(file);
    int n = 0;
    for (const auto& j : judgments) n = std::max({n, j.first + 1, j.second + 1});
    IncompleteMatrix m;
    try {
      m = from_verbal(judgments, scale, n);
    } catch (const Error& e) {
      throw Error(file + ": " + e.what());
    }
    out.push_back(require_complete(m, file));
    check_common_size(out, file);
  }
  if (out.empty()) throw Error(path + ": no verbal judgment files found");
  return out;
}

std::string flags_to_string(unsigned flags) {
  static const std::pair<unsigned, const char*> names[] = {
      {kOptimalBoth, "OPTIMAL_BOTH"}, {kOptimalDistance, "OPTIMAL_DISTANCE"}, {kOptimalTau, "OPTIMAL_TAU"},
      {kSplit, "SPLIT"},              {kSecondBest, "SECOND_BEST"}};
  std::string out;
  for (const auto& [bit, name] : names)
    if (flags & bit) {
      if (!out.empty()) out += '|';
      out += name;
    }
  return out;
}

unsigned flags_from_string(const std::string& text) {
  unsigned flags = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t bar = std::min(text.find('|', pos), text.size());
    const std::string name = text.substr(pos, bar - pos);
    pos = bar + 1;
    if (name.empty()) continue;
    if (name == "OPTIMAL_BOTH") flags |= kOptimalBoth;
    else if (name == "OPTIMAL_DISTANCE") flags |= kOptimalDistance;
    else if (name == "OPTIMAL_TAU") flags |= kOptimalTau;
    else if (name == "SPLIT") flags |= kSplit;
    else if (name == "SECOND_BEST") flags |= kSecondBest;
    else throw Error("unknown flag '" + name + "'");
  }
  return flags;
}

EvaluationTable::EvaluationTable(int n, std::vector<ClassStatistics> rows, std::string source)
    : n_(n), rows_(std::move(rows)), source_(std::move(source)) {
  std::sort(rows_.begin(), rows_.end(), [](const ClassStatistics& a, const ClassStatistics& b) {
    return std::pair(a.pattern.e, a.pattern.form) < std::pair(b.pattern.e, b.pattern.form);
  });
  rank();
}

const ClassStatistics* EvaluationTable::find(const CanonicalForm& form) const {
  for (const auto& r : rows_)
    if (r.pattern.form == form) return &r;
  return nullptr;
}

std::vector<const ClassStatistics*> EvaluationTable::stratum(int e) const {
  std::vector<const ClassStatistics*> out;
  for (const auto& r : rows_)
    if (r.pattern.e == e) out.push_back(&r);
  return out;
}

bool EvaluationTable::is_split(int e) const {
  for (const auto* r : stratum(e))
    if (r->flags & kSplit) return true;
  return false;
}

namespace {

// Competition ranking in the given order; neighbours within the tie
// threshold share a rank.
template <typename Key>
void assign_ranks(std::vector<ClassStatistics*>& rows, Key key, bool ascending, int ClassStatistics::*rank) {
  std::stable_sort(rows.begin(), rows.end(), [&](const ClassStatistics* a, const ClassStatistics* b) {
    return ascending ? key(*a) < key(*b) : key(*a) > key(*b);
  });
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k > 0 && std::abs(key(*rows[k]) - key(*rows[k - 1])) < kTieThreshold)
      rows[k]->*rank = rows[k - 1]->*rank;
    else
      rows[k]->*rank = static_cast<int>(k) + 1;
  }
}

}  // namespace

void EvaluationTable::rank() {
  int max_e = 0;
  for (const auto& r : rows_) max_e = std::max(max_e, r.pattern.e);
  for (int e = 0; e <= max_e; ++e) {
    std::vector<ClassStatistics*> stratum_rows;
    for (auto& r : rows_)
      if (r.pattern.e == e) stratum_rows.push_back(&r);
    if (stratum_rows.empty()) continue;
    assign_ranks(stratum_rows, [](const ClassStatistics& r) { return r.mean_distance; }, true,
                 &ClassStatistics::rank_distance);
    assign_ranks(stratum_rows, [](const ClassStatistics& r) { return r.mean_tau; }, false,
                 &ClassStatistics::rank_tau);
    bool split = false;
    for (auto* r : stratum_rows)
      if ((r->rank_distance == 1) != (r->rank_tau == 1)) split = true;
    for (auto* r : stratum_rows) {
      unsigned f = 0;
      if (r->rank_distance == 1) f |= kOptimalDistance;
      if (r->rank_tau == 1) f |= kOptimalTau;
      if (r->rank_distance == 1 && r->rank_tau == 1) f |= kOptimalBoth;
      if (split && (r->rank_distance == 1 || r->rank_tau == 1)) f |= kSplit;
      if (!(f & kOptimalBoth) && r->rank_distance <= 2 && r->rank_tau <= 2) f |= kSecondBest;
      r->flags = f;
    }
  }
}

EvaluationTable evaluate_patterns(const std::vector<PairwiseComparisonMatrix>& pcms,
                                  const PatternCatalog& catalog, const EvaluationOptions& options) {
  if (options.permutations < 1) throw Error("permutations per matrix must be >= 1");
  const auto& classes = catalog.classes();
  const int n = catalog.n();
  std::vector<PatternSolver> solvers;
  solvers.reserve(classes.size());
  for (const auto& c : classes) solvers.emplace_back(c.representative());
  const PatternSolver complete_solver(PatternGraph::complete(n));

  std::vector<MeanAccumulator> distance(classes.size());
  std::vector<MeanAccumulator> tau(classes.size());
  std::vector<double> sample_distance(classes.size());
  std::vector<double> sample_tau(classes.size());
  Eigen::MatrixXd log_entries(n, n);
  for (std::size_t s = 0; s < pcms.size(); ++s) {
    if (pcms[s].size() != n)
      throw Error("matrix " + std::to_string(s) + " has size " + std::to_string(pcms[s].size()) +
                  ", patterns are for n=" + std::to_string(n));
    const Eigen::MatrixXd logs = pcms[s].entries().array().log().matrix();
    std::fill(sample_distance.begin(), sample_distance.end(), 0.0);
    std::fill(sample_tau.begin(), sample_tau.end(), 0.0);
    const std::uint64_t sample_seed = derive_seed(options.seed, s, kPermutationStream);
    for (int r = 0; r < options.permutations; ++r) {
      const auto perm = random_permutation(n, derive_seed(sample_seed, static_cast<std::uint64_t>(r)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) log_entries(i, j) = logs(perm[i], perm[j]);
      const WeightVector complete = complete_solver.weights(log_entries);
      for (std::size_t k = 0; k < classes.size(); ++k) {
        const WeightVector partial = solvers[k].weights(log_entries);
        sample_distance[k] += euclidean_distance(partial, complete);
        sample_tau[k] += kendall_tau(partial, complete);
      }
    }
    for (std::size_t k = 0; k < classes.size(); ++k) {
      distance[k].add(sample_distance[k] / options.permutations);
      tau[k].add(sample_tau[k] / options.permutations);
    }
  }

  std::vector<ClassStatistics> rows;
  rows.reserve(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    ClassStatistics r;
    r.pattern = classes[k];
    r.mean_distance = distance[k].mean();
    r.se_distance = distance[k].standard_error();
    r.mean_tau = tau[k].mean();
    r.se_tau = tau[k].standard_error();
    r.samples = distance[k].count;
    rows.push_back(r);
  }
  return EvaluationTable(n, std::move(rows), options.source);
}

EvaluationTable evaluate_patterns(const std::vector<PairwiseComparisonMatrix>& pcms,
                                  const PatternCatalog& catalog, std::uint64_t seed, std::string source) {
  EvaluationOptions options;
  options.seed = seed;
  options.source = std::move(source);
  return evaluate_patterns(pcms, catalog, options);
}

std::vector<StratumReport> rank_report(const EvaluationTable& table) {
  std::vector<StratumReport> out;
  int max_e = -1;
  for (const auto& r : table.rows()) max_e = std::max(max_e, r.pattern.e);
  const auto& rows = table.rows();
  for (int e = 0; e <= max_e; ++e) {
    StratumReport rep;
    rep.e = e;
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (rows[k].pattern.e == e) rep.by_distance.push_back(static_cast<int>(k));
    if (rep.by_distance.empty()) continue;
    rep.by_tau = rep.by_distance;
    std::stable_sort(rep.by_distance.begin(), rep.by_distance.end(),
                     [&](int a, int b) { return rows[a].rank_distance < rows[b].rank_distance; });
    std::stable_sort(rep.by_tau.begin(), rep.by_tau.end(),
                     [&](int a, int b) { return rows[a].rank_tau < rows[b].rank_tau; });
    for (int k : rep.by_distance) {
      if (rows[k].rank_distance == 1) rep.best_distance.push_back(k);
      if (rows[k].rank_distance == 2) rep.second_distance.push_back(k);
    }
    for (int k : rep.by_tau) {
      if (rows[k].rank_tau == 1) rep.best_tau.push_back(k);
      if (rows[k].rank_tau == 2) rep.second_tau.push_back(k);
    }
    rep.split = rep.best_distance != rep.best_tau;
    rep.optimal_both = !rep.split;
    out.push_back(std::move(rep));
  }
  return out;
}

std::string to_csv(const EvaluationTable& table) {
  std::ostringstream os;
  os << "n,e,class_ordinal,canonical_encoding,mean_distance,se_distance,mean_tau,se_tau,rank_distance,rank_tau,flags\n";
  for (const auto& r : table.rows()) {
    os << table.n() << ',' << r.pattern.e << ',' << r.pattern.ordinal << ',' << r.pattern.form.to_string() << ','
       << format_double(r.mean_distance) << ',' << format_double(r.se_distance) << ','
       << format_double(r.mean_tau) << ',' << format_double(r.se_tau) << ',' << r.rank_distance << ','
       << r.rank_tau << ',' << flags_to_string(r.flags) << '\n';
  }
  return os.str();
}

namespace {

Json names_json(const EvaluationTable& table, const std::vector<int>& idx) {
  Json out = Json::array();
  for (int k : idx) out.push_back(table.rows()[static_cast<std::size_t>(k)].pattern.name());
  return out;
}

}  // namespace

std::string to_json(const EvaluationTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows()) {
    Json edges = Json::array();
    for (const Pair& p : r.pattern.representative().edges()) edges.push_back({p.first, p.second});
    rows.push_back({{"id", r.pattern.name()},
                    {"e", r.pattern.e},
                    {"class_ordinal", r.pattern.ordinal},
                    {"canonical_encoding", r.pattern.form.to_string()},
                    {"edges", edges},
                    {"samples", r.samples},
                    {"mean_distance", r.mean_distance},
                    {"se_distance", r.se_distance},
                    {"mean_tau", r.mean_tau},
                    {"se_tau", r.se_tau},
                    {"rank_distance", r.rank_distance},
                    {"rank_tau", r.rank_tau},
                    {"flags", flags_to_string(r.flags)}});
  }
  Json strata = Json::array();
  for (const auto& s : rank_report(table)) {
    strata.push_back({{"e", s.e},
                      {"by_distance", names_json(table, s.by_distance)},
                      {"by_tau", names_json(table, s.by_tau)},
                      {"best_distance", names_json(table, s.best_distance)},
                      {"best_tau", names_json(table, s.best_tau)},
                      {"second_distance", names_json(table, s.second_distance)},
                      {"second_tau", names_json(table, s.second_tau)},
                      {"optimal_both", s.optimal_both},
                      {"split", s.split}});
  }
  Json doc = {{"n", table.n()}, {"source", table.source()}, {"rows", rows}, {"strata", strata}};
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const EvaluationTable& table) {
  const auto join = [&](const std::vector<int>& idx) {
    std::string s;
    for (int k : idx) {
      if (!s.empty()) s += '|';
      s += table.rows()[static_cast<std::size_t>(k)].pattern.name();
    }
    return s;
  };
  std::ostringstream os;
  os << "e,status,best_distance,best_tau,second_distance,second_tau,order_by_distance,order_by_tau\n";
  for (const auto& s : rank_report(table))
    os << s.e << ',' << (s.split ? "SPLIT" : "OPTIMAL_BOTH") << ',' << join(s.best_distance) << ','
       << join(s.best_tau) << ',' << join(s.second_distance) << ',' << join(s.second_tau) << ','
       << join(s.by_distance) << ',' << join(s.by_tau) << '\n';
  return os.str();
}

namespace {

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(where + ": '" + s + "' is not a number");
  }
}

}  // namespace

EvaluationTable table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("evaluation CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "n,e,class_ordinal,canonical_encoding,mean_distance,se_distance,mean_tau,se_tau,rank_distance,rank_tau,flags")
    throw Error("evaluation CSV has an unexpected header");
  std::vector<ClassStatistics> rows;
  int n = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "evaluation CSV line " + std::to_string(line_no);
    const auto cells = split_csv_line(line);
    if (cells.size() != 11) throw Error(where + ": expected 11 columns");
    n = static_cast<int>(parse_double(cells[0], where));
    ClassStatistics r;
    r.pattern.n = n;
    r.pattern.form = CanonicalForm::parse(n, cells[3]);
    r.pattern.e = r.pattern.form.edge_count();
    if (r.pattern.e != static_cast<int>(parse_double(cells[1], where)))
      throw Error(where + ": edge count does not match the encoding");
    r.pattern.ordinal = static_cast<int>(parse_double(cells[2], where));
    r.mean_distance = parse_double(cells[4], where);
    r.se_distance = parse_double(cells[5], where);
    r.mean_tau = parse_double(cells[6], where);
    r.se_tau = parse_double(cells[7], where);
    rows.push_back(r);
  }
  if (rows.empty()) throw Error("evaluation CSV has no rows");
  return EvaluationTable(n, std::move(rows), "csv");
}

EvaluationTable table_from_json(const std::string& text) {
  try {
    const Json doc = Json::parse(text);
    const int n = doc.at("n").get<int>();
    std::vector<ClassStatistics> rows;
    for (const Json& j : doc.at("rows")) {
      ClassStatistics r;
      r.pattern.n = n;
      r.pattern.form = CanonicalForm::parse(n, j.at("canonical_encoding").get<std::string>());
      r.pattern.e = r.pattern.form.edge_count();
      r.pattern.ordinal = j.at("class_ordinal").get<int>();
      r.samples = j.value("samples", 0);
      r.mean_distance = j.at("mean_distance").get<double>();
      r.se_distance = j.at("se_distance").get<double>();
      r.mean_tau = j.at("mean_tau").get<double>();
      r.se_tau = j.at("se_tau").get<double>();
      rows.push_back(r);
    }
    return EvaluationTable(n, std::move(rows), doc.value("source", std::string("json")));
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed evaluation JSON: ") + e.what());
  }
}

EvaluationTable load_table(const std::string& path) {
  const std::string text = read_text_file(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return table_from_csv(text);
  return table_from_json(text);
}

}  // namespace pcq
