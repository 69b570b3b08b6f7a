#include "pcq/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "pcq/rng.hpp"
#include "pcq/text_io.hpp"

namespace pcq {

namespace {

using Json = nlohmann::json;

Pair normalized(const Pair& p) { return p.first < p.second ? p : Pair{p.second, p.first}; }

std::string pair_name(const Pair& p) { return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")"; }

Json scale_json(const Scale& s) { return {{"S", s.slight}, {"M", s.moderate}, {"L", s.large}}; }

Scale scale_from_json(const Json& j) {
  if (j.is_string()) return parse_scale(j.get<std::string>());
  Scale s;
  s.slight = j.value("S", s.slight);
  s.moderate = j.value("M", s.moderate);
  s.large = j.value("L", s.large);
  s.validate();
  return s;
}

Json judgment_json(const Answer& a) {
  return {{"i", a.judgment.first},
          {"j", a.judgment.second},
          {"category", std::string(to_string(a.judgment.category))},
          {"direction", std::string(to_string(a.judgment.direction))},
          {"at", a.at}};
}

Answer answer_from_json(const Json& j) {
  Answer a;
  a.judgment.first = j.at("i").get<int>();
  a.judgment.second = j.at("j").get<int>();
  a.judgment.category = parse_category(j.at("category").get<std::string>());
  a.judgment.direction = parse_direction(j.at("direction").get<std::string>());
  a.at = j.value("at", std::string());
  return a;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json config_json(const SessionConfig& c) {
  return {{"n", c.n},
          {"names", c.names},
          {"scale", scale_json(c.scale)},
          {"free_order", c.free_order},
          {"sequence", Json::parse(to_json(c.sequence))}};
}

SessionConfig config_from_json(const Json& j) {
  SessionConfig c;
  c.n = j.at("n").get<int>();
  c.names = j.at("names").get<std::vector<std::string>>();
  c.scale = scale_from_json(j.at("scale"));
  c.free_order = j.value("free_order", false);
  c.sequence = sequence_from_json(j.at("sequence").dump());
  return c;
}

}  // namespace

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Active: return "active";
    case SessionStatus::Stopped: return "stopped";
    case SessionStatus::Complete: return "complete";
  }
  return "active";
}

SessionStatus parse_session_status(std::string_view text) {
  if (text == "active") return SessionStatus::Active;
  if (text == "stopped") return SessionStatus::Stopped;
  if (text == "complete") return SessionStatus::Complete;
  throw Error("unknown session status '" + std::string(text) + "'");
}

Session::Session(std::string id, SessionConfig config, std::string created_at)
    : id_(std::move(id)), config_(std::move(config)), created_at_(std::move(created_at)) {
  const int n = config_.n;
  if (n < 2) throw SessionError("bad_request", "a session needs n >= 2");
  if (static_cast<int>(config_.names.size()) != n)
    throw SessionError("bad_request", "expected " + std::to_string(n) + " names, got " +
                                          std::to_string(config_.names.size()));
  config_.scale.validate();
  if (config_.sequence.n != n)
    throw SessionError("bad_request", "sequence is for n=" + std::to_string(config_.sequence.n) + ", session has n=" +
                                          std::to_string(n));
  PatternGraph seen(n);
  for (const Pair& p : config_.sequence.pairs) {
    if (p.first < 0 || p.second >= n || p.first >= p.second)
      throw SessionError("bad_request", "sequence pair " + pair_name(p) + " is invalid");
    if (seen.has_edge(p.first, p.second))
      throw SessionError("bad_request", "sequence repeats pair " + pair_name(p));
    seen.add_edge(p.first, p.second);
  }
  if (static_cast<int>(config_.sequence.pairs.size()) != total())
    throw SessionError("bad_request", "sequence must list all " + std::to_string(total()) + " pairs");
  updated_at_ = created_at_;
  derive();
}

std::optional<Pair> Session::next() const {
  if (status_ == SessionStatus::Stopped) throw SessionError("session_stopped", "session " + id_ + " is stopped");
  for (const Pair& p : config_.sequence.pairs)
    if (!matrix_.known(p.first, p.second)) return p;
  return std::nullopt;
}

int Session::rank_of(const Pair& p) const {
  const Pair q = normalized(p);
  const auto& pairs = config_.sequence.pairs;
  const auto it = std::find(pairs.begin(), pairs.end(), q);
  return it == pairs.end() ? 0 : static_cast<int>(it - pairs.begin()) + 1;
}

void Session::submit(const VerbalJudgment& judgment, const std::string& at) {
  if (status_ == SessionStatus::Stopped) throw SessionError("session_stopped", "session " + id_ + " is stopped");
  if (status_ == SessionStatus::Complete)
    throw SessionError("session_complete", "session " + id_ + " has answered every pair");
  const Pair p = judgment.pair();
  const int n = config_.n;
  if (p.first < 0 || p.second < 0 || p.first >= n || p.second >= n || p.first == p.second)
    throw SessionError("invalid_pair", "pair " + pair_name(p) + " is not a comparison for n=" + std::to_string(n));
  if (matrix_.known(p.first, p.second))
    throw SessionError("duplicate_pair", "pair " + pair_name(normalized(p)) + " is already answered");
  if (!config_.free_order) {
    const Pair expected = *next();
    if (normalized(p) != expected)
      throw SessionError("out_of_order",
                         "expected pair " + pair_name(expected) + ", got " + pair_name(normalized(p)), expected);
  }
  answers_.push_back(Answer{judgment, at});
  updated_at_ = at;
  derive();
  if (static_cast<int>(answers_.size()) == total()) status_ = SessionStatus::Complete;
}

void Session::stop(const std::string& at) {
  if (status_ != SessionStatus::Active) return;
  status_ = SessionStatus::Stopped;
  updated_at_ = at;
}

void Session::derive() {
  std::vector<VerbalJudgment> judgments;
  judgments.reserve(answers_.size());
  for (const Answer& a : answers_) judgments.push_back(a.judgment);
  matrix_ = from_verbal(judgments, config_.scale, config_.n);
  partial_ = llsm_partial_log_weights(matrix_);
  if (partial_.component_count == 1) weights_ = normalized_exp(partial_.log_weights);
  else weights_.reset();
}

bool operator==(const Session& a, const Session& b) {
  return a.id_ == b.id_ && a.config_ == b.config_ && a.status_ == b.status_ && a.answers_ == b.answers_ &&
         a.created_at_ == b.created_at_ && a.updated_at_ == b.updated_at_;
}

SessionReport make_report(const Session& s, const PatternCatalog& catalog) {
  SessionReport r;
  r.answered = static_cast<int>(s.answers().size());
  r.weights = s.weights();
  if (s.connected() && catalog.n() == s.n()) {
    r.pattern = catalog.classify(s.answered_graph());
    const auto& path = s.sequence().path;
    r.on_optimal_path = std::find(path.begin(), path.end(), r.pattern->form) != path.end();
  }
  if (r.weights) {
    r.ranking.resize(static_cast<std::size_t>(s.n()));
    for (int i = 0; i < s.n(); ++i) r.ranking[i] = i;
    std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](int a, int b) { return (*r.weights)(a) > (*r.weights)(b); });
  }
  return r;
}

namespace {

Json session_doc(const Session& s) {
  Json answers = Json::array();
  for (const Answer& a : s.answers()) answers.push_back(judgment_json(a));
  Json doc = config_json(s.config());
  doc["id"] = s.id();
  doc["status"] = std::string(to_string(s.status()));
  doc["created_at"] = s.created_at();
  doc["updated_at"] = s.updated_at();
  doc["answers"] = answers;
  doc["answered"] = s.answers().size();
  doc["total"] = s.total();
  doc["connected"] = s.connected();
  doc["weights"] = s.weights() ? vector_json(*s.weights()) : Json(nullptr);
  if (s.connected()) {
    doc["partial"] = nullptr;
  } else {
    doc["partial"] = {{"status", "PARTIAL"},
                      {"component", s.partial().component},
                      {"log_weights", vector_json(s.partial().log_weights)}};
  }
  std::optional<Pair> next;
  if (s.status() == SessionStatus::Active) next = s.next();
  doc["next"] = next ? Json{{"rank", s.rank_of(*next)}, {"i", next->first}, {"j", next->second}} : Json(nullptr);
  return doc;
}

}  // namespace

std::string session_to_json(const Session& s) { return session_doc(s).dump(2) + "\n"; }

Session session_from_json(const std::string& text) {
  try {
    const Json doc = Json::parse(text);
    Session s(doc.at("id").get<std::string>(), config_from_json(doc), doc.at("created_at").get<std::string>());
    const SessionStatus status = parse_session_status(doc.at("status").get<std::string>());
    for (const Json& a : doc.at("answers")) {
      const Answer answer = answer_from_json(a);
      s.submit(answer.judgment, answer.at);
    }
    if (status == SessionStatus::Stopped) s.stop(doc.at("updated_at").get<std::string>());
    if (s.status() != status) throw Error("session status does not match its answers");
    if (s.updated_at() != doc.at("updated_at").get<std::string>()) throw Error("session updated_at does not match");
    return s;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed session document: ") + e.what());
  }
}

std::string report_to_json(const Session& s, const SessionReport& r) {
  Json ranking = Json::array();
  for (int i : r.ranking) ranking.push_back({{"index", i}, {"name", s.names()[i]}, {"weight", (*r.weights)(i)}});
  Json pattern = nullptr;
  if (r.pattern) pattern = {{"id", r.pattern->name()}, {"e", r.pattern->e}, {"encoding", r.pattern->form.to_string()}};
  Json doc = {{"id", s.id()},
              {"status", std::string(to_string(s.status()))},
              {"answered", r.answered},
              {"total", s.total()},
              {"pattern", pattern},
              {"on_optimal_path", r.on_optimal_path},
              {"partial", !r.weights.has_value()},
              {"weights", r.weights ? vector_json(*r.weights) : Json(nullptr)},
              {"ranking", ranking}};
  if (!r.weights)
    doc["partial_estimate"] = {{"component", s.partial().component},
                               {"log_weights", vector_json(s.partial().log_weights)}};
  return doc.dump(2) + "\n";
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

SessionStore::SessionStore(std::optional<std::filesystem::path> data_dir, Clock clock)
    : dir_(std::move(data_dir)), clock_(clock ? std::move(clock) : Clock(utc_now)) {
  std::random_device rd;
  id_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
              static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count());
  if (dir_) {
    std::filesystem::create_directories(*dir_);
    load();
  }
}

std::string SessionStore::new_id() {
  std::lock_guard lock(id_mutex_);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << mix64(++id_state_);
  return os.str();
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionError("not_found", "no session '" + id + "'");
  return it->second;
}

void SessionStore::append(const Session& s, const std::string& event_json) const {
  if (!dir_) return;
  {
    std::ofstream log(*dir_ / (s.id() + ".jsonl"), std::ios::app);
    if (!log) throw Error("cannot write session log for " + s.id());
    log << event_json << '\n';
  }
  write_text_file((*dir_ / (s.id() + ".json")).string(), session_to_json(s));
}

Session SessionStore::create(SessionConfig config) {
  auto entry = std::make_shared<Entry>();
  entry->session = Session(new_id(), std::move(config), clock_());
  const Session& s = entry->session;
  const Json event = {{"event", "create"}, {"id", s.id()}, {"at", s.created_at()}, {"config", config_json(s.config())}};
  append(s, event.dump());
  std::unique_lock lock(map_mutex_);
  if (!sessions_.emplace(s.id(), entry).second) throw Error("session id collision: " + s.id());
  return s;
}

Session SessionStore::get(const std::string& id) const {
  const auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  return entry->session;
}

std::optional<Pair> SessionStore::next(const std::string& id) const {
  const auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  return entry->session.next();
}

Session SessionStore::submit(const std::string& id, const VerbalJudgment& judgment) {
  const auto entry = find(id);
  std::unique_lock lock(entry->mutex);
  const std::string at = clock_();
  entry->session.submit(judgment, at);
  Json event = judgment_json(Answer{judgment, at});
  event["event"] = "answer";
  append(entry->session, event.dump());
  return entry->session;
}

Session SessionStore::stop(const std::string& id) {
  const auto entry = find(id);
  std::unique_lock lock(entry->mutex);
  if (entry->session.status() != SessionStatus::Active) return entry->session;
  const std::string at = clock_();
  entry->session.stop(at);
  append(entry->session, Json{{"event", "stop"}, {"at", at}}.dump());
  return entry->session;
}

std::vector<std::string> SessionStore::ids() const {
  std::shared_lock lock(map_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, entry] : sessions_) out.push_back(id);
  return out;
}

void SessionStore::load() {
  std::vector<std::filesystem::path> logs;
  for (const auto& f : std::filesystem::directory_iterator(*dir_))
    if (f.is_regular_file() && f.path().extension() == ".jsonl") logs.push_back(f.path());
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    std::ifstream in(path);
    std::string line;
    int line_no = 0;
    auto entry = std::make_shared<Entry>();
    bool created = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const std::string where = path.string() + ":" + std::to_string(line_no);
      try {
        const Json event = Json::parse(line);
        const std::string kind = event.at("event").get<std::string>();
        if (kind == "create") {
          entry->session = Session(event.at("id").get<std::string>(), config_from_json(event.at("config")),
                                   event.at("at").get<std::string>());
          created = true;
        } else if (!created) {
          throw Error("event before create");
        } else if (kind == "answer") {
          const Answer a = answer_from_json(event);
          entry->session.submit(a.judgment, a.at);
        } else if (kind == "stop") {
          entry->session.stop(event.at("at").get<std::string>());
        } else {
          throw Error("unknown event '" + kind + "'");
        }
      } catch (const Json::exception& e) {
        throw Error(where + ": " + e.what());
      } catch (const Error& e) {
        throw Error(where + ": " + e.what());
      }
    }
    if (created) sessions_[entry->session.id()] = entry;
  }
}

std::optional<VerbalJudgment> parse_answer_token(const std::string& token, const Pair& pair) {
  std::string t;
  for (char c : token) t += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  VerbalJudgment j{pair.first, pair.second, Category::Equal, Direction::FirstPreferred};
  if (t == "EQ" || t == "EQUAL" || t == "E") return j;
  if (t.size() != 2 || (t[1] != '1' && t[1] != '2')) return std::nullopt;
  switch (t[0]) {
    case 'S': j.category = Category::Slight; break;
    case 'M': j.category = Category::Moderate; break;
    case 'L': j.category = Category::Large; break;
    default: return std::nullopt;
  }
  j.direction = t[1] == '1' ? Direction::FirstPreferred : Direction::SecondPreferred;
  return j;
}

Session run_terminal_session(SessionStore& store, const std::string& id, std::istream& in, std::ostream& out,
                             const PatternCatalog& catalog) {
  Session s = store.get(id);
  const auto& names = s.names();
  while (s.status() == SessionStatus::Active) {
    const auto next = s.next();
    if (!next) break;
    out << "[" << s.rank_of(*next) << "/" << s.total() << "] " << names[next->first] << " vs "
        << names[next->second] << " (L1 M1 S1 EQ S2 M2 L2, q to stop): " << std::flush;
    std::string token;
    if (!(in >> token) || token == "q" || token == "Q") {
      s = store.stop(id);
      out << '\n';
      break;
    }
    const auto judgment = parse_answer_token(token, *next);
    if (!judgment) {
      out << "unrecognized answer '" << token << "'\n";
      continue;
    }
    s = store.submit(id, *judgment);
    if (s.weights()) {
      out << "  weights:";
      for (int i = 0; i < s.n(); ++i) out << ' ' << names[i] << '=' << std::fixed << std::setprecision(4) << (*s.weights())(i);
      out << std::defaultfloat << '\n';
    } else {
      out << "  weights: PARTIAL (" << s.partial().component_count << " components)\n";
    }
  }
  const SessionReport r = make_report(s, catalog);
  out << "status: " << to_string(s.status()) << ", answered " << r.answered << " of " << s.total() << '\n';
  if (r.pattern)
    out << "pattern: " << r.pattern->name() << (r.on_optimal_path ? " (on the optimal path)" : " (off the optimal path)")
        << '\n';
  if (r.weights) {
    out << "ranking:";
    for (int i : r.ranking) out << ' ' << names[i];
    out << '\n';
  } else {
    out << "weights: PARTIAL, no global ranking\n";
  }
  return s;
}

}  // namespace pcq
