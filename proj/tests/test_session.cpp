#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pcq/session.hpp"

using namespace pcq;
namespace fs = std::filesystem;

namespace {

const SequencePipeline& six() {
  static const SequencePipeline p = build_default_pipeline(6);
  return p;
}

SessionConfig config6() {
  SessionConfig c;
  c.n = 6;
  c.names = {"A1", "A2", "A3", "A4", "A5", "A6"};
  c.sequence = six().sequence;
  return c;
}

SessionStore::Clock counter_clock() {
  auto t = std::make_shared<int>(0);
  return [t] { return "t" + std::to_string((*t)++); };
}

VerbalJudgment eq(const Pair& p) { return {p.first, p.second, Category::Equal, Direction::FirstPreferred}; }

// Deterministic mixed answers.
VerbalJudgment mixed(const Pair& p, int k) {
  static const Category cats[] = {Category::Large, Category::Equal, Category::Slight, Category::Moderate};
  return {p.first, p.second, cats[k % 4], k % 3 == 0 ? Direction::SecondPreferred : Direction::FirstPreferred};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pcq_session_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SessionError& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("fresh sessions") {
  Session s("x", config6(), "t0");
  CHECK(s.status() == SessionStatus::Active);
  CHECK(s.answers().empty());
  CHECK(s.next() == six().sequence.pairs.front());
  CHECK(s.rank_of(*s.next()) == 1);
  CHECK_FALSE(s.connected());

  SessionConfig two;
  two.n = 2;
  two.names = {"a", "b"};
  two.sequence = build_default_pipeline(2).sequence;
  Session t("y", two, "t0");
  CHECK(t.total() == 1);
  CHECK(t.sequence().pairs.size() == 1);

  auto bad = config6();
  bad.names.pop_back();
  CHECK(code_of([&] { Session("z", bad, "t0"); }) == "bad_request");
  auto dup = config6();
  dup.names = {"A", "A", "A", "A", "A", "A"};
  CHECK_NOTHROW(Session("z", dup, "t0"));
  auto short_seq = config6();
  short_seq.sequence.pairs.pop_back();
  CHECK(code_of([&] { Session("z", short_seq, "t0"); }) == "bad_request");
}

TEST_CASE("strict order enforcement") {
  Session s("x", config6(), "t0");
  const auto& pairs = s.sequence().pairs;
  try {
    s.submit(eq(pairs[1]), "t1");
    FAIL("expected rejection");
  } catch (const SessionError& e) {
    CHECK(e.code() == "out_of_order");
    CHECK(e.expected() == pairs[0]);
    CHECK(std::string(e.what()).find("(" + std::to_string(pairs[0].first) + "," + std::to_string(pairs[0].second) +
                                     ")") != std::string::npos);
  }
  // Either orientation names the same pair.
  s.submit({pairs[0].second, pairs[0].first, Category::Large, Direction::FirstPreferred}, "t1");
  CHECK(*s.matrix().at(pairs[0].second, pairs[0].first) == 2.0);
  CHECK(code_of([&] { s.submit(eq(pairs[0]), "t2"); }) == "duplicate_pair");
  CHECK(code_of([&] { s.submit({0, 0, Category::Equal, Direction::FirstPreferred}, "t2"); }) == "invalid_pair");
  CHECK(code_of([&] { s.submit({0, 9, Category::Equal, Direction::FirstPreferred}, "t2"); }) == "invalid_pair");
}

TEST_CASE("free order only enforces uniqueness") {
  auto c = config6();
  c.free_order = true;
  Session s("x", c, "t0");
  const auto& pairs = s.sequence().pairs;
  s.submit(eq(pairs[14]), "t1");
  s.submit(eq(pairs[3]), "t2");
  CHECK(s.next() == pairs[0]);
  CHECK(code_of([&] { s.submit(eq(pairs[3]), "t3"); }) == "duplicate_pair");
}

TEST_CASE("answering through completion") {
  Session s("x", config6(), "t0");
  const auto pairs = s.sequence().pairs;
  for (int k = 0; k < 14; ++k) {
    CHECK(s.next() == pairs[k]);
    s.submit(eq(pairs[k]), "t");
    // Weights appear exactly when the answered pattern connects.
    CHECK(s.connected() == is_connected(s.answered_graph()));
    if (k + 1 == 4) CHECK_FALSE(s.connected());
    if (k + 1 >= 5) CHECK(s.connected());
  }
  CHECK(s.rank_of(*s.next()) == 15);
  s.submit(eq(pairs[14]), "t");
  CHECK(s.status() == SessionStatus::Complete);
  CHECK_FALSE(s.next().has_value());
  for (int i = 0; i < 6; ++i) CHECK(std::abs((*s.weights())(i) - 1.0 / 6.0) <= 1e-12);
  CHECK(code_of([&] { s.submit(eq(pairs[0]), "t"); }) == "session_complete");
  s.stop("late");
  CHECK(s.status() == SessionStatus::Complete);
  CHECK(s.updated_at() == "t");
}

TEST_CASE("stopping") {
  Session s("x", config6(), "t0");
  const auto pairs = s.sequence().pairs;
  for (int k = 0; k < 3; ++k) s.submit(mixed(pairs[k], k), "t");
  auto early = make_report(s, six().catalog);
  CHECK_FALSE(early.weights.has_value());
  CHECK(early.ranking.empty());
  CHECK_FALSE(early.pattern.has_value());
  CHECK(s.partial().component_count == 3);

  for (int k = 3; k < 6; ++k) s.submit(mixed(pairs[k], k), "t");
  s.stop("t9");
  s.stop("t10");
  CHECK(s.status() == SessionStatus::Stopped);
  CHECK(s.updated_at() == "t9");
  CHECK(code_of([&] { (void)s.next(); }) == "session_stopped");
  CHECK(code_of([&] { s.submit(mixed(pairs[6], 6), "t"); }) == "session_stopped");
  const auto r = make_report(s, six().catalog);
  REQUIRE(r.pattern.has_value());
  CHECK(r.answered == 6);
  CHECK(r.pattern->form == canonical_form(PatternGraph::cycle(6)));
  CHECK(r.on_optimal_path);
  CHECK(r.ranking.size() == 6);
  CHECK((*r.weights)(r.ranking[0]) >= (*r.weights)(r.ranking[5]));
}

TEST_CASE("stop points along the path lie on the path") {
  for (int stop_at : {6, 9, 11, 13, 15}) {
    Session s("x", config6(), "t0");
    for (int k = 0; k < stop_at; ++k) s.submit(mixed(s.sequence().pairs[k], k), "t");
    s.stop("t");
    const auto r = make_report(s, six().catalog);
    REQUIRE(r.pattern.has_value());
    CHECK(r.pattern->e == stop_at);
    CHECK(r.on_optimal_path);
    CHECK(r.pattern->form == six().path[stop_at - 6].form);
  }
}

TEST_CASE("session JSON round trip") {
  Session s("abc", config6(), "t0");
  for (int k = 0; k < 7; ++k) s.submit(mixed(s.sequence().pairs[k], k), "t" + std::to_string(k + 1));
  const std::string text = session_to_json(s);
  const Session back = session_from_json(text);
  CHECK(back == s);
  CHECK(session_to_json(back) == text);
  s.stop("t99");
  CHECK(session_from_json(session_to_json(s)) == s);
  CHECK(session_to_json(s).find("\"status\": \"stopped\"") != std::string::npos);
  CHECK_THROWS_AS(session_from_json("{}"), Error);
}

TEST_CASE("store persists and replays event logs") {
  const fs::path dir = scratch("store");
  std::string id;
  Session before;
  {
    SessionStore store(dir, counter_clock());
    id = store.create(config6()).id();
    for (int k = 0; k < 8; ++k) store.submit(id, mixed(store.next(id).value(), k));
    before = store.stop(id);
    CHECK(store.stop(id) == before);
    CHECK(code_of([&] { store.get("missing"); }) == "not_found");
  }
  CHECK(fs::exists(dir / (id + ".json")));
  std::ifstream log(dir / (id + ".jsonl"));
  int lines = 0;
  for (std::string line; std::getline(log, line);) ++lines;
  CHECK(lines == 10);

  SessionStore reopened(dir, counter_clock());
  CHECK(reopened.ids() == std::vector<std::string>{id});
  const Session after = reopened.get(id);
  CHECK(after == before);
  CHECK(session_to_json(after) == session_to_json(before));
  std::ifstream snap(dir / (id + ".json"));
  std::stringstream ss;
  ss << snap.rdbuf();
  CHECK(ss.str() == session_to_json(before));
}

TEST_CASE("corrupt logs are reported with their location") {
  const fs::path dir = scratch("corrupt");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.jsonl") << "{\"event\": \"answer\", \"i\": 0}\n";
  CHECK_THROWS_WITH_AS(SessionStore{dir}, doctest::Contains("bad.jsonl:1"), Error);
}

TEST_CASE("terminal and direct answering agree") {
  const std::vector<std::string> tokens = {"L1", "eq", "S2", "M1", "bogus", "L2", "S1", "M2", "q"};
  SessionStore a(std::nullopt, counter_clock());
  SessionStore b(std::nullopt, counter_clock());
  const std::string ida = a.create(config6()).id();
  const std::string idb = b.create(config6()).id();
  std::istringstream in([&] {
    std::string s;
    for (const auto& t : tokens) s += t + "\n";
    return s;
  }());
  std::ostringstream out;
  const Session via_terminal = run_terminal_session(a, ida, in, out, six().catalog);
  for (const auto& t : tokens) {
    if (t == "q") {
      b.stop(idb);
      break;
    }
    const auto j = parse_answer_token(t, *b.next(idb));
    if (j) b.submit(idb, *j);
  }
  const Session direct = b.get(idb);
  CHECK(via_terminal.answers() == direct.answers());
  CHECK(via_terminal.status() == SessionStatus::Stopped);
  CHECK(direct.status() == SessionStatus::Stopped);
  CHECK(via_terminal.updated_at() == direct.updated_at());
  CHECK(*via_terminal.weights() == *direct.weights());
  CHECK(out.str().find("unrecognized answer 'bogus'") != std::string::npos);
  CHECK(out.str().find("status: stopped, answered 7 of 15") != std::string::npos);
}

TEST_CASE("answer tokens") {
  const Pair p{1, 4};
  CHECK(parse_answer_token("L1", p) == VerbalJudgment{1, 4, Category::Large, Direction::FirstPreferred});
  CHECK(parse_answer_token("m2", p) == VerbalJudgment{1, 4, Category::Moderate, Direction::SecondPreferred});
  CHECK(parse_answer_token("EQ", p) == VerbalJudgment{1, 4, Category::Equal, Direction::FirstPreferred});
  CHECK_FALSE(parse_answer_token("X1", p).has_value());
  CHECK_FALSE(parse_answer_token("S3", p).has_value());
}
