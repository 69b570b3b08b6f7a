#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pcq/error.hpp"
#include "pcq/llsm.hpp"
#include "pcq/pcm.hpp"
#include "pcq/sequencing.hpp"

namespace pcq {

/// Rejection carrying a stable machine-readable code.
class SessionError : public Error {
 public:
  SessionError(std::string code, const std::string& message, std::optional<Pair> expected = std::nullopt)
      : Error(message), code_(std::move(code)), expected_(expected) {}
  const std::string& code() const { return code_; }
  const std::optional<Pair>& expected() const { return expected_; }

 private:
  std::string code_;
  std::optional<Pair> expected_;
};

enum class SessionStatus { Active, Stopped, Complete };
std::string_view to_string(SessionStatus s);
SessionStatus parse_session_status(std::string_view text);

struct Answer {
  VerbalJudgment judgment;
  std::string at;
  friend bool operator==(const Answer&, const Answer&) = default;
};

struct SessionConfig {
  int n = 6;
  std::vector<std::string> names;
  Scale scale;
  FillingSequence sequence;
  /// Accept any unanswered pair instead of the sequence order.
  bool free_order = false;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

class Session {
 public:
  Session() = default;
  Session(std::string id, SessionConfig config, std::string created_at);

  const std::string& id() const { return id_; }
  int n() const { return config_.n; }
  const SessionConfig& config() const { return config_; }
  const std::vector<std::string>& names() const { return config_.names; }
  const FillingSequence& sequence() const { return config_.sequence; }
  SessionStatus status() const { return status_; }
  const std::vector<Answer>& answers() const { return answers_; }
  const std::string& created_at() const { return created_at_; }
  const std::string& updated_at() const { return updated_at_; }
  int total() const { return pair_count(config_.n); }

  /// Next pair in sequence order among those not yet answered; nothing when
  /// every pair is answered. Throws for a stopped session.
  std::optional<Pair> next() const;
  /// Rank (1-based) of a pair in the sequence.
  int rank_of(const Pair& p) const;

  void submit(const VerbalJudgment& judgment, const std::string& at);
  /// Idempotent; a complete session stays complete.
  void stop(const std::string& at);

  const IncompleteMatrix& matrix() const { return matrix_; }
  PatternGraph answered_graph() const { return representing_graph(matrix_); }
  bool connected() const { return weights_.has_value(); }
  const std::optional<WeightVector>& weights() const { return weights_; }
  /// Per-component estimates; meaningful when not connected.
  const PartialLogWeights<double>& partial() const { return partial_; }

  friend bool operator==(const Session& a, const Session& b);

 private:
  void derive();

  std::string id_;
  SessionConfig config_;
  SessionStatus status_ = SessionStatus::Active;
  std::vector<Answer> answers_;
  std::string created_at_;
  std::string updated_at_;
  IncompleteMatrix matrix_;
  std::optional<WeightVector> weights_;
  PartialLogWeights<double> partial_;
};

/// Snapshot of a session at a stop point.
struct SessionReport {
  int answered = 0;
  std::optional<PatternClassId> pattern;
  bool on_optimal_path = false;
  std::optional<WeightVector> weights;
  /// Alternatives by descending weight; empty without global weights.
  std::vector<int> ranking;
};

/// `catalog` names the pattern class; pass an empty catalog to skip it.
SessionReport make_report(const Session& s, const PatternCatalog& catalog);

std::string session_to_json(const Session& s);
Session session_from_json(const std::string& text);
std::string report_to_json(const Session& s, const SessionReport& r);

/// Keeps sessions in memory, serializes mutations per session and, with a
/// data directory, appends every event to `<id>.jsonl` and rewrites
/// `<id>.json` after each change. Existing logs are replayed on start.
class SessionStore {
 public:
  using Clock = std::function<std::string()>;

  explicit SessionStore(std::optional<std::filesystem::path> data_dir = std::nullopt, Clock clock = {});

  Session create(SessionConfig config);
  Session get(const std::string& id) const;
  std::optional<Pair> next(const std::string& id) const;
  Session submit(const std::string& id, const VerbalJudgment& judgment);
  Session stop(const std::string& id);
  std::vector<std::string> ids() const;

 private:
  struct Entry {
    mutable std::shared_mutex mutex;
    Session session;
  };
  std::shared_ptr<Entry> find(const std::string& id) const;
  void append(const Session& s, const std::string& event_json) const;
  void load();
  std::string new_id();

  std::optional<std::filesystem::path> dir_;
  Clock clock_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mutex_;
  std::uint64_t id_state_;
};

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_now();

/// Terminal questionnaire over streams. Answers are `L1 M1 S1 EQ S2 M2 L2`
/// (intensity toward the first or second alternative), `q` stops. Ends at
/// completion, on `q` or at end of input (which stops the session too).
Session run_terminal_session(SessionStore& store, const std::string& id, std::istream& in, std::ostream& out,
                             const PatternCatalog& catalog);

/// Parses one terminal answer token for the pair (i, j).
std::optional<VerbalJudgment> parse_answer_token(const std::string& token, const Pair& pair);

}  // namespace pcq
