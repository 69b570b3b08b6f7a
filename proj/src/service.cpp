#include "pcq/service.hpp"

#include <cstdlib>

#include <json.hpp>

namespace pcq {

namespace {

using Json = nlohmann::json;

ApiResponse json_response(int status, const Json& doc) { return ApiResponse{status, doc.dump(2) + "\n"}; }

ApiResponse error_response(int status, const std::string& code, const std::string& message,
                           const std::optional<Pair>& expected = std::nullopt) {
  Json doc = {{"code", code}, {"message", message}};
  if (expected) doc["expected"] = {{"i", expected->first}, {"j", expected->second}};
  return json_response(status, doc);
}

int status_for(const std::string& code) {
  if (code == "not_found") return 404;
  if (code == "out_of_order" || code == "duplicate_pair" || code == "session_stopped" || code == "session_complete")
    return 409;
  return 400;
}

template <typename F>
ApiResponse guarded(F&& f) {
  try {
    return f();
  } catch (const SessionError& e) {
    return error_response(status_for(e.code()), e.code(), e.what(), e.expected());
  } catch (const Json::exception& e) {
    return error_response(400, "bad_request", std::string("malformed request: ") + e.what());
  } catch (const Error& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json doc = Json::parse(body);
  if (!doc.is_object()) throw Error("request body must be a JSON object");
  return doc;
}

Direction direction_from_json(const Json& j) {
  if (j.is_number_integer()) return parse_direction(std::to_string(j.get<int>()));
  return parse_direction(j.get<std::string>());
}

Json next_json(const Session& s) {
  const auto next = s.next();
  if (!next) return {{"done", true}, {"answered", s.answers().size()}, {"total", s.total()}};
  return {{"done", false},
          {"rank", s.rank_of(*next)},
          {"i", next->first},
          {"j", next->second},
          {"first", s.names()[next->first]},
          {"second", s.names()[next->second]},
          {"answered", s.answers().size()},
          {"total", s.total()}};
}

}  // namespace

std::optional<std::filesystem::path> data_dir_from_env() {
  const char* dir = std::getenv("PCQ_DATA_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return std::filesystem::path(dir);
}

QuestionnaireService::QuestionnaireService(std::optional<std::filesystem::path> data_dir, SessionStore::Clock clock,
                                           int permutations)
    : store_(std::move(data_dir), std::move(clock)), permutations_(permutations) {}

std::shared_ptr<const SequencePipeline> QuestionnaireService::pipeline(int n) {
  if (n < 2 || n > kMaxDefaultSequenceN)
    throw SessionError("bad_request", "default sequences are available for 2 <= n <= " +
                                          std::to_string(kMaxDefaultSequenceN) + "; supply a sequence for n=" +
                                          std::to_string(n));
  std::lock_guard lock(pipelines_mutex_);
  auto& slot = pipelines_[n];
  if (!slot) slot = std::make_shared<const SequencePipeline>(build_default_pipeline(n, permutations_));
  return slot;
}

SessionReport QuestionnaireService::report(const Session& s) {
  if (s.n() > kMaxDefaultSequenceN) return make_report(s, PatternCatalog{});
  return make_report(s, pipeline(s.n())->catalog);
}

ApiResponse QuestionnaireService::create_session(const std::string& body) {
  return guarded([&] {
    const Json req = parse_body(body);
    SessionConfig config;
    if (req.contains("names")) config.names = req.at("names").get<std::vector<std::string>>();
    config.n = req.contains("n") ? req.at("n").get<int>()
                                 : (config.names.empty() ? 6 : static_cast<int>(config.names.size()));
    if (config.names.empty())
      for (int i = 0; i < config.n; ++i) config.names.push_back("A" + std::to_string(i + 1));
    if (req.contains("scale")) {
      const Json& s = req.at("scale");
      config.scale = s.is_string() ? parse_scale(s.get<std::string>()) : Scale{};
      if (s.is_object()) {
        config.scale.slight = s.value("S", config.scale.slight);
        config.scale.moderate = s.value("M", config.scale.moderate);
        config.scale.large = s.value("L", config.scale.large);
      }
    }
    config.free_order = req.value("free_order", false);
    if (req.contains("sequence")) config.sequence = sequence_from_json(req.at("sequence").dump());
    else config.sequence = pipeline(config.n)->sequence;
    const Session s = store_.create(std::move(config));
    Json doc = Json::parse(session_to_json(s));
    return json_response(201, doc);
  });
}

ApiResponse QuestionnaireService::next(const std::string& id) {
  return guarded([&] { return json_response(200, next_json(store_.get(id))); });
}

ApiResponse QuestionnaireService::answer(const std::string& id, const std::string& body) {
  return guarded([&] {
    const Json req = parse_body(body);
    VerbalJudgment j;
    j.first = req.at("i").get<int>();
    j.second = req.at("j").get<int>();
    j.category = parse_category(req.at("category").get<std::string>());
    j.direction = req.contains("direction") ? direction_from_json(req.at("direction")) : Direction::FirstPreferred;
    const Session s = store_.submit(id, j);
    Json doc = Json::parse(session_to_json(s));
    return json_response(200, doc);
  });
}

ApiResponse QuestionnaireService::stop(const std::string& id) {
  return guarded([&] {
    const Session s = store_.stop(id);
    return json_response(200, Json::parse(report_to_json(s, report(s))));
  });
}

ApiResponse QuestionnaireService::get(const std::string& id) {
  return guarded([&] {
    const Session s = store_.get(id);
    Json doc = Json::parse(session_to_json(s));
    doc["report"] = Json::parse(report_to_json(s, report(s)));
    return json_response(200, doc);
  });
}

ApiResponse QuestionnaireService::patterns(const std::string& n_param) {
  return guarded([&] {
    int n = 6;
    if (!n_param.empty()) {
      std::size_t used = 0;
      try {
        n = std::stoi(n_param, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != n_param.size()) throw Error("query parameter n must be an integer");
    }
    const auto p = pipeline(n);
    Json doc = Json::parse(to_json(p->table));
    Json path = Json::array();
    for (const auto& c : p->path) path.push_back(c.name());
    doc["path"] = path;
    doc["sequence"] = Json::parse(to_json(p->sequence));
    for (Json& row : doc["rows"]) {
      const bool on_path = std::find(path.begin(), path.end(), row.at("id")) != path.end();
      row["on_path"] = on_path;
    }
    return json_response(200, doc);
  });
}

}  // namespace pcq
