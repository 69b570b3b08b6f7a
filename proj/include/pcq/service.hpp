#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "pcq/session.hpp"

namespace pcq {

/// Status code and JSON body of an API call.
struct ApiResponse {
  int status = 200;
  std::string body;
};

/// Largest n served with a computed default sequence.
inline constexpr int kMaxDefaultSequenceN = 7;

/// Transport-independent implementation of the `/v1` API.
class QuestionnaireService {
 public:
  explicit QuestionnaireService(std::optional<std::filesystem::path> data_dir = std::nullopt,
                                SessionStore::Clock clock = {}, int permutations = kDefaultPermutations);

  /// Default pipeline for n, built on first use and cached.
  std::shared_ptr<const SequencePipeline> pipeline(int n);
  SessionStore& store() { return store_; }

  ApiResponse create_session(const std::string& body);
  ApiResponse next(const std::string& id);
  ApiResponse answer(const std::string& id, const std::string& body);
  ApiResponse stop(const std::string& id);
  ApiResponse get(const std::string& id);
  ApiResponse patterns(const std::string& n_param);

  /// Report for a session; the pattern is named for n within the default range.
  SessionReport report(const Session& s);

 private:
  SessionStore store_;
  int permutations_;
  std::mutex pipelines_mutex_;
  std::map<int, std::shared_ptr<const SequencePipeline>> pipelines_;
};

/// Data directory from `PCQ_DATA_DIR`, if set and non-empty.
std::optional<std::filesystem::path> data_dir_from_env();

/// Serves the API over HTTP until `stop_http_server` or process exit.
class HttpServer {
 public:
  explicit HttpServer(QuestionnaireService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds; port 0 picks a free one. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks serving requests.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pcq
