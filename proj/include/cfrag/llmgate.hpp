#pragma once

// Remote chat-completion client (OpenAI-compatible wire format) and an
// in-process mock endpoint for offline runs.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cfrag::llm {

struct LlmRequest {
  std::string request_id;
  std::string prompt;
  std::string model;  // empty: client default
  int max_tokens = 512;
  double temperature = 0.0;
};

enum class Status { Ok, Timeout, RateLimited, HttpError, Truncated };

std::string_view to_string(Status s);

struct LlmResponse {
  Status status = Status::HttpError;
  int http_code = 0;
  std::string completion;
  double latency_ms = 0.0;
  std::optional<int> prompt_tokens;
  std::optional<int> completion_tokens;
  int attempts = 0;
  std::string error;

  bool ok() const { return status == Status::Ok; }
};

struct ClientConfig {
  std::string url;  // base URL or full .../chat/completions endpoint
  std::string api_key;
  std::string model = "default";
  int retry_budget = 3;  // retries after the first attempt
  std::chrono::milliseconds backoff{1000};  // doubles per retry
  std::chrono::milliseconds timeout{60000};
  int max_in_flight = 4;

  // CFRAG_LLM_URL, CFRAG_LLM_KEY, CFRAG_LLM_MODEL over the defaults.
  static ClientConfig from_env();
  void validate() const;  // throws ConfigError
};

class LlmClient {
 public:
  explicit LlmClient(ClientConfig config);
  ~LlmClient();
  LlmClient(const LlmClient&) = delete;
  LlmClient& operator=(const LlmClient&) = delete;

  // Never throws for transport problems; they come back as a status.
  // Throws std::invalid_argument for an empty prompt or negative temperature.
  LlmResponse complete(const LlmRequest& request);

  const ClientConfig& config() const { return config_; }

  // One GET against the endpoint's host, not logged and not retried.
  // nullopt when something answered, otherwise the transport error.
  std::optional<std::string> probe() const;

  // One entry per request, sorted by request id; timing is left out so the
  // log is reproducible.
  std::vector<nlohmann::json> request_log() const;
  void write_log(const std::filesystem::path& path) const;

 private:
  struct Gate;
  ClientConfig config_;
  std::unique_ptr<Gate> gate_;
  mutable std::mutex log_mutex_;
  std::vector<nlohmann::json> log_;
};

// Serves fixture completions keyed by prompt hash on 127.0.0.1.
class MockLlmServer {
 public:
  MockLlmServer();
  ~MockLlmServer();
  MockLlmServer(const MockLlmServer&) = delete;
  MockLlmServer& operator=(const MockLlmServer&) = delete;

  static std::uint64_t prompt_hash(std::string_view prompt);

  void add_fixture(std::string_view prompt, std::string completion);
  void add_fixture_hash(std::uint64_t hash, std::string completion);
  void set_default(std::string completion);
  // The next `count` requests get this HTTP status instead of a completion.
  void fail_next(int count, int status);
  // Next `count` requests report finish_reason "length".
  void truncate_next(int count);

  std::string url() const;  // e.g. http://127.0.0.1:40123/v1
  int port() const { return port_; }
  std::size_t request_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace cfrag::llm
