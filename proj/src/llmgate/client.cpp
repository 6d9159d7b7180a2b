#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <semaphore>
#include <stdexcept>
#include <thread>

#include "cfrag/llmgate.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"
#include "httplib.h"

namespace cfrag::llm {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::Timeout: return "timeout";
    case Status::RateLimited: return "rate_limited";
    case Status::HttpError: return "http_error";
    case Status::Truncated: return "truncated";
  }
  return "?";
}

ClientConfig ClientConfig::from_env() {
  ClientConfig cfg;
  if (const char* v = std::getenv("CFRAG_LLM_URL")) cfg.url = v;
  if (const char* v = std::getenv("CFRAG_LLM_KEY")) cfg.api_key = v;
  if (const char* v = std::getenv("CFRAG_LLM_MODEL")) cfg.model = v;
  return cfg;
}

namespace {

constexpr int kMaxInFlight = 64;

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("llm url is not an http(s) URL: " + url);
  Endpoint ep;
  const std::string scheme = m[1].str();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("https endpoints need a build with OpenSSL");
#endif
  ep.origin = scheme + "://" + m[2].str();
  if (m[3].matched) ep.origin += ":" + m[3].str();
  std::string path = m[4].matched ? m[4].str() : "";
  while (!path.empty() && path.back() == '/') path.pop_back();
  constexpr std::string_view kSuffix = "/chat/completions";
  if (path.size() < kSuffix.size() || path.compare(path.size() - kSuffix.size(), kSuffix.size(), kSuffix) != 0) {
    path += kSuffix;
  }
  ep.path = path;
  return ep;
}

}  // namespace

void ClientConfig::validate() const {
  if (url.empty()) throw ConfigError("no llm endpoint configured (set CFRAG_LLM_URL or llm.url)");
  parse_endpoint(url);
  if (retry_budget < 0) throw ConfigError("llm retry budget must be >= 0");
  if (backoff.count() < 0) throw ConfigError("llm backoff must be >= 0");
  if (timeout.count() <= 0) throw ConfigError("llm timeout must be > 0");
  if (max_in_flight < 1 || max_in_flight > kMaxInFlight) {
    throw ConfigError("llm max_in_flight must be in [1," + std::to_string(kMaxInFlight) + "]");
  }
}

struct LlmClient::Gate {
  explicit Gate(int n) : slots(n) {}
  std::counting_semaphore<kMaxInFlight> slots;
};

LlmClient::LlmClient(ClientConfig config) : config_(std::move(config)) {
  config_.validate();
  gate_ = std::make_unique<Gate>(config_.max_in_flight);
}

LlmClient::~LlmClient() = default;

namespace {

LlmResponse attempt_once(const ClientConfig& cfg, const Endpoint& ep, const LlmRequest& req) {
  LlmResponse out;
  httplib::Client cli(ep.origin);
  cli.set_connection_timeout(cfg.timeout);
  cli.set_read_timeout(cfg.timeout);
  cli.set_write_timeout(cfg.timeout);
  httplib::Headers headers;
  if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

  const nlohmann::json body{
      {"model", req.model.empty() ? cfg.model : req.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}})},
      {"max_tokens", req.max_tokens},
      {"temperature", req.temperature},
  };
  auto res = cli.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) {
    out.status = Status::Timeout;
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.http_code = res->status;
  if (res->status == 429) {
    out.status = Status::RateLimited;
    return out;
  }
  if (res->status != 200) {
    out.status = Status::HttpError;
    out.error = "HTTP " + std::to_string(res->status);
    return out;
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    const auto& choice = j.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    out.completion = content.is_string() ? content.get<std::string>() : "";
    if (j.contains("usage") && j["usage"].is_object()) {
      const auto& u = j["usage"];
      if (u.contains("prompt_tokens")) out.prompt_tokens = u["prompt_tokens"].get<int>();
      if (u.contains("completion_tokens")) out.completion_tokens = u["completion_tokens"].get<int>();
    }
    if (choice.value("finish_reason", "") == "length") {
      out.status = Status::Truncated;
    } else if (out.completion.empty()) {
      out.status = Status::HttpError;
      out.error = "empty completion";
    } else {
      out.status = Status::Ok;
    }
  } catch (const nlohmann::json::exception& e) {
    out.status = Status::HttpError;
    out.error = std::string("malformed response: ") + e.what();
  }
  return out;
}

}  // namespace

LlmResponse LlmClient::complete(const LlmRequest& request) {
  if (request.prompt.empty()) throw std::invalid_argument("llm request with an empty prompt");
  if (!(request.temperature >= 0.0)) throw std::invalid_argument("llm temperature must be >= 0");
  const auto ep = parse_endpoint(config_.url);

  gate_->slots.acquire();
  const auto started = std::chrono::steady_clock::now();
  LlmResponse res;
  int attempts = 0;
  for (;;) {
    res = attempt_once(config_, ep, request);
    ++attempts;
    const bool retryable = res.status == Status::Timeout || res.status == Status::RateLimited;
    if (!retryable || attempts > config_.retry_budget) break;
    std::this_thread::sleep_for(config_.backoff * (1 << (attempts - 1)));
  }
  gate_->slots.release();
  res.attempts = attempts;
  res.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

  nlohmann::json entry{
      {"request_id", request.request_id},
      {"model", request.model.empty() ? config_.model : request.model},
      {"prompt_hash", text::hex64(text::fnv1a64(request.prompt))},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
      {"status", std::string(to_string(res.status))},
      {"http_code", res.http_code},
      {"attempts", res.attempts},
      {"completion", res.completion},
  };
  std::lock_guard lock(log_mutex_);
  log_.push_back(std::move(entry));
  return res;
}

std::optional<std::string> LlmClient::probe() const {
  const auto ep = parse_endpoint(config_.url);
  httplib::Client cli(ep.origin);
  cli.set_connection_timeout(config_.timeout);
  cli.set_read_timeout(config_.timeout);
  // Any HTTP answer, even 404, means something is listening.
  if (auto res = cli.Get("/")) return std::nullopt;
  else return "cannot reach " + ep.origin + ": " + httplib::to_string(res.error());
}

std::vector<nlohmann::json> LlmClient::request_log() const {
  std::lock_guard lock(log_mutex_);
  auto out = log_;
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a["request_id"].template get<std::string>() < b["request_id"].template get<std::string>();
  });
  return out;
}

void LlmClient::write_log(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& entry : request_log()) out << entry.dump() << '\n';
}

}  // namespace cfrag::llm
