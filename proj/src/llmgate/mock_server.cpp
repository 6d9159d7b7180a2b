#include <thread>
#include <unordered_map>

#include "cfrag/llmgate.hpp"
#include "cfrag/util/text.hpp"
#include "httplib.h"

namespace cfrag::llm {

struct MockLlmServer::Impl {
  httplib::Server server;
  std::thread thread;
  mutable std::mutex mutex;
  std::unordered_map<std::uint64_t, std::string> fixtures;
  std::string default_completion = "[-1]";
  int fail_count = 0;
  int fail_status = 500;
  int truncate_count = 0;
  std::size_t requests = 0;
};

std::uint64_t MockLlmServer::prompt_hash(std::string_view prompt) { return text::fnv1a64(prompt); }

MockLlmServer::MockLlmServer() : impl_(std::make_unique<Impl>()) {
  impl_->server.Post(R"(/v1/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
    std::string prompt;
    try {
      const auto body = nlohmann::json::parse(req.body);
      const auto& messages = body.at("messages");
      if (!messages.empty()) prompt = messages.back().at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":"bad request"})", "application/json");
      return;
    }

    std::string completion;
    std::string finish = "stop";
    {
      std::lock_guard lock(impl_->mutex);
      ++impl_->requests;
      if (impl_->fail_count > 0) {
        --impl_->fail_count;
        res.status = impl_->fail_status;
        res.set_content(R"({"error":"injected failure"})", "application/json");
        return;
      }
      if (impl_->truncate_count > 0) {
        --impl_->truncate_count;
        finish = "length";
      }
      auto it = impl_->fixtures.find(prompt_hash(prompt));
      completion = it != impl_->fixtures.end() ? it->second : impl_->default_completion;
    }
    const nlohmann::json out{
        {"id", "mock-" + text::hex64(prompt_hash(prompt))},
        {"object", "chat.completion"},
        {"choices",
         nlohmann::json::array({{{"index", 0},
                                 {"message", {{"role", "assistant"}, {"content", completion}}},
                                 {"finish_reason", finish}}})},
        {"usage",
         {{"prompt_tokens", static_cast<int>(text::count_words(prompt))},
          {"completion_tokens", static_cast<int>(text::count_words(completion))}}},
    };
    res.set_content(out.dump(), "application/json");
  });

  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("mock llm server could not bind a port");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockLlmServer::~MockLlmServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void MockLlmServer::add_fixture(std::string_view prompt, std::string completion) {
  add_fixture_hash(prompt_hash(prompt), std::move(completion));
}

void MockLlmServer::add_fixture_hash(std::uint64_t hash, std::string completion) {
  std::lock_guard lock(impl_->mutex);
  impl_->fixtures[hash] = std::move(completion);
}

void MockLlmServer::set_default(std::string completion) {
  std::lock_guard lock(impl_->mutex);
  impl_->default_completion = std::move(completion);
}

void MockLlmServer::fail_next(int count, int status) {
  std::lock_guard lock(impl_->mutex);
  impl_->fail_count = count;
  impl_->fail_status = status;
}

void MockLlmServer::truncate_next(int count) {
  std::lock_guard lock(impl_->mutex);
  impl_->truncate_count = count;
}

std::string MockLlmServer::url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

std::size_t MockLlmServer::request_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->requests;
}

}  // namespace cfrag::llm
