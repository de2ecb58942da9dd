#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>

#include "infoagg/agent.hpp"

namespace infoagg {

// Chat-completion endpoint settings. Credentials are read from the named
// environment variable at call time and never stored.
struct RemoteClientConfig {
  std::string endpoint;     // e.g. "https://api.openai.com/v1/chat/completions"
  std::string model;
  double temperature = 1.0;
  int max_retries = 2;      // attempts = 1 + max_retries
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds backoff{1000};  // doubles after every failed attempt
  std::string api_key_env;  // empty: no Authorization header
  double requests_per_minute = 0.0;  // 0: unlimited

  void validate() const;
};

// Token bucket shared by every client that talks to the same provider.
class RateLimiter {
public:
  explicit RateLimiter(double requests_per_minute, double burst = 1.0);
  void acquire();

private:
  std::mutex mutex_;
  double rate_per_second_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

struct ChatResult {
  bool ok = false;
  bool timed_out = false;
  std::string content;
  std::string error;
};

// Single-attempt POST of {model, temperature, messages:[{role:user}]};
// safe to call concurrently.
class ChatClient {
public:
  explicit ChatClient(RemoteClientConfig config, std::shared_ptr<RateLimiter> limiter = nullptr);

  const RemoteClientConfig& config() const noexcept { return config_; }
  ChatResult complete(const std::string& prompt) const;

private:
  RemoteClientConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  std::shared_ptr<RateLimiter> limiter_;
};

// Builds the full prompt every turn, asks the model, parses the reply;
// retries with exponential backoff and degrades to a hold on final failure.
class RemoteAgent final : public Agent {
public:
  explicit RemoteAgent(std::shared_ptr<const ChatClient> client) : client_(std::move(client)) {}

  AgentReply decide(const AgentContext& ctx) override;
  std::string kind() const override { return "remote"; }

private:
  std::shared_ptr<const ChatClient> client_;
};

} // namespace infoagg
