#include "infoagg/remote.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "infoagg/decision_parser.hpp"
#include "infoagg/prompt.hpp"

namespace infoagg {

using nlohmann::json;

void RemoteClientConfig::validate() const {
  if (endpoint.empty()) throw std::invalid_argument("remote endpoint is required");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be nonnegative");
  if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be nonnegative");
  if (timeout.count() <= 0) throw std::invalid_argument("timeout must be positive");
  if (requests_per_minute < 0.0) throw std::invalid_argument("rate limit must be nonnegative");
}

RateLimiter::RateLimiter(double requests_per_minute, double burst)
    : rate_per_second_(requests_per_minute / 60.0),
      capacity_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (rate_per_second_ <= 0.0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const std::chrono::duration<double> elapsed = now - last_;
    tokens_ = std::min(capacity_, tokens_ + elapsed.count() * rate_per_second_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_per_second_;
    // Sleeping under the lock keeps waiters in arrival order.
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

ChatClient::ChatClient(RemoteClientConfig config, std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  config_.validate();
  const auto scheme_end = config_.endpoint.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = config_.endpoint.find('/', host_start);
  if (path_start == std::string::npos) {
    scheme_host_port_ = config_.endpoint;
    path_ = "/";
  } else {
    scheme_host_port_ = config_.endpoint.substr(0, path_start);
    path_ = config_.endpoint.substr(path_start);
  }
  if (!limiter_ && config_.requests_per_minute > 0.0)
    limiter_ = std::make_shared<RateLimiter>(config_.requests_per_minute);
}

ChatResult ChatClient::complete(const std::string& prompt) const {
  ChatResult result;
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      result.error = fmt::format("credential variable {} is not set", config_.api_key_env);
      return result;
    }
    headers.emplace("Authorization", fmt::format("Bearer {}", key));
  }
  if (limiter_) limiter_->acquire();

  json body = {{"model", config_.model},
               {"temperature", config_.temperature},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};

  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const auto err = res.error();
    result.timed_out = err == httplib::Error::ConnectionTimeout ||
                       (err == httplib::Error::Read && elapsed >= config_.timeout);
    result.error = result.timed_out
                       ? fmt::format("timeout after {} ms", config_.timeout.count())
                       : fmt::format("transport error: {}", httplib::to_string(err));
    return result;
  }
  if (res->status != 200) {
    result.error = fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 200));
    return result;
  }
  auto doc = json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty()) {
    result.error = "malformed completion body";
    return result;
  }
  const auto& message = doc["choices"][0].value("message", json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    result.error = "completion has no message content";
    return result;
  }
  result.ok = true;
  result.content = message["content"].get<std::string>();
  return result;
}

AgentReply RemoteAgent::decide(const AgentContext& ctx) {
  AgentReply reply;
  reply.prompt = build_prompt(ctx);
  const auto& cfg = client_->config();
  std::string failures;
  auto wait = cfg.backoff;
  const int attempts = 1 + cfg.max_retries;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(wait);
      wait *= 2;
    }
    auto result = client_->complete(reply.prompt);
    if (!result.ok) {
      failures += fmt::format("{}attempt {}: {}", failures.empty() ? "" : "; ", attempt, result.error);
      if (result.error.rfind("credential", 0) == 0) break;
      continue;
    }
    reply.response = result.content;
    try {
      reply.decision = parse_decision(result.content, ctx.instruments);
      if (!failures.empty()) reply.note = fmt::format("recovered after {}", failures);
      return reply;
    } catch (const ParseFailure& e) {
      failures += fmt::format("{}attempt {}: parse failure: {}", failures.empty() ? "" : "; ",
                              attempt, e.what());
    }
  }
  reply.decision = Decision::hold();
  reply.note = fmt::format("remote agent failed, holding ({})", failures);
  return reply;
}

} // namespace infoagg
