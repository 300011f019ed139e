#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "proact/policy.hpp"

namespace proact {

struct GatewayConfig {
  // Full chat-completions URL, e.g. http://localhost:8000/v1/chat/completions.
  std::string endpoint;
  std::string model;
  double temperature = 0.6;
  int timeout_seconds = 60;
  int retries = 2;
  // Empty means the built-in prompt for the environment.
  std::string system_prompt;
  int max_in_flight = 4;
  bool request_logprobs = false;
  // Name of an environment variable holding a bearer token (optional).
  std::string api_key_env;

  void validate() const;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatReply {
  std::string content;
  std::vector<DecisionUnit> token_logprobs;  // empty when the server sends none
};

/// Chat-completions client with a bounded number of concurrent requests.
class GatewayClient {
 public:
  explicit GatewayClient(GatewayConfig config);

  // Throws GatewayError after the retry budget is spent.
  ChatReply chat(const std::vector<ChatMessage>& messages) const;
  const GatewayConfig& config() const { return config_; }

 private:
  GatewayConfig config_;
  std::string scheme_host_;
  std::string path_;
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  mutable int in_flight_ = 0;
};

std::string system_prompt(const Environment& env);
std::string user_prompt(const Environment& env, const std::string& observation);

class GatewayPolicy final : public Policy {
 public:
  explicit GatewayPolicy(std::shared_ptr<const GatewayClient> client) : client_(std::move(client)) {}
  Decision decide(const Environment& env, Rng& rng) const override;
  std::string name() const override { return "gateway"; }

 private:
  std::shared_ptr<const GatewayClient> client_;
};

}  // namespace proact
