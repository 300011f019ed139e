#include "proact/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "proact/response.hpp"

namespace proact {

void GatewayConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("gateway endpoint is required");
  if (endpoint.rfind("http://", 0) != 0) throw ConfigError("gateway endpoint must be an http:// URL");
  if (model.empty()) throw ConfigError("gateway model is required");
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (timeout_seconds < 1) throw ConfigError("timeout must be >= 1 second");
  if (retries < 0) throw ConfigError("retries must be >= 0");
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
}

GatewayClient::GatewayClient(GatewayConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::size_t host_start = std::string("http://").size();
  const std::size_t slash = config_.endpoint.find('/', host_start);
  scheme_host_ = config_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
}

ChatReply GatewayClient::chat(const std::vector<ChatMessage>& messages) const {
  {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    const GatewayClient* self;
    ~Release() {
      {
        std::lock_guard lock(self->mutex_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};

  nlohmann::json body = {{"model", config_.model}, {"temperature", config_.temperature}};
  body["messages"] = nlohmann::json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (config_.request_logprobs) body["logprobs"] = true;

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(200 << std::min(attempt, 5)));
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    client.set_write_timeout(config_.timeout_seconds);
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status >= 400 && res->status < 500 && res->status != 429) break;
      continue;
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      const auto& choice = j.at("choices").at(0);
      ChatReply reply;
      const auto& content = choice.at("message").at("content");
      reply.content = content.is_string() ? content.get<std::string>() : std::string();
      if (choice.contains("logprobs") && choice["logprobs"].is_object() && choice["logprobs"].contains("content")) {
        for (const auto& t : choice["logprobs"]["content"]) {
          reply.token_logprobs.push_back({t.value("token", ""), t.value("logprob", 0.0)});
        }
      }
      return reply;
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("unreadable reply: ") + e.what();
    }
  }
  throw GatewayError("gateway request failed after " + std::to_string(config_.retries + 1) +
                     " attempt(s): " + last_error);
}

std::string system_prompt(const Environment& env) {
  switch (env.kind()) {
    case EnvKind::game2048:
      return "You are an intelligent 2048 game player. Briefly analyze the board state and provide your reasoning "
             "process and move decision.\n\n"
             "Response format:\n\n"
             "thought: [your analysis and reasoning process]\n\n"
             "move: [up/down/left/right]\n\n"
             "Strategy tips:\n"
             "- Keep the highest tile in a corner\n"
             "- Prioritize creating merge opportunities and empty spaces\n"
             "- Consider chain reactions after each move";
    case EnvKind::sokoban: {
      std::string actions;
      for (const auto& a : env.action_alphabet()) actions += (actions.empty() ? "" : "/") + a;
      return "You are an intelligent Sokoban player. Briefly analyze the board state and provide your reasoning "
             "process and move decision.\n\n"
             "Response format:\n\n"
             "thought: [your analysis and reasoning process]\n\n"
             "action: [" + actions + "]";
    }
    case EnvKind::tabular:
      break;
  }
  return "Choose an action.\n\nResponse format:\n\nthought: [reasoning]\n\naction: [action]";
}

std::string user_prompt(const Environment& env, const std::string& observation) {
  const char* game = env.kind() == EnvKind::game2048 ? "2048" : env.kind() == EnvKind::sokoban ? "Sokoban" : "chain";
  return std::string("Current ") + game + " board state:\n" + observation +
         "\n\nBriefly analyze the board and provide your move decision.";
}

Decision GatewayPolicy::decide(const Environment& env, Rng&) const {
  const std::string sys =
      client_->config().system_prompt.empty() ? system_prompt(env) : client_->config().system_prompt;
  ChatReply reply = client_->chat({{"system", sys}, {"user", user_prompt(env, env.observation())}});
  Decision d;
  d.raw_response = reply.content;
  if (auto parsed = try_parse_response(reply.content)) {
    d.reasoning = parsed->reasoning;
    d.action = env.action_id(parsed->action_text);
  }
  d.units = std::move(reply.token_logprobs);
  return d;
}

}  // namespace proact
