#include "proact/episode.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "proact/policy.hpp"

namespace proact {

Trajectory run_episode(Environment& env, const Policy& policy, std::uint64_t seed, Rng& policy_rng) {
  Trajectory traj;
  traj.env = std::string(env.name());
  traj.variant = std::string(env.variant());
  traj.max_steps = env.max_steps();
  traj.initial_seed = seed;

  std::string observation = env.reset(seed);
  while (!env.done()) {
    Decision decision;
    try {
      decision = policy.decide(env, policy_rng);
    } catch (const std::exception& e) {
      traj.terminal_reason = TerminalReason::aborted;
      traj.abort_message = e.what();
      break;
    }
    StepOutcome outcome = decision.raw_response.empty() ? env.step_action(decision.action)
                                                        : env.step(decision.raw_response);
    Turn turn;
    turn.observation = std::move(observation);
    turn.reasoning = std::move(decision.reasoning);
    turn.action = std::string(env.action_name(outcome.action));
    turn.raw_response = std::move(decision.raw_response);
    turn.reward = outcome.reward;
    turn.valid = outcome.valid;
    turn.info = std::move(outcome.info);
    traj.total_reward += turn.reward;
    traj.turns.push_back(std::move(turn));
    observation = std::move(outcome.observation);
    if (outcome.done) traj.terminal_reason = outcome.reason;
  }
  traj.final_observation = std::move(observation);
  return traj;
}

void write_transcript(std::ostream& out, const Trajectory& trajectory) {
  nlohmann::ordered_json header = {
      {"env", trajectory.env},
      {"variant", trajectory.variant},
      {"seed", trajectory.initial_seed},
      {"max_steps", trajectory.max_steps},
      {"terminal_reason", to_string(trajectory.terminal_reason)},
      {"total_reward", trajectory.total_reward},
      {"final_observation", trajectory.final_observation},
  };
  if (!trajectory.abort_message.empty()) header["abort_message"] = trajectory.abort_message;
  out << header.dump() << '\n';
  for (std::size_t t = 0; t < trajectory.turns.size(); ++t) {
    const Turn& turn = trajectory.turns[t];
    nlohmann::ordered_json line = {
        {"t", t},
        {"observation", turn.observation},
        {"reasoning", turn.reasoning},
        {"action", turn.action},
        {"raw_response", turn.raw_response},
        {"reward", turn.reward},
        {"valid", turn.valid},
        {"info", turn.info},
    };
    out << line.dump() << '\n';
  }
}

void write_transcript(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open transcript file '" + path + "'");
  write_transcript(out, trajectory);
}

Trajectory read_transcript(std::istream& in) {
  Trajectory traj;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty transcript");
  try {
    const auto header = nlohmann::json::parse(line);
    traj.env = header.at("env").get<std::string>();
    traj.variant = header.at("variant").get<std::string>();
    traj.initial_seed = header.at("seed").get<std::uint64_t>();
    traj.max_steps = header.at("max_steps").get<int>();
    traj.terminal_reason = terminal_reason_from_string(header.value("terminal_reason", "none"));
    traj.final_observation = header.value("final_observation", "");
    traj.abort_message = header.value("abort_message", "");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      Turn turn;
      turn.observation = j.at("observation").get<std::string>();
      turn.reasoning = j.at("reasoning").get<std::string>();
      turn.action = j.at("action").get<std::string>();
      turn.raw_response = j.at("raw_response").get<std::string>();
      turn.reward = j.at("reward").get<std::int64_t>();
      turn.valid = j.at("valid").get<bool>();
      if (j.contains("info")) turn.info = j.at("info").get<InfoMap>();
      traj.total_reward += turn.reward;
      traj.turns.push_back(std::move(turn));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad transcript: ") + e.what());
  }
  return traj;
}

}  // namespace proact
