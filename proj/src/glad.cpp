#include "proact/glad.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "proact/response.hpp"

namespace proact {

AgentReply BestProbeAgent::decide(const GladContext& ctx) {
  AgentReply r;
  r.action = ctx.probes.best_action();
  return r;
}

AgentReply ThresholdBacktrackAgent::decide(const GladContext& ctx) {
  AgentReply r;
  if (ctx.backtrack_allowed && ctx.probes.best_return() < threshold_) {
    r.backtrack = true;
    return r;
  }
  r.action = ctx.probes.best_action();
  return r;
}

std::string render_probes(const Environment& env, const ProbeSet& probes) {
  std::string out;
  char label = 'A';
  for (const auto& t : probes.trajectories) {
    out += "Trajectory ";
    out.push_back(label++);
    out += ":";
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
      out += " " + std::string(env.action_name(t.actions[i])) + " (" + std::to_string(t.rewards[i]) + ")";
      if (i + 1 < t.actions.size()) out += " ->";
    }
    out += " | return " + std::to_string(t.ret);
    if (t.terminal_reason != TerminalReason::none) out += " | ended: " + std::string(to_string(t.terminal_reason));
    out += "\n";
  }
  return out;
}

AgentReply GatewayGladAgent::decide(const GladContext& ctx) {
  std::string sys = client_->config().system_prompt.empty() ? system_prompt(ctx.env) : client_->config().system_prompt;
  if (ctx.backtrack_allowed) {
    sys += "\n\nIf every lookahead looks bad because of your previous move, reply with " + std::string(kBacktrackToken) +
           " to undo it.";
  }
  const std::string user = user_prompt(ctx.env, ctx.observation) +
                           "\n\nLookahead trajectories sampled from the real environment:\n" +
                           render_probes(ctx.env, ctx.probes);
  const ChatReply reply = client_->chat({{"system", sys}, {"user", user}});
  AgentReply r;
  if (reply.content.find(kBacktrackToken) != std::string::npos) {
    r.backtrack = true;
    r.analysis = reply.content;
    return r;
  }
  if (auto parsed = try_parse_response(reply.content)) {
    r.analysis = parsed->reasoning;
    r.action = ctx.env.action_id(parsed->action_text);
  } else {
    r.analysis = reply.content;
  }
  return r;
}

namespace {

ProbeSet merge_probe_sets(std::vector<ProbeSet> sets) {
  ProbeSet out = std::move(sets.front());
  for (std::size_t i = 1; i < sets.size(); ++i) {
    for (auto& t : sets[i].trajectories) out.trajectories.push_back(std::move(t));
    for (const auto& s : sets[i].root_stats) {
      auto it = std::find_if(out.root_stats.begin(), out.root_stats.end(),
                             [&](const ActionStat& o) { return o.action == s.action; });
      if (it == out.root_stats.end()) {
        out.root_stats.push_back(s);
        continue;
      }
      const int visits = it->visits + s.visits;
      it->mean_return = (it->mean_return * it->visits + s.mean_return * s.visits) / visits;
      it->visits = visits;
      it->best_return = std::max(it->best_return, s.best_return);
      it->worst_return = std::min(it->worst_return, s.worst_return);
    }
  }
  std::sort(out.root_stats.begin(), out.root_stats.end(),
            [](const ActionStat& a, const ActionStat& b) { return a.action < b.action; });
  return out;
}

ProbeSet run_probes(const Environment& env, const StateSnapshot& snap, const GladConfig& cfg, std::uint64_t seed) {
  std::vector<ProbeSet> sets;
  for (int r = 0; r < std::max(cfg.rounds, 1); ++r) {
    ProbeConfig pc = cfg.probe;
    pc.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    sets.push_back(probe_environment(env, snap, pc));
  }
  return merge_probe_sets(std::move(sets));
}

}  // namespace

GladHistory glad_episode(Environment& env, GladAgent& agent, const GladConfig& cfg, std::uint64_t seed) {
  if (cfg.backtrack_budget < 0) throw ConfigError("backtrack budget must be >= 0");
  GladHistory h;
  env.reset(seed);
  int budget = cfg.backtrack_budget;
  bool last_was_backtrack = false;
  while (!env.done()) {
    const int t = static_cast<int>(h.steps.size());
    const StateSnapshot snap = env.snapshot();
    const std::string obs = env.observation();
    const ProbeSet probes = run_probes(env, snap, cfg, derive_seed(seed, static_cast<std::uint64_t>(h.decisions)));
    ++h.decisions;

    const bool allowed = t > 0 && budget > 0 && !last_was_backtrack;
    AgentReply reply = agent.decide({env, obs, probes, t, allowed});
    bool refused = false;
    if (reply.backtrack) {
      if (allowed) {
        const GladStep& prev = h.steps.back();
        env.restore(prev.snapshot);
        h.total_reward -= prev.reward;
        h.steps.pop_back();
        --budget;
        ++h.backtracks;
        last_was_backtrack = true;
        continue;
      }
      // Refused: ask again without the option, then fall back to the probes.
      refused = true;
      ++h.refused_backtracks;
      reply = agent.decide({env, obs, probes, t, false});
      if (reply.backtrack) reply.action = kInvalidAction;
    }
    if (reply.action < 0 || reply.action >= env.action_count()) reply.action = probes.best_action();

    GladStep step;
    step.t = t;
    step.state_text = obs;
    step.snapshot = snap;
    step.probes = probes;
    step.analysis = std::move(reply.analysis);
    step.action = reply.action;
    step.legal = env.is_legal(reply.action);
    step.backtrack_refused = refused;
    step.reward = env.apply(reply.action).reward;
    h.total_reward += step.reward;
    h.steps.push_back(std::move(step));
    last_was_backtrack = false;
  }
  h.terminal_reason = env.terminal_reason();
  return h;
}

std::vector<GladRecord> make_records(const Environment& env, const GladHistory& history, const std::string& episode_id,
                                     const GladConfig& cfg, const GatewayClient* teacher) {
  std::vector<GladRecord> out;
  auto probe_env = env.clone();
  for (const auto& step : history.steps) {
    probe_env->restore(step.snapshot);
    Compressed z;
    if (teacher) {
      z = compress_teacher(*teacher, *probe_env, step.probes, step.action);
    } else {
      z = {compress_template(*probe_env, step.probes, step.action), "template"};
    }
    GladRecord r;
    r.episode_id = episode_id;
    r.t = step.t;
    r.env = std::string(env.name());
    r.variant = std::string(env.variant());
    r.state_text = step.state_text;
    r.snapshot_hex = to_hex(step.snapshot.bytes);
    r.reasoning = std::move(z.text);
    r.action = std::string(env.action_name(step.action));
    r.reward = step.reward;
    r.legal = step.legal;
    r.compressor = std::move(z.compressor);
    r.probe_k = cfg.probe.k;
    r.probe_depth = cfg.probe.depth;
    r.best_probe_return = step.probes.best_return();
    if (const ActionStat* s = step.probes.stat(step.action)) r.chosen_mean_return = s->mean_return;
    out.push_back(std::move(r));
  }
  // Backtracks taken before each surviving step are not tracked per step;
  // record the episode total on every record.
  for (auto& r : out) r.backtracks_so_far = history.backtracks;
  return out;
}

namespace {

nlohmann::ordered_json to_json(const GladRecord& r) {
  return {
      {"episode_id", r.episode_id},
      {"t", r.t},
      {"env", r.env},
      {"variant", r.variant},
      {"state_text", r.state_text},
      {"snapshot", r.snapshot_hex},
      {"reasoning", r.reasoning},
      {"action", r.action},
      {"reward", r.reward},
      {"legal", r.legal},
      {"provenance",
       {{"compressor", r.compressor},
        {"probe_k", r.probe_k},
        {"probe_depth", r.probe_depth},
        {"best_probe_return", r.best_probe_return},
        {"chosen_mean_return", r.chosen_mean_return},
        {"backtracks", r.backtracks_so_far}}},
  };
}

}  // namespace

std::size_t write_dataset(std::ostream& out, const std::vector<GladRecord>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  return records.size();
}

std::size_t write_dataset(const std::string& path, const std::vector<GladRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open dataset file '" + path + "'");
  return write_dataset(out, records);
}

std::vector<GladRecord> read_dataset(std::istream& in) {
  std::vector<GladRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      GladRecord r;
      r.episode_id = j.at("episode_id").get<std::string>();
      r.t = j.at("t").get<int>();
      r.env = j.at("env").get<std::string>();
      r.variant = j.at("variant").get<std::string>();
      r.state_text = j.at("state_text").get<std::string>();
      r.snapshot_hex = j.at("snapshot").get<std::string>();
      r.reasoning = j.at("reasoning").get<std::string>();
      r.action = j.at("action").get<std::string>();
      r.reward = j.at("reward").get<std::int64_t>();
      r.legal = j.at("legal").get<bool>();
      const auto& p = j.at("provenance");
      r.compressor = p.at("compressor").get<std::string>();
      r.probe_k = p.at("probe_k").get<int>();
      r.probe_depth = p.at("probe_depth").get<int>();
      r.best_probe_return = p.at("best_probe_return").get<std::int64_t>();
      r.chosen_mean_return = p.at("chosen_mean_return").get<double>();
      r.backtracks_so_far = p.at("backtracks").get<int>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad dataset record: ") + e.what());
    }
  }
  return out;
}

ReplayReport replay_check(const std::vector<GladRecord>& records, const Environment& prototype) {
  ReplayReport report;
  auto env = prototype.clone();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const GladRecord& r = records[i];
    ++report.checked;
    const auto fail = [&](std::string why) { report.failures.push_back({i, std::move(why)}); };
    if (r.env != prototype.name() || r.variant != prototype.variant()) {
      fail("record belongs to a different environment");
      continue;
    }
    try {
      env->restore({prototype.kind(), r.variant, from_hex(r.snapshot_hex)});
    } catch (const std::exception& e) {
      fail(std::string("snapshot does not restore: ") + e.what());
      continue;
    }
    if (env->done()) {
      fail("snapshot is terminal");
      continue;
    }
    if (env->observation() != r.state_text) {
      fail("state text differs from the restored state");
      continue;
    }
    const ActionId a = env->action_id(r.action);
    if (a == kInvalidAction || env->action_name(a) != r.action) {
      fail("action '" + r.action + "' is not in the alphabet");
      continue;
    }
    const bool legal = env->is_legal(a);
    if (legal != r.legal) {
      fail(legal ? "action recorded as illegal but is legal" : "illegal action");
      continue;
    }
    const std::int64_t reward = env->apply(a).reward;
    if (reward != r.reward) {
      fail("reward " + std::to_string(reward) + " differs from recorded " + std::to_string(r.reward));
      continue;
    }
    const auto parsed = try_parse_response(r.reasoning);
    if (!parsed || env->action_id(parsed->action_text) != a) fail("reasoning does not conclude with the action");
  }
  return report;
}

}  // namespace proact
