#include "proact/env_factory.hpp"

#include "proact/game2048.hpp"
#include "proact/sokoban.hpp"
#include "proact/tabular_mdp.hpp"

namespace proact {

void EnvSpec::validate() const {
  if (env.empty()) throw ConfigError("missing required key 'env' (2048, sokoban or chain)");
  if (env != "2048" && env != "sokoban" && env != "chain") {
    throw ConfigError("unknown env '" + env + "' (expected 2048, sokoban, chain)");
  }
  if (max_steps == 0 || max_steps < -1) throw ConfigError("max_steps must be >= 1");
}

namespace {

std::vector<sokoban::Level> load_levels(const EnvSpec& spec, const sokoban::SymbolTable& symbols) {
  if (spec.levels == "simplified") return sokoban::simplified_levels();
  const std::string prefix = "generated:";
  if (spec.levels.rfind(prefix, 0) == 0) {
    int count = 0;
    try {
      count = std::stoi(spec.levels.substr(prefix.size()));
    } catch (const std::exception&) {
      throw ConfigError("bad level source '" + spec.levels + "'");
    }
    if (count < 1) throw ConfigError("generated level count must be >= 1");
    std::vector<sokoban::Level> levels;
    for (int i = 0; i < count; ++i) {
      Rng rng(derive_seed(spec.level_seed, static_cast<std::uint64_t>(i)));
      levels.push_back(sokoban::generate_level(rng, {}));
    }
    return levels;
  }
  return sokoban::read_levels(spec.levels, symbols);
}

}  // namespace

std::unique_ptr<Environment> make_environment(const EnvSpec& spec) {
  spec.validate();
  if (spec.env == "2048") {
    auto config = g2048::Config::for_variant(spec.variant);
    if (spec.max_steps > 0) config.max_steps = spec.max_steps;
    if (spec.invalid_limit >= 0) config.invalid_limit = spec.invalid_limit;
    config.escaped_newline = spec.escaped_newline;
    config.spawn_high_prob = spec.spawn_high_prob;
    return std::make_unique<g2048::Game2048Env>(std::move(config));
  }
  if (spec.env == "sokoban") {
    auto config = sokoban::Config::for_variant(spec.variant);
    config.levels = load_levels(spec, config.symbols);
    // Small levels get the short cap.
    config.max_steps = spec.levels == "simplified" ? 20 : 200;
    if (spec.max_steps > 0) config.max_steps = spec.max_steps;
    if (spec.invalid_limit >= 0) config.invalid_limit = spec.invalid_limit;
    config.deadlock_termination = spec.deadlock_termination;
    return std::make_unique<sokoban::SokobanEnv>(std::move(config));
  }
  tabular::Mdp mdp;
  if (spec.variant == "delayed" || spec.variant == "standard") {
    mdp = tabular::delayed_reward_chain();
  } else if (spec.variant == "noisy") {
    mdp = tabular::noisy_chain();
  } else if (spec.variant == "two_state") {
    mdp = tabular::two_state_chain();
  } else {
    throw ConfigError("unknown chain variant '" + spec.variant + "' (expected delayed, noisy, two_state)");
  }
  if (spec.max_steps > 0) mdp.max_steps = spec.max_steps;
  return std::make_unique<tabular::MdpEnv>(std::move(mdp));
}

}  // namespace proact
