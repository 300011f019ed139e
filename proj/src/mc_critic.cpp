#include "proact/mc_critic.hpp"

#include <omp.h>

#include <array>
#include <chrono>
#include <cmath>

namespace proact {

void McConfig::validate() const {
  if (M < 0) throw ConfigError("M must be >= 0");
  if (T < 0) throw ConfigError("T must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0,1]");
  if (K < 1) throw ConfigError("K must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double rollout_return(Environment& env, int horizon, double gamma, std::uint64_t seed, bool legal_only,
                      std::int64_t* steps) {
  env.reseed(derive_seed(seed, 0));
  Rng rng(derive_seed(seed, 1));
  const int n = env.action_count();
  std::array<ActionId, 16> small{};
  std::vector<ActionId> large;
  double ret = 0.0;
  double discount = 1.0;
  int k = 0;
  for (; k < horizon && !env.done(); ++k) {
    ActionId a = 0;
    if (legal_only) {
      ActionId* legal = small.data();
      if (n > static_cast<int>(small.size())) {
        large.resize(static_cast<std::size_t>(n));
        legal = large.data();
      }
      int count = 0;
      for (ActionId i = 0; i < n; ++i) {
        if (env.is_legal(i)) legal[count++] = i;
      }
      a = count > 0 ? legal[rng.below(static_cast<std::uint64_t>(count))]
                    : static_cast<ActionId>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      a = static_cast<ActionId>(rng.below(static_cast<std::uint64_t>(n)));
    }
    ret += discount * static_cast<double>(env.apply(a).reward);
    discount *= gamma;
  }
  if (steps) *steps += k;
  return ret;
}

namespace {

ValueEstimate summarize(const std::vector<double>& returns, const McConfig& cfg) {
  ValueEstimate est;
  est.config = cfg;
  est.sample_count = static_cast<int>(returns.size());
  if (returns.empty()) {
    est.degenerate = true;
    return est;
  }
  const double n = static_cast<double>(returns.size());
  est.mean = pairwise_sum(returns.data(), returns.size()) / n;
  if (returns.size() >= 2) {
    std::vector<double> sq(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) sq[i] = (returns[i] - est.mean) * (returns[i] - est.mean);
    const double var = pairwise_sum(sq.data(), sq.size()) / (n - 1.0);
    est.std_error = std::sqrt(var / n);
    est.has_error = true;
  }
  return est;
}

ValueEstimate degenerate_estimate(const McConfig& cfg) {
  ValueEstimate est;
  est.config = cfg;
  est.degenerate = true;
  return est;
}

}  // namespace

ValueEstimate estimate_v(const Environment& prototype, const StateSnapshot& snapshot, const McConfig& cfg) {
  cfg.validate();
  if (cfg.degenerate()) return degenerate_estimate(cfg);
  std::vector<double> returns(static_cast<std::size_t>(cfg.M));
  const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel num_threads(threads) if (threads > 1 && cfg.M > 1)
  {
    auto env = prototype.clone();
#pragma omp for schedule(static)
    for (int i = 0; i < cfg.M; ++i) {
      env->restore(snapshot);
      returns[static_cast<std::size_t>(i)] =
          rollout_return(*env, cfg.T, cfg.gamma, derive_seed(cfg.base_seed, static_cast<std::uint64_t>(i)),
                         cfg.legal_only);
    }
  }
  return summarize(returns, cfg);
}

ValueEstimate estimate_v_serial(const Environment& prototype, const StateSnapshot& snapshot, const McConfig& cfg) {
  cfg.validate();
  if (cfg.degenerate()) return degenerate_estimate(cfg);
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(cfg.M));
  auto env = prototype.clone();
  for (int i = 0; i < cfg.M; ++i) {
    env->restore(snapshot);
    returns.push_back(rollout_return(*env, cfg.T, cfg.gamma, derive_seed(cfg.base_seed, static_cast<std::uint64_t>(i)),
                                     cfg.legal_only));
  }
  return summarize(returns, cfg);
}

QEstimate estimate_q(const Environment& prototype, const StateSnapshot& snapshot, ActionId action,
                     const McConfig& cfg) {
  cfg.validate();
  QEstimate q;
  q.action = action;
  q.degenerate = cfg.degenerate();
  const int k = prototype.stochastic() ? cfg.K : 1;
  const std::uint64_t qseed = derive_seed(cfg.base_seed, 0x5100u + static_cast<std::uint64_t>(action + 1));
  auto env = prototype.clone();
  std::vector<double> samples;
  double value_se = 0.0;
  for (int j = 0; j < k; ++j) {
    env->restore(snapshot);
    env->reseed(derive_seed(qseed, static_cast<std::uint64_t>(2 * j)));
    const Transition tr = env->apply(action);
    QSample s;
    s.reward = tr.reward;
    if (!tr.done && !cfg.degenerate()) {
      McConfig inner = cfg;
      inner.base_seed = derive_seed(qseed, static_cast<std::uint64_t>(2 * j + 1));
      const ValueEstimate v = estimate_v(*env, env->snapshot(), inner);
      s.value = v.mean;
      value_se = v.std_error;
    }
    q.components.push_back(s);
    samples.push_back(static_cast<double>(s.reward) + cfg.gamma * s.value);
  }
  const double n = static_cast<double>(samples.size());
  q.mean = pairwise_sum(samples.data(), samples.size()) / n;
  if (samples.size() >= 2) {
    double ss = 0.0;
    for (double x : samples) ss += (x - q.mean) * (x - q.mean);
    q.std_error = std::sqrt(ss / (n - 1.0) / n);
  } else {
    q.std_error = cfg.gamma * value_se;
  }
  return q;
}

std::vector<QEstimate> estimate_q_all(const Environment& prototype, const StateSnapshot& snapshot,
                                      const McConfig& cfg) {
  std::vector<QEstimate> out;
  for (ActionId a = 0; a < prototype.action_count(); ++a) out.push_back(estimate_q(prototype, snapshot, a, cfg));
  return out;
}

namespace {

template <typename Body>
BenchResult timed(int count, Body&& body) {
  BenchResult res;
  res.rollouts = count;
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> returns(static_cast<std::size_t>(std::max(count, 0)));
  res.steps = body(returns);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (count > 0) res.mean_return = pairwise_sum(returns.data(), returns.size()) / count;
  return res;
}

}  // namespace

BenchResult bench_rollouts(const Environment& prototype, int count, int horizon, std::uint64_t seed, int workers) {
  return timed(count, [&](std::vector<double>& returns) {
    std::int64_t steps = 0;
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel num_threads(threads) if (threads > 1) reduction(+ : steps)
    {
      auto env = prototype.clone();
#pragma omp for schedule(dynamic, 8)
      for (int i = 0; i < count; ++i) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
        env->reset(s);
        returns[static_cast<std::size_t>(i)] = rollout_return(*env, horizon, 1.0, s, true, &steps);
      }
    }
    return steps;
  });
}

BenchResult bench_rollouts_serial(const Environment& prototype, int count, int horizon, std::uint64_t seed) {
  return timed(count, [&](std::vector<double>& returns) {
    std::int64_t steps = 0;
    auto env = prototype.clone();
    for (int i = 0; i < count; ++i) {
      const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
      env->reset(s);
      returns[static_cast<std::size_t>(i)] = rollout_return(*env, horizon, 1.0, s, true, &steps);
    }
    return steps;
  });
}

}  // namespace proact
