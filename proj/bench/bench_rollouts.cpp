// Serial reference vs OpenMP kernels: random rollouts and V^MC estimation.
// Usage: bench_rollouts [count] [horizon] [max_workers]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "proact/env_factory.hpp"
#include "proact/mc_critic.hpp"

using namespace proact;

namespace {

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void rollouts(const char* name, const Environment& env, int count, int horizon, int max_workers) {
  const BenchResult serial = bench_rollouts_serial(env, count, horizon, 1);
  std::printf("%-8s rollouts  serial      %8.3f s  %10lld steps  mean %.2f\n", name, serial.wall_seconds,
              static_cast<long long>(serial.steps), serial.mean_return);
  for (int w = 1; w <= max_workers; w *= 2) {
    const BenchResult r = bench_rollouts(env, count, horizon, 1, w);
    std::printf("%-8s rollouts  omp x%-3d    %8.3f s  speedup %5.2f  %s\n", name, w, r.wall_seconds,
                serial.wall_seconds / r.wall_seconds,
                r.steps == serial.steps && r.mean_return == serial.mean_return ? "same" : "MISMATCH");
  }
}

void critic(const char* name, Environment& env, int max_workers) {
  env.reset(3);
  McConfig cfg;
  cfg.M = 2000;
  cfg.T = 200;
  ValueEstimate ref;
  const double ts = timed([&] { ref = estimate_v_serial(env, env.snapshot(), cfg); });
  std::printf("%-8s estimate_v serial     %8.3f s  v=%.4f\n", name, ts, ref.mean);
  for (int w = 1; w <= max_workers; w *= 2) {
    cfg.workers = w;
    ValueEstimate v;
    const double t = timed([&] { v = estimate_v(env, env.snapshot(), cfg); });
    std::printf("%-8s estimate_v omp x%-3d   %8.3f s  speedup %5.2f  %s\n", name, w, t, ts / t,
                v.mean == ref.mean && v.std_error == ref.std_error ? "same" : "MISMATCH");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const int count = argc > 1 ? std::atoi(argv[1]) : 1000;
  const int horizon = argc > 2 ? std::atoi(argv[2]) : 1000;
  const int max_workers = argc > 3 ? std::atoi(argv[3]) : omp_get_max_threads();
  for (const char* name : {"2048", "sokoban"}) {
    EnvSpec spec;
    spec.env = name;
    auto env = make_environment(spec);
    rollouts(name, *env, count, horizon, max_workers);
    critic(name, *env, max_workers);
  }
}
