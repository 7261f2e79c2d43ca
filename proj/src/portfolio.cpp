#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "matint/solver.hpp"

namespace matint::sat {

SolverResult portfolio_solve(const Cnf& f, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.portfolio == 1) {
    SolverConfig c = cfg;
    SolverResult r = solve(f, c);
    r.instance_seconds = {r.stats.seconds};
    return r;
  }
  const unsigned n = cfg.portfolio;
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::optional<SolverResult> best;
  std::exception_ptr error;
  std::vector<double> secs(n, 0.0);
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i) {
    pool.emplace_back([&, i] {
      auto t0 = std::chrono::steady_clock::now();
      try {
        SolverConfig c = cfg;
        c.portfolio = 1;
        c.shuffle_seed.reset();
        if (i > 0) c.shuffle_seed = cfg.seed + i;
        SolverResult r = solve(f, c, &stop);
        std::lock_guard<std::mutex> lk(mu);
        if (r.verdict != Verdict::Timeout && !best) {
          r.winner = static_cast<int>(i);
          best = std::move(r);
          stop = true;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!error) error = std::current_exception();
        stop = true;
      }
      secs[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
  }
  for (auto& t : pool) t.join();
  if (best) {
    best->instance_seconds = secs;
    return std::move(*best);
  }
  if (error) std::rethrow_exception(error);
  SolverResult r;
  r.verdict = Verdict::Timeout;
  r.instance_seconds = secs;
  for (double s : secs) r.stats.seconds = std::max(r.stats.seconds, s);
  return r;
}

}  // namespace matint::sat
