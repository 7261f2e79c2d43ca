#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "matint/cnf.hpp"

namespace matint::sat {

enum class PolarityMode { NegativeFirst, PhaseSaving };
enum class Verdict { Sat, Unsat, Timeout };

std::string to_string(Verdict v);
std::string to_string(PolarityMode p);

struct SolverConfig {
  // Empty means the internal solver; otherwise argv of an external command,
  // which receives the DIMACS path as its last argument.
  std::vector<std::string> external;
  PolarityMode polarity = PolarityMode::NegativeFirst;
  std::optional<std::uint64_t> shuffle_seed;
  double timeout = 60.0;  // seconds
  unsigned portfolio = 1;
  std::uint64_t seed = 0;  // base seed for portfolio shuffles

  void validate() const;
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  double seconds = 0;
};

struct SolverResult {
  Verdict verdict = Verdict::Timeout;
  std::vector<bool> model;  // indexed by variable, entry 0 unused
  SolverStats stats;
  int winner = 0;                        // portfolio instance that answered
  std::vector<double> instance_seconds;  // per portfolio instance
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model that does not satisfy the formula.
class IntegrityError : public SolverError {
 public:
  using SolverError::SolverError;
};

// External command from MATINT_SAT_CMD, split on whitespace; empty if unset.
std::vector<std::string> env_external_command();

SolverResult solve_internal(const Cnf& f, const SolverConfig& cfg, const std::atomic<bool>* stop = nullptr);
SolverResult solve_external(const Cnf& f, const SolverConfig& cfg, const std::atomic<bool>* stop = nullptr);
// Applies shuffle_seed if set, then dispatches on the backend.
SolverResult solve(const Cnf& f, const SolverConfig& cfg, const std::atomic<bool>* stop = nullptr);
// Instance 0 solves the formula as given, instance i >= 1 a copy shuffled
// with seed cfg.seed + i. The first Sat or Unsat wins.
SolverResult portfolio_solve(const Cnf& f, const SolverConfig& cfg);

Cnf shuffle_clauses(const Cnf& f, std::uint64_t seed);

}  // namespace matint::sat
