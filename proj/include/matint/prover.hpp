#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "matint/certificate.hpp"
#include "matint/encoding.hpp"
#include "matint/solver.hpp"

namespace matint::prover {

struct Attempt {
  interp::Flavor flavor = interp::Flavor::Natural;
  std::size_t dim = 1;
  long values = 2;
  bool reversed = false;
  interp::Mode mode = interp::Mode::Relative;

  std::string describe() const;
};

enum class TopDetection { Auto, Off, Force };

struct Strategy {
  std::vector<Attempt> lattice;
  double attempt_timeout = 60.0;  // seconds
  double global_timeout = 600.0;
  TopDetection top = TopDetection::Auto;
  std::vector<std::size_t> forced_top;  // rule indices of the input system, for Force
  // Rules of the input system that may be removed; empty means all. The
  // proof stops once only non-removable rules remain.
  std::vector<std::size_t> removable;
  std::optional<long> cap;
  sat::SolverConfig solver;
  std::function<void(const std::string&)> log;

  void validate() const;
  std::string describe() const;
};

// Lattice order: ascending d, then V, natural before arctic, unreversed
// before reversed, Relative before TopRelative.
std::vector<Attempt> default_lattice(const std::vector<interp::Flavor>& flavors, std::size_t max_dim,
                                     long max_values, bool with_top = true);

struct AttemptRecord {
  Attempt attempt;
  sat::Verdict verdict = sat::Verdict::Timeout;
  double seconds = 0;
  int vars = 0;
  std::size_t clauses = 0;
  std::size_t removed = 0;
};

struct StepOutcome {
  std::optional<cert::Step> step;  // nullopt: no proof at these parameters
  AttemptRecord record;
};

// One removal attempt on srs. allowed restricts the strict rules (empty
// means all); top_rules supplies the TopRelative rule set, else the
// syntactic marker test is used.
StepOutcome remove_step(const srs::Srs& srs, const Attempt& a, const Strategy& s,
                        const std::vector<std::size_t>& allowed = {},
                        const std::optional<std::vector<std::size_t>>& top_rules = std::nullopt,
                        double timeout = 0);

struct ProveResult {
  cert::Certificate certificate;  // complete iff every rule was removed
  srs::Srs remaining;
  std::vector<AttemptRecord> attempts;
  double seconds = 0;
  bool timed_out = false;
};

ProveResult prove(const srs::Srs& srs, const Strategy& s);

}  // namespace matint::prover
