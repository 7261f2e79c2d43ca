#pragma once

#include <gmpxx.h>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matint/srs.hpp"

namespace matint::collatz {

using Int = mpz_class;
using Rat = mpq_class;

enum class Domain { Naturals, Positive, Integers, OddNaturals };

// n maps to q*n + r on its residue class.
struct Case {
  Rat q;
  Rat r;
};

class Gcf {
 public:
  Gcf(std::string name, unsigned modulus, std::vector<std::optional<Case>> cases,
      Domain domain);

  const std::string& name() const noexcept { return name_; }
  unsigned modulus() const noexcept { return modulus_; }
  Domain domain() const noexcept { return domain_; }
  const std::vector<std::optional<Case>>& cases() const noexcept { return cases_; }

  bool in_domain(const Int& n) const;
  // nullopt means the function is undefined (bottom) at n. Throws when n is
  // outside the domain.
  std::optional<Int> apply(const Int& n) const;
  std::optional<Int> operator()(const Int& n) const { return apply(n); }

 private:
  std::string name_;
  unsigned modulus_;
  std::vector<std::optional<Case>> cases_;
  Domain domain_;
};

// Named functions: C, T, W, F, S, H, Mahler, M (the accelerated variant the
// M system realizes), B.
Gcf catalog_function(std::string_view name);
std::vector<std::string> function_names();

// (3n+1)/2^k with k maximal; defined on odd n; returns nullopt otherwise.
std::optional<Int> syracuse(const Int& n);

using StepFn = std::function<std::optional<Int>(const Int&)>;

enum class TrajectoryVerdict { ReachedCycleElement, ReachedBottom, Budget };

struct Trajectory {
  std::vector<Int> values;  // starting value first
  TrajectoryVerdict verdict;
};

Trajectory trajectory(const StepFn& f, const Int& start, std::size_t max_iters,
                      std::optional<Int> stop_at = Int(1));
Trajectory trajectory(const Gcf& f, const Int& start, std::size_t max_iters,
                      std::optional<Int> stop_at = Int(1));

// Interpretation of symbols as affine maps x -> a*x + b; exactly one symbol is
// a constant (the left delimiter).
struct DigitMeaning {
  bool constant = false;
  Int a = 1;
  Int b = 0;
};

class DigitView {
 public:
  DigitView() = default;
  DigitView(const srs::Srs& srs,
            const std::vector<std::pair<std::string, DigitMeaning>>& meanings,
            std::string left, std::string right);

  srs::Symbol left() const noexcept { return left_; }
  srs::Symbol right() const noexcept { return right_; }
  const std::optional<DigitMeaning>& meaning(srs::Symbol s) const { return meanings_.at(s); }
  std::size_t alphabet_size() const noexcept { return meanings_.size(); }

  // Value of a word that starts with the constant symbol and otherwise uses
  // affine view symbols; nullopt otherwise.
  std::optional<Int> val(const srs::Word& w) const;
  // left, digits (non-delimiter view symbols), right.
  bool canonical(const srs::Word& w) const;

 private:
  std::vector<std::optional<DigitMeaning>> meanings_;
  srs::Symbol left_ = 0;
  srs::Symbol right_ = 0;
};

DigitMeaning constant(long c);
DigitMeaning affine(long a, long b);

enum class Seed { None, Binary, OddBinary, Ternary };

struct SystemEntry {
  std::string name;
  srs::Srs srs;
  std::optional<DigitView> view;
  std::vector<std::size_t> dynamic;
  std::optional<Gcf> function;
  Seed seed = Seed::None;
  // Values whose seeds are expected to end in a normal form with no further
  // dynamic step, although the function is defined there.
  std::vector<long> halting;
  std::string description;

  bool is_dynamic(std::size_t rule) const;
};

SystemEntry builtin_system(std::string_view name);
std::vector<std::string> catalog_names();

// Seed encodings for the T alphabet (b0 b1 t0 t1 t2 L R, plus Rodd for S).
srs::Word encode_binary(const srs::Srs& srs, const Int& n);
srs::Word encode_odd_binary(const srs::Srs& srs, const Int& n);
srs::Word encode_ternary(const srs::Srs& srs, const Int& n);
std::optional<srs::Word> seed_word(const SystemEntry& e, const Int& n);

// Key-value sidecar carrying everything in an entry except the rules.
std::string write_meta(const SystemEntry& e);
SystemEntry parse_meta(std::string_view text, const srs::Srs& srs);

struct SimStep {
  std::size_t rule;
  std::size_t position;
  bool dynamic;
  srs::Word word;  // after the step
  std::optional<Int> value;
};

struct Simulation {
  srs::Word start;
  std::optional<Int> start_value;
  std::vector<SimStep> steps;
  bool normal_form = false;  // false when max_steps ran out
};

// Deterministic strategy: rewrite the redex with the largest position, lowest
// rule index on ties.
Simulation simulate_word(const SystemEntry& e, srs::Word start, std::size_t max_steps);
Simulation simulate(const SystemEntry& e, const Int& n, std::size_t max_steps);
// Applies the given (rule, position) steps in order; throws if one is not a redex.
Simulation replay(const SystemEntry& e, srs::Word start,
                  const std::vector<std::pair<std::size_t, std::size_t>>& steps);

std::vector<Int> value_track(const Simulation& s);
std::vector<Int> dynamic_track(const Simulation& s);

struct Violation {
  std::string kind;
  std::string word;
  std::string detail;
};

struct SemanticsReport {
  std::vector<Violation> violations;
  std::size_t strings_checked = 0;
  std::size_t values_checked = 0;
  bool budget_exceeded = false;
};

// Checks every redex of the given word: auxiliary steps keep the value,
// dynamic steps apply the function.
std::vector<Violation> check_word(const SystemEntry& e, const srs::Word& w);

// Simulates the seeds of 1..n_max and checks every string met on the way.
SemanticsReport check_semantics(const SystemEntry& e, long n_max,
                                std::size_t step_budget = 1000000);

}  // namespace matint::collatz
