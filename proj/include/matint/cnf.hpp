#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace matint::sat {

// DIMACS-style literal: +v / -v for variable v >= 1. The two extreme values
// stand for the constants, which the formula simplifies away on insertion.
using Lit = std::int32_t;
inline constexpr Lit kTrue = std::numeric_limits<std::int32_t>::max();
inline constexpr Lit kFalse = -kTrue;

inline bool is_const(Lit l) { return l == kTrue || l == kFalse; }
inline Lit neg(Lit l) { return -l; }
inline int var_of(Lit l) { return l < 0 ? -l : l; }

class Cnf {
 public:
  int new_var() { return ++num_vars_; }
  Lit fresh() { return new_var(); }
  int num_vars() const noexcept { return num_vars_; }
  std::size_t num_clauses() const noexcept { return starts_.size(); }

  // Drops satisfied clauses and false literals; an all-false clause records
  // the formula as trivially unsatisfiable.
  void add(std::initializer_list<Lit> c) { add(std::span<const Lit>(c.begin(), c.size())); }
  void add(std::span<const Lit> c);
  void add(const std::vector<Lit>& c) { add(std::span<const Lit>(c.data(), c.size())); }
  void implies(Lit a, Lit b) { add({neg(a), b}); }

  bool trivially_unsat() const noexcept { return unsat_; }
  std::span<const Lit> clause(std::size_t i) const;

  // Raw clause addition without simplification (used by parsers and tests).
  void add_raw(std::span<const Lit> c);
  void set_num_vars(int n) { num_vars_ = n; }

  void shuffle(std::uint64_t seed);

 private:
  int num_vars_ = 0;
  bool unsat_ = false;
  std::vector<Lit> lits_;
  std::vector<std::size_t> starts_;
  std::vector<Lit> scratch_;
};

void write_dimacs(std::ostream& os, const Cnf& f, const std::vector<std::string>& comments = {});
Cnf parse_dimacs(std::string_view text);

// Truth value of a literal under a model indexed by variable (index 0 unused).
bool lit_value(const std::vector<bool>& model, Lit l);
bool satisfies(const Cnf& f, const std::vector<bool>& model);

}  // namespace matint::sat
