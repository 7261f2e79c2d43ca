#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace matint::srs {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

struct Rule {
  Word lhs;
  Word rhs;
  bool operator==(const Rule&) const = default;
};

class SrsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the text parser; line() is 1-based.
class ParseError : public SrsError {
 public:
  ParseError(std::size_t line, const std::string& msg);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A finite alphabet plus an ordered list of rules. Rule order is significant:
// successors, certificates and SAT encodings all refer to rules by index.
class Srs {
 public:
  Srs() = default;
  Srs(std::vector<std::string> alphabet, std::vector<Rule> rules);

  // Convenience for building systems from symbol names.
  static Srs from_names(
      std::vector<std::string> alphabet,
      const std::vector<std::pair<std::vector<std::string>,
                                  std::vector<std::string>>>& rules);

  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  const Rule& rule(std::size_t i) const { return rules_.at(i); }

  std::optional<Symbol> find_symbol(std::string_view name) const;
  Symbol symbol(std::string_view name) const;   // throws on unknown
  const std::string& name(Symbol s) const;

  Word word(std::string_view text) const;  // whitespace separated names
  std::string show(const Word& w) const;
  std::string show_rule(std::size_t i) const;

  // Symbols occurring in at least one rule, ascending.
  std::vector<Symbol> used_symbols() const;

  bool operator==(const Srs&) const = default;

 private:
  std::vector<std::string> alphabet_;
  std::vector<Rule> rules_;
};

Srs parse_srs(std::string_view text, std::vector<std::string>* warnings = nullptr);
std::string write_srs(const Srs& srs);

Srs reverse_srs(const Srs& srs);
Srs invert_srs(const Srs& srs);
// Keeps rules whose index is not listed; relative order is preserved.
Srs remove_rules(const Srs& srs, const std::vector<std::size_t>& indices);
Srs keep_rules(const Srs& srs, const std::vector<std::size_t>& indices);
Srs union_srs(const Srs& a, const Srs& b);

Word reversed(Word w);

struct Redex {
  std::size_t rule;
  std::size_t position;
  Word result;
};

// One-step successors ordered by rule index, then position.
std::vector<Redex> successors(const Srs& srs, const Word& w, bool top_only = false);

bool is_normal_form(const Srs& srs, const Word& w);

// Rules of the form m s -> m t where the marker m occurs in the system only
// as the first symbol of both sides of a rule. Such rules can only fire at
// the left end of a marker block, so top-relative proofs suffice for them.
std::vector<std::size_t> top_eligible(const Srs& srs);

enum class ExploreVerdict { AllHaltWithin, FoundLongRun, Budget };

struct ExploreResult {
  ExploreVerdict verdict;
  std::size_t steps = 0;     // longest derivation length when AllHaltWithin
  std::size_t visited = 0;   // distinct strings seen on the largest level
};

// Breadth-first search by derivation length. Each level holds the distinct
// strings reachable in exactly k steps; max_width bounds a level's size.
ExploreResult bounded_explore(const Srs& srs, const Word& start,
                              std::size_t max_steps, std::size_t max_width);

}  // namespace matint::srs
