#include "matint/cnf.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace matint::sat {

void Cnf::add(std::span<const Lit> c) {
  scratch_.clear();
  for (Lit l : c) {
    if (l == kTrue) return;
    if (l == kFalse) continue;
    if (l == 0 || var_of(l) > num_vars_) throw std::logic_error("literal out of range");
    bool dup = false;
    for (Lit m : scratch_) {
      if (m == -l) return;
      dup = dup || m == l;
    }
    if (!dup) scratch_.push_back(l);
  }
  if (scratch_.empty()) {
    if (unsat_) return;
    unsat_ = true;
  }
  add_raw(scratch_);
}

void Cnf::add_raw(std::span<const Lit> c) {
  starts_.push_back(lits_.size());
  lits_.insert(lits_.end(), c.begin(), c.end());
  lits_.push_back(0);
}

std::span<const Lit> Cnf::clause(std::size_t i) const {
  std::size_t b = starts_.at(i);
  std::size_t e = b;
  while (lits_[e] != 0) ++e;
  return {lits_.data() + b, e - b};
}

void Cnf::shuffle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Lit>> cs;
  cs.reserve(num_clauses());
  for (std::size_t i = 0; i < num_clauses(); ++i) {
    auto c = clause(i);
    cs.emplace_back(c.begin(), c.end());
    std::shuffle(cs.back().begin(), cs.back().end(), rng);
  }
  std::shuffle(cs.begin(), cs.end(), rng);
  lits_.clear();
  starts_.clear();
  for (const auto& c : cs) add_raw(c);
}

void write_dimacs(std::ostream& os, const Cnf& f, const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "c " << c << '\n';
  os << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
  std::string line;
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    line.clear();
    for (Lit l : f.clause(i)) {
      line += std::to_string(l);
      line += ' ';
    }
    line += "0\n";
    os << line;
  }
}

Cnf parse_dimacs(std::string_view text) {
  Cnf f;
  std::istringstream is{std::string(text)};
  std::string tok;
  bool header = false;
  long declared_clauses = 0;
  std::vector<Lit> cur;
  while (is >> tok) {
    if (tok == "c") {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    if (tok == "p") {
      std::string fmt;
      long nv = 0;
      is >> fmt >> nv >> declared_clauses;
      if (fmt != "cnf" || nv < 0) throw std::runtime_error("bad DIMACS header");
      f.set_num_vars(static_cast<int>(nv));
      header = true;
      continue;
    }
    if (!header) throw std::runtime_error("DIMACS clause before header");
    long v = std::stol(tok);
    if (v == 0) {
      f.add_raw(cur);
      cur.clear();
    } else {
      if (std::labs(v) > f.num_vars()) throw std::runtime_error("DIMACS literal out of range");
      cur.push_back(static_cast<Lit>(v));
    }
  }
  if (!cur.empty()) f.add_raw(cur);
  return f;
}

bool lit_value(const std::vector<bool>& model, Lit l) {
  if (l == kTrue) return true;
  if (l == kFalse) return false;
  bool v = model.at(static_cast<std::size_t>(var_of(l)));
  return l > 0 ? v : !v;
}

bool satisfies(const Cnf& f, const std::vector<bool>& model) {
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    bool sat = false;
    for (Lit l : f.clause(i)) {
      if (lit_value(model, l)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

}  // namespace matint::sat
