#pragma once

#include <string>
#include <vector>

#include "matint/certificate.hpp"
#include "matint/prover.hpp"

namespace matint::campaign {

// Reference (D, V) per left-out rule of T, in rule order.
struct Table1Row {
  std::size_t rule;
  std::size_t dim;
  long values;
};
std::vector<Table1Row> table1_reference(interp::Flavor f);

// Interpretation for the reversed system T \ B orienting every rule strictly.
interp::Interpretation residual_interpretation(const srs::Srs& system);

struct Table1Options {
  std::vector<interp::Flavor> flavors{interp::Flavor::Natural};
  std::vector<std::size_t> rules;  // left-out rules to run; empty means all 11
  double row_budget = 60.0;        // seconds, per attempted (D, V)
  bool try_next_values = true;     // retry at (D, V+1) after a miss
  sat::SolverConfig solver;
  std::function<void(const std::string&)> log;
};

struct Table1Result {
  std::size_t rule = 0;
  std::string rule_text;
  interp::Flavor flavor = interp::Flavor::Natural;
  std::size_t ref_dim = 0;
  long ref_values = 0;
  bool success = false;  // some attempted (D, V) gave a verified proof
  bool exact = false;    // success at the reference (D, V)
  long used_values = 0;
  std::size_t steps = 0;  // search steps, excluding the residual step
  double seconds = 0;     // time of the successful (D, V) run
  std::string note;
  cert::Certificate certificate;
};

std::vector<Table1Result> table1_campaign(const Table1Options& o);
std::string format_table1(const std::vector<Table1Result>& rows);

}  // namespace matint::campaign
