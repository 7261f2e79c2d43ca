#include "matint/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "matint/collatz.hpp"

namespace matint::campaign {

using interp::Flavor;
using interp::Mode;

std::vector<Table1Row> table1_reference(Flavor f) {
  if (f == Flavor::Natural) {
    return {{0, 3, 4}, {1, 1, 2}, {2, 4, 2}, {3, 1, 3}, {4, 1, 2}, {5, 4, 3},
            {6, 5, 2}, {7, 4, 4}, {8, 2, 2}, {9, 3, 3}, {10, 4, 4}};
  }
  return {{0, 3, 5}, {1, 1, 3}, {2, 3, 4}, {3, 1, 4}, {4, 1, 3}, {5, 3, 4},
          {6, 4, 3}, {7, 2, 5}, {8, 2, 3}, {9, 3, 4}, {10, 4, 3}};
}

interp::Interpretation residual_interpretation(const srs::Srs& sys) {
  auto in = interp::Interpretation::natural(sys.alphabet().size(), 1);
  auto set = [&](const char* name, long a, long b) {
    if (auto s = sys.find_symbol(name)) in.nat[*s] = interp::NatAffine{1, {a}, {b}};
  };
  set("b0", 2, 1);
  set("b1", 2, 1);
  set("R", 1, 0);
  set("t0", 2, 0);
  set("t1", 2, 0);
  set("t2", 2, 0);
  return in;
}

namespace {

bool is_b_rule(std::size_t i) { return i >= 8 && i <= 10; }

// Certificate for T minus `left_out` at one (D, V), or nullopt.
std::optional<cert::Certificate> run_row(const srs::Srs& t, std::size_t left_out, Flavor f, std::size_t d,
                                         long v, const Table1Options& o, std::size_t& steps, std::string& note) {
  srs::Srs sub = srs::remove_rules(t, {left_out});
  prover::Strategy s;
  for (bool rev : {false, true}) {
    for (Mode m : {Mode::Relative, Mode::TopRelative}) s.lattice.push_back({f, d, v, rev, m});
  }
  s.attempt_timeout = o.row_budget;
  s.global_timeout = o.row_budget;
  s.solver = o.solver;
  s.log = o.log;
  for (std::size_t i = 0, k = 0; i < t.size(); ++i) {
    if (i == left_out) continue;
    if (is_b_rule(i)) s.removable.push_back(k);
    ++k;
  }
  prover::ProveResult r = prover::prove(sub, s);
  steps = r.certificate.steps.size();
  for (const auto& rule : r.remaining.rules()) {
    std::size_t orig = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.rule(i).lhs == rule.lhs && t.rule(i).rhs == rule.rhs) orig = i;
    }
    if (is_b_rule(orig)) {
      note = r.timed_out ? "budget exhausted" : "no interpretation found";
      return std::nullopt;
    }
  }
  // Close with the known interpretation for the rest.
  cert::Certificate c = r.certificate;
  if (!r.remaining.empty()) {
    cert::Step last;
    last.mode = Mode::Relative;
    last.reversed = true;
    for (std::size_t i = 0; i < r.remaining.size(); ++i) last.removed.push_back(i);
    last.interp = residual_interpretation(r.remaining);
    last.search = "residual";
    c.steps.push_back(std::move(last));
  }
  c.complete = true;
  cert::VerifyResult vr = cert::verify_certificate(c, sub);
  if (!vr.accepted || !vr.complete) {
    note = "certificate rejected: " + vr.reason;
    return std::nullopt;
  }
  return c;
}

}  // namespace

std::vector<Table1Result> table1_campaign(const Table1Options& o) {
  const srs::Srs t = collatz::builtin_system("T").srs;
  std::vector<Table1Result> out;
  for (Flavor f : o.flavors) {
    for (const auto& ref : table1_reference(f)) {
      if (!o.rules.empty() && std::find(o.rules.begin(), o.rules.end(), ref.rule) == o.rules.end()) continue;
      Table1Result row;
      row.rule = ref.rule;
      row.rule_text = t.show_rule(ref.rule);
      row.flavor = f;
      row.ref_dim = ref.dim;
      row.ref_values = ref.values;
      std::vector<long> tries{ref.values};
      if (o.try_next_values) tries.push_back(ref.values + 1);
      std::string first_note;
      for (long v : tries) {
        auto t0 = std::chrono::steady_clock::now();
        std::size_t steps = 0;
        std::string note;
        auto c = run_row(t, ref.rule, f, ref.dim, v, o, steps, note);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c) {
          row.success = true;
          row.exact = v == ref.values;
          row.used_values = v;
          row.steps = steps;
          row.seconds = secs;
          row.certificate = std::move(*c);
          if (!row.exact) row.note = "missed at V=" + std::to_string(ref.values) + " (" + first_note + ")";
          break;
        }
        if (first_note.empty()) first_note = note;
        row.seconds = secs;
        row.note = note;
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::string format_table1(const std::vector<Table1Result>& rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-22s %-8s %6s %6s %6s %9s  %s\n", "rule removed", "flavor", "ref", "found",
                "steps", "time", "status");
  os << buf;
  for (const auto& r : rows) {
    std::string ref = std::to_string(r.ref_dim) + "/" + std::to_string(r.ref_values);
    std::string found = r.success ? std::to_string(r.ref_dim) + "/" + std::to_string(r.used_values) : "-";
    std::string status = r.exact ? "ok" : r.success ? "ok at V+1" : "miss";
    if (!r.note.empty()) status += ": " + r.note;
    std::snprintf(buf, sizeof buf, "%-22s %-8s %6s %6s %6zu %8.2fs  %s\n", r.rule_text.c_str(),
                  interp::to_string(r.flavor), ref.c_str(), found.c_str(), r.steps, r.seconds, status.c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace matint::campaign
