// matint: termination proofs for string rewriting systems by matrix
// interpretations, plus the Collatz-derived system catalog.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "matint/campaign.hpp"
#include "matint/certificate.hpp"
#include "matint/collatz.hpp"
#include "matint/encoding.hpp"
#include "matint/prover.hpp"
#include "matint/solver.hpp"
#include "matint/srs.hpp"

namespace fs = std::filesystem;
using namespace matint;

namespace {

constexpr int kExitGaveUp = 10;
constexpr int kExitRejected = 1;
constexpr int kExitError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

bool is_catalog(const std::string& name) {
  for (const auto& n : collatz::catalog_names()) {
    if (n == name) return true;
  }
  return false;
}

// An SRS file, or a catalog name when no such file exists.
srs::Srs load_srs(const std::string& arg) {
  if (fs::exists(arg)) {
    std::vector<std::string> warnings;
    auto s = srs::parse_srs(read_file(arg), &warnings);
    for (const auto& w : warnings) std::cerr << "matint: warning: " << w << '\n';
    return s;
  }
  if (is_catalog(arg)) return collatz::builtin_system(arg).srs;
  throw std::runtime_error("no such file or catalog system: " + arg);
}

// A catalog name, or NAME.srs with its NAME.meta sidecar.
collatz::SystemEntry load_entry(const std::string& arg) {
  if (is_catalog(arg)) return collatz::builtin_system(arg);
  if (!fs::exists(arg)) throw std::runtime_error("no such file or catalog system: " + arg);
  auto s = srs::parse_srs(read_file(arg));
  fs::path meta = fs::path(arg).replace_extension(".meta");
  if (!fs::exists(meta)) throw std::runtime_error("missing metadata file " + meta.string());
  return collatz::parse_meta(read_file(meta.string()), s);
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw UsageError("bad rule index '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<interp::Flavor> parse_flavors(const std::string& f) {
  if (f == "natural") return {interp::Flavor::Natural};
  if (f == "arctic") return {interp::Flavor::Arctic};
  if (f == "both") return {interp::Flavor::Natural, interp::Flavor::Arctic};
  throw UsageError("--flavor must be natural, arctic or both");
}

struct SolverFlags {
  std::uint64_t seed = 0;
  unsigned portfolio = 1;
  std::string solver;
  std::string polarity = "neg";

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "Base seed for clause shuffles");
    app->add_option("--portfolio", portfolio, "Number of solver instances")->check(CLI::PositiveNumber);
    app->add_option("--solver", solver, "External solver command (default: MATINT_SAT_CMD or internal)");
    app->add_option("--polarity", polarity, "Branching polarity: neg or phase")
        ->check(CLI::IsMember({"neg", "phase"}));
  }

  sat::SolverConfig config(double timeout) const {
    sat::SolverConfig c;
    c.seed = seed;
    c.portfolio = portfolio;
    c.timeout = timeout;
    c.polarity = polarity == "phase" ? sat::PolarityMode::PhaseSaving : sat::PolarityMode::NegativeFirst;
    if (!solver.empty()) {
      std::istringstream is(solver);
      std::string t;
      while (is >> t) c.external.push_back(t);
    } else {
      c.external = sat::env_external_command();
    }
    return c;
  }
};

void parse_top(const std::string& top, prover::Strategy& s) {
  if (top == "auto") {
    s.top = prover::TopDetection::Auto;
  } else if (top == "off") {
    s.top = prover::TopDetection::Off;
  } else if (top.rfind("force=", 0) == 0) {
    s.top = prover::TopDetection::Force;
    s.forced_top = parse_index_list(top.substr(6));
  } else {
    throw UsageError("--top must be auto, off or force=IDX,IDX");
  }
}

void print_simulation(const collatz::SystemEntry& e, const collatz::Simulation& sim) {
  auto val = [](const std::optional<collatz::Int>& v) { return v ? v->get_str() : std::string("-"); };
  std::cout << "start  " << val(sim.start_value) << "  " << e.srs.show(sim.start) << '\n';
  for (std::size_t i = 0; i < sim.steps.size(); ++i) {
    const auto& st = sim.steps[i];
    std::cout << (i + 1) << "  " << val(st.value) << "  " << e.srs.show(st.word) << "  [" << e.srs.show_rule(st.rule)
              << " @" << st.position << (st.dynamic ? " dynamic" : "") << "]\n";
  }
  std::cout << "track";
  for (const auto& v : collatz::value_track(sim)) std::cout << ' ' << v.get_str();
  std::cout << '\n' << (sim.normal_form ? "normal form reached" : "step budget exhausted") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Termination proofs for string rewriting systems by matrix interpretations"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a catalog system as NAME.srs and NAME.meta");
  std::vector<std::string> gen_names;
  std::string gen_dir = ".";
  bool gen_list = false;
  gen->add_option("names", gen_names, "Catalog names (all when omitted)");
  gen->add_option("-o,--out", gen_dir, "Output directory");
  gen->add_flag("--list", gen_list, "List catalog names and exit");

  // prove
  auto* prv = app.add_subcommand("prove", "Search for a termination proof and write a certificate");
  std::string prv_file, prv_out, prv_flavor = "both", prv_top = "auto";
  std::size_t prv_dim = 3;
  long prv_values = 5;
  double prv_timeout = 600, prv_attempt = 60;
  bool prv_quiet = false;
  SolverFlags prv_solver;
  prv->add_option("file", prv_file, "SRS file or catalog name")->required();
  prv->add_option("-o,--out", prv_out, "Certificate path (default: FILE with .cert)");
  prv->add_option("--flavor", prv_flavor, "natural, arctic or both");
  prv->add_option("--dim", prv_dim, "Largest matrix dimension")->check(CLI::PositiveNumber);
  prv->add_option("--values", prv_values, "Largest number of coefficient values V")->check(CLI::Range(1L, 64L));
  prv->add_option("--timeout", prv_timeout, "Global time budget in seconds")->check(CLI::PositiveNumber);
  prv->add_option("--attempt-timeout", prv_attempt, "Budget per attempt in seconds")->check(CLI::PositiveNumber);
  prv->add_option("--top", prv_top, "Top-relative steps: auto, off or force=IDX,IDX");
  prv->add_flag("-q,--quiet", prv_quiet, "Do not log attempts");
  prv_solver.add(prv);

  // verify
  auto* ver = app.add_subcommand("verify", "Check a certificate against a system");
  std::string ver_file, ver_cert;
  ver->add_option("file", ver_file, "SRS file or catalog name")->required();
  ver->add_option("cert", ver_cert, "Certificate file")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Print the value-annotated rewrite trace of a seed");
  std::string sim_name, sim_start, sim_replay;
  std::string sim_n;
  std::size_t sim_steps = 100000;
  sim->add_option("name", sim_name, "Catalog name or SRS file with metadata")->required();
  sim->add_option("n", sim_n, "Start value");
  sim->add_option("--start", sim_start, "Start word instead of the seed of N");
  sim->add_option("--replay", sim_replay, "Apply RULE@POS,... instead of the rightmost strategy");
  sim->add_option("--max-steps", sim_steps, "Step budget");

  // check-semantics
  auto* chk = app.add_subcommand("check-semantics", "Check that rewriting simulates the function");
  std::string chk_name;
  long chk_max = 100;
  std::size_t chk_budget = 1000000;
  chk->add_option("name", chk_name, "Catalog name or SRS file with metadata")->required();
  chk->add_option("--max", chk_max, "Largest start value")->check(CLI::PositiveNumber);
  chk->add_option("--budget", chk_budget, "Step budget per start value");

  // encode
  auto* enc = app.add_subcommand("encode", "Write the DIMACS formula of one step search");
  std::string enc_file, enc_out, enc_flavor = "natural", enc_mode = "relative", enc_strict;
  std::size_t enc_dim = 1;
  long enc_values = 2;
  long enc_cap = 0;
  bool enc_reversed = false;
  enc->add_option("file", enc_file, "SRS file or catalog name")->required();
  enc->add_option("-o,--out", enc_out, "Output path (default: standard output)");
  enc->add_option("--flavor", enc_flavor, "natural or arctic")->check(CLI::IsMember({"natural", "arctic"}));
  enc->add_option("--dim", enc_dim, "Matrix dimension")->check(CLI::PositiveNumber);
  enc->add_option("--values", enc_values, "Number of coefficient values V")->check(CLI::Range(1L, 64L));
  enc->add_option("--mode", enc_mode, "relative or top")->check(CLI::IsMember({"relative", "top"}));
  enc->add_option("--strict", enc_strict, "Rules that must be strict, IDX,IDX (default: at least one)");
  enc->add_option("--cap", enc_cap, "Cap on intermediate values");
  enc->add_flag("--reversed", enc_reversed, "Encode the reversed system");

  // bench
  auto* bench = app.add_subcommand("bench", "Experiment harness");
  bench->require_subcommand(1);
  auto* t1 = bench->add_subcommand("table1", "Leave-one-out subsystems of T");
  std::string t1_flavor = "natural", t1_rows, t1_certs;
  double t1_budget = 60;
  bool t1_no_next = false, t1_verbose = false;
  SolverFlags t1_solver;
  t1->add_option("--flavor", t1_flavor, "natural, arctic or both");
  t1->add_option("--rows", t1_rows, "Left-out rule indices, IDX,IDX (default: all)");
  t1->add_option("--budget", t1_budget, "Seconds per row and (D, V)")->check(CLI::PositiveNumber);
  t1->add_option("--certs", t1_certs, "Directory for the row certificates");
  t1->add_flag("--no-next", t1_no_next, "Do not retry at V+1");
  t1->add_flag("-v,--verbose", t1_verbose, "Log attempts");
  t1_solver.add(t1);
  auto* bs = bench->add_subcommand("solver", "Polarity and portfolio timings on step encodings");
  double bs_timeout = 60;
  std::size_t bs_shuffles = 4;
  bs->add_option("--timeout", bs_timeout, "Seconds per solve")->check(CLI::PositiveNumber);
  bs->add_option("--shuffles", bs_shuffles, "Shuffled copies per formula");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (gen->parsed()) {
      if (gen_list) {
        for (const auto& n : collatz::catalog_names()) std::cout << n << '\n';
        return 0;
      }
      if (gen_names.empty()) gen_names = collatz::catalog_names();
      fs::create_directories(gen_dir);
      for (const auto& n : gen_names) {
        if (!is_catalog(n)) throw UsageError("unknown catalog system " + n);
        auto e = collatz::builtin_system(n);
        write_file((fs::path(gen_dir) / (n + ".srs")).string(), srs::write_srs(e.srs));
        write_file((fs::path(gen_dir) / (n + ".meta")).string(), collatz::write_meta(e));
        std::cout << "wrote " << (fs::path(gen_dir) / n).string() << ".{srs,meta}\n";
      }
      return 0;
    }

    if (prv->parsed()) {
      srs::Srs s = load_srs(prv_file);
      prover::Strategy st;
      st.lattice = prover::default_lattice(parse_flavors(prv_flavor), prv_dim, prv_values);
      st.global_timeout = prv_timeout;
      st.attempt_timeout = prv_attempt;
      parse_top(prv_top, st);
      for (auto i : st.forced_top) {
        if (i >= s.size()) throw UsageError("--top force index out of range");
      }
      st.solver = prv_solver.config(prv_attempt);
      if (!prv_quiet) st.log = [](const std::string& m) { std::cerr << "  " << m << '\n'; };
      auto r = prover::prove(s, st);
      std::string out = prv_out;
      if (out.empty()) {
        out = fs::exists(prv_file) ? fs::path(prv_file).replace_extension(".cert").string() : prv_file + ".cert";
      }
      write_file(out, cert::write_certificate(r.certificate));
      std::cout << (r.certificate.complete ? "proved" : "gave up") << ": " << r.certificate.steps.size()
                << " steps, " << r.remaining.size() << " rules left, " << r.seconds << " s\n";
      for (std::size_t i = 0; i < r.remaining.size(); ++i) std::cout << "  left: " << r.remaining.show_rule(i) << '\n';
      std::cout << "certificate: " << out << '\n';
      return r.certificate.complete ? 0 : kExitGaveUp;
    }

    if (ver->parsed()) {
      srs::Srs s = load_srs(ver_file);
      cert::Certificate c = cert::parse_certificate(read_file(ver_cert));
      auto r = cert::verify_certificate(c, s);
      for (const auto& n : r.notes) std::cout << "note: " << n << '\n';
      if (!r.accepted) {
        std::cout << "rejected";
        if (r.failed_step) std::cout << " at step " << r.failed_step;
        std::cout << ": " << r.reason << '\n';
        return kExitRejected;
      }
      if (!r.complete) {
        std::cout << "accepted partial proof; " << r.remaining.size() << " rules left\n";
        for (std::size_t i = 0; i < r.remaining.size(); ++i) std::cout << "  left: " << r.remaining.show_rule(i) << '\n';
        return kExitGaveUp;
      }
      std::cout << "accepted: " << c.steps.size() << " steps, termination proved\n";
      return 0;
    }

    if (sim->parsed()) {
      auto e = load_entry(sim_name);
      srs::Word start;
      if (!sim_start.empty()) {
        start = e.srs.word(sim_start);
      } else {
        if (sim_n.empty()) throw UsageError("simulate needs N or --start");
        collatz::Int n;
        if (n.set_str(sim_n, 10) != 0) throw UsageError("bad start value " + sim_n);
        auto w = collatz::seed_word(e, n);
        if (!w) throw UsageError("system " + e.name + " has no seed for " + sim_n);
        start = *w;
      }
      collatz::Simulation run;
      if (!sim_replay.empty()) {
        std::vector<std::pair<std::size_t, std::size_t>> steps;
        std::stringstream ss(sim_replay);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          auto at = tok.find('@');
          if (at == std::string::npos) throw UsageError("--replay items are RULE@POS");
          auto a = parse_index_list(tok.substr(0, at)), b = parse_index_list(tok.substr(at + 1));
          if (a.size() != 1 || b.size() != 1) throw UsageError("--replay items are RULE@POS");
          steps.emplace_back(a[0], b[0]);
        }
        run = collatz::replay(e, start, steps);
      } else {
        run = collatz::simulate_word(e, start, sim_steps);
      }
      print_simulation(e, run);
      return 0;
    }

    if (chk->parsed()) {
      auto e = load_entry(chk_name);
      auto r = collatz::check_semantics(e, chk_max, chk_budget);
      for (const auto& v : r.violations) {
        std::cout << v.kind << ": " << v.word << (v.detail.empty() ? "" : "  (" + v.detail + ")") << '\n';
      }
      std::cout << r.values_checked << " start values, " << r.strings_checked << " strings checked, "
                << r.violations.size() << " violations\n";
      return r.violations.empty() ? 0 : kExitRejected;
    }

    if (enc->parsed()) {
      sat::StepProblem p{load_srs(enc_file), enc_reversed,
                         enc_mode == "top" ? interp::Mode::TopRelative : interp::Mode::Relative, {}, {}};
      p.config.flavor = enc_flavor == "arctic" ? interp::Flavor::Arctic : interp::Flavor::Natural;
      p.config.dim = enc_dim;
      p.config.values = enc_values;
      if (enc_cap > 0) p.config.cap = enc_cap;
      if (!enc_strict.empty()) {
        p.config.policy = sat::StrictPolicy::FixedSet;
        p.config.fixed_strict = parse_index_list(enc_strict);
      }
      auto e = sat::encode_step(p);
      std::ostringstream os;
      sat::write_dimacs(os, e.cnf, e.comments);
      if (enc_out.empty()) std::cout << os.str();
      else write_file(enc_out, os.str());
      return 0;
    }

    if (t1->parsed()) {
      campaign::Table1Options o;
      o.flavors = parse_flavors(t1_flavor);
      o.rules = parse_index_list(t1_rows);
      for (auto r : o.rules) {
        if (r > 10) throw UsageError("--rows indices are 0..10");
      }
      o.row_budget = t1_budget;
      o.try_next_values = !t1_no_next;
      o.solver = t1_solver.config(t1_budget);
      if (t1_verbose) o.log = [](const std::string& m) { std::cerr << "  " << m << '\n'; };
      auto rows = campaign::table1_campaign(o);
      std::cout << campaign::format_table1(rows);
      if (!t1_certs.empty()) {
        fs::create_directories(t1_certs);
        for (const auto& r : rows) {
          if (!r.success) continue;
          std::string name = std::string("table1_") + interp::to_string(r.flavor) + "_" + std::to_string(r.rule) + ".cert";
          write_file((fs::path(t1_certs) / name).string(), cert::write_certificate(r.certificate));
        }
      }
      return 0;
    }

    if (bs->parsed()) {
      // Step encodings from leave-one-out subsystems of T at their natural (D, V).
      const srs::Srs t = collatz::builtin_system("T").srs;
      std::printf("%-28s %8s %9s %9s %9s %9s\n", "formula", "vars", "clauses", "neg", "phase", "portfolio");
      for (const auto& ref : campaign::table1_reference(interp::Flavor::Natural)) {
        if (ref.dim > 2) continue;
        sat::StepProblem p{srs::remove_rules(t, {ref.rule}), false, interp::Mode::TopRelative, {}, {}};
        p.config.dim = ref.dim;
        p.config.values = ref.values;
        for (std::size_t i = 8; i <= 10; ++i) {
          if (i != ref.rule) p.candidates.push_back(i - (i > ref.rule ? 1 : 0));
        }
        auto e = sat::encode_step(p);
        sat::SolverConfig c;
        c.timeout = bs_timeout;
        auto neg = sat::solve(e.cnf, c);
        c.polarity = sat::PolarityMode::PhaseSaving;
        auto ph = sat::solve(e.cnf, c);
        c.polarity = sat::PolarityMode::NegativeFirst;
        c.portfolio = static_cast<unsigned>(bs_shuffles);
        auto pf = sat::portfolio_solve(e.cnf, c);
        std::string name = "T-minus-" + std::to_string(ref.rule) + " n" + std::to_string(ref.dim) + "/" +
                           std::to_string(ref.values);
        std::printf("%-28s %8d %9zu %8.3fs %8.3fs %8.3fs  %s\n", name.c_str(), e.cnf.num_vars(), e.cnf.num_clauses(),
                    neg.stats.seconds, ph.stats.seconds, pf.stats.seconds, sat::to_string(neg.verdict).c_str());
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "matint: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "matint: error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
