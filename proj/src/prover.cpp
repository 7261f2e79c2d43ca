#include "matint/prover.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

namespace matint::prover {

using interp::Flavor;
using interp::Mode;

std::string Attempt::describe() const {
  std::ostringstream os;
  os << interp::to_string(flavor) << " d=" << dim << " V=" << values << " reversed=" << (reversed ? "yes" : "no")
     << " mode=" << interp::to_string(mode);
  return os.str();
}

void Strategy::validate() const {
  if (!(attempt_timeout > 0) || !(global_timeout > 0)) throw std::invalid_argument("timeouts must be positive");
  for (const auto& a : lattice) {
    if (a.dim < 1 || a.values < 1) throw std::invalid_argument("attempt needs d >= 1 and V >= 1");
  }
  solver.validate();
}

std::string Strategy::describe() const {
  std::ostringstream os;
  os << "attempt-timeout=" << attempt_timeout << " global-timeout=" << global_timeout << " top="
     << (top == TopDetection::Auto ? "auto" : top == TopDetection::Off ? "off" : "force");
  if (top == TopDetection::Force) {
    os << ':';
    for (std::size_t i = 0; i < forced_top.size(); ++i) os << (i ? "," : "") << forced_top[i];
  }
  if (cap) os << " cap=" << *cap;
  os << " polarity=" << sat::to_string(solver.polarity) << " portfolio=" << solver.portfolio
     << " seed=" << solver.seed << " backend=" << (solver.external.empty() ? "internal" : solver.external[0]);
  os << " lattice=";
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto& a = lattice[i];
    os << (i ? "," : "") << (a.flavor == Flavor::Natural ? 'n' : 'a') << a.dim << '/' << a.values
       << (a.reversed ? "r" : "") << (a.mode == Mode::TopRelative ? "t" : "");
  }
  return os.str();
}

std::vector<Attempt> default_lattice(const std::vector<Flavor>& flavors, std::size_t max_dim, long max_values,
                                     bool with_top) {
  std::vector<Attempt> out;
  for (std::size_t d = 1; d <= max_dim; ++d) {
    for (long v = 2; v <= max_values; ++v) {
      for (Flavor f : flavors) {
        for (bool rev : {false, true}) {
          out.push_back({f, d, v, rev, Mode::Relative});
          if (with_top) out.push_back({f, d, v, rev, Mode::TopRelative});
        }
      }
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

}  // namespace

StepOutcome remove_step(const srs::Srs& sys, const Attempt& a, const Strategy& s,
                        const std::vector<std::size_t>& allowed,
                        const std::optional<std::vector<std::size_t>>& top_rules, double timeout) {
  auto t0 = Clock::now();
  StepOutcome out;
  out.record.attempt = a;
  out.record.verdict = sat::Verdict::Unsat;
  if (sys.empty()) return out;

  std::set<std::size_t> ok;
  if (allowed.empty()) {
    for (std::size_t i = 0; i < sys.size(); ++i) ok.insert(i);
  } else {
    ok.insert(allowed.begin(), allowed.end());
  }
  const srs::Srs oriented = a.reversed ? srs::reverse_srs(sys) : sys;
  const auto eligible = srs::top_eligible(oriented);
  if (a.mode == Mode::TopRelative) {
    if (s.top == TopDetection::Off) return out;
    std::set<std::size_t> top;
    if (top_rules) top.insert(top_rules->begin(), top_rules->end());
    else top.insert(eligible.begin(), eligible.end());
    std::set<std::size_t> both;
    std::set_intersection(ok.begin(), ok.end(), top.begin(), top.end(), std::inserter(both, both.end()));
    ok = std::move(both);
  }
  if (ok.empty()) return out;

  sat::StepProblem p{sys, a.reversed, a.mode, std::vector<std::size_t>(ok.begin(), ok.end()), {}};
  p.config.flavor = a.flavor;
  p.config.dim = a.dim;
  p.config.values = a.values;
  p.config.cap = s.cap;
  sat::EncodedStep e = sat::encode_step(p);
  out.record.vars = e.cnf.num_vars();
  out.record.clauses = e.cnf.num_clauses();

  sat::SolverConfig sc = s.solver;
  sc.timeout = timeout > 0 ? timeout : s.attempt_timeout;
  sat::SolverResult r = sat::portfolio_solve(e.cnf, sc);
  out.record.verdict = r.verdict;
  out.record.seconds = since(t0);
  if (r.verdict != sat::Verdict::Sat) return out;

  interp::StepClaim claim{sys, a.reversed, e.decode_strict(r.model), a.mode, e.decode_interp(r.model)};
  interp::StepVerdict v = interp::verify_step(claim);
  if (!v.ok) throw std::logic_error("decoded interpretation rejected: " + v.reason);
  cert::Step st;
  st.mode = a.mode;
  st.reversed = a.reversed;
  for (auto i : v.strict_rules) {
    if (ok.count(i)) st.removed.push_back(i);
  }
  st.interp = std::move(claim.interp);
  if (a.mode == Mode::TopRelative) {
    st.top_asserted = std::any_of(st.removed.begin(), st.removed.end(), [&](std::size_t i) {
      return !std::binary_search(eligible.begin(), eligible.end(), i);
    });
  }
  st.search = a.describe() + " cap=" + std::to_string(p.config.effective_cap());
  out.record.removed = st.removed.size();
  out.step = std::move(st);
  return out;
}

ProveResult prove(const srs::Srs& input, const Strategy& s_in) {
  Strategy s = s_in;
  if (s.lattice.empty()) s.lattice = default_lattice({Flavor::Natural, Flavor::Arctic}, 3, 5);
  s.validate();
  auto t0 = Clock::now();
  ProveResult res;
  res.certificate.system = input;
  res.certificate.config = s.describe();
  srs::Srs cur = input;
  std::vector<std::size_t> origin(input.size());
  for (std::size_t i = 0; i < origin.size(); ++i) origin[i] = i;
  std::set<std::size_t> removable(s.removable.begin(), s.removable.end());
  if (removable.empty()) {
    for (std::size_t i = 0; i < input.size(); ++i) removable.insert(i);
  }

  while (!cur.empty()) {
    std::vector<std::size_t> allowed;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (removable.count(origin[i])) allowed.push_back(i);
    }
    if (allowed.empty()) break;
    std::optional<std::vector<std::size_t>> forced;
    if (s.top == TopDetection::Force) {
      forced.emplace();
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (std::find(s.forced_top.begin(), s.forced_top.end(), origin[i]) != s.forced_top.end()) {
          forced->push_back(i);
        }
      }
    }
    bool found = false;
    for (const auto& a : s.lattice) {
      double left = s.global_timeout - since(t0);
      if (left <= 0) {
        res.timed_out = true;
        break;
      }
      StepOutcome o = remove_step(cur, a, s, allowed, forced, std::min(s.attempt_timeout, left));
      res.attempts.push_back(o.record);
      if (s.log) {
        std::ostringstream os;
        os << a.describe() << ": " << sat::to_string(o.record.verdict) << " (" << o.record.vars << " vars, "
           << o.record.clauses << " clauses, " << o.record.seconds << " s)";
        if (o.step) os << " removed " << o.step->removed.size();
        s.log(os.str());
      }
      if (!o.step) continue;
      std::vector<std::size_t> rm = o.step->removed;
      res.certificate.steps.push_back(std::move(*o.step));
      cur = srs::remove_rules(cur, rm);
      std::vector<std::size_t> next;
      for (std::size_t i = 0; i < origin.size(); ++i) {
        if (!std::binary_search(rm.begin(), rm.end(), i)) next.push_back(origin[i]);
      }
      origin = std::move(next);
      found = true;
      break;
    }
    if (!found) break;
  }
  res.remaining = cur;
  res.certificate.complete = cur.empty();
  res.seconds = since(t0);
  return res;
}

}  // namespace matint::prover
