#include "matint/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

extern char** environ;

namespace matint::sat {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Timeout: return "timeout";
  }
  return "?";
}

std::string to_string(PolarityMode p) { return p == PolarityMode::NegativeFirst ? "neg" : "phase"; }

void SolverConfig::validate() const {
  if (portfolio < 1) throw std::invalid_argument("portfolio must be at least 1");
  if (!(timeout > 0)) throw std::invalid_argument("timeout must be positive");
}

std::vector<std::string> env_external_command() {
  std::vector<std::string> out;
  const char* s = std::getenv("MATINT_SAT_CMD");
  if (!s) return out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

Cnf shuffle_clauses(const Cnf& f, std::uint64_t seed) {
  Cnf g = f;
  g.shuffle(seed);
  return g;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr std::int8_t kUndef = 2;

// Literal index: 2v for v, 2v+1 for -v.
inline std::uint32_t lidx(Lit l) { return l > 0 ? 2u * l : 2u * static_cast<std::uint32_t>(-l) + 1u; }

class Cdcl {
 public:
  Cdcl(const Cnf& f, const SolverConfig& cfg, const std::atomic<bool>* stop)
      : cfg_(cfg), stop_(stop), n_(f.num_vars()) {
    value_.assign(n_ + 1, kUndef);
    level_.assign(n_ + 1, 0);
    reason_.assign(n_ + 1, -1);
    seen_.assign(n_ + 1, 0);
    phase_.assign(n_ + 1, 0);
    act_.assign(n_ + 1, 0.0);
    heap_pos_.assign(n_ + 1, -1);
    level_stamp_.assign(n_ + 2, 0);
    watches_.resize(2 * (n_ + 1));
    for (int v = 1; v <= n_; ++v) heap_insert(v);
    std::vector<Lit> c;
    for (std::size_t i = 0; i < f.num_clauses() && ok_; ++i) {
      auto s = f.clause(i);
      c.assign(s.begin(), s.end());
      add_input(c);
    }
  }

  SolverResult run() {
    auto t0 = Clock::now();
    deadline_ = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg_.timeout));
    SolverResult r;
    r.verdict = search();
    if (r.verdict == Verdict::Sat) {
      r.model.assign(n_ + 1, false);
      for (int v = 1; v <= n_; ++v) r.model[v] = value_[v] == 1;
    }
    r.stats = stats_;
    r.stats.seconds = since(t0);
    return r;
  }

 private:
  // Truth value of literal: 1 true, 0 false, kUndef.
  std::int8_t val(Lit l) const {
    std::int8_t v = value_[var_of(l)];
    if (v == kUndef) return kUndef;
    return l > 0 ? v : static_cast<std::int8_t>(1 - v);
  }

  int level() const { return static_cast<int>(trail_lim_.size()); }

  void assign(Lit l, int reason) {
    int v = var_of(l);
    value_[v] = l > 0 ? 1 : 0;
    level_[v] = level();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  int size_of(int c) const { return mem_[c]; }
  Lit* lits(int c) { return &mem_[c + 2]; }
  bool learnt(int c) const { return mem_[c + 1] & 1; }
  int lbd(int c) const { return mem_[c + 1] >> 2; }

  int alloc(const std::vector<Lit>& c, bool is_learnt, int lbd) {
    int ref = static_cast<int>(mem_.size());
    mem_.push_back(static_cast<Lit>(c.size()));
    mem_.push_back((is_learnt ? 1 : 0) | (lbd << 2));
    mem_.insert(mem_.end(), c.begin(), c.end());
    return ref;
  }

  void attach(int c) {
    Lit* ls = lits(c);
    watches_[lidx(ls[0])].push_back({c, ls[1]});
    watches_[lidx(ls[1])].push_back({c, ls[0]});
  }

  void add_input(std::vector<Lit>& c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::vector<Lit> keep;
    for (Lit l : c) {
      if (std::binary_search(c.begin(), c.end(), -l)) return;
      std::int8_t v = val(l);
      if (v == 1) return;
      if (v == 0) continue;
      keep.push_back(l);
    }
    if (keep.empty()) {
      ok_ = false;
      return;
    }
    if (keep.size() == 1) {
      assign(keep[0], -1);
      if (propagate() >= 0) ok_ = false;
      return;
    }
    int ref = alloc(keep, false, 0);
    clauses_.push_back(ref);
    attach(ref);
  }

  // Returns a conflicting clause or -1.
  int propagate() {
    int confl = -1;
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++];
      Lit fl = -p;
      auto& ws = watches_[lidx(fl)];
      std::size_t i = 0, j = 0;
      ++stats_.propagations;
      while (i < ws.size()) {
        Watch w = ws[i++];
        if (val(w.blocker) == 1) {
          ws[j++] = w;
          continue;
        }
        Lit* ls = lits(w.cref);
        if (ls[0] == fl) std::swap(ls[0], ls[1]);
        Lit first = ls[0];
        Watch nw{w.cref, first};
        if (first != w.blocker && val(first) == 1) {
          ws[j++] = nw;
          continue;
        }
        int sz = size_of(w.cref);
        bool moved = false;
        for (int k = 2; k < sz; ++k) {
          if (val(ls[k]) != 0) {
            std::swap(ls[1], ls[k]);
            watches_[lidx(ls[1])].push_back(nw);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = nw;
        if (val(first) == 0) {
          confl = w.cref;
          qhead_ = trail_.size();
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          assign(first, w.cref);
        }
      }
      ws.resize(j);
      if (confl >= 0) break;
    }
    return confl;
  }

  void bump(int v) {
    if ((act_[v] += var_inc_) > 1e100) {
      for (int u = 1; u <= n_; ++u) act_[u] *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_up(heap_pos_[v]);
  }

  std::uint32_t abstract_level(int v) const { return 1u << (level_[v] & 31); }

  bool redundant(Lit p, std::uint32_t abs) {
    std::vector<Lit> stack{p};
    std::size_t top = clear_.size();
    while (!stack.empty()) {
      Lit q = stack.back();
      stack.pop_back();
      int c = reason_[var_of(q)];
      Lit* ls = lits(c);
      for (int k = 1; k < size_of(c); ++k) {
        int v = var_of(ls[k]);
        if (seen_[v] || level_[v] == 0) continue;
        if (reason_[v] >= 0 && (abstract_level(v) & abs)) {
          seen_[v] = 1;
          stack.push_back(ls[k]);
          clear_.push_back(ls[k]);
        } else {
          for (std::size_t t = top; t < clear_.size(); ++t) seen_[var_of(clear_[t])] = 0;
          clear_.resize(top);
          return false;
        }
      }
    }
    return true;
  }

  void analyze(int confl, std::vector<Lit>& out, int& bt) {
    out.assign(1, 0);
    int path = 0;
    Lit p = 0;
    std::size_t idx = trail_.size();
    do {
      Lit* ls = lits(confl);
      if (learnt(confl)) bump_clause_lbd(confl);
      for (int k = p == 0 ? 0 : 1; k < size_of(confl); ++k) {
        int v = var_of(ls[k]);
        if (seen_[v] || level_[v] == 0) continue;
        bump(v);
        seen_[v] = 1;
        if (level_[v] >= level()) ++path;
        else out.push_back(ls[k]);
      }
      while (!seen_[var_of(trail_[--idx])]) {
      }
      p = trail_[idx];
      confl = reason_[var_of(p)];
      seen_[var_of(p)] = 0;
      --path;
    } while (path > 0);
    out[0] = -p;

    clear_.assign(out.begin(), out.end());
    std::uint32_t abs = 0;
    for (std::size_t k = 1; k < out.size(); ++k) abs |= abstract_level(var_of(out[k]));
    std::size_t j = 1;
    for (std::size_t k = 1; k < out.size(); ++k) {
      if (reason_[var_of(out[k])] < 0 || !redundant(out[k], abs)) out[j++] = out[k];
    }
    out.resize(j);
    for (Lit l : clear_) seen_[var_of(l)] = 0;

    bt = 0;
    if (out.size() > 1) {
      std::size_t mx = 1;
      for (std::size_t k = 2; k < out.size(); ++k) {
        if (level_[var_of(out[k])] > level_[var_of(out[mx])]) mx = k;
      }
      std::swap(out[1], out[mx]);
      bt = level_[var_of(out[1])];
    }
  }

  void bump_clause_lbd(int c) {
    int cur = lbd(c);
    if (cur <= 2) return;
    int l = compute_lbd(lits(c), size_of(c));
    if (l < cur) mem_[c + 1] = 1 | (l << 2);
  }

  int compute_lbd(const Lit* ls, int sz) {
    ++stamp_;
    int n = 0;
    for (int k = 0; k < sz; ++k) {
      int lv = level_[var_of(ls[k])];
      if (level_stamp_[lv] != stamp_) {
        level_stamp_[lv] = stamp_;
        ++n;
      }
    }
    return n;
  }

  void backtrack(int lv) {
    if (level() <= lv) return;
    for (std::size_t k = trail_.size(); k-- > trail_lim_[lv];) {
      int v = var_of(trail_[k]);
      phase_[v] = value_[v];
      value_[v] = kUndef;
      reason_[v] = -1;
      if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[lv]);
    trail_lim_.resize(lv);
    qhead_ = std::min(qhead_, trail_.size());
  }

  Lit decide() {
    while (!heap_.empty()) {
      int v = heap_pop();
      if (value_[v] != kUndef) continue;
      bool pos = cfg_.polarity == PolarityMode::PhaseSaving && phase_[v] == 1;
      return pos ? v : -v;
    }
    return 0;
  }

  bool locked(int c) {
    Lit l0 = lits(c)[0];
    return val(l0) == 1 && reason_[var_of(l0)] == c;
  }

  void reduce_db() {
    std::vector<int> cand;
    for (int c : learnts_) {
      if (lbd(c) > 2 && !locked(c)) cand.push_back(c);
    }
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
      if (lbd(a) != lbd(b)) return lbd(a) > lbd(b);
      return size_of(a) > size_of(b);
    });
    cand.resize(cand.size() / 2);
    std::sort(cand.begin(), cand.end());
    std::vector<int> keep;
    for (int c : learnts_) {
      if (!std::binary_search(cand.begin(), cand.end(), c)) keep.push_back(c);
    }
    // Compact the arena and rebuild the watch lists.
    std::vector<Lit> mem;
    std::vector<int> remap_from, remap_to;
    auto move = [&](int c) {
      int ref = static_cast<int>(mem.size());
      mem.insert(mem.end(), mem_.begin() + c, mem_.begin() + c + 2 + size_of(c));
      remap_from.push_back(c);
      remap_to.push_back(ref);
      return ref;
    };
    for (int& c : clauses_) c = move(c);
    for (int& c : keep) c = move(c);
    // remap_from is increasing only within each list; use a map via sort.
    std::vector<std::pair<int, int>> rm;
    for (std::size_t k = 0; k < remap_from.size(); ++k) rm.emplace_back(remap_from[k], remap_to[k]);
    std::sort(rm.begin(), rm.end());
    for (Lit l : trail_) {
      int v = var_of(l);
      if (reason_[v] < 0) continue;
      auto it = std::lower_bound(rm.begin(), rm.end(), std::make_pair(reason_[v], -1));
      reason_[v] = (it != rm.end() && it->first == reason_[v]) ? it->second : -1;
    }
    mem_ = std::move(mem);
    learnts_ = std::move(keep);
    for (auto& w : watches_) w.clear();
    for (int c : clauses_) attach(c);
    for (int c : learnts_) attach(c);
  }

  // Element i of 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
  static double luby(std::uint64_t i) {
    std::uint64_t size = 1, seq = 0;
    while (size < i + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != i) {
      size = (size - 1) >> 1;
      --seq;
      i = i % size;
    }
    return static_cast<double>(1ull << seq);
  }

  bool out_of_time() {
    if (stop_ && stop_->load(std::memory_order_relaxed)) return true;
    return Clock::now() > deadline_;
  }

  Verdict search() {
    if (!ok_) return Verdict::Unsat;
    if (propagate() >= 0) return Verdict::Unsat;
    std::uint64_t restart_no = 0;
    double restart_limit = 100 * luby(restart_no);
    std::uint64_t conflicts_here = 0;
    double max_learnts = std::max<double>(2000.0, clauses_.size() / 3.0);
    std::vector<Lit> learnt_clause;
    std::uint64_t tick = 0;
    for (;;) {
      if ((++tick & 255) == 0 && out_of_time()) return Verdict::Timeout;
      int confl = propagate();
      if (confl >= 0) {
        ++stats_.conflicts;
        ++conflicts_here;
        if (level() == 0) return Verdict::Unsat;
        int bt = 0;
        analyze(confl, learnt_clause, bt);
        backtrack(bt);
        if (learnt_clause.size() == 1) {
          assign(learnt_clause[0], -1);
        } else {
          int l = compute_lbd(learnt_clause.data(), static_cast<int>(learnt_clause.size()));
          int ref = alloc(learnt_clause, true, l);
          learnts_.push_back(ref);
          attach(ref);
          assign(learnt_clause[0], ref);
        }
        var_inc_ /= 0.95;
        continue;
      }
      if (conflicts_here >= restart_limit) {
        ++stats_.restarts;
        conflicts_here = 0;
        restart_limit = 100 * luby(++restart_no);
        backtrack(0);
        if (out_of_time()) return Verdict::Timeout;
      }
      if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts) {
        reduce_db();
        max_learnts *= 1.1;
      }
      Lit d = decide();
      if (d == 0) return Verdict::Sat;
      ++stats_.decisions;
      trail_lim_.push_back(trail_.size());
      assign(d, -1);
    }
  }

  // Max-heap on activity.
  bool heap_less(int a, int b) const { return act_[a] > act_[b] || (act_[a] == act_[b] && a < b); }
  void heap_insert(int v) {
    heap_pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_pos_[v]);
  }
  void heap_up(int i) {
    int v = heap_[i];
    while (i > 0) {
      int p = (i - 1) / 2;
      if (!heap_less(v, heap_[p])) break;
      heap_[i] = heap_[p];
      heap_pos_[heap_[i]] = i;
      i = p;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
  }
  int heap_pop() {
    int top = heap_[0];
    int last = heap_.back();
    heap_.pop_back();
    heap_pos_[top] = -1;
    if (!heap_.empty()) {
      int i = 0;
      int n = static_cast<int>(heap_.size());
      for (;;) {
        int c = 2 * i + 1;
        if (c >= n) break;
        if (c + 1 < n && heap_less(heap_[c + 1], heap_[c])) ++c;
        if (!heap_less(heap_[c], last)) break;
        heap_[i] = heap_[c];
        heap_pos_[heap_[i]] = i;
        i = c;
      }
      heap_[i] = last;
      heap_pos_[last] = i;
    }
    return top;
  }

  struct Watch {
    int cref;
    Lit blocker;
  };

  const SolverConfig& cfg_;
  const std::atomic<bool>* stop_;
  Clock::time_point deadline_;
  int n_;
  bool ok_ = true;
  std::vector<std::int8_t> value_;
  std::vector<int> level_, reason_;
  std::vector<char> seen_;
  std::vector<std::int8_t> phase_;
  std::vector<double> act_;
  double var_inc_ = 1.0;
  std::vector<int> heap_, heap_pos_;
  std::vector<Lit> mem_;
  std::vector<int> clauses_, learnts_;
  std::vector<std::vector<Watch>> watches_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<Lit> clear_;
  std::vector<std::uint64_t> level_stamp_;
  std::uint64_t stamp_ = 0;
  SolverStats stats_;
};

void check_model(const Cnf& f, const SolverResult& r, const char* who) {
  if (r.verdict != Verdict::Sat) return;
  if (r.model.size() != static_cast<std::size_t>(f.num_vars()) + 1 || !satisfies(f, r.model)) {
    throw IntegrityError(std::string(who) + " returned a model that violates the formula");
  }
}

}  // namespace

SolverResult solve_internal(const Cnf& f, const SolverConfig& cfg, const std::atomic<bool>* stop) {
  cfg.validate();
  if (f.trivially_unsat()) return SolverResult{Verdict::Unsat, {}, {}, 0, {}};
  Cdcl s(f, cfg, stop);
  SolverResult r = s.run();
  check_model(f, r, "internal solver");
  return r;
}

SolverResult solve_external(const Cnf& f, const SolverConfig& cfg, const std::atomic<bool>* stop) {
  cfg.validate();
  if (cfg.external.empty()) throw SolverError("no external solver command");
  auto t0 = Clock::now();
  char path[] = "/tmp/matint-XXXXXX.cnf";
  int fd = mkstemps(path, 4);
  if (fd < 0) throw SolverError("cannot create temporary DIMACS file");
  close(fd);
  struct Cleanup {
    const char* p;
    ~Cleanup() { unlink(p); }
  } cleanup{path};
  {
    std::ofstream os(path);
    write_dimacs(os, f);
    if (!os) throw SolverError("cannot write temporary DIMACS file");
  }

  int pipefd[2];
  if (pipe(pipefd) != 0) throw SolverError("pipe failed");
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, pipefd[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&fa, pipefd[0]);
  posix_spawn_file_actions_addclose(&fa, pipefd[1]);
  std::vector<std::string> args = cfg.external;
  args.emplace_back(path);
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  int rc = posix_spawnp(&pid, argv[0], &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  close(pipefd[1]);
  if (rc != 0) {
    close(pipefd[0]);
    throw SolverError("cannot start external solver '" + cfg.external[0] + "': " + std::strerror(rc));
  }

  std::string out;
  bool killed = false;
  char buf[4096];
  for (;;) {
    pollfd p{pipefd[0], POLLIN, 0};
    int pr = poll(&p, 1, 100);
    if (pr > 0) {
      ssize_t n = read(pipefd[0], buf, sizeof buf);
      if (n <= 0) break;
      out.append(buf, static_cast<std::size_t>(n));
    }
    if (since(t0) > cfg.timeout || (stop && stop->load())) {
      kill(pid, SIGKILL);
      killed = true;
      break;
    }
  }
  close(pipefd[0]);
  int status = 0;
  waitpid(pid, &status, 0);

  SolverResult r;
  r.stats.seconds = since(t0);
  if (killed) {
    r.verdict = Verdict::Timeout;
    return r;
  }
  std::istringstream is(out);
  std::string line;
  std::optional<Verdict> v;
  std::vector<Lit> vals;
  while (std::getline(is, line)) {
    if (line.rfind("s ", 0) == 0) {
      std::string st = line.substr(2);
      while (!st.empty() && std::isspace(static_cast<unsigned char>(st.back()))) st.pop_back();
      if (st == "SATISFIABLE") v = Verdict::Sat;
      else if (st == "UNSATISFIABLE") v = Verdict::Unsat;
      else if (st == "UNKNOWN") v = Verdict::Timeout;
      else throw SolverError("unrecognized status line: " + line);
    } else if (line.rfind("v ", 0) == 0 || line == "v") {
      std::istringstream ls(line.substr(1));
      long x;
      while (ls >> x) {
        if (std::labs(x) > f.num_vars()) throw SolverError("external model literal out of range");
        if (x != 0) vals.push_back(static_cast<Lit>(x));
      }
      if (!ls.eof()) throw SolverError("unparseable value line: " + line);
    }
  }
  if (!v) {
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    throw SolverError("external solver gave no status line (exit code " + std::to_string(code) + ")");
  }
  r.verdict = *v;
  if (r.verdict == Verdict::Sat) {
    r.model.assign(static_cast<std::size_t>(f.num_vars()) + 1, false);
    for (Lit l : vals) r.model[var_of(l)] = l > 0;
    check_model(f, r, "external solver");
  }
  return r;
}

SolverResult solve(const Cnf& f, const SolverConfig& cfg, const std::atomic<bool>* stop) {
  if (cfg.shuffle_seed) {
    Cnf g = shuffle_clauses(f, *cfg.shuffle_seed);
    SolverResult r = cfg.external.empty() ? solve_internal(g, cfg, stop) : solve_external(g, cfg, stop);
    check_model(f, r, "solver");
    return r;
  }
  return cfg.external.empty() ? solve_internal(f, cfg, stop) : solve_external(f, cfg, stop);
}

}  // namespace matint::sat
