#include <catch_amalgamated.hpp>

#include <functional>
#include <random>
#include <set>

#include "matint/encoding.hpp"
#include "matint/solver.hpp"

using namespace matint;
using namespace matint::sat;
using interp::Flavor;
using interp::Mode;

namespace {

using Val = std::optional<long>;  // nullopt is minus infinity

// Unit clauses fixing x to v; a value outside the ladder gives an empty clause.
void fix(Cnf& f, const OrderInt& x, Val v) {
  if (!v) {
    f.add({neg(x.finite)});
    return;
  }
  f.add({x.geq(*v)});
  f.add({neg(x.geq(*v + 1))});
}

bool is_sat(const Cnf& f) {
  SolverConfig cfg;
  auto r = solve(f, cfg);
  REQUIRE(r.verdict != Verdict::Timeout);
  return r.verdict == Verdict::Sat;
}

std::vector<Val> domain(const OrderInt& x) {
  std::vector<Val> out;
  if (x.finite != kTrue) out.push_back(std::nullopt);
  if (x.finite != kFalse) {
    for (long t = x.lo; t <= x.hi(); ++t) out.push_back(t);
  }
  return out;
}

bool leq(Val a, Val b) { return !a || (b && *a <= *b); }

// Values z reachable for fixed inputs, probing candidates in [lo, hi].
std::set<Val> reachable(const Cnf& base, const std::vector<std::pair<OrderInt, Val>>& inputs, const OrderInt& z,
                        long lo, long hi) {
  std::set<Val> out;
  std::vector<Val> cands{std::nullopt};
  for (long t = lo; t <= hi; ++t) cands.push_back(t);
  for (Val c : cands) {
    Cnf f = base;
    for (const auto& [x, v] : inputs) fix(f, x, v);
    fix(f, z, c);
    if (is_sat(f)) out.insert(c);
  }
  return out;
}

// Checks the polarity contract of a gadget against the exact value.
void check_contract(const std::set<Val>& zs, Val truth, long cap, Polarity p) {
  const bool over = truth && *truth > cap;
  Val sat_truth = over ? Val(cap) : truth;
  INFO("truth " << (truth ? std::to_string(*truth) : "-inf") << " cap " << cap << " polarity "
                << static_cast<unsigned>(p));
  if (has_up(p)) {
    if (over) {
      CHECK(zs.empty());
      return;
    }
    for (Val z : zs) CHECK(leq(truth, z));
  }
  if (has_down(p)) {
    for (Val z : zs) CHECK(leq(z, truth));
  }
  CHECK(zs.count(sat_truth) == 1);
  if (p == Polarity::Both) CHECK(zs.size() == 1);
}

const Polarity kAll[] = {Polarity::Up, Polarity::Down, Polarity::Both};

Val arc_plus(Val a, Val b) { return a && b ? Val(*a + *b) : std::nullopt; }
Val arc_max(Val a, Val b) { return !a ? b : !b ? a : Val(std::max(*a, *b)); }

}  // namespace

TEST_CASE("order-encoded integers", "[encoding][orderint]") {
  Cnf f;
  OrderInt x = fresh_int(f, 0, 3, false);
  CHECK(x.gt.size() == 3);
  CHECK(x.finite == kTrue);
  CHECK(x.geq(0) == kTrue);
  CHECK(x.geq(4) == kFalse);
  CHECK(f.num_vars() == 3);
  CHECK(f.num_clauses() == 2);
  OrderInt a = fresh_int(f, -1, 2, true);
  CHECK(a.gt.size() == 3);
  CHECK_FALSE(is_const(a.finite));
  CHECK(a.geq(-5) == a.finite);
  CHECK(f.num_vars() == 7);
  CHECK_THROWS(fresh_int(f, 2, 1, false));
  CHECK(OrderInt::constant(4).geq(4) == kTrue);
  CHECK(OrderInt::constant(4).geq(5) == kFalse);
  CHECK(OrderInt::neg_inf().geq(-100) == kFalse);
  // Every domain value is representable and decodes back.
  for (Val v : domain(a)) {
    Cnf g = f;
    fix(g, a, v);
    auto r = solve(g, SolverConfig{});
    REQUIRE(r.verdict == Verdict::Sat);
    CHECK(decode(a, r.model) == v);
  }
}

TEST_CASE("natural add and mul match exact arithmetic", "[encoding][gadget]") {
  for (Polarity p : kAll) {
    for (long cap : {2L, 4L, 6L, 10L}) {
      Cnf f;
      OrderInt x = fresh_int(f, 0, 3, false), y = fresh_int(f, 1, 3, false);
      Cnf fa = f, fm = f;
      OrderInt za = add(fa, x, y, cap, p);
      OrderInt zm = mul(fm, x, y, cap, p);
      for (Val a : domain(x)) {
        for (Val b : domain(y)) {
          check_contract(reachable(fa, {{x, a}, {y, b}}, za, -2, 12), *a + *b, cap, p);
          check_contract(reachable(fm, {{x, a}, {y, b}}, zm, -2, 12), *a * *b, cap, p);
        }
      }
    }
  }
}

TEST_CASE("gadgets with constant operands", "[encoding][gadget]") {
  for (Polarity p : kAll) {
    Cnf f;
    OrderInt x = fresh_int(f, 0, 4, false);
    for (long c : {0L, 1L, 2L}) {
      Cnf fa = f, fm = f;
      OrderInt za = add(fa, x, OrderInt::constant(c), 5, p);
      OrderInt zm = mul(fm, OrderInt::constant(c), x, 5, p);
      for (Val a : domain(x)) {
        check_contract(reachable(fa, {{x, a}}, za, -1, 9), *a + c, 5, p);
        check_contract(reachable(fm, {{x, a}}, zm, -1, 9), *a * c, 5, p);
      }
    }
  }
}

TEST_CASE("small worked examples", "[encoding][gadget]") {
  Cnf f;
  OrderInt s = add(f, OrderInt::constant(2), OrderInt::constant(3), 10);
  CHECK(s.gt.empty());
  CHECK(s.lo == 5);
  CHECK_FALSE(f.trivially_unsat());
  Cnf g;
  mul(g, OrderInt::constant(3), OrderInt::constant(4), 10, Polarity::Up);
  CHECK(g.trivially_unsat());
  // With variables: 3 * 4 under cap 10 is blocked upward and saturates downward.
  Cnf h;
  OrderInt x = fresh_int(h, 0, 4, false), y = fresh_int(h, 0, 4, false);
  Cnf hu = h, hd = h;
  OrderInt zu = mul(hu, x, y, 10, Polarity::Up);
  OrderInt zd = mul(hd, x, y, 10, Polarity::Down);
  CHECK(reachable(hu, {{x, 3}, {y, 4}}, zu, 0, 12).empty());
  CHECK(*reachable(hd, {{x, 3}, {y, 4}}, zd, 0, 12).rbegin() == Val(10));
  Cnf k;
  OrderInt a = fresh_int(k, 0, 4, false), b = fresh_int(k, 0, 4, false);
  OrderInt z = add(k, a, b, 10);
  CHECK(reachable(k, {{a, 2}, {b, 3}}, z, 0, 12) == std::set<Val>{5});
  // Arctic (2 (x) 3) (+) 4 = max(2 + 3, 4).
  Cnf m;
  OrderInt u = fresh_int(m, 0, 3, true), v = fresh_int(m, 0, 3, true), w = fresh_int(m, 0, 4, true);
  OrderInt r = dot(m, true, {{u, v}}, w, 10);
  CHECK(reachable(m, {{u, 2}, {v, 3}, {w, 4}}, r, -1, 12) == std::set<Val>{5});
}

TEST_CASE("arctic plus and max match max-plus arithmetic", "[encoding][gadget][arctic]") {
  for (Polarity p : kAll) {
    for (long cap : {1L, 3L, 8L}) {
      Cnf f;
      OrderInt x = fresh_int(f, -1, 2, true), y = fresh_int(f, 0, 2, true), w = fresh_int(f, -1, 1, true);
      Cnf fa = f, fx = f, fd = f;
      OrderInt za = plus(fa, x, y, cap, p);
      OrderInt zx = max_of(fx, {x, y, w}, p);
      OrderInt zd = dot(fd, true, {{x, y}, {w, y}}, w, cap, p);
      for (Val a : domain(x)) {
        for (Val b : domain(y)) {
          check_contract(reachable(fa, {{x, a}, {y, b}}, za, -3, 8), arc_plus(a, b), cap, p);
          for (Val c : domain(w)) {
            // max_of has no cap: every input already lies below it.
            check_contract(reachable(fx, {{x, a}, {y, b}, {w, c}}, zx, -3, 8), arc_max(arc_max(a, b), c), 100, p);
            Val t = arc_max(arc_max(arc_plus(a, b), arc_plus(c, b)), c);
            check_contract(reachable(fd, {{x, a}, {y, b}, {w, c}}, zd, -3, 8), t, cap, p);
          }
        }
      }
    }
  }
}

TEST_CASE("natural dot products", "[encoding][gadget]") {
  for (Polarity p : kAll) {
    Cnf f;
    OrderInt a = fresh_int(f, 0, 2, false), b = fresh_int(f, 0, 2, false), c = fresh_int(f, 1, 2, false),
             e = fresh_int(f, 0, 1, false);
    OrderInt z = dot(f, false, {{a, b}, {c, a}}, e, 6, p);
    for (Val va : domain(a)) {
      for (Val vb : domain(b)) {
        for (Val vc : domain(c)) {
          for (Val ve : domain(e)) {
            long t = *va * *vb + *vc * *va + *ve;
            check_contract(reachable(f, {{a, va}, {b, vb}, {c, vc}, {e, ve}}, z, -1, 10), t, 6, p);
          }
        }
      }
    }
  }
}

TEST_CASE("comparisons", "[encoding][compare]") {
  for (bool arctic : {false, true}) {
    Cnf f;
    OrderInt x = fresh_int(f, arctic ? -1 : 0, 2, arctic), y = fresh_int(f, 0, 3, arctic);
    Lit g = f.fresh();
    Cnf fge = f, fgt = f;
    require_ge(fge, x, y, g);
    require_gt(fgt, x, y, g);
    for (Val a : domain(x)) {
      for (Val b : domain(y)) {
        for (bool guard : {false, true}) {
          Cnf p = fge, q = fgt;
          fix(p, x, a);
          fix(p, y, b);
          fix(q, x, a);
          fix(q, y, b);
          p.add({guard ? g : neg(g)});
          q.add({guard ? g : neg(g)});
          bool ge = leq(b, a);
          bool gt = !b || (a && *a > *b);
          CHECK(is_sat(p) == (!guard || ge));
          CHECK(is_sat(q) == (!guard || gt));
        }
      }
    }
  }
}

namespace {

srs::Srs random_srs(std::mt19937_64& rng, std::size_t max_sym, std::size_t max_rules, std::size_t max_side) {
  std::uniform_int_distribution<std::size_t> ns(1, max_sym), nr(1, max_rules), side(0, max_side),
      lside(1, max_side);
  std::size_t k = ns(rng);
  std::vector<std::string> alpha;
  for (std::size_t i = 0; i < k; ++i) alpha.push_back(std::string(1, static_cast<char>('a' + i)));
  std::uniform_int_distribution<std::size_t> sym(0, k - 1);
  std::vector<srs::Rule> rules;
  for (std::size_t r = nr(rng); r > 0; --r) {
    srs::Rule rule;
    for (std::size_t n = lside(rng); n > 0; --n) rule.lhs.push_back(static_cast<srs::Symbol>(sym(rng)));
    for (std::size_t n = side(rng); n > 0; --n) rule.rhs.push_back(static_cast<srs::Symbol>(sym(rng)));
    rules.push_back(rule);
  }
  return srs::Srs(alpha, rules);
}

// 1-D natural oracle: symbols are x -> a x + b.
struct Lin {
  long a = 1, b = 0;
};
Lin lin_word(const std::vector<Lin>& in, const srs::Word& w) {
  Lin acc;
  for (auto s : w) acc = {acc.a * in[s].a, acc.a * in[s].b + acc.b};
  return acc;
}

// 1-D arctic oracle: symbols are x -> max(m + x, v).
struct Arc1 {
  Val m = 0, v = std::nullopt;
};
Arc1 arc_word(const std::vector<Arc1>& in, const srs::Word& w) {
  Arc1 acc;
  for (auto s : w) acc = {arc_plus(acc.m, in[s].m), arc_max(arc_plus(acc.m, in[s].v), acc.v)};
  return acc;
}
bool agt(Val a, Val b) { return !b || (a && *a > *b); }

// Exhaustive search over all 1-D interpretations in the coefficient domain.
bool brute_1d(const srs::Srs& s, Flavor fl, Mode mode, long V) {
  const std::size_t k = s.alphabet().size();
  std::vector<std::pair<Val, Val>> choices;  // (matrix, vector)
  if (fl == Flavor::Natural) {
    for (long a = mode == Mode::Relative ? 1 : 0; a <= V - 1; ++a) {
      for (long b = 0; b <= V - 1; ++b) choices.push_back({a, b});
    }
  } else {
    const long lo = mode == Mode::Relative ? 0 : -1;
    std::vector<Val> dom{std::nullopt};
    for (long t = lo; t <= lo + V - 2; ++t) dom.push_back(t);
    for (Val m : dom) {
      for (Val v : dom) {
        if (mode == Mode::Relative && (!m || v)) continue;
        if (mode == Mode::TopRelative && !((m && *m >= 0) || (v && *v >= 0))) continue;
        choices.push_back({m, v});
      }
    }
  }
  if (choices.empty()) return false;
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    bool ok = true, strict = false;
    if (fl == Flavor::Natural) {
      std::vector<Lin> in;
      for (auto i : idx) in.push_back({*choices[i].first, *choices[i].second});
      for (const auto& r : s.rules()) {
        Lin l = lin_word(in, r.lhs), q = lin_word(in, r.rhs);
        if (l.a < q.a || l.b < q.b) ok = false;
        if (l.b > q.b) strict = true;
      }
    } else {
      std::vector<Arc1> in;
      for (auto i : idx) in.push_back({choices[i].first, choices[i].second});
      for (const auto& r : s.rules()) {
        Arc1 l = arc_word(in, r.lhs), q = arc_word(in, r.rhs);
        if (!leq(q.m, l.m) || !leq(q.v, l.v)) ok = false;
        if (agt(l.m, q.m) && agt(l.v, q.v)) strict = true;
      }
    }
    if (ok && strict) return true;
    std::size_t p = 0;
    while (p < k && ++idx[p] == choices.size()) idx[p++] = 0;
    if (p == k) return false;
  }
}

}  // namespace

TEST_CASE("decoded models always verify", "[encoding][soundness][property]") {
  std::mt19937_64 rng(2024);
  int sat_count = 0;
  for (int it = 0; it < 200; ++it) {
    srs::Srs s = random_srs(rng, 4, 4, 3);
    StepProblem p;
    p.srs = s;
    p.reversed = rng() % 2;
    p.mode = rng() % 2 ? Mode::Relative : Mode::TopRelative;
    p.config.flavor = rng() % 2 ? Flavor::Natural : Flavor::Arctic;
    p.config.dim = 1 + rng() % 2;
    p.config.values = 2 + static_cast<long>(rng() % 2);
    p.config.cap = 1 + static_cast<long>(rng() % 6);  // small caps exercise saturation
    if (*p.config.cap < p.config.values) p.config.cap = p.config.values;
    if (rng() % 2) p.candidates = {0};
    EncodedStep e = encode_step(p);
    auto r = solve(e.cnf, SolverConfig{});
    REQUIRE(r.verdict != Verdict::Timeout);
    if (r.verdict != Verdict::Sat) continue;
    ++sat_count;
    auto strict = e.decode_strict(r.model);
    REQUIRE_FALSE(strict.empty());
    if (!p.candidates.empty()) CHECK(strict == std::vector<std::size_t>{0});
    interp::StepClaim c{s, p.reversed, strict, p.mode, e.decode_interp(r.model)};
    auto v = interp::verify_step(c);
    INFO(srs::write_srs(s) << p.config.describe(p.mode) << " reversed " << p.reversed);
    CHECK(v.ok);
    CHECK(v.reason == "");
  }
  CHECK(sat_count > 20);
}

TEST_CASE("1-D encodings are complete against exhaustive search", "[encoding][completeness][property]") {
  std::mt19937_64 rng(99);
  int agree_sat = 0;
  for (int it = 0; it < 160; ++it) {
    srs::Srs s = random_srs(rng, 3, 3, 3);
    Flavor fl = it % 2 ? Flavor::Natural : Flavor::Arctic;
    Mode mode = (it / 2) % 2 ? Mode::Relative : Mode::TopRelative;
    long V = 2 + (it / 4) % 2;
    StepProblem p;
    p.srs = s;
    p.mode = mode;
    p.config.flavor = fl;
    p.config.dim = 1;
    p.config.values = V;
    p.config.cap = 1000;
    EncodedStep e = encode_step(p);
    auto r = solve(e.cnf, SolverConfig{});
    REQUIRE(r.verdict != Verdict::Timeout);
    bool expect = brute_1d(s, fl, mode, V);
    INFO(srs::write_srs(s) << p.config.describe(mode));
    CHECK((r.verdict == Verdict::Sat) == expect);
    agree_sat += expect;
  }
  CHECK(agree_sat > 10);
}

TEST_CASE("the 2-D relative example is found", "[encoding]") {
  StepProblem p;
  p.srs = srs::parse_srs("symbols: a b\na a -> a b a\nb -> b b\n");
  p.candidates = {0};
  p.config.dim = 2;
  p.config.values = 2;
  EncodedStep e = encode_step(p);
  auto r = solve(e.cnf, SolverConfig{});
  REQUIRE(r.verdict == Verdict::Sat);
  auto v = interp::verify_step({p.srs, false, e.decode_strict(r.model), Mode::Relative, e.decode_interp(r.model)});
  CHECK(v.ok);
  // In one dimension the same problem has no solution.
  p.config.dim = 1;
  p.config.values = 4;
  CHECK(solve(encode_step(p).cnf, SolverConfig{}).verdict == Verdict::Unsat);
}

TEST_CASE("degenerate configurations", "[encoding]") {
  StepProblem p;
  p.srs = srs::parse_srs("a -> a a\n");
  p.config.values = 1;
  CHECK(solve(encode_step(p).cnf, SolverConfig{}).verdict == Verdict::Unsat);
  p.config.flavor = Flavor::Arctic;
  CHECK(solve(encode_step(p).cnf, SolverConfig{}).verdict == Verdict::Unsat);
  p.config.values = 3;
  p.config.cap = 0;
  CHECK_THROWS(encode_step(p));
  p.config.cap.reset();
  p.config.dim = 0;
  CHECK_THROWS(encode_step(p));
  p.config.dim = 1;
  p.candidates = {3};
  CHECK_THROWS(encode_step(p));
  p.candidates.clear();
  p.config.max_side = 1;
  CHECK_THROWS(encode_step(p));
  SearchConfig c;
  c.values = 5;
  CHECK(c.effective_cap() == 256);
  CHECK(c.effective_lo(Mode::TopRelative) == -1);
  CHECK(c.effective_lo(Mode::Relative) == 0);
}

TEST_CASE("fixed strict sets", "[encoding]") {
  StepProblem p;
  p.srs = srs::parse_srs("a a -> a\nb -> a\n");
  p.config.policy = StrictPolicy::FixedSet;
  p.config.fixed_strict = {0, 1};
  p.config.values = 3;
  auto e = encode_step(p);
  auto r = solve(e.cnf, SolverConfig{});
  REQUIRE(r.verdict == Verdict::Sat);
  CHECK(e.decode_strict(r.model) == std::vector<std::size_t>{0, 1});
  CHECK(interp::verify_step({p.srs, false, {0, 1}, Mode::Relative, e.decode_interp(r.model)}).ok);
  p.candidates = {0};
  CHECK_THROWS(encode_step(p));
}

TEST_CASE("encoding header comment", "[encoding]") {
  StepProblem p;
  p.srs = srs::parse_srs("a -> \n");
  auto e = encode_step(p);
  REQUIRE_FALSE(e.comments.empty());
  CHECK(e.comments[0].find("flavor=natural") != std::string::npos);
}
