#include "matint/collatz.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace matint::collatz {

namespace {

Int floor_mod(const Int& n, unsigned d) {
  Int r = n % d;  // truncates toward zero
  if (r < 0) r += d;
  return r;
}

const char* domain_name(Domain d) {
  switch (d) {
    case Domain::Naturals: return "naturals";
    case Domain::Positive: return "positive";
    case Domain::Integers: return "integers";
    case Domain::OddNaturals: return "odd";
  }
  return "?";
}

Domain parse_domain(const std::string& s) {
  if (s == "naturals") return Domain::Naturals;
  if (s == "positive") return Domain::Positive;
  if (s == "integers") return Domain::Integers;
  if (s == "odd") return Domain::OddNaturals;
  throw std::runtime_error("unknown domain '" + s + "'");
}

Case cs(long qn, long qd, long rn, long rd) { return Case{Rat(qn, qd), Rat(rn, rd)}; }

}  // namespace

Gcf::Gcf(std::string name, unsigned modulus, std::vector<std::optional<Case>> cases,
         Domain domain)
    : name_(std::move(name)), modulus_(modulus), cases_(std::move(cases)), domain_(domain) {
  if (modulus_ == 0) throw std::invalid_argument("modulus must be positive");
  if (cases_.size() != modulus_) throw std::invalid_argument("need one case per residue");
  for (unsigned i = 0; i < modulus_; ++i) {
    auto& c = cases_[i];
    if (!c) continue;
    c->q.canonicalize();
    c->r.canonicalize();
    Rat at_i = c->q * i + c->r;
    Rat qd = c->q * modulus_;
    if (at_i.get_den() != 1 || qd.get_den() != 1) {
      throw std::invalid_argument("case " + std::to_string(i) + " of " + name_ +
                                  " does not map its residue class to integers");
    }
  }
}

bool Gcf::in_domain(const Int& n) const {
  switch (domain_) {
    case Domain::Naturals: return n >= 0;
    case Domain::Positive: return n >= 1;
    case Domain::Integers: return true;
    case Domain::OddNaturals: return n >= 1 && mpz_odd_p(n.get_mpz_t());
  }
  return false;
}

std::optional<Int> Gcf::apply(const Int& n) const {
  if (!in_domain(n)) {
    throw std::domain_error(n.get_str() + " is outside the domain of " + name_);
  }
  Int res = floor_mod(n, modulus_);
  const auto& c = cases_[res.get_ui()];
  if (!c) return std::nullopt;
  Rat v = c->q * n + c->r;
  v.canonicalize();
  return Int(v.get_num());
}

Gcf catalog_function(std::string_view name) {
  using O = std::optional<Case>;
  if (name == "C") return Gcf("C", 2, {cs(1, 2, 0, 1), cs(3, 1, 1, 1)}, Domain::Positive);
  if (name == "T") return Gcf("T", 2, {cs(1, 2, 0, 1), cs(3, 2, 1, 2)}, Domain::Positive);
  if (name == "W") return Gcf("W", 2, {cs(3, 2, 0, 1), O{}}, Domain::Positive);
  if (name == "F") {
    auto half = cs(1, 2, 0, 1), third = cs(1, 3, -1, 3), up = cs(3, 2, 1, 2);
    return Gcf("F", 6, {half, third, half, up, third, up}, Domain::Naturals);
  }
  if (name == "S") {
    return Gcf("S", 8,
               {O{}, cs(3, 4, 1, 4), O{}, cs(3, 2, 1, 2), O{}, cs(1, 4, -1, 4), O{},
                cs(3, 2, 1, 2)},
               Domain::OddNaturals);
  }
  if (name == "H") {
    auto q = cs(3, 4, 0, 1);
    return Gcf("H", 8, {q, O{}, O{}, O{}, q, O{}, O{}, cs(9, 8, 1, 8)}, Domain::Positive);
  }
  if (name == "Mahler") {
    auto e = cs(3, 2, 0, 1);
    return Gcf("Mahler", 4, {e, cs(3, 2, 1, 2), e, O{}}, Domain::Positive);
  }
  if (name == "M") {
    auto e = cs(3, 2, 0, 1);
    return Gcf("M", 4, {e, cs(9, 4, 3, 4), e, O{}}, Domain::Positive);
  }
  if (name == "B") {
    return Gcf("B", 3, {cs(5, 3, 18, 3), cs(5, 3, 22, 3), O{}}, Domain::Naturals);
  }
  throw std::invalid_argument("unknown function '" + std::string(name) + "'");
}

std::vector<std::string> function_names() {
  return {"C", "T", "W", "F", "S", "H", "Mahler", "M", "B"};
}

std::optional<Int> syracuse(const Int& n) {
  if (n < 1 || !mpz_odd_p(n.get_mpz_t())) return std::nullopt;
  Int m = 3 * n + 1;
  mpz_fdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), mpz_scan1(m.get_mpz_t(), 0));
  return m;
}

Trajectory trajectory(const StepFn& f, const Int& start, std::size_t max_iters,
                      std::optional<Int> stop_at) {
  Trajectory t{{start}, TrajectoryVerdict::Budget};
  Int cur = start;
  if (stop_at && cur == *stop_at) {
    t.verdict = TrajectoryVerdict::ReachedCycleElement;
    return t;
  }
  for (std::size_t i = 0; i < max_iters; ++i) {
    auto nx = f(cur);
    if (!nx) {
      t.verdict = TrajectoryVerdict::ReachedBottom;
      return t;
    }
    cur = *nx;
    t.values.push_back(cur);
    if (stop_at && cur == *stop_at) {
      t.verdict = TrajectoryVerdict::ReachedCycleElement;
      return t;
    }
  }
  return t;
}

Trajectory trajectory(const Gcf& f, const Int& start, std::size_t max_iters,
                      std::optional<Int> stop_at) {
  return trajectory([&f](const Int& n) { return f.apply(n); }, start, max_iters,
                    std::move(stop_at));
}

DigitMeaning constant(long c) { return DigitMeaning{true, 0, c}; }
DigitMeaning affine(long a, long b) { return DigitMeaning{false, a, b}; }

DigitView::DigitView(const srs::Srs& srs,
                     const std::vector<std::pair<std::string, DigitMeaning>>& meanings,
                     std::string left, std::string right)
    : meanings_(srs.alphabet().size()) {
  for (const auto& [n, m] : meanings) meanings_.at(srs.symbol(n)) = m;
  left_ = srs.symbol(left);
  right_ = srs.symbol(right);
  std::size_t consts = 0;
  for (const auto& m : meanings_) consts += (m && m->constant);
  if (consts != 1 || !meanings_[left_] || !meanings_[left_]->constant) {
    throw std::invalid_argument("a view needs exactly one constant symbol, the left delimiter");
  }
  if (!meanings_[right_] || meanings_[right_]->constant) {
    throw std::invalid_argument("the right delimiter must be affine");
  }
}

std::optional<Int> DigitView::val(const srs::Word& w) const {
  if (w.empty() || w[0] != left_) return std::nullopt;
  Int v = meanings_[left_]->b;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] >= meanings_.size()) return std::nullopt;
    const auto& m = meanings_[w[i]];
    if (!m || m->constant) return std::nullopt;
    v = m->a * v + m->b;
  }
  return v;
}

bool DigitView::canonical(const srs::Word& w) const {
  if (w.size() < 2 || w.front() != left_ || w.back() != right_) return false;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    if (w[i] == right_ || w[i] >= meanings_.size() || !meanings_[w[i]] ||
        meanings_[w[i]]->constant) {
      return false;
    }
  }
  return true;
}

bool SystemEntry::is_dynamic(std::size_t rule) const {
  return std::find(dynamic.begin(), dynamic.end(), rule) != dynamic.end();
}

namespace {

using Names = std::vector<std::string>;
using RuleList = std::vector<std::pair<Names, Names>>;

Names split(const std::string& s) {
  Names out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

RuleList rules(std::initializer_list<std::pair<const char*, const char*>> rs) {
  RuleList out;
  for (auto [l, r] : rs) out.emplace_back(split(l), split(r));
  return out;
}

RuleList cat(RuleList a, const RuleList& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const RuleList& A_rules() {
  static const RuleList r = rules({{"b0 t0", "t0 b0"}, {"b0 t1", "t0 b1"}, {"b0 t2", "t1 b0"},
                                   {"b1 t0", "t1 b1"}, {"b1 t1", "t2 b0"}, {"b1 t2", "t2 b1"}});
  return r;
}

const RuleList& B_rules() {
  static const RuleList r =
      rules({{"L t0", "L b1"}, {"L t1", "L b0 b0"}, {"L t2", "L b0 b1"}});
  return r;
}

RuleList X_rules() { return cat(A_rules(), B_rules()); }

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

DigitView mixed_view(const srs::Srs& s, const std::string& right, DigitMeaning right_meaning) {
  return DigitView(s,
                   {{"L", constant(1)},
                    {"b0", affine(2, 0)},
                    {"b1", affine(2, 1)},
                    {"t0", affine(3, 0)},
                    {"t1", affine(3, 1)},
                    {"t2", affine(3, 2)},
                    {right, right_meaning}},
                   "L", right);
}

SystemEntry mixed(std::string name, const RuleList& dyn, std::optional<Gcf> f, Seed seed,
                  std::vector<long> halting, std::string description,
                  const std::string& right = "R", DigitMeaning rm = affine(1, 0)) {
  SystemEntry e;
  e.name = std::move(name);
  e.srs = srs::Srs::from_names({"L", "b0", "b1", "t0", "t1", "t2", right}, cat(dyn, X_rules()));
  e.view = mixed_view(e.srs, right, rm);
  e.dynamic = iota(dyn.size());
  e.function = std::move(f);
  e.seed = seed;
  e.halting = std::move(halting);
  e.description = std::move(description);
  return e;
}

SystemEntry plain(std::string name, Names alphabet, const RuleList& rs, std::string description) {
  SystemEntry e;
  e.name = std::move(name);
  e.srs = srs::Srs::from_names(std::move(alphabet), rs);
  e.description = std::move(description);
  return e;
}

const RuleList& T_dynamic() {
  static const RuleList r = rules({{"b0 R", "R"}, {"b1 R", "t2 R"}});
  return r;
}

const RuleList& S_dynamic() {
  static const RuleList r =
      rules({{"b0 b0 Rodd", "t0 Rodd"}, {"b1 b0 Rodd", "Rodd"}, {"b1 Rodd", "t2 Rodd"}});
  return r;
}

SystemEntry S_variant(std::string name, std::size_t drop, std::string description) {
  RuleList dyn = S_dynamic();
  dyn.erase(dyn.begin() + static_cast<std::ptrdiff_t>(drop));
  auto e = mixed(std::move(name), dyn, std::nullopt, Seed::OddBinary, {3, 5}, std::move(description),
                 "Rodd", affine(2, 1));
  return e;
}

}  // namespace

SystemEntry builtin_system(std::string_view name) {
  if (name == "T") {
    return mixed("T", T_dynamic(), catalog_function("T"), Seed::Binary, {1},
                 "mixed binary-ternary system simulating T");
  }
  if (name == "F") {
    return mixed("F",
                 rules({{"t1 R", "R"},
                        {"t0 b0 R", "t0 R"},
                        {"t1 b0 R", "t1 R"},
                        {"t1 b1 R", "t1 t2 R"},
                        {"t2 b1 R", "t2 t2 R"}}),
                 catalog_function("F"), Seed::Ternary, {1, 2, 3, 5},
                 "mixed system simulating the Farkas variant F");
  }
  if (name == "S") {
    return mixed("S", S_dynamic(), catalog_function("S"), Seed::OddBinary, {3, 5},
                 "mixed system on odd numbers simulating S", "Rodd", affine(2, 1));
  }
  if (name == "S1") return S_variant("S1", 0, "S without its 1 mod 8 rule");
  if (name == "S2") return S_variant("S2", 1, "S without its 5 mod 8 rule");
  if (name == "S3") return S_variant("S3", 2, "S without its 3 mod 4 rule");
  if (name == "Wprime") {
    return mixed("Wprime", rules({{"b0 R", "t0 R"}}), catalog_function("W"), Seed::Binary, {},
                 "mixed system simulating W");
  }
  if (name == "CEven4") {
    return mixed("CEven4",
                 rules({{"b0 b0 R", "b0 R"}, {"b1 b0 R", "b1 R"}, {"b1 R", "t2 b0 R"}}),
                 catalog_function("C"), Seed::Binary, {1, 2},
                 "C with even residues modulo 4 split");
  }
  if (name == "TOdd4") {
    return mixed("TOdd4",
                 rules({{"b0 R", "R"}, {"b0 b1 R", "t1 b0 R"}, {"b1 b1 R", "t2 b1 R"}}),
                 catalog_function("T"), Seed::Binary, {1, 3},
                 "T with odd residues modulo 4 split");
  }
  if (name == "CEven8") {
    return mixed("CEven8",
                 rules({{"b0 b0 b0 R", "b0 b0 R"},
                        {"b0 b1 b0 R", "b0 b1 R"},
                        {"b1 b0 b0 R", "b1 b0 R"},
                        {"b1 b1 b0 R", "b1 b1 R"},
                        {"b1 R", "t2 b0 R"}}),
                 catalog_function("C"), Seed::Binary, {1, 2, 4, 6},
                 "C with even residues modulo 8 split");
  }
  if (name == "TOdd8") {
    return mixed("TOdd8",
                 rules({{"b0 R", "R"},
                        {"b0 b0 b1 R", "t0 b1 b0 R"},
                        {"b0 b1 b1 R", "t1 b0 b1 R"},
                        {"b1 b0 b1 R", "t2 b0 b0 R"},
                        {"b1 b1 b1 R", "t2 b1 b1 R"}}),
                 catalog_function("T"), Seed::Binary, {1, 3, 5, 7},
                 "T with odd residues modulo 8 split");
  }
  if (name == "M") {
    return mixed("M", rules({{"b0 R", "t0 R"}, {"b0 b1 R", "t1 t0 R"}}), catalog_function("M"),
                 Seed::Binary, {1}, "mixed system for the Mahler variant");
  }
  if (name == "E") {
    SystemEntry e;
    e.name = "E";
    RuleList inv;
    for (const auto& [l, r] : X_rules()) inv.emplace_back(r, l);
    e.srs = srs::Srs::from_names({"L", "b0", "b1", "t0", "t1", "t2", "R"},
                                 cat(rules({{"t0 R", "R"}, {"t1 R", "R"}, {"L R", "L R"}}), inv));
    e.view = mixed_view(e.srs, "R", affine(1, 0));
    e.dynamic = {0, 1, 2};
    e.description = "digit-deleting system over inverted auxiliary rules";
    return e;
  }
  if (name == "Z") {
    return plain("Z", {"h", "1", "_", "s", "t"},
                 rules({{"h 1 1", "1 h"},
                        {"1 1 h _", "1 1 s _"},
                        {"1 s", "s 1"},
                        {"_ s", "_ h"},
                        {"h 1 _", "t 1 1 _"},
                        {"1 t", "t 1 1 1"},
                        {"_ t", "_ h"}}),
                 "unary Turing-machine style system");
  }
  if (name == "W") {
    return plain("W", {"h", "1", "_", "t"},
                 rules({{"h 1 1", "1 h"}, {"1 h _", "1 t _"}, {"1 t", "t 1 1 1"}, {"_ t", "_ h"}}),
                 "unary system for W");
  }
  if (name == "L") {
    SystemEntry e = plain("L", {"L", "+", "b0", "t0", "R"},
                          rules({{"b0 R", "R"},
                                 {"b0 + R", "t0 + + R"},
                                 {"b0 + +", "+ b0"},
                                 {"+ t0", "t0 + + +"},
                                 {"b0 t0", "t0 b0"},
                                 {"L +", "L b0"},
                                 {"L t0", "L b0 +"}}),
                          "hybrid unary-positional system for T");
    e.view = DigitView(e.srs,
                       {{"L", constant(1)},
                        {"+", affine(1, 1)},
                        {"b0", affine(2, 0)},
                        {"t0", affine(3, 0)},
                        {"R", affine(1, 0)}},
                       "L", "R");
    e.dynamic = {0, 1};
    e.function = catalog_function("T");
    return e;
  }
  if (name == "Wdprime") {
    SystemEntry e = plain("Wdprime", {"L", "+", "b0", "t0", "R"},
                          rules({{"b0 R", "t0 R"},
                                 {"b0 + +", "+ b0"},
                                 {"+ t0", "t0 + + +"},
                                 {"b0 t0", "t0 b0"},
                                 {"L +", "L b0"},
                                 {"L t0", "L b0 +"}}),
                          "hybrid system for W");
    e.view = DigitView(e.srs,
                       {{"L", constant(1)},
                        {"+", affine(1, 1)},
                        {"b0", affine(2, 0)},
                        {"t0", affine(3, 0)},
                        {"R", affine(1, 0)}},
                       "L", "R");
    e.dynamic = {0};
    e.function = catalog_function("W");
    return e;
  }
  if (name == "P") {
    return plain("P", {"L", "A", "B", "X", "R"},
                 rules({{"L B", "L A X"},
                        {"A A X", "B X A"},
                        {"A B", "B A"},
                        {"X B", "A X"},
                        {"A R", "A X R"}}),
                 "sandpile system");
  }
  if (name == "BBprime") {
    SystemEntry e = plain("BBprime", {"L", "+", "p0", "t0", "R"},
                          rules({{"t0 R", "+ p0 + R"},
                                 {"t0 + R", "+ p0 + + + + R"},
                                 {"t0 + + +", "+ t0"},
                                 {"+ p0", "p0 + + + + +"},
                                 {"t0 p0", "p0 t0"},
                                 {"L + +", "L t0"},
                                 {"L p0", "L t0 + +"}}),
                          "hybrid system for B");
    e.view = DigitView(e.srs,
                       {{"L", constant(1)},
                        {"+", affine(1, 1)},
                        {"p0", affine(5, 0)},
                        {"t0", affine(3, 0)},
                        {"R", affine(1, 0)}},
                       "L", "R");
    e.dynamic = {0, 1};
    e.function = catalog_function("B");
    return e;
  }
  if (name == "BB") {
    RuleList dyn = rules({{"t0 t0 R", "p3 p1 R"},
                          {"t0 t1 R", "p4 p1 R"},
                          {"t0 t2 t0 R", "p2 p2 p4 R"},
                          {"t0 t2 t1 R", "p2 p4 p1 R"},
                          {"t1 t2 t1 R", "p4 p2 p4 R"},
                          {"t1 t2 t2 t0 R", "p3 p3 p1 p4 R"},
                          {"t0 t2 t2 t2 t0 R", "p1 p3 p4 p3 p1 R"},
                          {"t1 t2 t2 t2 t0 R", "p3 p2 p1 p1 p4 R"}});
    RuleList aux;
    for (int t = 0; t < 3; ++t) {
      for (int p = 0; p < 5; ++p) {
        int v = 5 * t + p;  // t(p(x)) = 15x + v = p'(t'(x)) = 15x + 3p' + t'
        aux.emplace_back(Names{"t" + std::to_string(t), "p" + std::to_string(p)},
                         Names{"p" + std::to_string(v / 3), "t" + std::to_string(v % 3)});
      }
    }
    aux.emplace_back(Names{"L", "p0"}, Names{"L", "t0"});
    aux.emplace_back(Names{"L", "p1"}, Names{"L", "t1"});
    aux.emplace_back(Names{"L", "p2"}, Names{"L", "t2"});
    aux.emplace_back(Names{"L", "p3"}, Names{"L", "t1", "t0"});
    aux.emplace_back(Names{"L", "p4"}, Names{"L", "t1", "t1"});
    SystemEntry e =
        plain("BB", {"L", "t0", "t1", "t2", "p0", "p1", "p2", "p3", "p4", "R"}, cat(dyn, aux),
              "ternary-quinary system for the accelerated B");
    std::vector<std::pair<std::string, DigitMeaning>> m{{"L", constant(0)}, {"R", affine(1, 0)}};
    for (int k = 0; k < 3; ++k) m.emplace_back("t" + std::to_string(k), affine(3, k));
    for (int k = 0; k < 5; ++k) m.emplace_back("p" + std::to_string(k), affine(5, k));
    e.view = DigitView(e.srs, m, "L", "R");
    e.dynamic = iota(8);
    return e;
  }
  throw std::invalid_argument("unknown system '" + std::string(name) + "'");
}

std::vector<std::string> catalog_names() {
  return {"Z",      "W",      "T",     "L",     "Wprime", "Wdprime", "F",  "S",  "S1", "S2",
          "S3",     "CEven4", "TOdd4", "CEven8", "TOdd8", "P",       "M",  "BBprime", "BB",
          "E"};
}

namespace {

srs::Word positional(const srs::Srs& s, const std::string& right, Int m, unsigned base,
                     const char* prefix) {
  // m >= 1; its leading digit 1 is the left delimiter.
  std::vector<unsigned> digits;
  while (m > 0) {
    Int d = m % base;
    digits.push_back(static_cast<unsigned>(d.get_ui()));
    m /= base;
  }
  srs::Word w{s.symbol("L")};
  std::size_t top = digits.size() - 1;
  if (digits[top] == 2) {
    w.push_back(s.symbol("b0"));
  } else if (digits[top] != 1) {
    throw std::logic_error("unexpected leading digit");
  }
  for (std::size_t i = top; i-- > 0;) {
    w.push_back(s.symbol(std::string(prefix) + std::to_string(digits[i])));
  }
  w.push_back(s.symbol(right));
  return w;
}

}  // namespace

srs::Word encode_binary(const srs::Srs& srs, const Int& n) {
  if (n < 1) throw std::invalid_argument("binary seeds need n >= 1");
  return positional(srs, "R", n, 2, "b");
}

srs::Word encode_odd_binary(const srs::Srs& srs, const Int& n) {
  if (n < 3 || !mpz_odd_p(n.get_mpz_t())) {
    throw std::invalid_argument("odd seeds need an odd n >= 3");
  }
  return positional(srs, "Rodd", (n - 1) / 2, 2, "b");
}

srs::Word encode_ternary(const srs::Srs& srs, const Int& n) {
  if (n < 1) throw std::invalid_argument("ternary seeds need n >= 1");
  return positional(srs, "R", n, 3, "t");
}

std::optional<srs::Word> seed_word(const SystemEntry& e, const Int& n) {
  switch (e.seed) {
    case Seed::None: return std::nullopt;
    case Seed::Binary:
      if (n < 1) return std::nullopt;
      return encode_binary(e.srs, n);
    case Seed::OddBinary:
      if (n < 3 || !mpz_odd_p(n.get_mpz_t())) return std::nullopt;
      return encode_odd_binary(e.srs, n);
    case Seed::Ternary:
      if (n < 1) return std::nullopt;
      return encode_ternary(e.srs, n);
  }
  return std::nullopt;
}

namespace {

const char* seed_name(Seed s) {
  switch (s) {
    case Seed::None: return "none";
    case Seed::Binary: return "binary";
    case Seed::OddBinary: return "odd-binary";
    case Seed::Ternary: return "ternary";
  }
  return "none";
}

Seed parse_seed(const std::string& s) {
  if (s == "none") return Seed::None;
  if (s == "binary") return Seed::Binary;
  if (s == "odd-binary") return Seed::OddBinary;
  if (s == "ternary") return Seed::Ternary;
  throw std::runtime_error("unknown seed '" + s + "'");
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string write_meta(const SystemEntry& e) {
  std::ostringstream os;
  os << "name: " << e.name << '\n';
  if (!e.description.empty()) os << "description: " << e.description << '\n';
  if (e.view) {
    os << "view.left: " << e.srs.name(e.view->left()) << '\n';
    os << "view.right: " << e.srs.name(e.view->right()) << '\n';
    for (srs::Symbol s = 0; s < e.view->alphabet_size(); ++s) {
      const auto& m = e.view->meaning(s);
      if (!m) continue;
      os << "view." << e.srs.name(s) << ": ";
      if (m->constant) {
        os << "const " << m->b;
      } else {
        os << "affine " << m->a << ' ' << m->b;
      }
      os << '\n';
    }
  }
  os << "dynamic:";
  for (auto d : e.dynamic) os << ' ' << d;
  os << '\n';
  if (e.function) {
    const Gcf& f = *e.function;
    os << "function.name: " << f.name() << '\n';
    os << "function.modulus: " << f.modulus() << '\n';
    os << "function.domain: " << domain_name(f.domain()) << '\n';
    for (unsigned i = 0; i < f.modulus(); ++i) {
      os << "function.case." << i << ": ";
      if (f.cases()[i]) {
        os << f.cases()[i]->q.get_str() << ' ' << f.cases()[i]->r.get_str();
      } else {
        os << "bot";
      }
      os << '\n';
    }
  }
  os << "seed: " << seed_name(e.seed) << '\n';
  os << "halting:";
  for (auto h : e.halting) os << ' ' << h;
  os << '\n';
  return os.str();
}

SystemEntry parse_meta(std::string_view text, const srs::Srs& srs) {
  std::map<std::string, std::string> kv;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    if (trim(line).empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw std::runtime_error("meta line " + std::to_string(lineno) + ": missing ':'");
    }
    kv[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
  }
  SystemEntry e;
  e.srs = srs;
  e.name = kv.count("name") ? kv["name"] : "";
  e.description = kv.count("description") ? kv["description"] : "";
  if (kv.count("view.left")) {
    std::vector<std::pair<std::string, DigitMeaning>> ms;
    for (const auto& [k, v] : kv) {
      if (k.rfind("view.", 0) != 0 || k == "view.left" || k == "view.right") continue;
      auto toks = split(v);
      if (toks.size() == 2 && toks[0] == "const") {
        ms.emplace_back(k.substr(5), DigitMeaning{true, 0, Int(toks[1])});
      } else if (toks.size() == 3 && toks[0] == "affine") {
        ms.emplace_back(k.substr(5), DigitMeaning{false, Int(toks[1]), Int(toks[2])});
      } else {
        throw std::runtime_error("bad view entry for " + k);
      }
    }
    e.view = DigitView(srs, ms, kv["view.left"], kv["view.right"]);
  }
  for (const auto& t : split(kv["dynamic"])) e.dynamic.push_back(std::stoul(t));
  if (kv.count("function.modulus")) {
    unsigned m = static_cast<unsigned>(std::stoul(kv["function.modulus"]));
    std::vector<std::optional<Case>> cases(m);
    for (unsigned i = 0; i < m; ++i) {
      auto key = "function.case." + std::to_string(i);
      if (!kv.count(key)) throw std::runtime_error("missing " + key);
      auto toks = split(kv[key]);
      if (toks.size() == 1 && toks[0] == "bot") continue;
      if (toks.size() != 2) throw std::runtime_error("bad " + key);
      cases[i] = Case{Rat(toks[0]), Rat(toks[1])};
    }
    e.function = Gcf(kv["function.name"], m, std::move(cases), parse_domain(kv["function.domain"]));
  }
  e.seed = kv.count("seed") ? parse_seed(kv["seed"]) : Seed::None;
  for (const auto& t : split(kv["halting"])) e.halting.push_back(std::stol(t));
  return e;
}

namespace {

std::optional<srs::Redex> rightmost(const srs::Srs& s, const srs::Word& w) {
  auto all = srs::successors(s, w);
  if (all.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].position > all[best].position) best = i;
  }
  return std::move(all[best]);
}

std::optional<Int> value_of(const SystemEntry& e, const srs::Word& w) {
  if (!e.view) return std::nullopt;
  return e.view->val(w);
}

}  // namespace

Simulation simulate_word(const SystemEntry& e, srs::Word start, std::size_t max_steps) {
  Simulation sim;
  sim.start_value = value_of(e, start);
  sim.start = std::move(start);
  srs::Word cur = sim.start;
  for (std::size_t i = 0; i < max_steps; ++i) {
    auto rd = rightmost(e.srs, cur);
    if (!rd) {
      sim.normal_form = true;
      return sim;
    }
    cur = rd->result;
    sim.steps.push_back(SimStep{rd->rule, rd->position, e.is_dynamic(rd->rule), cur,
                                value_of(e, cur)});
  }
  sim.normal_form = srs::is_normal_form(e.srs, cur);
  return sim;
}

Simulation simulate(const SystemEntry& e, const Int& n, std::size_t max_steps) {
  auto w = seed_word(e, n);
  if (!w) throw std::invalid_argument("system " + e.name + " has no seed for " + n.get_str());
  return simulate_word(e, *w, max_steps);
}

Simulation replay(const SystemEntry& e, srs::Word start,
                  const std::vector<std::pair<std::size_t, std::size_t>>& steps) {
  Simulation sim;
  sim.start_value = value_of(e, start);
  sim.start = std::move(start);
  srs::Word cur = sim.start;
  for (auto [rule, pos] : steps) {
    if (rule >= e.srs.size()) throw std::invalid_argument("replay: no rule " + std::to_string(rule));
    const auto& r = e.srs.rule(rule);
    if (pos + r.lhs.size() > cur.size() || !std::equal(r.lhs.begin(), r.lhs.end(), cur.begin() + pos)) {
      throw std::invalid_argument("replay: rule " + std::to_string(rule) + " does not apply at " +
                                  std::to_string(pos) + " in " + e.srs.show(cur));
    }
    srs::Word next(cur.begin(), cur.begin() + pos);
    next.insert(next.end(), r.rhs.begin(), r.rhs.end());
    next.insert(next.end(), cur.begin() + pos + r.lhs.size(), cur.end());
    cur = std::move(next);
    sim.steps.push_back(SimStep{rule, pos, e.is_dynamic(rule), cur, value_of(e, cur)});
  }
  sim.normal_form = srs::is_normal_form(e.srs, cur);
  return sim;
}

std::vector<Int> value_track(const Simulation& s) {
  std::vector<Int> out;
  if (s.start_value) out.push_back(*s.start_value);
  for (const auto& st : s.steps) {
    if (st.value) out.push_back(*st.value);
  }
  return out;
}

std::vector<Int> dynamic_track(const Simulation& s) {
  std::vector<Int> out;
  if (s.start_value) out.push_back(*s.start_value);
  for (const auto& st : s.steps) {
    if (st.dynamic && st.value) out.push_back(*st.value);
  }
  return out;
}

std::vector<Violation> check_word(const SystemEntry& e, const srs::Word& w) {
  std::vector<Violation> out;
  if (!e.view) return out;
  auto v = e.view->val(w);
  if (!v) {
    out.push_back({"not-canonical", e.srs.show(w), ""});
    return out;
  }
  std::optional<std::optional<Int>> fv;
  for (const auto& rd : srs::successors(e.srs, w)) {
    auto nv = e.view->val(rd.result);
    std::string where = e.srs.show_rule(rd.rule) + " at " + std::to_string(rd.position);
    if (!nv || !e.view->canonical(rd.result)) {
      out.push_back({"leaves-canonical-form", e.srs.show(w), where});
      continue;
    }
    if (e.is_dynamic(rd.rule)) {
      if (!e.function) continue;
      if (!fv) fv = e.function->apply(*v);
      if (!*fv) {
        out.push_back({"dynamic-step-at-bottom", e.srs.show(w), where});
      } else if (**fv != *nv) {
        out.push_back({"dynamic-step-value", e.srs.show(w),
                       where + ": " + v->get_str() + " -> " + nv->get_str() + ", expected " +
                           (**fv).get_str()});
      }
    } else if (*nv != *v) {
      out.push_back({"auxiliary-step-value", e.srs.show(w),
                     where + ": " + v->get_str() + " -> " + nv->get_str()});
    }
  }
  return out;
}

SemanticsReport check_semantics(const SystemEntry& e, long n_max, std::size_t step_budget) {
  SemanticsReport rep;
  if (!e.view || !e.function || e.seed == Seed::None) {
    throw std::invalid_argument("system " + e.name + " carries no semantics to check");
  }
  const Gcf& f = *e.function;
  std::set<long> halting(e.halting.begin(), e.halting.end());
  std::size_t spent = 0;
  for (long n = 1; n <= n_max; ++n) {
    Int nn(n);
    if (!f.in_domain(nn)) continue;
    auto seed = seed_word(e, nn);
    if (!seed) continue;
    ++rep.values_checked;
    srs::Word cur = *seed;
    Int start_val = *e.view->val(cur);
    if (start_val != nn) {
      rep.violations.push_back({"seed-value", e.srs.show(cur), "expected " + nn.get_str()});
      continue;
    }
    while (true) {
      ++rep.strings_checked;
      for (auto& v : check_word(e, cur)) rep.violations.push_back(std::move(v));
      Int cv = *e.view->val(cur);
      auto rd = rightmost(e.srs, cur);
      if (!rd) {
        bool ok = cv.fits_slong_p() && halting.count(cv.get_si());
        if (!ok && f.apply(cv)) {
          rep.violations.push_back({"stuck", e.srs.show(cur),
                                    "normal form at value " + cv.get_str() +
                                        " although the function is defined there"});
        }
        break;
      }
      if (++spent > step_budget) {
        rep.budget_exceeded = true;
        rep.violations.push_back({"budget", e.srs.show(cur),
                                  "step budget of " + std::to_string(step_budget) + " exhausted"});
        return rep;
      }
      cur = rd->result;
      if (e.is_dynamic(rd->rule)) {
        auto nv = e.view->val(cur);
        if (!nv || *nv < nn) break;
      }
    }
  }
  return rep;
}

}  // namespace matint::collatz
