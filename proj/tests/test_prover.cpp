#include <catch_amalgamated.hpp>

#include <chrono>

#include "matint/collatz.hpp"
#include "matint/prover.hpp"

using namespace matint;
using namespace matint::prover;
using interp::Flavor;
using interp::Mode;

namespace {

Strategy small(std::size_t d = 2, long v = 3) {
  Strategy s;
  s.lattice = default_lattice({Flavor::Natural, Flavor::Arctic}, d, v);
  s.attempt_timeout = 10;
  s.global_timeout = 60;
  return s;
}

}  // namespace

TEST_CASE("lattice order", "[prover][lattice]") {
  auto l = default_lattice({Flavor::Natural, Flavor::Arctic}, 2, 3);
  REQUIRE(l.size() == 2 * 2 * 2 * 2 * 2);
  CHECK(l[0].describe() == "natural d=1 V=2 reversed=no mode=relative");
  CHECK(l[1].mode == Mode::TopRelative);
  CHECK(l[2].reversed);
  CHECK(l[4].flavor == Flavor::Arctic);
  CHECK(l[8].values == 3);
  CHECK(l[16].dim == 2);
  for (std::size_t i = 1; i < l.size(); ++i) {
    CHECK(std::make_pair(l[i - 1].dim, l[i - 1].values) <= std::make_pair(l[i].dim, l[i].values));
  }
  CHECK(default_lattice({Flavor::Natural}, 1, 2, false).size() == 2);
}

TEST_CASE("one-step proof", "[prover]") {
  auto s = srs::parse_srs("a a -> a\n");
  Strategy st;
  st.lattice = {{Flavor::Natural, 1, 2, false, Mode::Relative}};
  auto r = prove(s, st);
  REQUIRE(r.certificate.complete);
  REQUIRE(r.certificate.steps.size() == 1);
  CHECK(r.certificate.steps[0].removed == std::vector<std::size_t>{0});
  CHECK(r.remaining.empty());
  CHECK(cert::verify_certificate(r.certificate, s).accepted);
  CHECK(r.attempts.size() == 1);
  CHECK(r.attempts[0].verdict == sat::Verdict::Sat);
}

TEST_CASE("relative termination with a restricted removable set", "[prover]") {
  auto s = srs::parse_srs("symbols: a b\na a -> a b a\nb -> b b\n");
  Strategy st = small();
  st.removable = {0};
  auto r = prove(s, st);
  REQUIRE(r.certificate.steps.size() == 1);
  CHECK(r.certificate.steps[0].removed == std::vector<std::size_t>{0});
  CHECK(r.certificate.steps[0].interp.dim == 2);
  CHECK_FALSE(r.certificate.complete);
  CHECK(r.remaining.size() == 1);
  CHECK(srs::write_srs(r.remaining).find("b -> b b") != std::string::npos);
  auto v = cert::verify_certificate(r.certificate, s);
  CHECK(v.accepted);
  CHECK_FALSE(v.complete);
}

TEST_CASE("non-terminating systems give up", "[prover]") {
  auto s = srs::parse_srs("a -> a a\n");
  auto r = prove(s, small());
  CHECK_FALSE(r.certificate.complete);
  CHECK(r.certificate.steps.empty());
  CHECK(r.remaining == s);
  CHECK_FALSE(r.timed_out);
  CHECK(r.attempts.size() == small().lattice.size());
  auto loop = srs::parse_srs("a b -> b a\nb a -> a b\n");
  CHECK_FALSE(prove(loop, small()).certificate.complete);
}

TEST_CASE("empty system", "[prover]") {
  Strategy st = small();
  auto r = prove(srs::Srs({"a"}, {}), st);
  CHECK(r.certificate.complete);
  CHECK(r.certificate.steps.empty());
  CHECK(r.attempts.empty());
}

TEST_CASE("top detection off yields relative steps only", "[prover][top]") {
  for (const char* name : {"Wprime", "Z", "W"}) {
    auto e = collatz::builtin_system(name);
    Strategy st = small(2, 3);
    st.top = TopDetection::Off;
    auto r = prove(e.srs, st);
    for (const auto& stp : r.certificate.steps) CHECK(stp.mode == Mode::Relative);
    for (const auto& a : r.attempts) {
      if (a.attempt.mode == Mode::TopRelative) CHECK(a.verdict != sat::Verdict::Sat);
    }
    CHECK(cert::verify_certificate(r.certificate, e.srs).accepted);
  }
}

TEST_CASE("indices stay aligned across removals and reversals", "[prover]") {
  for (const char* name : {"Wprime", "Z", "L", "Wdprime"}) {
    auto e = collatz::builtin_system(name);
    auto r = prove(e.srs, small(2, 3));
    INFO(name);
    auto v = cert::verify_certificate(r.certificate, e.srs);
    CHECK(v.accepted);
    CHECK(v.remaining == r.remaining);
    // Replaying the removals on the original rule list gives the remaining system.
    std::vector<std::size_t> alive(e.srs.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
    for (const auto& stp : r.certificate.steps) {
      std::vector<std::size_t> next;
      for (std::size_t i = 0; i < alive.size(); ++i) {
        if (std::find(stp.removed.begin(), stp.removed.end(), i) == stp.removed.end()) next.push_back(alive[i]);
      }
      alive = next;
    }
    CHECK(srs::keep_rules(e.srs, alive) == r.remaining);
  }
}

TEST_CASE("removal steps respect their candidates", "[prover]") {
  auto s = srs::parse_srs("a a -> a\nb b -> b\n");
  Strategy st;
  StepOutcome o = remove_step(s, {Flavor::Natural, 1, 2, false, Mode::Relative}, st, {1});
  REQUIRE(o.step);
  CHECK(o.step->removed == std::vector<std::size_t>{1});
  // Top-relative with no marker-headed rule is skipped without solving.
  StepOutcome t = remove_step(s, {Flavor::Natural, 1, 2, false, Mode::TopRelative}, st);
  CHECK_FALSE(t.step);
  CHECK(t.record.vars == 0);
  // Forced top sets allow any rule.
  StepOutcome f = remove_step(s, {Flavor::Arctic, 1, 4, false, Mode::TopRelative}, st, {}, std::vector<std::size_t>{0});
  REQUIRE(f.step);
  CHECK(f.step->removed == std::vector<std::size_t>{0});
  CHECK(f.step->top_asserted);
}

TEST_CASE("top-relative steps on marker systems", "[prover][top]") {
  auto s = srs::parse_srs("symbols: L a\nL a -> L\na a -> a a\n");
  Strategy st;
  st.lattice = {{Flavor::Arctic, 1, 4, false, Mode::TopRelative}};
  st.removable = {0};
  auto r = prove(s, st);
  REQUIRE(r.certificate.steps.size() == 1);
  CHECK(r.certificate.steps[0].mode == Mode::TopRelative);
  CHECK_FALSE(r.certificate.steps[0].top_asserted);
  CHECK(cert::verify_certificate(r.certificate, s).accepted);
}

TEST_CASE("global timeout", "[prover]") {
  auto t = collatz::builtin_system("T").srs;
  Strategy st;
  st.lattice = default_lattice({Flavor::Natural, Flavor::Arctic}, 5, 8);
  st.attempt_timeout = 0.2;
  st.global_timeout = 1.0;
  auto t0 = std::chrono::steady_clock::now();
  auto r = prove(t, st);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK_FALSE(r.certificate.complete);
  CHECK(secs < 10.0);
  CHECK(cert::verify_certificate(r.certificate, t).accepted);
}

TEST_CASE("strategy validation and logging", "[prover]") {
  Strategy st;
  st.attempt_timeout = 0;
  CHECK_THROWS(prove(srs::parse_srs("a -> \n"), st));
  st = Strategy{};
  st.lattice = {{Flavor::Natural, 0, 2, false, Mode::Relative}};
  CHECK_THROWS(prove(srs::parse_srs("a -> \n"), st));
  st = Strategy{};
  std::vector<std::string> lines;
  st.log = [&](const std::string& l) { lines.push_back(l); };
  st.lattice = {{Flavor::Natural, 1, 2, false, Mode::Relative}};
  prove(srs::parse_srs("a -> \n"), st);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].find("sat") != std::string::npos);
  CHECK(st.describe().find("lattice=n1/2") != std::string::npos);
}
