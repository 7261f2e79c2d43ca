#include <catch_amalgamated.hpp>

#include <map>

#include "matint/collatz.hpp"

using namespace matint;
using namespace matint::collatz;

namespace {

std::vector<long> as_longs(const std::vector<Int>& v) {
  std::vector<long> out;
  for (const auto& x : v) out.push_back(x.get_si());
  return out;
}

// Brute-force Collatz step, independent of the Gcf machinery.
std::optional<Int> plain_c(const Int& n) { return n % 2 == 0 ? Int(n / 2) : Int(3 * n + 1); }

}  // namespace

TEST_CASE("printed trajectories from 19", "[collatz][trajectory]") {
  auto c = trajectory(catalog_function("C"), 19, 23, std::nullopt);
  CHECK(as_longs(c.values) == std::vector<long>{19, 58, 29, 88, 44, 22, 11, 34, 17, 52, 26, 13,
                                                40, 20, 10, 5,  16, 8,  4,  2,  1,  4,  2,  1});
  auto syr = trajectory(syracuse, 19, 100);
  CHECK(as_longs(syr.values) == std::vector<long>{19, 29, 11, 17, 13, 5, 1});
  CHECK(syr.verdict == TrajectoryVerdict::ReachedCycleElement);
  auto s = trajectory(catalog_function("S"), 19, 100);
  CHECK(as_longs(s.values) == std::vector<long>{19, 29, 7, 11, 17, 13, 3, 5, 1});
}

TEST_CASE("generalized functions agree with direct formulas", "[collatz][gcf]") {
  Gcf c = catalog_function("C"), t = catalog_function("T"), f = catalog_function("F");
  for (long n = 1; n <= 2000; ++n) {
    CHECK(*c(n) == *plain_c(n));
    Int tv = n % 2 == 0 ? Int(n / 2) : Int((3 * n + 1) / 2);
    CHECK(*t(n) == tv);
    Int fv = n % 3 == 1 ? Int((n - 1) / 3) : (n % 2 == 0 ? Int(n / 2) : Int((3 * n + 1) / 2));
    CHECK(*f(n) == fv);
  }
  Gcf w = catalog_function("W");
  CHECK(*w(4) == 6);
  CHECK_FALSE(w(3).has_value());
  CHECK(trajectory(w, 8, 100).verdict == TrajectoryVerdict::ReachedBottom);
  CHECK_THROWS(catalog_function("S")(4));
}

TEST_CASE("syracuse matches the odd subsequence of C", "[collatz][trajectory]") {
  for (long n = 1; n < 3000; n += 2) {
    Int cur = 3 * Int(n) + 1;
    while (cur % 2 == 0) cur /= 2;
    CHECK(*syracuse(n) == cur);
  }
}

TEST_CASE("gcf rejects non-integral cases", "[collatz][gcf]") {
  CHECK_THROWS(Gcf("bad", 2, {Case{Rat(1, 2), 0}, Case{Rat(1, 2), 0}}, Domain::Naturals));
  CHECK_NOTHROW(Gcf("ok", 2, {Case{Rat(1, 2), 0}, Case{Rat(1, 2), Rat(1, 2)}}, Domain::Naturals));
}

TEST_CASE("seed encodings evaluate back to n", "[collatz][seed]") {
  auto t = builtin_system("T");
  auto s = builtin_system("S");
  auto f = builtin_system("F");
  for (long n = 1; n <= 5000; ++n) {
    auto w = encode_binary(t.srs, n);
    REQUIRE(t.view->canonical(w));
    CHECK(*t.view->val(w) == n);
    auto tw = encode_ternary(f.srs, n);
    REQUIRE(f.view->canonical(tw));
    CHECK(*f.view->val(tw) == n);
    if (n >= 3 && n % 2 == 1) {
      auto ow = encode_odd_binary(s.srs, n);
      REQUIRE(s.view->canonical(ow));
      CHECK(*s.view->val(ow) == n);
    }
  }
  CHECK(t.srs.show(encode_binary(t.srs, 12)) == "L b1 b0 b0 R");
  CHECK(f.srs.show(encode_ternary(f.srs, 5)) == "L t2 R");
  CHECK(f.srs.show(encode_ternary(f.srs, 2)) == "L b0 R");
}

TEST_CASE("views need one constant on the left", "[collatz][view]") {
  auto t = builtin_system("T").srs;
  CHECK_THROWS(DigitView(t, {{"L", affine(2, 0)}, {"R", affine(1, 0)}}, "L", "R"));
  CHECK_THROWS(DigitView(t, {{"L", constant(1)}, {"R", constant(1)}}, "L", "R"));
  DigitView v(t, {{"L", constant(1)}, {"R", affine(1, 0)}, {"b0", affine(2, 0)}}, "L", "R");
  CHECK_FALSE(v.val(t.word("b0 R")).has_value());
  CHECK_FALSE(v.val(t.word("L t0 R")).has_value());
  CHECK(*v.val(t.word("L b0 b0 R")) == 4);
}

TEST_CASE("a fixed derivation from L b0 b0 t0 R replays with its value row", "[collatz][simulate]") {
  auto t = builtin_system("T");
  std::vector<std::pair<std::size_t, std::size_t>> steps{{2, 2}, {0, 3}, {2, 1}, {0, 2}, {8, 0},
                                                         {1, 1}, {10, 0}, {1, 2}, {4, 1}, {9, 0},
                                                         {0, 3}, {0, 2}, {0, 1}};
  auto sim = replay(t, t.srs.word("L b0 b0 t0 R"), steps);
  CHECK(as_longs(value_track(sim)) == std::vector<long>{12, 12, 6, 6, 3, 3, 5, 5, 8, 8, 8, 4, 2, 1});
  CHECK(sim.normal_form);
  CHECK(t.srs.show(sim.steps.back().word) == "L R");
  CHECK_THROWS(replay(t, t.srs.word("L b0 b0 t0 R"), {{0, 0}}));
}

TEST_CASE("rightmost simulation of T", "[collatz][simulate]") {
  auto t = builtin_system("T");
  auto a = simulate_word(t, t.srs.word("L b0 b0 t0 R"), 1000);
  CHECK(as_longs(value_track(a)) == std::vector<long>{12, 12, 6, 6, 3, 3, 5, 5, 8, 8, 4, 4, 2, 1});
  auto b = simulate(t, 12, 1000);
  CHECK(as_longs(value_track(b)) == std::vector<long>{12, 6, 3, 5, 5, 8, 8, 4, 4, 2, 1});
  CHECK(as_longs(dynamic_track(b)) == std::vector<long>{12, 6, 3, 5, 8, 4, 2, 1});
  // Dynamic values follow T exactly.
  for (long n = 1; n <= 300; ++n) {
    auto sim = simulate(t, n, 100000);
    REQUIRE(sim.normal_form);
    auto dyn = dynamic_track(sim);
    auto tr = trajectory(catalog_function("T"), n, 100000);
    CHECK(dyn == tr.values);
  }
}

TEST_CASE("S simulation from 19", "[collatz][simulate]") {
  auto s = builtin_system("S");
  auto sim = simulate(s, 19, 10000);
  CHECK(sim.normal_form);
  CHECK(as_longs(dynamic_track(sim)) == std::vector<long>{19, 29, 7, 11, 17, 13, 3});
}

TEST_CASE("semantics checks pass on the catalog at small n", "[collatz][semantics]") {
  for (const char* n : {"T", "F", "S", "Wprime", "CEven4", "TOdd4", "CEven8", "TOdd8", "M"}) {
    auto rep = check_semantics(builtin_system(n), 200);
    INFO(n);
    CHECK(rep.violations.empty());
    CHECK(rep.values_checked > 0);
  }
}

TEST_CASE("semantics checks catch a broken dynamic rule", "[collatz][semantics]") {
  auto t = builtin_system("T");
  // b1 R -> t1 R is one short of T on odd values.
  auto broken = t;
  auto rules = t.srs.rules();
  rules[1].rhs = t.srs.word("t1 R");
  broken.srs = srs::Srs(t.srs.alphabet(), rules);
  auto rep = check_semantics(broken, 50);
  CHECK_FALSE(rep.violations.empty());
  // An auxiliary rule that changes the value.
  auto broken2 = t;
  rules = t.srs.rules();
  rules[2].rhs = t.srs.word("t1 b0");
  broken2.srs = srs::Srs(t.srs.alphabet(), rules);
  CHECK_FALSE(check_semantics(broken2, 50).violations.empty());
}

TEST_CASE("metadata round trip", "[collatz][meta]") {
  for (const auto& n : catalog_names()) {
    auto e = builtin_system(n);
    auto back = parse_meta(write_meta(e), e.srs);
    CHECK(back.name == e.name);
    CHECK(back.dynamic == e.dynamic);
    CHECK(back.halting == e.halting);
    CHECK(back.seed == e.seed);
    CHECK(back.view.has_value() == e.view.has_value());
    CHECK(back.function.has_value() == e.function.has_value());
    CHECK(write_meta(back) == write_meta(e));
  }
}

TEST_CASE("BB rules realize the accelerated B mappings", "[collatz][bb]") {
  auto bb = builtin_system("BB");
  Gcf b = catalog_function("B");
  const std::vector<std::array<long, 4>> maps{{9, 0, 25, 16},    {9, 1, 25, 21},     {27, 6, 125, 64},
                                              {27, 7, 125, 71},  {27, 16, 125, 114}, {81, 51, 625, 459},
                                              {243, 78, 3125, 1116}, {243, 159, 3125, 2159}};
  // Iterating B from a*n + b reaches c*n + d.
  for (const auto& [a, bo, c, d] : maps) {
    for (long n = 0; n <= 60; ++n) {
      Int cur = a * n + bo, target = c * n + d;
      bool hit = false;
      for (int k = 0; k < 8 && !hit; ++k) {
        auto nx = b(cur);
        REQUIRE(nx.has_value());
        cur = *nx;
        hit = cur == target;
      }
      CHECK(hit);
    }
  }
  // Each dynamic rule u R -> v R maps x*a + b to x*c + d for one table row.
  auto affine_of = [&](const srs::Word& w) {
    Int a = 1, c = 0;
    for (auto s : w) {
      const auto& m = bb.view->meaning(s);
      a *= m->a;
      c = m->a * c + m->b;
    }
    return std::pair<Int, Int>{a, c};
  };
  for (auto i : bb.dynamic) {
    auto [a, bo] = affine_of(bb.srs.rule(i).lhs);
    auto [c, d] = affine_of(bb.srs.rule(i).rhs);
    bool found = false;
    for (const auto& m : maps) found = found || (a == m[0] && bo == m[1] && c == m[2] && d == m[3]);
    CHECK(found);
  }
  // Auxiliary rules keep the value of every prefix.
  for (std::size_t i = 0; i < bb.srs.size(); ++i) {
    if (bb.is_dynamic(i)) continue;
    const auto& r = bb.srs.rule(i);
    for (long x = 0; x < 40; ++x) {
      srs::Word pre = bb.srs.word("L");
      for (long y = x; y > 0; y /= 3) pre.insert(pre.begin() + 1, bb.srs.symbol("t" + std::to_string(y % 3)));
      srs::Word l = r.lhs, rr = r.rhs;
      if (l[0] != bb.srs.symbol("L")) {
        l.insert(l.begin(), pre.begin(), pre.end());
        rr.insert(rr.begin(), pre.begin(), pre.end());
      }
      l.push_back(bb.srs.symbol("R"));
      rr.push_back(bb.srs.symbol("R"));
      CHECK(*bb.view->val(l) == *bb.view->val(rr));
    }
  }
}

TEST_CASE("unknown names are errors", "[collatz]") {
  CHECK_THROWS(builtin_system("nope"));
  CHECK_THROWS(catalog_function("nope"));
}
