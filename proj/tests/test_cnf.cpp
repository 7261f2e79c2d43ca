#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include "matint/cnf.hpp"
#include "matint/solver.hpp"

using namespace matint::sat;

namespace {

std::string dimacs(const Cnf& f, const std::vector<std::string>& comments = {}) {
  std::ostringstream os;
  write_dimacs(os, f, comments);
  return os.str();
}

std::vector<std::vector<Lit>> clauses(const Cnf& f) {
  std::vector<std::vector<Lit>> out;
  for (std::size_t i = 0; i < f.num_clauses(); ++i) out.emplace_back(f.clause(i).begin(), f.clause(i).end());
  return out;
}

std::vector<std::vector<Lit>> canonical(std::vector<std::vector<Lit>> cs) {
  for (auto& c : cs) std::sort(c.begin(), c.end());
  std::sort(cs.begin(), cs.end());
  return cs;
}

Cnf random_cnf(std::mt19937_64& rng, int vars, int n) {
  Cnf f;
  for (int i = 0; i < vars; ++i) f.new_var();
  std::uniform_int_distribution<int> v(1, vars), len(1, 4), sign(0, 1);
  for (int i = 0; i < n; ++i) {
    std::vector<Lit> c;
    for (int k = len(rng); k > 0; --k) c.push_back(sign(rng) ? v(rng) : -v(rng));
    f.add_raw(c);
  }
  return f;
}

}  // namespace

TEST_CASE("DIMACS output", "[cnf]") {
  Cnf f;
  f.new_var();
  f.new_var();
  f.add({1, -2});
  CHECK(dimacs(f) == "p cnf 2 1\n1 -2 0\n");
  CHECK(dimacs(Cnf{}) == "p cnf 0 0\n");
  CHECK(dimacs(f, {"hello"}) == "c hello\np cnf 2 1\n1 -2 0\n");
}

TEST_CASE("clause simplification on insertion", "[cnf]") {
  Cnf f;
  Lit a = f.fresh(), b = f.fresh();
  f.add({a, kTrue});
  CHECK(f.num_clauses() == 0);
  f.add({a, -a, b});
  CHECK(f.num_clauses() == 0);
  f.add({b, kFalse, b, a});
  REQUIRE(f.num_clauses() == 1);
  CHECK(clauses(f)[0] == std::vector<Lit>{b, a});
  CHECK_FALSE(f.trivially_unsat());
  f.add({kFalse});
  CHECK(f.trivially_unsat());
  CHECK_THROWS(f.add({7}));
  CHECK_THROWS(f.add({0}));
}

TEST_CASE("DIMACS round trip", "[cnf]") {
  std::mt19937_64 rng(2);
  for (int it = 0; it < 50; ++it) {
    Cnf f = random_cnf(rng, 1 + static_cast<int>(rng() % 15), static_cast<int>(rng() % 40));
    Cnf g = parse_dimacs(dimacs(f, {"comment line", ""}));
    CHECK(g.num_vars() == f.num_vars());
    CHECK(clauses(g) == clauses(f));
  }
  Cnf h = parse_dimacs("c x\np cnf 3 2\n1 -3\n 0 2\n0\n");
  CHECK(clauses(h) == std::vector<std::vector<Lit>>{{1, -3}, {2}});
  CHECK_THROWS(parse_dimacs("1 0\n"));
  CHECK_THROWS(parse_dimacs("p cnf 1 1\n2 0\n"));
  CHECK_THROWS(parse_dimacs("p dnf 1 1\n1 0\n"));
}

TEST_CASE("shuffling is deterministic and keeps the clause multiset", "[cnf][shuffle]") {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 30; ++it) {
    Cnf f = random_cnf(rng, 12, 30);
    Cnf a = shuffle_clauses(f, 99), b = shuffle_clauses(f, 99), c = shuffle_clauses(f, 100);
    CHECK(clauses(a) == clauses(b));
    CHECK(canonical(clauses(a)) == canonical(clauses(f)));
    CHECK(canonical(clauses(c)) == canonical(clauses(f)));
    CHECK(a.num_vars() == f.num_vars());
  }
  Cnf big = random_cnf(rng, 12, 30);
  CHECK(clauses(shuffle_clauses(big, 1)) != clauses(big));
}

TEST_CASE("model evaluation", "[cnf]") {
  Cnf f;
  f.new_var();
  f.new_var();
  f.add({1, 2});
  f.add({-1});
  CHECK(satisfies(f, {false, false, true}));
  CHECK_FALSE(satisfies(f, {false, true, true}));
  CHECK(lit_value({false, true}, kTrue));
  CHECK_FALSE(lit_value({false, true}, -1));
}
