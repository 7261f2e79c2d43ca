// Stand-in external solver for the bridge tests. Reads DIMACS from the last
// argument and answers with the internal solver; flags make it misbehave.
//   --lie      claim SATISFIABLE with every variable false
//   --garbage  print no status line
//   --unknown  print s UNKNOWN
//   --fail     exit 3 without output

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "matint/solver.hpp"

int main(int argc, char** argv) {
  if (argc < 2) return 2;
  std::string mode = argc > 2 ? argv[1] : "";
  if (mode == "--fail") return 3;
  std::ifstream is(argv[argc - 1]);
  std::stringstream ss;
  ss << is.rdbuf();
  auto f = matint::sat::parse_dimacs(ss.str());
  if (mode == "--garbage") {
    std::cout << "c thinking\nthe answer is 42\n";
    return 0;
  }
  if (mode == "--unknown") {
    std::cout << "s UNKNOWN\n";
    return 0;
  }
  if (mode == "--lie") {
    std::cout << "s SATISFIABLE\nv";
    for (int v = 1; v <= f.num_vars(); ++v) std::cout << ' ' << -v;
    std::cout << " 0\n";
    return 10;
  }
  matint::sat::SolverConfig c;
  auto r = matint::sat::solve_internal(f, c);
  if (r.verdict == matint::sat::Verdict::Unsat) {
    std::cout << "s UNSATISFIABLE\n";
    return 20;
  }
  if (r.verdict != matint::sat::Verdict::Sat) {
    std::cout << "s UNKNOWN\n";
    return 0;
  }
  std::cout << "s SATISFIABLE\n";
  for (int v = 1; v <= f.num_vars(); ++v) {
    std::cout << (v % 10 == 1 ? "v" : "") << ' ' << (r.model[v] ? v : -v) << (v % 10 == 0 ? "\n" : "");
  }
  std::cout << (f.num_vars() % 10 == 0 ? "v" : "") << " 0\n";
  return 10;
}
