#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "matint/srs.hpp"

namespace matint::interp {

using Int = mpz_class;

enum class Flavor { Natural, Arctic };
enum class Mode { Relative, TopRelative };

const char* to_string(Flavor f);
const char* to_string(Mode m);

// Max-plus scalar; !finite is minus infinity.
struct Arctic {
  bool finite = false;
  Int v = 0;

  static Arctic neg_inf() { return {}; }
  static Arctic of(const Int& x) { return {true, x}; }
  bool operator==(const Arctic& o) const {
    return finite == o.finite && (!finite || v == o.v);
  }
};

Arctic arc_add(const Arctic& a, const Arctic& b);  // max
Arctic arc_mul(const Arctic& a, const Arctic& b);  // plus
bool arc_gt(const Arctic& a, const Arctic& b);     // a > b, or both minus infinity
bool arc_ge(const Arctic& a, const Arctic& b);

template <class T>
struct Affine {
  std::size_t dim = 0;
  std::vector<T> m;  // row-major dim x dim
  std::vector<T> v;

  T& at(std::size_t i, std::size_t j) { return m[i * dim + j]; }
  const T& at(std::size_t i, std::size_t j) const { return m[i * dim + j]; }
  bool operator==(const Affine&) const = default;
};

using NatAffine = Affine<Int>;
using ArcAffine = Affine<Arctic>;

NatAffine nat_identity(std::size_t d);
ArcAffine arc_identity(std::size_t d);
// (a o b)(x) = a(b(x))
NatAffine nat_then(const NatAffine& a, const NatAffine& b);
ArcAffine arc_then(const ArcAffine& a, const ArcAffine& b);

enum class Order { Strict, Weak, None };
const char* to_string(Order o);

// Strict: matrices entrywise >=, first vector entry >, others >=.
Order nat_compare(const NatAffine& l, const NatAffine& r);
// Strict: every entry of matrix and vector compared with arc_gt.
Order arctic_compare(const ArcAffine& l, const ArcAffine& r);

// (d+1)x(d+1) block matrix [[M, v], [0, 1]], row-major.
std::vector<Int> affine_to_linear(const NatAffine& a);

// Interpretation of the symbols of one alphabet. A symbol left unset acts as
// the identity and is only accepted when it occurs in no checked rule.
struct Interpretation {
  Flavor flavor = Flavor::Natural;
  std::size_t dim = 1;
  std::vector<std::optional<NatAffine>> nat;
  std::vector<std::optional<ArcAffine>> arc;

  static Interpretation natural(std::size_t alphabet, std::size_t dim);
  static Interpretation arctic(std::size_t alphabet, std::size_t dim);
  std::size_t alphabet_size() const { return flavor == Flavor::Natural ? nat.size() : arc.size(); }
  bool has(srs::Symbol s) const;
  bool operator==(const Interpretation&) const = default;
};

NatAffine nat_compose(const Interpretation& in, const srs::Word& w);
ArcAffine arctic_compose(const Interpretation& in, const srs::Word& w);

// Every set symbol has top-left matrix entry >= 1.
bool nat_extended_monotone(const Interpretation& in);

enum class Wellformed { Extended, WeakTop, Invalid };
// Extended: no negative finite entry, every vector minus infinity, top-left
// entry finite. WeakTop: top-left matrix entry or first vector entry >= 0.
Wellformed arctic_wellformed(const Interpretation& in);

struct StepClaim {
  srs::Srs srs;
  bool reversed = false;
  std::vector<std::size_t> strict;
  Mode mode = Mode::Relative;
  Interpretation interp;
};

struct StepVerdict {
  bool ok = false;
  std::string reason;
  std::vector<std::size_t> strict_rules;  // rules the interpretation orients strictly
};

// Checks the claim with exact arithmetic: reversal first, then monotonicity
// for the mode, then every rule (strict for the claimed ones, weak otherwise).
StepVerdict verify_step(const StepClaim& c);

std::string show(const NatAffine& a);
std::string show(const ArcAffine& a);

}  // namespace matint::interp
