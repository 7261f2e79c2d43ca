#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "matint/cnf.hpp"
#include "matint/interp.hpp"
#include "matint/srs.hpp"

namespace matint::sat {

// Order-encoded integer on [lo, lo + gt.size()]: gt[i] holds iff X > lo + i.
// The finite literal is kTrue for naturals; for arctic values a false finite
// literal means minus infinity. Arctic magnitudes are normalised so that
// gt[0] implies finite, which makes geq(t) a single literal for every t.
struct OrderInt {
  long lo = 0;
  std::vector<Lit> gt;
  Lit finite = kTrue;

  long hi() const { return lo + static_cast<long>(gt.size()); }
  bool arctic() const { return finite != kTrue; }
  // Literal for "finite and >= t".
  Lit geq(long t) const;
  static OrderInt constant(long c);
  static OrderInt neg_inf();
};

using ArcticVarScalar = OrderInt;

// Fresh variable with domain [lo, hi] (plus minus infinity when arctic).
OrderInt fresh_int(Cnf& f, long lo, long hi, bool arctic);
// Decoded value; nullopt is minus infinity.
std::optional<long> decode(const OrderInt& x, const std::vector<bool>& model);

// Which side of the exact value the result may err on. Up results are at
// least the true value (inputs force outputs upward, overflow is blocked);
// Down results are at most the true value; Both is exact below the cap.
enum class Polarity : unsigned { Up = 1, Down = 2, Both = 3 };
inline bool has_up(Polarity p) { return static_cast<unsigned>(p) & 1u; }
inline bool has_down(Polarity p) { return static_cast<unsigned>(p) & 2u; }
inline Polarity operator|(Polarity a, Polarity b) {
  return static_cast<Polarity>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}

// Arithmetic gadgets. Results are capped at cap; with Up polarity any input
// combination whose value would exceed cap is forbidden.
OrderInt add(Cnf& f, const OrderInt& x, const OrderInt& y, long cap, Polarity p = Polarity::Both);
OrderInt mul(Cnf& f, const OrderInt& x, const OrderInt& y, long cap, Polarity p = Polarity::Both);
OrderInt max_of(Cnf& f, const std::vector<OrderInt>& xs, Polarity p = Polarity::Both);
// Arctic "times" is integer addition with minus infinity absorbing.
inline OrderInt plus(Cnf& f, const OrderInt& x, const OrderInt& y, long cap,
                     Polarity p = Polarity::Both) {
  return add(f, x, y, cap, p);
}
// Natural sum of products or arctic max of sums over the pairs.
OrderInt dot(Cnf& f, bool arctic, const std::vector<std::pair<OrderInt, OrderInt>>& terms,
             const std::optional<OrderInt>& extra, long cap, Polarity p = Polarity::Both);

// Constraints between values.
void require_ge(Cnf& f, const OrderInt& x, const OrderInt& y, Lit guard = kTrue);
// Natural x > y, or arctic x > y unless y is minus infinity.
void require_gt(Cnf& f, const OrderInt& x, const OrderInt& y, Lit guard = kTrue);

enum class StrictPolicy { AtLeastOne, FixedSet };

struct SearchConfig {
  interp::Flavor flavor = interp::Flavor::Natural;
  std::size_t dim = 1;
  long values = 2;  // V
  std::optional<long> cap;          // default (V-1) * 2^6
  std::optional<long> arctic_lo;    // default 0, or -1 for top-relative
  StrictPolicy policy = StrictPolicy::AtLeastOne;
  std::vector<std::size_t> fixed_strict;  // for FixedSet
  std::size_t max_side = 64;              // longest rule side accepted

  long effective_cap() const;
  long effective_lo(interp::Mode m) const;
  std::string describe(interp::Mode m) const;
};

struct StepProblem {
  srs::Srs srs;
  bool reversed = false;
  interp::Mode mode = interp::Mode::Relative;
  // Rules allowed to be strict; empty means all rules.
  std::vector<std::size_t> candidates;
  SearchConfig config;
};

struct EncodedStep {
  Cnf cnf;
  interp::Flavor flavor;
  std::size_t dim;
  std::size_t alphabet;
  // Coefficients per symbol: dim*dim matrix entries then dim vector entries.
  std::vector<std::vector<OrderInt>> coeff;
  std::vector<Lit> strict;  // per rule of the (possibly reversed) system
  std::vector<std::string> comments;

  interp::Interpretation decode_interp(const std::vector<bool>& model) const;
  std::vector<std::size_t> decode_strict(const std::vector<bool>& model) const;
};

EncodedStep encode_step(const StepProblem& p);

}  // namespace matint::sat
