#include "matint/interp.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace matint::interp {

const char* to_string(Flavor f) { return f == Flavor::Natural ? "natural" : "arctic"; }
const char* to_string(Mode m) { return m == Mode::Relative ? "relative" : "top-relative"; }

const char* to_string(Order o) {
  switch (o) {
    case Order::Strict: return "strict";
    case Order::Weak: return "weak";
    case Order::None: return "none";
  }
  return "?";
}

Arctic arc_add(const Arctic& a, const Arctic& b) {
  if (!a.finite) return b;
  if (!b.finite) return a;
  return a.v >= b.v ? a : b;
}

Arctic arc_mul(const Arctic& a, const Arctic& b) {
  if (!a.finite || !b.finite) return Arctic::neg_inf();
  return Arctic::of(a.v + b.v);
}

bool arc_gt(const Arctic& a, const Arctic& b) {
  if (!b.finite) return true;
  return a.finite && a.v > b.v;
}

bool arc_ge(const Arctic& a, const Arctic& b) {
  if (!b.finite) return true;
  return a.finite && a.v >= b.v;
}

NatAffine nat_identity(std::size_t d) {
  NatAffine a{d, std::vector<Int>(d * d, 0), std::vector<Int>(d, 0)};
  for (std::size_t i = 0; i < d; ++i) a.at(i, i) = 1;
  return a;
}

ArcAffine arc_identity(std::size_t d) {
  ArcAffine a{d, std::vector<Arctic>(d * d), std::vector<Arctic>(d)};
  for (std::size_t i = 0; i < d; ++i) a.at(i, i) = Arctic::of(0);
  return a;
}

NatAffine nat_then(const NatAffine& a, const NatAffine& b) {
  const std::size_t d = a.dim;
  NatAffine r{d, std::vector<Int>(d * d, 0), a.v};
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const Int& x = a.at(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < d; ++j) r.at(i, j) += x * b.at(k, j);
      r.v[i] += x * b.v[k];
    }
  }
  return r;
}

ArcAffine arc_then(const ArcAffine& a, const ArcAffine& b) {
  const std::size_t d = a.dim;
  ArcAffine r{d, std::vector<Arctic>(d * d), a.v};
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const Arctic& x = a.at(i, k);
      if (!x.finite) continue;
      for (std::size_t j = 0; j < d; ++j) r.at(i, j) = arc_add(r.at(i, j), arc_mul(x, b.at(k, j)));
      r.v[i] = arc_add(r.v[i], arc_mul(x, b.v[k]));
    }
  }
  return r;
}

Order nat_compare(const NatAffine& l, const NatAffine& r) {
  for (std::size_t i = 0; i < l.m.size(); ++i) {
    if (l.m[i] < r.m[i]) return Order::None;
  }
  for (std::size_t i = 0; i < l.v.size(); ++i) {
    if (l.v[i] < r.v[i]) return Order::None;
  }
  return l.v[0] > r.v[0] ? Order::Strict : Order::Weak;
}

Order arctic_compare(const ArcAffine& l, const ArcAffine& r) {
  bool strict = true;
  for (std::size_t i = 0; i < l.m.size(); ++i) {
    if (!arc_ge(l.m[i], r.m[i])) return Order::None;
    strict = strict && arc_gt(l.m[i], r.m[i]);
  }
  for (std::size_t i = 0; i < l.v.size(); ++i) {
    if (!arc_ge(l.v[i], r.v[i])) return Order::None;
    strict = strict && arc_gt(l.v[i], r.v[i]);
  }
  return strict ? Order::Strict : Order::Weak;
}

std::vector<Int> affine_to_linear(const NatAffine& a) {
  const std::size_t n = a.dim + 1;
  std::vector<Int> out(n * n, 0);
  for (std::size_t i = 0; i < a.dim; ++i) {
    for (std::size_t j = 0; j < a.dim; ++j) out[i * n + j] = a.at(i, j);
    out[i * n + a.dim] = a.v[i];
  }
  out[n * n - 1] = 1;
  return out;
}

Interpretation Interpretation::natural(std::size_t alphabet, std::size_t dim) {
  Interpretation in;
  in.flavor = Flavor::Natural;
  in.dim = dim;
  in.nat.resize(alphabet);
  return in;
}

Interpretation Interpretation::arctic(std::size_t alphabet, std::size_t dim) {
  Interpretation in;
  in.flavor = Flavor::Arctic;
  in.dim = dim;
  in.arc.resize(alphabet);
  return in;
}

bool Interpretation::has(srs::Symbol s) const {
  if (flavor == Flavor::Natural) return s < nat.size() && nat[s].has_value();
  return s < arc.size() && arc[s].has_value();
}

NatAffine nat_compose(const Interpretation& in, const srs::Word& w) {
  NatAffine acc = nat_identity(in.dim);
  for (srs::Symbol s : w) {
    if (in.has(s)) acc = nat_then(acc, *in.nat[s]);
  }
  return acc;
}

ArcAffine arctic_compose(const Interpretation& in, const srs::Word& w) {
  ArcAffine acc = arc_identity(in.dim);
  for (srs::Symbol s : w) {
    if (in.has(s)) acc = arc_then(acc, *in.arc[s]);
  }
  return acc;
}

bool nat_extended_monotone(const Interpretation& in) {
  for (const auto& a : in.nat) {
    if (a && a->at(0, 0) < 1) return false;
  }
  return true;
}

Wellformed arctic_wellformed(const Interpretation& in) {
  bool extended = true;
  for (const auto& a : in.arc) {
    if (!a) continue;
    const Arctic& top = a->at(0, 0);
    bool weak = (top.finite && top.v >= 0) || (a->v[0].finite && a->v[0].v >= 0);
    if (!weak) return Wellformed::Invalid;
    if (!top.finite) extended = false;
    for (const auto& x : a->m) {
      if (x.finite && x.v < 0) extended = false;
    }
    for (const auto& x : a->v) {
      if (x.finite) extended = false;
    }
  }
  return extended ? Wellformed::Extended : Wellformed::WeakTop;
}

namespace {

template <class T>
bool shaped(const std::optional<Affine<T>>& a, std::size_t d) {
  return !a || (a->dim == d && a->m.size() == d * d && a->v.size() == d);
}

}  // namespace

StepVerdict verify_step(const StepClaim& c) {
  StepVerdict out;
  const srs::Srs sys = c.reversed ? srs::reverse_srs(c.srs) : c.srs;
  const Interpretation& in = c.interp;
  if (in.dim == 0) {
    out.reason = "dimension must be positive";
    return out;
  }
  if (in.alphabet_size() != sys.alphabet().size()) {
    out.reason = "interpretation alphabet size does not match the system";
    return out;
  }
  for (std::size_t s = 0; s < in.alphabet_size(); ++s) {
    bool ok = in.flavor == Flavor::Natural ? shaped(in.nat[s], in.dim) : shaped(in.arc[s], in.dim);
    if (!ok) {
      out.reason = "symbol " + sys.name(static_cast<srs::Symbol>(s)) + " has a malformed matrix";
      return out;
    }
  }
  for (srs::Symbol s : sys.used_symbols()) {
    if (!in.has(s)) {
      out.reason = "symbol " + sys.name(s) + " occurs in a rule but has no interpretation";
      return out;
    }
  }
  if (in.flavor == Flavor::Natural) {
    for (std::size_t s = 0; s < in.nat.size(); ++s) {
      if (!in.nat[s]) continue;
      auto neg = [](const Int& x) { return x < 0; };
      if (std::any_of(in.nat[s]->m.begin(), in.nat[s]->m.end(), neg) ||
          std::any_of(in.nat[s]->v.begin(), in.nat[s]->v.end(), neg)) {
        out.reason = "symbol " + sys.name(static_cast<srs::Symbol>(s)) + " has a negative natural entry";
        return out;
      }
    }
    if (c.mode == Mode::Relative && !nat_extended_monotone(in)) {
      out.reason = "relative mode needs every top-left matrix entry >= 1";
      return out;
    }
  } else {
    Wellformed wf = arctic_wellformed(in);
    if (wf == Wellformed::Invalid) {
      out.reason = "arctic interpretation is not well-formed (top-left entry or first vector entry must be >= 0)";
      return out;
    }
    if (c.mode == Mode::Relative && wf != Wellformed::Extended) {
      out.reason = "relative mode needs arctic naturals with minus-infinity vectors";
      return out;
    }
  }
  std::set<std::size_t> strict(c.strict.begin(), c.strict.end());
  if (strict.size() != c.strict.size()) {
    out.reason = "strict rule list has duplicates";
    return out;
  }
  for (std::size_t i : strict) {
    if (i >= sys.size()) {
      out.reason = "strict rule index " + std::to_string(i) + " out of range";
      return out;
    }
  }
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& r = sys.rule(i);
    Order o = in.flavor == Flavor::Natural
                  ? nat_compare(nat_compose(in, r.lhs), nat_compose(in, r.rhs))
                  : arctic_compare(arctic_compose(in, r.lhs), arctic_compose(in, r.rhs));
    if (o == Order::Strict) out.strict_rules.push_back(i);
    bool need_strict = strict.count(i) > 0;
    if (o == Order::None || (need_strict && o != Order::Strict)) {
      out.strict_rules.clear();
      out.reason = "rule " + std::to_string(i) + " (" + sys.show_rule(i) + ") is not " +
                   (need_strict ? "strictly" : "weakly") + " decreasing";
      return out;
    }
  }
  out.ok = true;
  return out;
}

namespace {

std::string cell(const Int& x) { return x.get_str(); }
std::string cell(const Arctic& x) { return x.finite ? x.v.get_str() : "-inf"; }

template <class T>
std::string show_affine(const Affine<T>& a) {
  std::ostringstream os;
  for (std::size_t i = 0; i < a.dim; ++i) {
    os << "[";
    for (std::size_t j = 0; j < a.dim; ++j) os << (j ? " " : "") << cell(a.at(i, j));
    os << "] " << cell(a.v[i]) << '\n';
  }
  return os.str();
}

}  // namespace

std::string show(const NatAffine& a) { return show_affine(a); }
std::string show(const ArcAffine& a) { return show_affine(a); }

}  // namespace matint::interp
