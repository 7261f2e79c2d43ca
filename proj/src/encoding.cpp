#include "matint/encoding.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace matint::sat {

using interp::Flavor;
using interp::Mode;

Lit OrderInt::geq(long t) const {
  if (t <= lo) return finite;
  if (t > hi()) return kFalse;
  return gt[static_cast<std::size_t>(t - lo - 1)];
}

OrderInt OrderInt::constant(long c) { return OrderInt{c, {}, kTrue}; }
OrderInt OrderInt::neg_inf() { return OrderInt{0, {}, kFalse}; }

OrderInt fresh_int(Cnf& f, long lo, long hi, bool arctic) {
  if (hi < lo) throw std::invalid_argument("empty domain");
  OrderInt x;
  x.lo = lo;
  x.finite = arctic ? f.fresh() : kTrue;
  for (long i = lo; i < hi; ++i) x.gt.push_back(f.fresh());
  for (std::size_t i = 0; i + 1 < x.gt.size(); ++i) f.implies(x.gt[i + 1], x.gt[i]);
  if (arctic && !x.gt.empty()) f.implies(x.gt[0], x.finite);
  return x;
}

std::optional<long> decode(const OrderInt& x, const std::vector<bool>& model) {
  if (!lit_value(model, x.finite)) return std::nullopt;
  long v = x.lo;
  for (Lit l : x.gt) {
    if (!lit_value(model, l)) break;
    ++v;
  }
  return v;
}

namespace {

bool is_neg_inf(const OrderInt& x) { return x.finite == kFalse; }
bool is_constant(const OrderInt& x) { return x.gt.empty() && x.finite == kTrue; }

// Result ladder on [lo, hi] whose finiteness is the conjunction of the inputs'.
OrderInt result(Cnf& f, long lo, long hi, Lit fx, Lit fy, Polarity p) {
  OrderInt z;
  z.lo = lo;
  if (fx == kTrue && fy == kTrue) {
    z.finite = kTrue;
  } else {
    z.finite = f.fresh();
    if (has_up(p)) f.add({neg(fx), neg(fy), z.finite});
    if (has_down(p)) {
      f.implies(z.finite, fx);
      f.implies(z.finite, fy);
    }
  }
  for (long i = lo; i < hi; ++i) z.gt.push_back(f.fresh());
  for (std::size_t i = 0; i + 1 < z.gt.size(); ++i) f.implies(z.gt[i + 1], z.gt[i]);
  if (z.finite != kTrue && !z.gt.empty()) f.implies(z.gt[0], z.finite);
  return z;
}

}  // namespace

OrderInt add(Cnf& f, const OrderInt& x, const OrderInt& y, long cap, Polarity p) {
  if (is_neg_inf(x) || is_neg_inf(y)) return OrderInt::neg_inf();
  const long zlo = x.lo + y.lo;
  long zhi = std::min(x.hi() + y.hi(), cap);
  if (zhi < zlo) {
    if (has_up(p)) f.add({neg(x.finite), neg(y.finite)});
    zhi = zlo;
  }
  if (is_constant(x) && is_constant(y)) {
    if (has_up(p) && zlo > cap) f.add({kFalse});
    return OrderInt::constant(zlo);
  }
  OrderInt z = result(f, zlo, zhi, x.finite, y.finite, p);
  if (has_up(p)) {
    for (long a = x.lo; a <= x.hi(); ++a) {
      for (long b = y.lo; b <= y.hi(); ++b) {
        if (a == x.lo && b == y.lo) continue;  // covered by the finiteness clause
        f.add({neg(x.geq(a)), neg(y.geq(b)), z.geq(a + b)});
      }
    }
  }
  if (has_down(p)) {
    for (long t = zlo + 1; t <= zhi; ++t) {
      for (long a = x.lo; a <= x.hi(); ++a) {
        long b = t - 1 - a;
        if (b < y.lo) break;
        f.add({neg(z.geq(t)), x.geq(a + 1), y.geq(b + 1)});
      }
    }
  }
  return z;
}

OrderInt mul(Cnf& f, const OrderInt& x, const OrderInt& y, long cap, Polarity p) {
  if (x.arctic() || y.arctic() || x.lo < 0 || y.lo < 0) {
    throw std::invalid_argument("mul is defined on naturals");
  }
  if ((is_constant(x) && x.lo == 0) || (is_constant(y) && y.lo == 0)) return OrderInt::constant(0);
  if (is_constant(x) && x.lo == 1 && y.hi() <= cap) return y;
  if (is_constant(y) && y.lo == 1 && x.hi() <= cap) return x;
  const long zlo = x.lo * y.lo;
  long zhi = std::min(x.hi() * y.hi(), cap);
  if (zhi < zlo) {
    if (has_up(p)) f.add({kFalse});
    zhi = zlo;
  }
  if (is_constant(x) && is_constant(y)) return OrderInt::constant(zlo);
  OrderInt z = result(f, zlo, zhi, kTrue, kTrue, p);
  if (has_up(p)) {
    for (long a = std::max(x.lo, 1L); a <= x.hi(); ++a) {
      for (long b = std::max(y.lo, 1L); b <= y.hi(); ++b) {
        if (a * b <= zlo) continue;
        f.add({neg(x.geq(a)), neg(y.geq(b)), z.geq(a * b)});
      }
    }
  }
  if (has_down(p)) {
    for (long t = zlo + 1; t <= zhi; ++t) {
      for (long a = x.lo; a <= x.hi(); ++a) {
        if (a == 0) {
          f.add({neg(z.geq(t)), x.geq(1)});
          continue;
        }
        long b = (t - 1) / a;  // largest b with a*b < t
        if (b < y.lo) continue;
        f.add({neg(z.geq(t)), x.geq(a + 1), y.geq(b + 1)});
      }
    }
  }
  return z;
}

OrderInt max_of(Cnf& f, const std::vector<OrderInt>& xs_in, Polarity p) {
  std::vector<OrderInt> xs;
  for (const auto& x : xs_in) {
    if (!is_neg_inf(x)) xs.push_back(x);
  }
  if (xs.empty()) return OrderInt::neg_inf();
  if (xs.size() == 1) return xs[0];
  bool any_sure = false;
  long lo_min = xs[0].lo, lo_max = xs[0].lo, hi = xs[0].hi();
  for (const auto& x : xs) {
    any_sure = any_sure || x.finite == kTrue;
    lo_min = std::min(lo_min, x.lo);
    lo_max = std::max(lo_max, x.lo);
    hi = std::max(hi, x.hi());
  }
  bool all_sure = std::all_of(xs.begin(), xs.end(), [](const OrderInt& x) { return x.finite == kTrue; });
  // Only finite arguments contribute; with all of them sure, the largest
  // lower bound is a valid lower bound.
  long lo = all_sure ? lo_max : lo_min;
  OrderInt z;
  z.lo = lo;
  z.finite = any_sure ? kTrue : f.fresh();
  for (long i = lo; i < hi; ++i) z.gt.push_back(f.fresh());
  for (std::size_t i = 0; i + 1 < z.gt.size(); ++i) f.implies(z.gt[i + 1], z.gt[i]);
  if (z.finite != kTrue && !z.gt.empty()) f.implies(z.gt[0], z.finite);
  if (has_up(p)) {
    for (const auto& x : xs) {
      for (long t = x.lo; t <= x.hi(); ++t) f.implies(x.geq(t), z.geq(t));
    }
  }
  if (has_down(p)) {
    std::vector<Lit> c;
    for (long t = lo; t <= hi; ++t) {
      c.assign({neg(z.geq(t))});
      for (const auto& x : xs) c.push_back(x.geq(t));
      f.add(c);
    }
  }
  return z;
}

OrderInt dot(Cnf& f, bool arctic, const std::vector<std::pair<OrderInt, OrderInt>>& terms,
             const std::optional<OrderInt>& extra, long cap, Polarity p) {
  if (!arctic) {
    std::vector<OrderInt> parts;
    for (const auto& [x, y] : terms) {
      OrderInt pr = mul(f, x, y, cap, p);
      if (!(is_constant(pr) && pr.lo == 0)) parts.push_back(pr);
    }
    if (extra && !(is_constant(*extra) && extra->lo == 0)) parts.push_back(*extra);
    if (parts.empty()) return OrderInt::constant(0);
    // Sum constants first, then fold the rest pairwise in a balanced tree.
    long c = 0;
    std::vector<OrderInt> vars;
    for (auto& x : parts) {
      if (is_constant(x)) c += x.lo;
      else vars.push_back(std::move(x));
    }
    if (c != 0 || vars.empty()) vars.push_back(OrderInt::constant(c));
    while (vars.size() > 1) {
      std::vector<OrderInt> next;
      for (std::size_t i = 0; i + 1 < vars.size(); i += 2) next.push_back(add(f, vars[i], vars[i + 1], cap, p));
      if (vars.size() % 2) next.push_back(vars.back());
      vars = std::move(next);
    }
    if (has_up(p) && vars[0].lo > cap) f.add({kFalse});
    return vars[0];
  }

  // Arctic: max over k of (x_k + y_k), together with the extra term.
  std::vector<std::pair<OrderInt, OrderInt>> live;
  for (const auto& t : terms) {
    if (!is_neg_inf(t.first) && !is_neg_inf(t.second)) live.push_back(t);
  }
  std::optional<OrderInt> ex;
  if (extra && !is_neg_inf(*extra)) ex = extra;
  if (live.empty()) return ex ? *ex : OrderInt::neg_inf();
  if (live.size() == 1 && !ex) return add(f, live[0].first, live[0].second, cap, p);

  bool any_sure = ex && ex->finite == kTrue;
  long lo = ex ? ex->lo : live[0].first.lo + live[0].second.lo;
  long hi = ex ? ex->hi() : lo;
  for (const auto& [x, y] : live) {
    any_sure = any_sure || (x.finite == kTrue && y.finite == kTrue);
    lo = std::min(lo, x.lo + y.lo);
    hi = std::max(hi, x.hi() + y.hi());
  }
  hi = std::min(hi, cap);
  if (hi < lo) {
    if (has_up(p)) {
      for (const auto& [x, y] : live) f.add({neg(x.finite), neg(y.finite)});
    }
    hi = lo;
  }
  OrderInt z;
  z.lo = lo;
  z.finite = any_sure ? kTrue : f.fresh();
  for (long i = lo; i < hi; ++i) z.gt.push_back(f.fresh());
  for (std::size_t i = 0; i + 1 < z.gt.size(); ++i) f.implies(z.gt[i + 1], z.gt[i]);
  if (z.finite != kTrue && !z.gt.empty()) f.implies(z.gt[0], z.finite);
  if (has_up(p)) {
    for (const auto& [x, y] : live) {
      for (long a = x.lo; a <= x.hi(); ++a) {
        for (long b = y.lo; b <= y.hi(); ++b) f.add({neg(x.geq(a)), neg(y.geq(b)), z.geq(a + b)});
      }
    }
    if (ex) {
      for (long t = ex->lo; t <= ex->hi(); ++t) f.implies(ex->geq(t), z.geq(t));
    }
  }
  if (has_down(p)) {
    std::vector<OrderInt> sums;
    for (const auto& [x, y] : live) sums.push_back(add(f, x, y, cap, Polarity::Down));
    if (ex) sums.push_back(*ex);
    std::vector<Lit> c;
    for (long t = lo; t <= hi; ++t) {
      c.assign({neg(z.geq(t))});
      for (const auto& s : sums) c.push_back(s.geq(t));
      f.add(c);
    }
  }
  return z;
}

void require_ge(Cnf& f, const OrderInt& x, const OrderInt& y, Lit guard) {
  if (is_neg_inf(y)) return;
  for (long t = y.lo; t <= y.hi(); ++t) f.add({neg(guard), neg(y.geq(t)), x.geq(t)});
}

void require_gt(Cnf& f, const OrderInt& x, const OrderInt& y, Lit guard) {
  if (is_neg_inf(y)) return;
  for (long t = y.lo; t <= y.hi(); ++t) f.add({neg(guard), neg(y.geq(t)), x.geq(t + 1)});
}

long SearchConfig::effective_cap() const {
  if (cap) return *cap;
  return (values - 1) * 64;
}

long SearchConfig::effective_lo(Mode m) const {
  if (arctic_lo) return m == Mode::Relative ? std::max(*arctic_lo, 0L) : *arctic_lo;
  return m == Mode::Relative ? 0 : -1;
}

std::string SearchConfig::describe(Mode m) const {
  std::ostringstream os;
  os << "flavor=" << interp::to_string(flavor) << " dim=" << dim << " values=" << values
     << " cap=" << effective_cap();
  if (flavor == Flavor::Arctic) os << " lo=" << effective_lo(m);
  os << " mode=" << interp::to_string(m);
  os << " policy=" << (policy == StrictPolicy::AtLeastOne ? "at-least-one" : "fixed");
  return os.str();
}

interp::Interpretation EncodedStep::decode_interp(const std::vector<bool>& model) const {
  auto in = flavor == Flavor::Natural ? interp::Interpretation::natural(alphabet, dim)
                                      : interp::Interpretation::arctic(alphabet, dim);
  for (std::size_t s = 0; s < alphabet; ++s) {
    const auto& cs = coeff[s];
    if (cs.empty()) continue;
    if (flavor == Flavor::Natural) {
      interp::NatAffine a{dim, {}, {}};
      for (std::size_t k = 0; k < dim * dim; ++k) a.m.push_back(*decode(cs[k], model));
      for (std::size_t k = 0; k < dim; ++k) a.v.push_back(*decode(cs[dim * dim + k], model));
      in.nat[s] = std::move(a);
    } else {
      interp::ArcAffine a{dim, {}, {}};
      auto conv = [&](const OrderInt& x) {
        auto v = decode(x, model);
        return v ? interp::Arctic::of(*v) : interp::Arctic::neg_inf();
      };
      for (std::size_t k = 0; k < dim * dim; ++k) a.m.push_back(conv(cs[k]));
      for (std::size_t k = 0; k < dim; ++k) a.v.push_back(conv(cs[dim * dim + k]));
      in.arc[s] = std::move(a);
    }
  }
  return in;
}

std::vector<std::size_t> EncodedStep::decode_strict(const std::vector<bool>& model) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < strict.size(); ++i) {
    if (lit_value(model, strict[i])) out.push_back(i);
  }
  return out;
}

namespace {

struct Node {
  srs::Word word;
  int left = -1, right = -1;  // children for composite nodes
  Polarity pol{};
  bool marked = false;
  std::vector<OrderInt> m, v;
};

struct WordLess {
  bool operator()(const srs::Word& a, const srs::Word& b) const { return a < b; }
};

}  // namespace

EncodedStep encode_step(const StepProblem& prob) {
  const SearchConfig& cfg = prob.config;
  if (cfg.dim == 0 || cfg.values < 1) throw std::invalid_argument("need dim >= 1 and values >= 1");
  for (const auto& r : prob.srs.rules()) {
    if (r.lhs.size() > cfg.max_side || r.rhs.size() > cfg.max_side) {
      throw std::invalid_argument("rule side longer than the configured bound");
    }
  }
  const srs::Srs sys = prob.reversed ? srs::reverse_srs(prob.srs) : prob.srs;
  const bool arctic = cfg.flavor == Flavor::Arctic;
  const std::size_t d = cfg.dim;
  const long cap = cfg.effective_cap();
  EncodedStep out;
  out.flavor = cfg.flavor;
  out.dim = d;
  out.alphabet = sys.alphabet().size();
  out.coeff.resize(out.alphabet);
  Cnf& f = out.cnf;

  const long alo = cfg.effective_lo(prob.mode);
  if (arctic && alo + cfg.values - 2 > cap) throw std::invalid_argument("cap below the coefficient range");
  if (!arctic && cfg.values - 1 > cap) throw std::invalid_argument("cap below the coefficient range");

  // Coefficient variables for every symbol that occurs in a rule.
  for (srs::Symbol s : sys.used_symbols()) {
    auto& cs = out.coeff[s];
    std::ostringstream note;
    note << "sym " << sys.name(s);
    for (std::size_t k = 0; k < d * d + d; ++k) {
      const bool is_vec = k >= d * d;
      OrderInt x;
      if (!arctic) {
        long lo = (k == 0 && prob.mode == Mode::Relative) ? 1 : 0;
        if (lo > cfg.values - 1) {
          f.add({kFalse});
          x = OrderInt::constant(lo);
        } else {
          x = fresh_int(f, lo, cfg.values - 1, false);
        }
      } else if ((is_vec && prob.mode == Mode::Relative) || cfg.values < 2) {
        x = OrderInt::neg_inf();
        if (k == 0 && prob.mode == Mode::Relative) f.add({kFalse});
      } else {
        x = fresh_int(f, alo, alo + cfg.values - 2, true);
        if (k == 0 && prob.mode == Mode::Relative) f.add({x.finite});
      }
      note << ' ' << (is_const(x.finite) ? 0 : x.finite);
      for (Lit l : x.gt) note << ':' << l;
      cs.push_back(std::move(x));
    }
    out.comments.push_back(note.str());
    if (arctic && prob.mode == Mode::TopRelative) {
      f.add({cs[0].geq(0), cs[d * d].geq(0)});
    }
  }

  // Strictness indicators.
  std::vector<bool> allowed(sys.size(), prob.candidates.empty());
  for (auto c : prob.candidates) {
    if (c >= sys.size()) throw std::invalid_argument("candidate rule out of range");
    allowed[c] = true;
  }
  out.strict.assign(sys.size(), kFalse);
  if (cfg.policy == StrictPolicy::FixedSet) {
    for (auto c : cfg.fixed_strict) {
      if (c >= sys.size() || !allowed[c]) throw std::invalid_argument("fixed strict rule not allowed");
      out.strict[c] = kTrue;
    }
  } else {
    std::vector<Lit> any;
    for (std::size_t i = 0; i < sys.size(); ++i) {
      if (!allowed[i]) continue;
      out.strict[i] = f.fresh();
      any.push_back(out.strict[i]);
    }
    f.add(any);
  }

  // Composition graph: each word of length >= 2 splits where its two parts
  // are most widely shared among the rule sides.
  std::map<srs::Word, int, WordLess> count;
  for (const auto& r : sys.rules()) {
    for (const srs::Word* w : {&r.lhs, &r.rhs}) {
      for (std::size_t i = 0; i < w->size(); ++i) {
        for (std::size_t j = i + 1; j <= w->size(); ++j) ++count[srs::Word(w->begin() + i, w->begin() + j)];
      }
    }
  }
  std::vector<Node> nodes;
  std::map<srs::Word, int, WordLess> index;
  std::function<int(const srs::Word&)> node_of = [&](const srs::Word& w) -> int {
    auto it = index.find(w);
    if (it != index.end()) return it->second;
    Node n;
    n.word = w;
    if (w.size() >= 2) {
      std::size_t best = 1;
      long best_score = -1;
      for (std::size_t k = 1; k < w.size(); ++k) {
        srs::Word a(w.begin(), w.begin() + k), b(w.begin() + k, w.end());
        long score = 0;
        if (index.count(a)) score += 1000;
        if (index.count(b)) score += 1000;
        score += count[a] + count[b];
        if (score > best_score) {
          best_score = score;
          best = k;
        }
      }
      n.left = node_of(srs::Word(w.begin(), w.begin() + best));
      n.right = node_of(srs::Word(w.begin() + best, w.end()));
    }
    nodes.push_back(std::move(n));
    int id = static_cast<int>(nodes.size()) - 1;
    index.emplace(w, id);
    return id;
  };
  std::function<void(int, Polarity)> mark = [&](int id, Polarity p) {
    Node& n = nodes[id];
    if (n.marked && (static_cast<unsigned>(n.pol) | static_cast<unsigned>(p)) == static_cast<unsigned>(n.pol)) return;
    n.pol = n.marked ? (n.pol | p) : p;
    n.marked = true;
    if (n.left >= 0) {
      int l = n.left, r = n.right;
      mark(l, nodes[id].pol);
      mark(r, nodes[id].pol);
    }
  };
  std::vector<std::pair<int, int>> sides(sys.size(), {-1, -1});
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& r = sys.rule(i);
    if (!r.lhs.empty()) sides[i].first = node_of(r.lhs);
    if (!r.rhs.empty()) sides[i].second = node_of(r.rhs);
  }
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (sides[i].first >= 0) mark(sides[i].first, Polarity::Down);
    if (sides[i].second >= 0) mark(sides[i].second, Polarity::Up);
  }

  // Children always precede parents in the node vector.
  for (auto& n : nodes) {
    if (!n.marked) continue;
    if (n.left < 0) {
      const auto& cs = out.coeff[n.word[0]];
      n.m.assign(cs.begin(), cs.begin() + static_cast<std::ptrdiff_t>(d * d));
      n.v.assign(cs.begin() + static_cast<std::ptrdiff_t>(d * d), cs.end());
      continue;
    }
    const Node& a = nodes[n.left];
    const Node& b = nodes[n.right];
    n.m.resize(d * d);
    n.v.resize(d);
    std::vector<std::pair<OrderInt, OrderInt>> terms;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        terms.clear();
        for (std::size_t k = 0; k < d; ++k) terms.emplace_back(a.m[i * d + k], b.m[k * d + j]);
        n.m[i * d + j] = dot(f, arctic, terms, std::nullopt, cap, n.pol);
      }
      terms.clear();
      for (std::size_t k = 0; k < d; ++k) terms.emplace_back(a.m[i * d + k], b.v[k]);
      n.v[i] = dot(f, arctic, terms, a.v[i], cap, n.pol);
    }
  }

  auto identity = [&]() {
    Node n;
    n.m.resize(d * d);
    n.v.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        n.m[i * d + j] = i == j ? OrderInt::constant(arctic ? 0 : 1)
                                : (arctic ? OrderInt::neg_inf() : OrderInt::constant(0));
      }
      n.v[i] = arctic ? OrderInt::neg_inf() : OrderInt::constant(0);
    }
    return n;
  };
  const Node id_node = identity();

  for (std::size_t i = 0; i < sys.size(); ++i) {
    const Node& l = sides[i].first >= 0 ? nodes[sides[i].first] : id_node;
    const Node& r = sides[i].second >= 0 ? nodes[sides[i].second] : id_node;
    for (std::size_t k = 0; k < d * d; ++k) {
      require_ge(f, l.m[k], r.m[k]);
      if (arctic) require_gt(f, l.m[k], r.m[k], out.strict[i]);
    }
    for (std::size_t k = 0; k < d; ++k) {
      require_ge(f, l.v[k], r.v[k]);
      if (arctic || k == 0) require_gt(f, l.v[k], r.v[k], out.strict[i]);
    }
  }
  std::ostringstream hdr;
  hdr << "matint step encoding: " << cfg.describe(prob.mode) << " reversed=" << (prob.reversed ? 1 : 0);
  out.comments.insert(out.comments.begin(), hdr.str());
  return out;
}

}  // namespace matint::sat
