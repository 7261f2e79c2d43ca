#include "matint/certificate.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace matint::cert {

using interp::Arctic;
using interp::Flavor;
using interp::Int;
using interp::Mode;

std::string fingerprint(const srs::Srs& s) {
  std::string text = srs::write_srs(s);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string cell(const Int& x) { return x.get_str(); }
std::string cell(const Arctic& x) { return x.finite ? x.v.get_str() : "-inf"; }

template <class T>
void write_affine(std::ostream& os, const interp::Affine<T>& a) {
  for (std::size_t i = 0; i < a.dim; ++i) {
    os << "row";
    for (std::size_t j = 0; j < a.dim; ++j) os << ' ' << cell(a.at(i, j));
    os << '\n';
  }
  os << "vec";
  for (const auto& x : a.v) os << ' ' << cell(x);
  os << '\n';
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

std::string rest_after(const std::string& line, const std::string& key) {
  auto p = line.find(key);
  std::string r = line.substr(p + key.size());
  auto b = r.find_first_not_of(" \t");
  return b == std::string::npos ? "" : r.substr(b);
}

Int parse_int(const std::string& t, std::size_t line) {
  try {
    if (t.empty() || (t[0] != '-' && !std::isdigit(static_cast<unsigned char>(t[0])))) throw 0;
    return Int(t);
  } catch (...) {
    throw CertificateError("line " + std::to_string(line) + ": bad number '" + t + "'");
  }
}

}  // namespace

std::string write_certificate(const Certificate& c) {
  std::ostringstream os;
  os << "matint-certificate 1\n";
  os << "tool " << c.tool << '\n';
  os << "fingerprint " << fingerprint(c.system) << '\n';
  if (!c.config.empty()) os << "config " << c.config << '\n';
  os << "system\n" << srs::write_srs(c.system) << "end-system\n";
  for (const Step& s : c.steps) {
    os << "step\n";
    os << "mode " << interp::to_string(s.mode) << '\n';
    os << "reversed " << (s.reversed ? "true" : "false") << '\n';
    os << "strict";
    for (auto i : s.removed) os << ' ' << i;
    os << '\n';
    os << "flavor " << interp::to_string(s.interp.flavor) << '\n';
    os << "dim " << s.interp.dim << '\n';
    if (s.mode == Mode::TopRelative) os << "top " << (s.top_asserted ? "asserted" : "derived") << '\n';
    if (!s.search.empty()) os << "search " << s.search << '\n';
    for (std::size_t sym = 0; sym < s.interp.alphabet_size(); ++sym) {
      if (!s.interp.has(static_cast<srs::Symbol>(sym))) continue;
      os << "sym " << c.system.name(static_cast<srs::Symbol>(sym)) << '\n';
      if (s.interp.flavor == Flavor::Natural) {
        write_affine(os, *s.interp.nat[sym]);
      } else {
        write_affine(os, *s.interp.arc[sym]);
      }
    }
    os << "end-step\n";
  }
  os << "result " << (c.complete ? "complete" : "partial") << '\n';
  return os.str();
}

Certificate parse_certificate(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::istringstream is{std::string(text)};
    std::string l;
    while (std::getline(is, l)) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      lines.push_back(l);
    }
  }
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) -> CertificateError {
    return CertificateError("line " + std::to_string(i + 1) + ": " + msg);
  };
  auto next = [&](bool allow_eof = false) -> std::vector<std::string> {
    while (i < lines.size()) {
      std::string l = lines[i];
      if (auto h = l.find('#'); h != std::string::npos) l = l.substr(0, h);
      auto t = tokens(l);
      if (!t.empty()) return t;
      ++i;
    }
    if (!allow_eof) throw CertificateError("unexpected end of certificate");
    return {};
  };

  Certificate c;
  auto t = next();
  if (t.size() != 2 || t[0] != "matint-certificate" || t[1] != "1") {
    throw fail("expected 'matint-certificate 1'");
  }
  ++i;
  std::string declared_fp;
  bool have_system = false, have_result = false;
  while (true) {
    t = next(true);
    if (t.empty()) break;
    const std::string& key = t[0];
    if (key == "tool") {
      c.tool = rest_after(lines[i], "tool");
      ++i;
    } else if (key == "fingerprint") {
      if (t.size() != 2) throw fail("fingerprint takes one value");
      declared_fp = t[1];
      ++i;
    } else if (key == "config") {
      c.config = rest_after(lines[i], "config");
      ++i;
    } else if (key == "system") {
      ++i;
      std::string body;
      while (true) {
        if (i >= lines.size()) throw CertificateError("unterminated system block");
        if (tokens(lines[i]) == std::vector<std::string>{"end-system"}) break;
        body += lines[i] + '\n';
        ++i;
      }
      ++i;
      try {
        c.system = srs::parse_srs(body);
      } catch (const srs::SrsError& e) {
        throw CertificateError(std::string("system block: ") + e.what());
      }
      have_system = true;
    } else if (key == "step") {
      if (!have_system) throw fail("step before system");
      ++i;
      Step s;
      bool have_mode = false, have_rev = false, have_strict = false, have_flavor = false,
           have_dim = false;
      std::optional<std::string> cur_sym;
      std::vector<std::vector<std::string>> rows;
      std::set<std::string> seen_syms;
      auto ensure_interp = [&]() {
        if (!have_flavor || !have_dim) throw fail("flavor and dim must precede symbols");
        if (s.interp.alphabet_size() == 0 && c.system.alphabet().size() > 0) {
          s.interp = s.interp.flavor == Flavor::Natural
                         ? interp::Interpretation::natural(c.system.alphabet().size(), s.interp.dim)
                         : interp::Interpretation::arctic(c.system.alphabet().size(), s.interp.dim);
        }
      };
      auto flush = [&](std::size_t vec_line) {
        if (!cur_sym) return;
        auto sym = c.system.find_symbol(*cur_sym);
        if (!sym) throw fail("unknown symbol '" + *cur_sym + "'");
        const std::size_t d = s.interp.dim;
        if (rows.size() != d + 1) throw fail("symbol " + *cur_sym + " needs " + std::to_string(d) + " rows and a vec");
        for (const auto& r : rows) {
          if (r.size() != d) throw fail("symbol " + *cur_sym + ": wrong row width");
        }
        auto conv_arc = [&](const std::string& x) {
          return x == "-inf" ? Arctic::neg_inf() : Arctic::of(parse_int(x, vec_line));
        };
        if (s.interp.flavor == Flavor::Natural) {
          interp::NatAffine a{d, {}, {}};
          for (std::size_t r = 0; r < d; ++r) {
            for (const auto& x : rows[r]) {
              Int v = parse_int(x, vec_line);
              if (v < 0) throw fail("natural entries must be nonnegative");
              a.m.push_back(v);
            }
          }
          for (const auto& x : rows[d]) {
            Int v = parse_int(x, vec_line);
            if (v < 0) throw fail("natural entries must be nonnegative");
            a.v.push_back(v);
          }
          s.interp.nat[*sym] = std::move(a);
        } else {
          interp::ArcAffine a{d, {}, {}};
          for (std::size_t r = 0; r < d; ++r) {
            for (const auto& x : rows[r]) a.m.push_back(conv_arc(x));
          }
          for (const auto& x : rows[d]) a.v.push_back(conv_arc(x));
          s.interp.arc[*sym] = std::move(a);
        }
        cur_sym.reset();
        rows.clear();
      };
      while (true) {
        auto u = next();
        const std::string& k = u[0];
        if (k == "end-step") {
          flush(i);
          ++i;
          break;
        }
        if (k == "mode") {
          if (u.size() != 2) throw fail("mode takes one value");
          if (u[1] == "relative") s.mode = Mode::Relative;
          else if (u[1] == "top-relative") s.mode = Mode::TopRelative;
          else throw fail("unknown mode '" + u[1] + "'");
          have_mode = true;
        } else if (k == "reversed") {
          if (u.size() != 2 || (u[1] != "true" && u[1] != "false")) throw fail("reversed takes true|false");
          s.reversed = u[1] == "true";
          have_rev = true;
        } else if (k == "strict") {
          for (std::size_t j = 1; j < u.size(); ++j) {
            Int v = parse_int(u[j], i + 1);
            if (v < 0 || !v.fits_ulong_p()) throw fail("bad rule index");
            s.removed.push_back(v.get_ui());
          }
          have_strict = true;
        } else if (k == "flavor") {
          if (u.size() != 2) throw fail("flavor takes one value");
          if (u[1] == "natural") s.interp.flavor = Flavor::Natural;
          else if (u[1] == "arctic") s.interp.flavor = Flavor::Arctic;
          else throw fail("unknown flavor '" + u[1] + "'");
          have_flavor = true;
        } else if (k == "dim") {
          if (u.size() != 2) throw fail("dim takes one value");
          Int v = parse_int(u[1], i + 1);
          if (v < 1 || v > 64) throw fail("dimension out of range");
          s.interp.dim = v.get_ui();
          have_dim = true;
        } else if (k == "top") {
          if (u.size() != 2 || (u[1] != "derived" && u[1] != "asserted")) throw fail("top takes derived|asserted");
          s.top_asserted = u[1] == "asserted";
        } else if (k == "search") {
          s.search = rest_after(lines[i], "search");
        } else if (k == "sym") {
          flush(i);
          ensure_interp();
          if (u.size() != 2) throw fail("sym takes one name");
          if (!seen_syms.insert(u[1]).second) throw fail("symbol " + u[1] + " given twice");
          cur_sym = u[1];
        } else if (k == "row" || k == "vec") {
          if (!cur_sym) throw fail(k + " outside a symbol");
          if (k == "row" && rows.size() >= s.interp.dim) throw fail("too many rows");
          if (k == "vec" && rows.size() != s.interp.dim) throw fail("vec must follow the rows");
          rows.emplace_back(u.begin() + 1, u.end());
        } else {
          throw fail("unknown step field '" + k + "'");
        }
        ++i;
      }
      if (!have_mode || !have_rev || !have_strict || !have_flavor || !have_dim) {
        throw CertificateError("step " + std::to_string(c.steps.size() + 1) + " is missing a field");
      }
      ensure_interp();
      c.steps.push_back(std::move(s));
    } else if (key == "result") {
      if (t.size() != 2 || (t[1] != "complete" && t[1] != "partial")) throw fail("result takes complete|partial");
      c.complete = t[1] == "complete";
      have_result = true;
      ++i;
    } else {
      throw fail("unknown field '" + key + "'");
    }
  }
  if (!have_system) throw CertificateError("certificate has no system");
  if (!have_result) throw CertificateError("certificate has no result line");
  if (!declared_fp.empty() && declared_fp != fingerprint(c.system)) {
    throw CertificateError("fingerprint does not match the embedded system");
  }
  return c;
}

VerifyResult verify_certificate(const Certificate& c, const srs::Srs& original) {
  VerifyResult res;
  res.remaining = original;
  if (!(c.system == original)) {
    res.reason = "certificate is for a different system";
    return res;
  }
  srs::Srs cur = original;
  for (std::size_t k = 0; k < c.steps.size(); ++k) {
    const Step& s = c.steps[k];
    res.failed_step = k + 1;
    if (s.removed.empty()) {
      res.reason = "step removes no rules";
      return res;
    }
    if (s.mode == Mode::TopRelative) {
      srs::Srs oriented = s.reversed ? srs::reverse_srs(cur) : cur;
      auto elig = srs::top_eligible(oriented);
      for (auto r : s.removed) {
        if (std::find(elig.begin(), elig.end(), r) != elig.end()) continue;
        if (!s.top_asserted) {
          res.reason = "rule " + std::to_string(r) + " is not top-eligible";
          return res;
        }
        res.notes.push_back("step " + std::to_string(k + 1) + " relies on asserted top-eligibility of rule " +
                            std::to_string(r));
      }
    }
    interp::StepClaim claim{cur, s.reversed, s.removed, s.mode, s.interp};
    auto v = interp::verify_step(claim);
    if (!v.ok) {
      res.reason = v.reason;
      return res;
    }
    cur = srs::remove_rules(cur, s.removed);
  }
  res.failed_step = 0;
  res.remaining = cur;
  if (c.complete && !cur.empty()) {
    res.reason = "certificate claims completeness but " + std::to_string(cur.size()) + " rules remain";
    return res;
  }
  res.accepted = true;
  res.complete = cur.empty();
  return res;
}

}  // namespace matint::cert
