#include "matint/srs.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace matint::srs {

namespace {

bool valid_token(std::string_view s) {
  if (s.empty() || s == "->" || s == "symbols:") return false;
  for (char c : s) {
    if (c == '#' || c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Symbol s : w) {
      h ^= s + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& msg)
    : SrsError("line " + std::to_string(line) + ": " + msg), line_(line) {}

Srs::Srs(std::vector<std::string> alphabet, std::vector<Rule> rules)
    : alphabet_(std::move(alphabet)), rules_(std::move(rules)) {
  std::set<std::string> seen;
  for (const auto& a : alphabet_) {
    if (!valid_token(a)) throw SrsError("invalid symbol name '" + a + "'");
    if (!seen.insert(a).second) throw SrsError("duplicate symbol '" + a + "'");
  }
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    if (r.lhs.empty()) throw SrsError("rule " + std::to_string(i) + " has an empty left-hand side");
    for (const Word* w : {&r.lhs, &r.rhs}) {
      for (Symbol s : *w) {
        if (s >= alphabet_.size()) {
          throw SrsError("rule " + std::to_string(i) + " uses a symbol outside the alphabet");
        }
      }
    }
  }
}

Srs Srs::from_names(
    std::vector<std::string> alphabet,
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& rules) {
  std::unordered_map<std::string, Symbol> idx;
  for (std::size_t i = 0; i < alphabet.size(); ++i) idx.emplace(alphabet[i], static_cast<Symbol>(i));
  auto conv = [&](const std::vector<std::string>& names) {
    Word w;
    for (const auto& n : names) {
      auto it = idx.find(n);
      if (it == idx.end()) throw SrsError("unknown symbol '" + n + "'");
      w.push_back(it->second);
    }
    return w;
  };
  std::vector<Rule> rs;
  for (const auto& [l, r] : rules) rs.push_back(Rule{conv(l), conv(r)});
  return Srs(std::move(alphabet), std::move(rs));
}

std::optional<Symbol> Srs::find_symbol(std::string_view name) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (alphabet_[i] == name) return static_cast<Symbol>(i);
  }
  return std::nullopt;
}

Symbol Srs::symbol(std::string_view name) const {
  auto s = find_symbol(name);
  if (!s) throw SrsError("unknown symbol '" + std::string(name) + "'");
  return *s;
}

const std::string& Srs::name(Symbol s) const {
  if (s >= alphabet_.size()) throw SrsError("unknown symbol id " + std::to_string(s));
  return alphabet_[s];
}

Word Srs::word(std::string_view text) const {
  Word w;
  for (const auto& t : split_ws(text)) w.push_back(symbol(t));
  return w;
}

std::string Srs::show(const Word& w) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += name(w[i]);
  }
  return out;
}

std::string Srs::show_rule(std::size_t i) const {
  const Rule& r = rule(i);
  std::string out = show(r.lhs);
  out += " ->";
  if (!r.rhs.empty()) {
    out += ' ';
    out += show(r.rhs);
  }
  return out;
}

std::vector<Symbol> Srs::used_symbols() const {
  std::set<Symbol> s;
  for (const auto& r : rules_) {
    s.insert(r.lhs.begin(), r.lhs.end());
    s.insert(r.rhs.begin(), r.rhs.end());
  }
  return {s.begin(), s.end()};
}

Srs parse_srs(std::string_view text, std::vector<std::string>* warnings) {
  std::vector<std::string> alphabet;
  std::unordered_map<std::string, Symbol> idx;
  auto intern = [&](const std::string& t, std::size_t line) {
    auto it = idx.find(t);
    if (it != idx.end()) return it->second;
    if (!valid_token(t)) throw ParseError(line, "invalid symbol '" + t + "'");
    Symbol s = static_cast<Symbol>(alphabet.size());
    alphabet.push_back(t);
    idx.emplace(t, s);
    return s;
  };

  std::vector<Rule> rules;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    auto toks = split_ws(line);
    if (toks.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    if (toks[0] == "symbols:") {
      for (std::size_t i = 1; i < toks.size(); ++i) intern(toks[i], lineno);
      if (nl == text.size()) break;
      continue;
    }
    auto arrow = std::find(toks.begin(), toks.end(), "->");
    if (arrow == toks.end()) throw ParseError(lineno, "missing '->'");
    if (std::find(arrow + 1, toks.end(), "->") != toks.end()) {
      throw ParseError(lineno, "more than one '->'");
    }
    if (arrow == toks.begin()) throw ParseError(lineno, "empty left-hand side");
    Rule r;
    for (auto it = toks.begin(); it != arrow; ++it) r.lhs.push_back(intern(*it, lineno));
    for (auto it = arrow + 1; it != toks.end(); ++it) r.rhs.push_back(intern(*it, lineno));
    if (std::find(rules.begin(), rules.end(), r) != rules.end()) {
      if (warnings) warnings->push_back("line " + std::to_string(lineno) + ": duplicate rule");
    }
    rules.push_back(std::move(r));
    if (nl == text.size()) break;
  }
  return Srs(std::move(alphabet), std::move(rules));
}

std::string write_srs(const Srs& srs) {
  std::ostringstream os;
  os << "symbols:";
  for (const auto& a : srs.alphabet()) os << ' ' << a;
  os << '\n';
  for (std::size_t i = 0; i < srs.size(); ++i) os << srs.show_rule(i) << '\n';
  return os.str();
}

Word reversed(Word w) {
  std::reverse(w.begin(), w.end());
  return w;
}

Srs reverse_srs(const Srs& srs) {
  std::vector<Rule> rs;
  for (const auto& r : srs.rules()) rs.push_back(Rule{reversed(r.lhs), reversed(r.rhs)});
  return Srs(srs.alphabet(), std::move(rs));
}

Srs invert_srs(const Srs& srs) {
  std::vector<Rule> rs;
  for (std::size_t i = 0; i < srs.size(); ++i) {
    const Rule& r = srs.rule(i);
    if (r.rhs.empty()) {
      throw SrsError("cannot invert rule " + std::to_string(i) + ": empty right-hand side");
    }
    rs.push_back(Rule{r.rhs, r.lhs});
  }
  return Srs(srs.alphabet(), std::move(rs));
}

Srs remove_rules(const Srs& srs, const std::vector<std::size_t>& indices) {
  std::unordered_set<std::size_t> drop(indices.begin(), indices.end());
  std::vector<Rule> rs;
  for (std::size_t i = 0; i < srs.size(); ++i) {
    if (!drop.count(i)) rs.push_back(srs.rule(i));
  }
  return Srs(srs.alphabet(), std::move(rs));
}

Srs keep_rules(const Srs& srs, const std::vector<std::size_t>& indices) {
  std::vector<Rule> rs;
  for (std::size_t i : indices) rs.push_back(srs.rule(i));
  return Srs(srs.alphabet(), std::move(rs));
}

Srs union_srs(const Srs& a, const Srs& b) {
  std::vector<std::string> alpha = a.alphabet();
  for (const auto& s : b.alphabet()) {
    if (std::find(alpha.begin(), alpha.end(), s) == alpha.end()) alpha.push_back(s);
  }
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> rs;
  for (const Srs* s : {&a, &b}) {
    for (const auto& r : s->rules()) {
      std::vector<std::string> l, rr;
      for (Symbol x : r.lhs) l.push_back(s->name(x));
      for (Symbol x : r.rhs) rr.push_back(s->name(x));
      rs.emplace_back(std::move(l), std::move(rr));
    }
  }
  return Srs::from_names(std::move(alpha), rs);
}

std::vector<Redex> successors(const Srs& srs, const Word& w, bool top_only) {
  for (Symbol s : w) {
    if (s >= srs.alphabet().size()) throw SrsError("word uses an unknown symbol id");
  }
  std::vector<Redex> out;
  for (std::size_t ri = 0; ri < srs.size(); ++ri) {
    const Rule& r = srs.rule(ri);
    if (r.lhs.size() > w.size()) continue;
    std::size_t last = top_only ? 0 : w.size() - r.lhs.size();
    for (std::size_t p = 0; p <= last; ++p) {
      if (!std::equal(r.lhs.begin(), r.lhs.end(), w.begin() + static_cast<std::ptrdiff_t>(p))) {
        continue;
      }
      Word res;
      res.reserve(w.size() - r.lhs.size() + r.rhs.size());
      res.insert(res.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
      res.insert(res.end(), r.rhs.begin(), r.rhs.end());
      res.insert(res.end(), w.begin() + static_cast<std::ptrdiff_t>(p + r.lhs.size()), w.end());
      out.push_back(Redex{ri, p, std::move(res)});
    }
  }
  return out;
}

bool is_normal_form(const Srs& srs, const Word& w) {
  for (const auto& r : srs.rules()) {
    if (r.lhs.size() > w.size()) continue;
    if (std::search(w.begin(), w.end(), r.lhs.begin(), r.lhs.end()) != w.end()) return false;
  }
  return true;
}

std::vector<std::size_t> top_eligible(const Srs& srs) {
  std::vector<bool> marker(srs.alphabet().size(), true);
  for (const auto& r : srs.rules()) {
    for (const Word* w : {&r.lhs, &r.rhs}) {
      for (std::size_t i = 1; i < w->size(); ++i) marker[(*w)[i]] = false;
    }
    Symbol a = r.lhs[0];
    bool rhs_starts = !r.rhs.empty();
    if (!rhs_starts || r.rhs[0] != a) marker[a] = false;
    if (rhs_starts && r.rhs[0] != a) marker[r.rhs[0]] = false;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < srs.size(); ++i) {
    if (marker[srs.rule(i).lhs[0]]) out.push_back(i);
  }
  return out;
}

ExploreResult bounded_explore(const Srs& srs, const Word& start, std::size_t max_steps,
                              std::size_t max_width) {
  std::unordered_set<Word, WordHash> level{start};
  ExploreResult res{ExploreVerdict::AllHaltWithin, 0, 1};
  for (std::size_t depth = 0;; ++depth) {
    std::unordered_set<Word, WordHash> next;
    for (const Word& w : level) {
      for (auto& rd : successors(srs, w)) {
        next.insert(std::move(rd.result));
        if (next.size() > max_width) {
          res.verdict = ExploreVerdict::Budget;
          res.steps = depth + 1;
          res.visited = next.size();
          return res;
        }
      }
    }
    if (next.empty()) {
      res.steps = depth;
      return res;
    }
    if (depth + 1 > max_steps) {
      res.verdict = ExploreVerdict::FoundLongRun;
      res.steps = depth + 1;
      return res;
    }
    res.visited = std::max(res.visited, next.size());
    level = std::move(next);
  }
}

}  // namespace matint::srs
