#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "alp/error.hpp"

namespace alp {

// ---------------------------------------------------------------------------
// Semantic multi-action multisets
// ---------------------------------------------------------------------------

// One concrete action occurrence: a label with a closed argument vector.
// Arguments are kept in rendered form; the value rendering is injective per
// sort, so string equality coincides with value equality.
struct Event {
  std::string label;
  std::vector<std::string> args;

  friend bool operator==(const Event& a, const Event& b) {
    return a.label == b.label && a.args == b.args;
  }
  friend bool operator<(const Event& a, const Event& b) {
    return std::tie(a.label, a.args) < std::tie(b.label, b.args);
  }
};

inline std::string to_string(const Event& e) {
  if (e.args.empty()) return e.label;
  std::string s = e.label + "(";
  for (std::size_t i = 0; i < e.args.size(); ++i) {
    if (i > 0) s += ",";
    s += e.args[i];
  }
  return s + ")";
}

// A finite multiset of events. Canonical storage: ordered map with
// multiplicities >= 1, which fixes a unique rendering per multiset.
class ActionMultiset {
public:
  ActionMultiset() = default;

  static ActionMultiset tau() { return ActionMultiset{}; }

  static ActionMultiset single(Event e) {
    ActionMultiset m;
    m.add(std::move(e));
    return m;
  }

  static ActionMultiset labels(std::initializer_list<std::string> names) {
    ActionMultiset m;
    for (const auto& n : names) m.add(Event{n, {}});
    return m;
  }

  void add(Event e, std::uint64_t count = 1) {
    if (count == 0) return;
    events_[std::move(e)] += count;
  }

  std::uint64_t count(const Event& e) const {
    auto it = events_.find(e);
    return it == events_.end() ? 0 : it->second;
  }

  bool empty() const { return events_.empty(); }

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (const auto& [e, c] : events_) n += c;
    return n;
  }

  const std::map<Event, std::uint64_t>& entries() const { return events_; }

  friend bool operator==(const ActionMultiset& a, const ActionMultiset& b) {
    return a.events_ == b.events_;
  }
  friend bool operator!=(const ActionMultiset& a, const ActionMultiset& b) {
    return !(a == b);
  }
  friend bool operator<(const ActionMultiset& a, const ActionMultiset& b) {
    return a.events_ < b.events_;
  }

private:
  std::map<Event, std::uint64_t> events_;
};

// Canonical rendering: events sorted, multiplicities expanded, joined with
// `|`; the empty multiset prints `tau`.
inline std::string to_string(const ActionMultiset& m) {
  if (m.empty()) return "tau";
  std::string s;
  for (const auto& [e, c] : m.entries())
    for (std::uint64_t i = 0; i < c; ++i) {
      if (!s.empty()) s += "|";
      s += to_string(e);
    }
  return s;
}

// Pointwise addition.
inline ActionMultiset madd(const ActionMultiset& a, const ActionMultiset& b) {
  ActionMultiset out = a;
  for (const auto& [e, c] : b.entries()) out.add(e, c);
  return out;
}

// Pointwise subtraction, floored at zero.
inline ActionMultiset msub(const ActionMultiset& a, const ActionMultiset& b) {
  ActionMultiset out;
  for (const auto& [e, c] : a.entries()) {
    std::uint64_t sub = b.count(e);
    if (c > sub) out.add(e, c - sub);
  }
  return out;
}

// a included in b, pointwise.
inline bool msubset(const ActionMultiset& a, const ActionMultiset& b) {
  for (const auto& [e, c] : a.entries())
    if (b.count(e) < c) return false;
  return true;
}

// Forgets argument vectors, keeps multiplicities.
inline ActionMultiset strip_data(const ActionMultiset& m) {
  ActionMultiset out;
  for (const auto& [e, c] : m.entries()) out.add(Event{e.label, {}}, c);
  return out;
}

// Every event whose label is hidden drops to multiplicity zero.
inline ActionMultiset hide_apply(const std::set<std::string>& hidden,
                                 const ActionMultiset& m) {
  ActionMultiset out;
  for (const auto& [e, c] : m.entries())
    if (hidden.count(e.label) == 0) out.add(e, c);
  return out;
}

// ---------------------------------------------------------------------------
// Communication
// ---------------------------------------------------------------------------

// One communication rule a0|...|an -> result. The left-hand side is a
// multiset of bare labels.
struct CommRule {
  ActionMultiset lhs;
  std::string result;
};

// A set of communication rules. Well-definedness is enforced here so that
// exhaustive application is independent of rule order: distinct left-hand
// label sets must be disjoint and no result label may appear in another
// rule's left-hand side.
class CommSet {
public:
  CommSet() = default;

  explicit CommSet(std::vector<CommRule> rules) : rules_(std::move(rules)) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const CommRule& r = rules_[i];
      if (r.lhs.empty())
        throw Error(Errc::IllFormedCommSet, "communication with empty left-hand side");
      for (const auto& [e, c] : r.lhs.entries())
        if (!e.args.empty())
          throw Error(Errc::IllFormedCommSet,
                      "communication left-hand sides carry labels only");
      for (std::size_t j = 0; j < rules_.size(); ++j) {
        if (i == j) continue;
        for (const auto& [e, c] : r.lhs.entries())
          if (rules_[j].lhs.count(e) != 0)
            throw Error(Errc::IllFormedCommSet,
                        "label '" + e.label + "' occurs in two left-hand sides");
        if (rules_[j].lhs.count(Event{r.result, {}}) != 0)
          throw Error(Errc::IllFormedCommSet,
                      "result label '" + r.result +
                          "' occurs in another left-hand side");
      }
    }
  }

  const std::vector<CommRule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

private:
  std::vector<CommRule> rules_;
};

// Exhaustive communication: while all left-hand labels of a rule are present
// with one common argument vector, they are replaced by the result label
// carrying that vector. Freshly produced results are never consumed again,
// matching the recursive definition. The CommSet invariants make the outcome
// independent of rule and candidate order.
inline ActionMultiset comm_apply(const CommSet& comms, const ActionMultiset& m) {
  ActionMultiset out = m;
  for (const CommRule& rule : comms.rules()) {
    // Candidate shared argument vectors, taken from the first lhs label.
    const Event& probe = rule.lhs.entries().begin()->first;
    std::vector<std::vector<std::string>> candidates;
    for (const auto& [e, c] : out.entries())
      if (e.label == probe.label) candidates.push_back(e.args);

    ActionMultiset produced;
    for (const auto& args : candidates) {
      std::uint64_t applications = UINT64_MAX;
      for (const auto& [l, need] : rule.lhs.entries()) {
        std::uint64_t have = out.count(Event{l.label, args});
        applications = std::min(applications, have / need);
      }
      if (applications == 0 || applications == UINT64_MAX) continue;
      ActionMultiset consumed;
      for (const auto& [l, need] : rule.lhs.entries())
        consumed.add(Event{l.label, args}, need * applications);
      out = msub(out, consumed);
      produced.add(Event{rule.result, args}, applications);
    }
    out = madd(out, produced);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Allow sets
// ---------------------------------------------------------------------------

// A finite set of label multisets, as used by the allow operator.
using AllowSet = std::set<ActionMultiset>;

inline bool allows(const AllowSet& a, const ActionMultiset& label) {
  return a.count(strip_data(label)) != 0;
}

// ---------------------------------------------------------------------------
// Label parsing (.aut round trip)
// ---------------------------------------------------------------------------

// Parses the canonical label rendering back into a multiset. Accepts
// `tau` or `ev(args)|ev|...` where argument strings contain neither commas
// nor parentheses.
inline ActionMultiset parse_multiset_label(const std::string& text) {
  ActionMultiset m;
  if (text == "tau") return m;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t bar = text.find('|', pos);
    std::size_t paren = text.find('(', pos);
    Event e;
    if (paren != std::string::npos && (bar == std::string::npos || paren < bar)) {
      e.label = text.substr(pos, paren - pos);
      std::size_t close = text.find(')', paren);
      if (close == std::string::npos)
        throw Error(Errc::ParseError, "unterminated argument list in label '" + text + "'");
      std::string args = text.substr(paren + 1, close - paren - 1);
      std::size_t a = 0;
      while (a <= args.size() && !args.empty()) {
        std::size_t comma = args.find(',', a);
        if (comma == std::string::npos) {
          e.args.push_back(args.substr(a));
          break;
        }
        e.args.push_back(args.substr(a, comma - a));
        a = comma + 1;
      }
      pos = close + 1;
      if (pos < text.size()) {
        if (text[pos] != '|')
          throw Error(Errc::ParseError, "expected '|' in label '" + text + "'");
        ++pos;
      }
    } else if (bar != std::string::npos) {
      e.label = text.substr(pos, bar - pos);
      pos = bar + 1;
    } else {
      e.label = text.substr(pos);
      pos = text.size();
    }
    if (e.label.empty())
      throw Error(Errc::ParseError, "empty action label in '" + text + "'");
    m.add(std::move(e));
  }
  return m;
}

}  // namespace alp
