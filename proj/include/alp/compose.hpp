#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

#include "alp/error.hpp"
#include "alp/explore.hpp"
#include "alp/lts.hpp"
#include "alp/multiaction.hpp"
#include "alp/parser.hpp"

namespace alp {

// ---------------------------------------------------------------------------
// Context expressions
// ---------------------------------------------------------------------------

struct ContextExpr;
using ContextPtr = std::shared_ptr<const ContextExpr>;

// Operator tree over component transition systems: communication, allowing,
// hiding and binary parallel composition over named leaves.
struct ContextExpr {
  struct Leaf {
    std::string id;
  };
  struct Par {
    ContextPtr left;
    ContextPtr right;
  };
  struct Comm {
    CommSet comm;
    ContextPtr child;
  };
  struct Allow {
    AllowSet allowed;
    ContextPtr child;
  };
  struct Hide {
    std::set<std::string> labels;
    ContextPtr child;
  };

  std::variant<Leaf, Par, Comm, Allow, Hide> node;
};

inline ContextPtr ctx_leaf(std::string id) {
  return std::make_shared<ContextExpr>(ContextExpr{ContextExpr::Leaf{std::move(id)}});
}
inline ContextPtr ctx_par(ContextPtr l, ContextPtr r) {
  return std::make_shared<ContextExpr>(
      ContextExpr{ContextExpr::Par{std::move(l), std::move(r)}});
}
inline ContextPtr ctx_comm(CommSet c, ContextPtr child) {
  return std::make_shared<ContextExpr>(
      ContextExpr{ContextExpr::Comm{std::move(c), std::move(child)}});
}
inline ContextPtr ctx_allow(AllowSet a, ContextPtr child) {
  return std::make_shared<ContextExpr>(
      ContextExpr{ContextExpr::Allow{std::move(a), std::move(child)}});
}
inline ContextPtr ctx_hide(std::set<std::string> labels, ContextPtr child) {
  return std::make_shared<ContextExpr>(
      ContextExpr{ContextExpr::Hide{std::move(labels), std::move(child)}});
}

inline void collect_leaves(const ContextPtr& ctx, std::vector<std::string>& out) {
  struct Visitor {
    std::vector<std::string>& out;
    void operator()(const ContextExpr::Leaf& l) const { out.push_back(l.id); }
    void operator()(const ContextExpr::Par& p) const {
      collect_leaves(p.left, out);
      collect_leaves(p.right, out);
    }
    void operator()(const ContextExpr::Comm& c) const { collect_leaves(c.child, out); }
    void operator()(const ContextExpr::Allow& a) const { collect_leaves(a.child, out); }
    void operator()(const ContextExpr::Hide& h) const { collect_leaves(h.child, out); }
  };
  std::visit(Visitor{out}, ctx->node);
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

namespace detail {

struct ComposeStep {
  ActionMultiset label;
  std::vector<std::size_t> next;  // successor per leaf slot spanned by the node
};

struct Component {
  const Lts* lts = nullptr;
  std::vector<std::vector<std::pair<const ActionMultiset*, std::size_t>>> moves;
};

// Outgoing transitions of an operator node at a composite state, computed
// purely on labels. Order is fixed: for Par first both-move steps, then
// left-only, then right-only.
inline std::vector<ComposeStep> node_out(const ContextExpr& node,
                                         const std::vector<Component>& comps,
                                         const std::vector<std::size_t>& state,
                                         std::size_t slot_lo, std::size_t slot_hi);

inline std::size_t leaf_count(const ContextExpr& node) {
  struct Visitor {
    std::size_t operator()(const ContextExpr::Leaf&) const { return 1; }
    std::size_t operator()(const ContextExpr::Par& p) const {
      return leaf_count(*p.left) + leaf_count(*p.right);
    }
    std::size_t operator()(const ContextExpr::Comm& c) const { return leaf_count(*c.child); }
    std::size_t operator()(const ContextExpr::Allow& a) const { return leaf_count(*a.child); }
    std::size_t operator()(const ContextExpr::Hide& h) const { return leaf_count(*h.child); }
  };
  return std::visit(Visitor{}, node.node);
}

inline std::vector<ComposeStep> node_out(const ContextExpr& node,
                                         const std::vector<Component>& comps,
                                         const std::vector<std::size_t>& state,
                                         std::size_t slot_lo, std::size_t slot_hi) {
  struct Visitor {
    const std::vector<Component>& comps;
    const std::vector<std::size_t>& state;
    std::size_t lo;
    std::size_t hi;

    std::vector<ComposeStep> operator()(const ContextExpr::Leaf&) const {
      std::vector<ComposeStep> out;
      const Component& c = comps[lo];
      for (const auto& [label, dst] : c.moves[state[lo]])
        out.push_back({*label, {dst}});
      return out;
    }

    std::vector<ComposeStep> operator()(const ContextExpr::Par& p) const {
      std::size_t mid = lo + leaf_count(*p.left);
      auto left = node_out(*p.left, comps, state, lo, mid);
      auto right = node_out(*p.right, comps, state, mid, hi);
      std::vector<std::size_t> left_stay(state.begin() + lo, state.begin() + mid);
      std::vector<std::size_t> right_stay(state.begin() + mid, state.begin() + hi);

      std::vector<ComposeStep> out;
      for (const auto& a : left)
        for (const auto& b : right) {
          ComposeStep step{madd(a.label, b.label), a.next};
          step.next.insert(step.next.end(), b.next.begin(), b.next.end());
          out.push_back(std::move(step));
        }
      for (const auto& a : left) {
        ComposeStep step{a.label, a.next};
        step.next.insert(step.next.end(), right_stay.begin(), right_stay.end());
        out.push_back(std::move(step));
      }
      for (const auto& b : right) {
        ComposeStep step{b.label, left_stay};
        step.next.insert(step.next.end(), b.next.begin(), b.next.end());
        out.push_back(std::move(step));
      }
      return out;
    }

    std::vector<ComposeStep> operator()(const ContextExpr::Comm& c) const {
      auto out = node_out(*c.child, comps, state, lo, hi);
      for (auto& step : out) step.label = comm_apply(c.comm, step.label);
      return out;
    }

    std::vector<ComposeStep> operator()(const ContextExpr::Allow& a) const {
      auto steps = node_out(*a.child, comps, state, lo, hi);
      std::vector<ComposeStep> out;
      for (auto& step : steps)
        if (allows(a.allowed, step.label)) out.push_back(std::move(step));
      return out;
    }

    std::vector<ComposeStep> operator()(const ContextExpr::Hide& h) const {
      auto out = node_out(*h.child, comps, state, lo, hi);
      for (auto& step : out) step.label = hide_apply(h.labels, step.label);
      return out;
    }
  };
  return std::visit(Visitor{comps, state, slot_lo, slot_hi}, node.node);
}

}  // namespace detail

// Evaluates a context expression over explored component systems into one
// transition system. Purely label-driven: no data expression is evaluated.
// States are tuples of component states, numbered in BFS discovery order;
// only states reachable through allowed transitions are constructed.
inline Lts compose(const ContextPtr& ctx, const std::map<std::string, Lts>& components,
                   const ExploreLimits& limits = {}) {
  std::vector<std::string> leaf_ids;
  collect_leaves(ctx, leaf_ids);

  std::vector<detail::Component> comps;
  for (const auto& id : leaf_ids) {
    auto it = components.find(id);
    if (it == components.end())
      throw Error(Errc::UnknownComponent, "unknown component '" + id + "'");
    detail::Component c;
    c.lts = &it->second;
    c.moves.resize(it->second.num_states);
    for (const auto& t : it->second.transitions)
      c.moves[t.src].emplace_back(&t.label, t.dst);
    comps.push_back(std::move(c));
  }

  Lts lts;
  std::unordered_map<std::string, std::size_t> index_of;
  std::vector<std::vector<std::size_t>> states;
  std::deque<std::size_t> queue;
  std::set<std::tuple<std::size_t, std::string, std::size_t>> seen_transitions;

  auto intern = [&](std::vector<std::size_t> tuple) {
    std::string key;
    for (std::size_t v : tuple) key += std::to_string(v) + ",";
    auto it = index_of.find(key);
    if (it != index_of.end()) return it->second;
    if (states.size() >= limits.max_states)
      throw Error(Errc::StateLimitExceeded,
                  "state limit of " + std::to_string(limits.max_states) + " exceeded");
    std::size_t idx = states.size();
    index_of.emplace(std::move(key), idx);
    states.push_back(std::move(tuple));
    queue.push_back(idx);
    return idx;
  };

  std::vector<std::size_t> init;
  for (const auto& c : comps) init.push_back(c.lts->initial);
  intern(std::move(init));
  lts.initial = 0;

  while (!queue.empty()) {
    std::size_t src = queue.front();
    queue.pop_front();
    auto steps = detail::node_out(*ctx, comps, states[src], 0, comps.size());
    for (auto& step : steps) {
      std::size_t dst = intern(std::move(step.next));
      auto key = std::make_tuple(src, to_string(step.label), dst);
      if (seen_transitions.insert(key).second)
        lts.transitions.push_back({src, std::move(step.label), dst});
    }
  }

  lts.num_states = states.size();
  return lts;
}

// ---------------------------------------------------------------------------
// Context files
// ---------------------------------------------------------------------------

namespace detail {

class CtxParser {
public:
  explicit CtxParser(const std::string& text) : lex_(text) {}

  ContextPtr parse() {
    ContextPtr e = parse_node();
    if (lex_.peek().kind != Tok::Eof) parse_fail(lex_.peek(), "end of input");
    return e;
  }

private:
  Token expect(Tok kind, const std::string& what) {
    if (lex_.peek().kind != kind) parse_fail(lex_.peek(), what);
    return lex_.next();
  }

  std::string parse_label() {
    Token t = expect(Tok::Ident, "an action label");
    std::string name = t.text;
    while (lex_.peek().kind == Tok::Hash) {
      lex_.next();
      const Token& seg = lex_.peek();
      if (seg.kind != Tok::Ident && seg.kind != Tok::Number)
        parse_fail(seg, "a generated label segment");
      name += "#" + lex_.next().text;
    }
    return name;
  }

  ContextPtr parse_parenthesised() {
    expect(Tok::LParen, "'('");
    ContextPtr e = parse_node();
    expect(Tok::RParen, "')'");
    return e;
  }

  ContextPtr parse_node() {
    Token t = expect(Tok::Ident, "'hide', 'allow', 'comm', 'par' or 'lts'");
    if (t.text == "lts") {
      Token s = expect(Tok::String, "a quoted component name");
      return ctx_leaf(s.text);
    }
    if (t.text == "par") {
      ContextPtr l = parse_parenthesised();
      ContextPtr r = parse_parenthesised();
      return ctx_par(std::move(l), std::move(r));
    }
    if (t.text == "hide") {
      expect(Tok::LBrace, "'{'");
      std::set<std::string> labels;
      if (lex_.peek().kind != Tok::RBrace) {
        labels.insert(parse_label());
        while (lex_.peek().kind == Tok::Comma) {
          lex_.next();
          labels.insert(parse_label());
        }
      }
      expect(Tok::RBrace, "'}'");
      return ctx_hide(std::move(labels), parse_parenthesised());
    }
    if (t.text == "allow") {
      expect(Tok::LBrace, "'{'");
      AllowSet allowed;
      while (lex_.peek().kind == Tok::LBrace) {
        lex_.next();
        ActionMultiset m;
        if (lex_.peek().kind != Tok::RBrace) {
          m.add(Event{parse_label(), {}});
          while (lex_.peek().kind == Tok::Comma) {
            lex_.next();
            m.add(Event{parse_label(), {}});
          }
        }
        expect(Tok::RBrace, "'}'");
        allowed.insert(std::move(m));
        if (lex_.peek().kind == Tok::Comma)
          lex_.next();
        else
          break;
      }
      expect(Tok::RBrace, "'}'");
      return ctx_allow(std::move(allowed), parse_parenthesised());
    }
    if (t.text == "comm") {
      expect(Tok::LBrace, "'{'");
      std::vector<CommRule> rules;
      if (lex_.peek().kind != Tok::RBrace) {
        while (true) {
          CommRule r;
          r.lhs.add(Event{parse_label(), {}});
          while (lex_.peek().kind == Tok::Bar) {
            lex_.next();
            r.lhs.add(Event{parse_label(), {}});
          }
          expect(Tok::Arrow, "'->'");
          r.result = parse_label();
          rules.push_back(std::move(r));
          if (lex_.peek().kind != Tok::Comma) break;
          lex_.next();
        }
      }
      expect(Tok::RBrace, "'}'");
      CommSet comm(std::move(rules));
      return ctx_comm(std::move(comm), parse_parenthesised());
    }
    parse_fail(t, "'hide', 'allow', 'comm', 'par' or 'lts'");
  }

  Lexer lex_;
};

}  // namespace detail

inline ContextPtr parse_ctx(const std::string& text) {
  return detail::CtxParser(text).parse();
}

inline std::string render_ctx(const ContextPtr& ctx) {
  struct Visitor {
    std::string operator()(const ContextExpr::Leaf& l) const {
      return "lts \"" + l.id + "\"";
    }
    std::string operator()(const ContextExpr::Par& p) const {
      return "par (" + render_ctx(p.left) + ") (" + render_ctx(p.right) + ")";
    }
    std::string operator()(const ContextExpr::Comm& c) const {
      std::string s = "comm {";
      bool first_rule = true;
      for (const auto& r : c.comm.rules()) {
        if (!first_rule) s += ", ";
        first_rule = false;
        bool first = true;
        for (const auto& [e, n] : r.lhs.entries())
          for (std::uint64_t i = 0; i < n; ++i) {
            if (!first) s += "|";
            first = false;
            s += e.label;
          }
        s += " -> " + r.result;
      }
      return s + "} (" + render_ctx(c.child) + ")";
    }
    std::string operator()(const ContextExpr::Allow& a) const {
      std::string s = "allow {";
      bool first_set = true;
      for (const auto& m : a.allowed) {
        if (!first_set) s += ",";
        first_set = false;
        s += "{";
        bool first = true;
        for (const auto& [e, n] : m.entries())
          for (std::uint64_t i = 0; i < n; ++i) {
            if (!first) s += ",";
            first = false;
            s += e.label;
          }
        s += "}";
      }
      return s + "} (" + render_ctx(a.child) + ")";
    }
    std::string operator()(const ContextExpr::Hide& h) const {
      std::string s = "hide {";
      bool first = true;
      for (const auto& l : h.labels) {
        if (!first) s += ",";
        first = false;
        s += l;
      }
      return s + "} (" + render_ctx(h.child) + ")";
    }
  };
  return std::visit(Visitor{}, ctx->node);
}

}  // namespace alp
