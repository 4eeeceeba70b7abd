#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "alp/data.hpp"
#include "alp/error.hpp"
#include "alp/lpe.hpp"
#include "alp/lts.hpp"
#include "alp/multiaction.hpp"

namespace alp {

struct ExploreLimits {
  std::size_t max_states = 10'000'000;
  // Fallback range for Nat sum variables without a syntactic bound. Unset
  // means such a summand is an error, which is the honest reading of an
  // infinitely branching process.
  std::optional<std::uint64_t> nat_sum_bound;
};

// ---------------------------------------------------------------------------
// Multi-action interpretation
// ---------------------------------------------------------------------------

inline ActionMultiset interpret_multiaction(const MultiActionExpr& m, const Env& env) {
  ActionMultiset out;
  for (const ActionExpr& a : m) {
    Event e;
    e.label = a.label;
    for (const ExprPtr& arg : a.args) e.args.push_back(to_string(eval(*arg, env)));
    out.add(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sum variable enumeration
// ---------------------------------------------------------------------------

namespace detail {

// Upper bound for a Nat sum variable extracted from the top-level conjuncts
// of the condition: `v == e`, `v <= e`, `v < e` with e closed under `known`.
// Returns the smallest such bound; -1 encodes an empty range (v < 0).
inline std::optional<std::int64_t> nat_upper_bound(const std::string& v,
                                                   const ExprPtr& cond,
                                                   const Env& known) {
  std::optional<std::int64_t> best;
  for (const ExprPtr& c : conjuncts(cond)) {
    const auto* b = std::get_if<Expr::Binary>(&c->node);
    if (b == nullptr) continue;
    if (b->op != BinaryOp::Eq && b->op != BinaryOp::Le && b->op != BinaryOp::Lt) continue;
    const auto* lv = std::get_if<Expr::Var>(&b->lhs->node);
    if (lv == nullptr || lv->name != v) continue;
    bool closed = true;
    for (const auto& fv : free_vars(b->rhs))
      if (!known.contains(fv)) {
        closed = false;
        break;
      }
    if (!closed) continue;
    Value val = eval(*b->rhs, known);
    const std::uint64_t* n = std::get_if<std::uint64_t>(&val);
    if (n == nullptr) continue;
    std::int64_t bound = static_cast<std::int64_t>(*n);
    if (b->op == BinaryOp::Lt) bound -= 1;
    if (!best || bound < *best) best = bound;
  }
  return best;
}

}  // namespace detail

// Yields every extension of `base` with values for `vars` under which the
// condition evaluates to true. Bool, enum and Unit variables are enumerated
// in full; Nat variables need a syntactic bound in the condition or the
// configured fallback range.
inline std::vector<Env> enumerate_bindings(
    const std::vector<std::pair<std::string, Sort>>& vars, const ExprPtr& cond,
    const Env& base, const ExploreLimits& limits) {
  std::vector<Env> out;
  std::vector<Env> frontier{base};
  for (const auto& [name, sort] : vars) {
    std::vector<Env> next;
    for (const Env& env : frontier) {
      std::vector<Value> domain;
      if (sort.kind == SortKind::Nat) {
        auto bound = detail::nat_upper_bound(name, cond, env);
        if (!bound && limits.nat_sum_bound)
          bound = static_cast<std::int64_t>(*limits.nat_sum_bound);
        if (!bound)
          throw Error(Errc::UnboundedSum,
                      "sum variable '" + name +
                          "' of sort Nat has no bound in the condition");
        for (std::int64_t n = 0; n <= *bound; ++n)
          domain.push_back(Value{static_cast<std::uint64_t>(n)});
      } else {
        domain = enumerate_sort(sort);
      }
      for (const Value& v : domain) {
        Env extended = env;
        extended.bind(name, sort, v);
        next.push_back(std::move(extended));
      }
    }
    frontier = std::move(next);
  }
  for (Env& env : frontier)
    if (eval_bool(*cond, env)) out.push_back(std::move(env));
  return out;
}

// ---------------------------------------------------------------------------
// State space exploration
// ---------------------------------------------------------------------------

namespace detail {

inline std::string state_key(const std::vector<Value>& values) {
  std::string key;
  for (const auto& v : values) {
    key += to_string(v);
    key += ',';
  }
  return key;
}

}  // namespace detail

// Breadth-first construction of the representative state space: states are
// canonical value vectors numbered in discovery order, summands fire in
// index order and duplicate (src, label, dst) triples collapse.
inline Lts explore(const Lpe& lpe, const std::vector<Value>& init,
                   const ExploreLimits& limits = {}) {
  require_well_formed(lpe);
  if (init.size() != lpe.params.size())
    throw Error(Errc::SortMismatch, "initial vector arity mismatch");

  Lts lts;
  std::unordered_map<std::string, std::size_t> index_of;
  std::deque<std::size_t> queue;
  std::set<std::tuple<std::size_t, std::string, std::size_t>> seen_transitions;

  auto intern = [&](std::vector<Value> values) {
    std::string key = detail::state_key(values);
    auto it = index_of.find(key);
    if (it != index_of.end()) return it->second;
    if (lts.state_values.size() >= limits.max_states)
      throw Error(Errc::StateLimitExceeded,
                  "state limit of " + std::to_string(limits.max_states) + " exceeded");
    std::size_t idx = lts.state_values.size();
    index_of.emplace(std::move(key), idx);
    lts.state_values.push_back(std::move(values));
    queue.push_back(idx);
    return idx;
  };

  intern(init);
  lts.initial = 0;

  while (!queue.empty()) {
    std::size_t src = queue.front();
    queue.pop_front();

    Env state_env;
    for (std::size_t j = 0; j < lpe.params.size(); ++j)
      state_env.bind(lpe.params[j].first, lpe.params[j].second,
                     lts.state_values[src][j]);

    for (std::size_t i = 0; i < lpe.summands.size(); ++i) {
      const Summand& sm = lpe.summands[i];
      std::vector<Env> bindings;
      try {
        bindings = enumerate_bindings(sm.sum_vars, sm.condition, state_env, limits);
      } catch (const Error& e) {
        if (e.code() == Errc::UnboundedSum)
          throw Error(Errc::UnboundedSum,
                      std::string(e.what()) + " (summand " + std::to_string(i) + ")");
        throw;
      }
      for (const Env& env : bindings) {
        ActionMultiset label = interpret_multiaction(sm.action, env);
        std::vector<Value> next;
        next.reserve(sm.updates.size());
        for (const ExprPtr& u : sm.updates) next.push_back(eval(*u, env));
        std::size_t dst = intern(std::move(next));
        auto key = std::make_tuple(src, to_string(label), dst);
        if (seen_transitions.insert(key).second)
          lts.transitions.push_back({src, std::move(label), dst});
      }
    }
  }

  lts.num_states = lts.state_values.size();
  return lts;
}

}  // namespace alp
