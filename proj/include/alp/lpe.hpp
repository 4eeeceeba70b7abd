#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alp/data.hpp"
#include "alp/error.hpp"

namespace alp {

// ---------------------------------------------------------------------------
// Linear process equations
// ---------------------------------------------------------------------------

struct ActionDecl {
  std::string label;
  std::vector<Sort> param_sorts;  // empty list = data-less action
};

// One `label(args)` occurrence inside a multi-action expression.
struct ActionExpr {
  std::string label;
  std::vector<ExprPtr> args;
};

// A syntactic multi-action; the empty list is tau.
using MultiActionExpr = std::vector<ActionExpr>;

// One condition-action-effect alternative. `updates` is positional: entry j
// is the next value of parameter j.
struct Summand {
  std::vector<std::pair<std::string, Sort>> sum_vars;
  ExprPtr condition;
  MultiActionExpr action;
  std::vector<ExprPtr> updates;
};

struct Lpe {
  std::string name;
  std::vector<std::pair<std::string, Sort>> params;
  std::vector<Summand> summands;
  std::vector<ActionDecl> actions;
  std::vector<Sort> sorts;  // user-declared enum sorts, in declaration order

  const ActionDecl* find_action(const std::string& label) const {
    for (const auto& a : actions)
      if (a.label == label) return &a;
    return nullptr;
  }

  std::optional<std::size_t> param_index(const std::string& name) const {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i].first == name) return i;
    return std::nullopt;
  }

  SortTable sort_table() const {
    SortTable t;
    for (const auto& s : sorts) t[s.name] = s;
    return t;
  }

  std::set<std::string> param_names() const {
    std::set<std::string> out;
    for (const auto& [n, s] : params) out.insert(n);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

struct Diagnostic {
  std::string code;
  std::string message;
  std::optional<std::size_t> summand;  // empty for process-level findings
};

inline std::string to_string(const Diagnostic& d) {
  std::string s = d.code;
  if (d.summand) s += " in summand " + std::to_string(*d.summand);
  s += ": " + d.message;
  return s;
}

namespace detail {

inline void check_expr(const ExprPtr& e, const TypeEnv& vars, const SortTable& sorts,
                       std::optional<Sort> expected, std::size_t summand,
                       const std::string& what, std::vector<Diagnostic>& out) {
  try {
    Sort s = type_of(*e, vars, sorts);
    if (expected && !(s == *expected))
      out.push_back({"SortMismatch",
                     what + " has sort " + to_string(s) + ", expected " +
                         to_string(*expected),
                     summand});
  } catch (const Error& err) {
    out.push_back({errc_name(err.code()), what + ": " + err.what(), summand});
  }
}

}  // namespace detail

// Collects every violation of the structural LPE rules: sort sanity, name
// disjointness, declared actions, free-variable containment and positional
// update typing. An empty result means the process is well-formed.
inline std::vector<Diagnostic> well_formed(const Lpe& lpe) {
  std::vector<Diagnostic> out;
  SortTable sorts = lpe.sort_table();

  for (const auto& s : lpe.sorts) {
    if (s.constructors.empty())
      out.push_back({"EmptySort", "enum sort '" + s.name + "' has no constructors", {}});
    std::set<std::string> seen;
    for (const auto& c : s.constructors)
      if (!seen.insert(c).second)
        out.push_back({"DuplicateConstructor",
                       "constructor '" + c + "' repeated in sort '" + s.name + "'",
                       {}});
  }

  std::set<std::string> action_names;
  for (const auto& a : lpe.actions)
    if (!action_names.insert(a.label).second)
      out.push_back({"DuplicateAction", "action '" + a.label + "' declared twice", {}});

  TypeEnv param_env;
  for (const auto& [name, sort] : lpe.params) {
    if (param_env.count(name) != 0)
      out.push_back({"DuplicateParameter", "parameter '" + name + "' declared twice", {}});
    param_env[name] = sort;
  }

  for (std::size_t i = 0; i < lpe.summands.size(); ++i) {
    const Summand& sm = lpe.summands[i];
    TypeEnv env = param_env;
    for (const auto& [name, sort] : sm.sum_vars) {
      if (param_env.count(name) != 0)
        out.push_back({"SumVariableShadowsParameter",
                       "sum variable '" + name + "' collides with a parameter", i});
      if (env.count(name) != 0 && param_env.count(name) == 0)
        out.push_back({"DuplicateSumVariable", "sum variable '" + name + "' repeated", i});
      env[name] = sort;
    }

    detail::check_expr(sm.condition, env, sorts, Sort::boolean(), i, "condition", out);

    for (const auto& act : sm.action) {
      const ActionDecl* decl = lpe.find_action(act.label);
      if (decl == nullptr) {
        out.push_back({"UndeclaredAction", "action '" + act.label + "' not declared", i});
        continue;
      }
      if (decl->param_sorts.size() != act.args.size()) {
        out.push_back({"ActionArityMismatch",
                       "action '" + act.label + "' expects " +
                           std::to_string(decl->param_sorts.size()) + " argument(s), got " +
                           std::to_string(act.args.size()),
                       i});
        continue;
      }
      for (std::size_t k = 0; k < act.args.size(); ++k)
        detail::check_expr(act.args[k], env, sorts, decl->param_sorts[k], i,
                           "argument " + std::to_string(k) + " of '" + act.label + "'",
                           out);
    }

    if (sm.updates.size() != lpe.params.size()) {
      out.push_back({"UpdateArityMismatch",
                     "summand has " + std::to_string(sm.updates.size()) +
                         " update(s) for " + std::to_string(lpe.params.size()) +
                         " parameter(s)",
                     i});
    } else {
      for (std::size_t j = 0; j < sm.updates.size(); ++j)
        detail::check_expr(sm.updates[j], env, sorts, lpe.params[j].second, i,
                           "update of parameter '" + lpe.params[j].first + "'", out);
    }
  }
  return out;
}

inline void require_well_formed(const Lpe& lpe) {
  auto diags = well_formed(lpe);
  if (diags.empty()) return;
  std::string msg = "ill-formed process '" + lpe.name + "':";
  for (const auto& d : diags) msg += "\n  " + to_string(d);
  throw Error(Errc::SortMismatch, msg);
}

// ---------------------------------------------------------------------------
// Projection
// ---------------------------------------------------------------------------

// Elements at the given positions, ascending, original order preserved.
template <typename T>
std::vector<T> project(const std::vector<T>& items, const std::set<std::size_t>& idxs) {
  std::vector<T> out;
  out.reserve(idxs.size());
  for (std::size_t i : idxs) {
    if (i >= items.size())
      throw Error(Errc::IndexOutOfRange,
                  "projection index " + std::to_string(i) + " out of range for vector of " +
                      std::to_string(items.size()));
    out.push_back(items[i]);
  }
  return out;
}

}  // namespace alp
