#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alp/cleave.hpp"
#include "alp/data.hpp"
#include "alp/error.hpp"
#include "alp/explore.hpp"
#include "alp/lpe.hpp"

namespace alp {

// ---------------------------------------------------------------------------
// State invariants
// ---------------------------------------------------------------------------

enum class InvariantMode { Global, Reachable };

struct InvariantVerdict {
  bool holds = true;
  std::string counterexample;  // set on failure
};

// Global mode checks the defining condition over all bounded parameter
// vectors and sum values: whenever condition and invariant hold, the
// invariant holds at the updated vector. Reachable mode merely explores from
// `init` and tests the invariant at every reached state, which is weaker.
inline InvariantVerdict check_invariant(const Lpe& lpe, const ExprPtr& psi,
                                        std::uint64_t nat_bound,
                                        InvariantMode mode = InvariantMode::Global,
                                        const std::vector<Value>& init = {},
                                        const ExploreLimits& limits = {},
                                        std::uint64_t budget = 50'000'000) {
  require_well_formed(lpe);
  std::set<std::string> params = lpe.param_names();
  for (const auto& v : free_vars(psi))
    if (params.count(v) == 0)
      throw Error(Errc::FreeVariableNotInScope,
                  "invariant mentions '" + v + "', which is not a process parameter");

  InvariantVerdict verdict;
  if (mode == InvariantMode::Reachable) {
    Lts lts = explore(lpe, init, limits);
    for (std::size_t s = 0; s < lts.state_values.size(); ++s) {
      Env env;
      for (std::size_t j = 0; j < lpe.params.size(); ++j)
        env.bind(lpe.params[j].first, lpe.params[j].second, lts.state_values[s][j]);
      if (!eval_bool(*psi, env)) {
        verdict.holds = false;
        verdict.counterexample =
            "reachable state " + std::to_string(s) + " " +
            detail::describe_binding(lpe.params, lts.state_values[s]) +
            " violates the invariant";
        return verdict;
      }
    }
    return verdict;
  }

  detail::WorkBudget work{0, budget};
  detail::for_each_assignment(lpe.params, nat_bound, [&](const std::vector<Value>& iota) {
    if (!verdict.holds) return;
    Env base;
    for (std::size_t j = 0; j < lpe.params.size(); ++j)
      base.bind(lpe.params[j].first, lpe.params[j].second, iota[j]);
    if (!eval_bool(*psi, base)) return;  // premise already false

    for (std::size_t i = 0; i < lpe.summands.size() && verdict.holds; ++i) {
      const Summand& sm = lpe.summands[i];
      detail::for_each_assignment(sm.sum_vars, nat_bound,
                                  [&](const std::vector<Value>& l) {
        if (!verdict.holds) return;
        work.charge();
        Env env = base;
        for (std::size_t k = 0; k < sm.sum_vars.size(); ++k)
          env.bind(sm.sum_vars[k].first, sm.sum_vars[k].second, l[k]);
        if (!eval_bool(*sm.condition, env)) return;

        Env next;
        for (std::size_t j = 0; j < lpe.params.size(); ++j)
          next.bind(lpe.params[j].first, lpe.params[j].second,
                    eval(*sm.updates[j], env));
        if (!eval_bool(*psi, next)) {
          verdict.holds = false;
          verdict.counterexample =
              "summand " + std::to_string(i) + " leaves the invariant from " +
              detail::describe_binding(lpe.params, iota) +
              (sm.sum_vars.empty() ? ""
                                   : " with " + detail::describe_binding(sm.sum_vars, l));
        }
      });
    }
  });
  return verdict;
}

// ---------------------------------------------------------------------------
// Restriction
// ---------------------------------------------------------------------------

// Strengthens the conditions of the selected summands with the invariant.
// With `deadlock_free` set, the invariant is instead applied to the update
// expressions, i.e. evaluated at the successor state, which avoids the
// deadlocks a plain restriction introduces outside the invariant.
inline Lpe restrict_lpe(const Lpe& lpe, const ExprPtr& psi,
                        const std::set<std::size_t>& summands,
                        bool deadlock_free = false) {
  Lpe out = lpe;
  std::set<std::string> params = lpe.param_names();
  for (std::size_t i : summands) {
    if (i >= lpe.summands.size())
      throw Error(Errc::IndexOutOfRange,
                  "summand index " + std::to_string(i) + " out of range");
    Summand& sm = out.summands[i];
    std::set<std::string> scope = params;
    for (const auto& [n, s] : sm.sum_vars) scope.insert(n);
    for (const auto& v : free_vars(psi))
      if (scope.count(v) == 0)
        throw Error(Errc::FreeVariableNotInScope,
                    "invariant variable '" + v + "' is not in scope of summand " +
                        std::to_string(i));
    ExprPtr strengthening = psi;
    if (deadlock_free) {
      std::map<std::string, ExprPtr> repl;
      for (std::size_t j = 0; j < lpe.params.size(); ++j)
        repl[lpe.params[j].first] = sm.updates[j];
      strengthening = substitute(psi, repl);
    }
    sm.condition = binary(BinaryOp::And, sm.condition, strengthening);
  }
  return out;
}

// Applies an invariant of the original process to an induced component.
// Shared summands always have the full parameter vector in scope; an
// independent summand is restricted only when the invariant fits its own
// scope. Returns the set of restricted component summand indices.
inline std::set<std::size_t> component_restriction_set(const Lpe& component,
                                                       const SeparationTuple& tuple,
                                                       const ExprPtr& psi) {
  std::set<std::size_t> chosen;
  std::set<std::string> fv = free_vars(psi);
  std::size_t pos = 0;
  for (std::size_t i : tuple.present) {
    if (tuple.independent.count(i) == 0) {
      chosen.insert(pos);
    } else {
      std::set<std::string> scope;
      for (const auto& [n, s] : component.params) scope.insert(n);
      for (const auto& [n, s] : component.summands[pos].sum_vars) scope.insert(n);
      if (detail::subset_of(fv, scope)) chosen.insert(pos);
    }
    ++pos;
  }
  return chosen;
}

}  // namespace alp
