#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alp/bisim.hpp"
#include "alp/cleave.hpp"
#include "alp/compose.hpp"
#include "alp/explore.hpp"
#include "alp/invariant.hpp"
#include "alp/lpe.hpp"
#include "alp/parser.hpp"

namespace alp {

// ---------------------------------------------------------------------------
// Partition input
// ---------------------------------------------------------------------------

inline Partition partition_from_names(const Lpe& lpe,
                                      const std::vector<std::string>& left,
                                      const std::vector<std::string>& right) {
  Partition p;
  auto resolve = [&](const std::vector<std::string>& names, std::set<std::size_t>& out) {
    for (const auto& n : names) {
      auto idx = lpe.param_index(n);
      if (!idx)
        throw Error(Errc::InvalidPartition, "'" + n + "' is not a parameter of " + lpe.name);
      out.insert(*idx);
    }
  };
  resolve(left, p.left);
  resolve(right, p.right);
  for (std::size_t j = 0; j < lpe.params.size(); ++j)
    if (p.left.count(j) == 0 && p.right.count(j) == 0)
      throw Error(Errc::InvalidPartition,
                  "parameter '" + lpe.params[j].first + "' is on neither side");
  return p;
}

// ---------------------------------------------------------------------------
// Cleave outcome
// ---------------------------------------------------------------------------

// Everything one cleave produces: the plan, both (possibly restricted)
// component processes with their initial vectors, and the composition
// context whose leaves reference left.aut / right.aut.
struct CleaveOutcome {
  CleavePlan plan;
  Lpe left;
  Lpe right;
  std::vector<Value> left_init;
  std::vector<Value> right_init;
  ContextPtr context;
};

inline CleaveOutcome run_cleave(const Lpe& lpe, const std::vector<Value>& init,
                                const Partition& partition, CleaveMode mode,
                                const ExprPtr& invariant = nullptr,
                                bool deadlock_free = false) {
  CleaveOutcome out;
  out.plan = plan_cleave(lpe, partition, mode);
  out.left = induce_component(lpe, out.plan.left);
  out.right = induce_component(lpe, out.plan.right);
  out.left_init = project(init, out.plan.left.params);
  out.right_init = project(init, out.plan.right.params);
  out.context = build_context(lpe, out.plan);
  if (invariant != nullptr) {
    out.left = restrict_lpe(out.left,
                            invariant,
                            component_restriction_set(out.left, out.plan.left, invariant),
                            deadlock_free);
    out.right = restrict_lpe(
        out.right, invariant,
        component_restriction_set(out.right, out.plan.right, invariant), deadlock_free);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comparison pipeline
// ---------------------------------------------------------------------------

struct PipelineRow {
  std::string name;
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t min_states = 0;
  std::size_t min_transitions = 0;
};

struct PipelineResult {
  std::vector<PipelineRow> rows;  // original, component_V, component_W, composition
  bool bisim = false;
  std::size_t depth = 0;
};

// The full workflow: explore the monolith, cleave, explore and minimise the
// components, compose the minimised components and compare against the
// monolith modulo strong bisimilarity.
inline PipelineResult run_pipeline(const Lpe& lpe, const std::vector<Value>& init,
                                   const Partition& partition, CleaveMode mode,
                                   const ExprPtr& invariant = nullptr,
                                   const ExploreLimits& limits = {}) {
  PipelineResult result;
  auto row = [](const std::string& name, const Lts& full, const Lts& reduced) {
    return PipelineRow{name, full.num_states, full.transitions.size(),
                       reduced.num_states, reduced.transitions.size()};
  };

  Lts original = explore(lpe, init, limits);
  MinimiseResult original_min = minimise(original);
  result.rows.push_back(row("original", original, original_min.quotient));

  CleaveOutcome cleave = run_cleave(lpe, init, partition, mode, invariant);
  Lts left = explore(cleave.left, cleave.left_init, limits);
  Lts right = explore(cleave.right, cleave.right_init, limits);
  MinimiseResult left_min = minimise(left);
  MinimiseResult right_min = minimise(right);
  result.rows.push_back(row("component_V", left, left_min.quotient));
  result.rows.push_back(row("component_W", right, right_min.quotient));

  std::map<std::string, Lts> components;
  components.emplace("left.aut", std::move(left_min.quotient));
  components.emplace("right.aut", std::move(right_min.quotient));
  Lts composed = compose(cleave.context, components, limits);
  MinimiseResult composed_min = minimise(composed);
  result.rows.push_back(row("composition", composed, composed_min.quotient));

  BisimVerdict verdict = bisimilar(original, composed);
  result.bisim = verdict.bisimilar;
  result.depth = verdict.depth;
  return result;
}

}  // namespace alp
