#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alp/compose.hpp"
#include "alp/data.hpp"
#include "alp/error.hpp"
#include "alp/explore.hpp"
#include "alp/lpe.hpp"
#include "alp/multiaction.hpp"
#include "alp/render.hpp"

namespace alp {

// ---------------------------------------------------------------------------
// Partitions and separation tuples
// ---------------------------------------------------------------------------

// Parameter index partition. The two sides must cover every parameter and
// may overlap; either side may be empty.
struct Partition {
  std::set<std::size_t> left;   // V
  std::set<std::size_t> right;  // W
};

enum class CleaveMode { Naive, Reduced };

// The recipe for one component: its parameter indices U, independent
// summands K, present summands J, and per shared summand the side-local
// condition, action and synchronisation argument expressions.
struct SeparationTuple {
  bool left_side = true;  // V side?
  std::set<std::size_t> params;       // U
  std::set<std::size_t> independent;  // K
  std::set<std::size_t> present;      // J

  struct SharedPart {
    ExprPtr condition;
    MultiActionExpr action;
    std::vector<ExprPtr> sync_args;
  };
  std::map<std::size_t, SharedPart> shared;  // keyed by J \ K
};

struct CleavePlan {
  Partition partition;
  CleaveMode mode = CleaveMode::Reduced;
  SeparationTuple left;
  SeparationTuple right;

  std::set<std::size_t> shared_indices() const {
    std::set<std::size_t> out;
    for (const auto& [i, part] : left.shared)
      if (right.shared.count(i) != 0) out.insert(i);
    return out;
  }
};

inline std::string sync_label(std::size_t summand, bool left_side) {
  return "sync#" + std::to_string(summand) + (left_side ? "#V" : "#W");
}
inline std::string fused_sync_label(std::size_t summand) {
  return "sync#" + std::to_string(summand);
}
inline constexpr const char* kTagLabel = "tag";

// ---------------------------------------------------------------------------
// Planning
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_var_named(const Expr& e, const std::string& name) {
  const auto* v = std::get_if<Expr::Var>(&e.node);
  return v != nullptr && v->name == name;
}

inline std::set<std::string> names_at(const Lpe& lpe, const std::set<std::size_t>& idxs) {
  std::set<std::string> out;
  for (std::size_t i : idxs) out.insert(lpe.params[i].first);
  return out;
}

inline std::set<std::string> sum_var_names(const Summand& s) {
  std::set<std::string> out;
  for (const auto& [n, _] : s.sum_vars) out.insert(n);
  return out;
}

inline bool subset_of(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline std::set<std::string> action_free_vars(const MultiActionExpr& m) {
  std::set<std::string> out;
  for (const auto& a : m)
    for (const auto& arg : a.args) collect_free_vars(*arg, out);
  return out;
}

// Is summand i independent on side `own`: condition, action and own-side
// updates stay within own parameters plus sum variables, and the other
// side's parameters are updated identically.
inline bool independent_on(const Lpe& lpe, std::size_t i,
                           const std::set<std::size_t>& own,
                           const std::set<std::size_t>& other) {
  const Summand& sm = lpe.summands[i];
  for (std::size_t j : other)
    if (!is_var_named(*sm.updates[j], lpe.params[j].first)) return false;
  std::set<std::string> allowed = names_at(lpe, own);
  allowed.merge(sum_var_names(sm));
  std::set<std::string> used;
  collect_free_vars(*sm.condition, used);
  for (const auto& fv : action_free_vars(sm.action)) used.insert(fv);
  for (std::size_t j : own) collect_free_vars(*sm.updates[j], used);
  return subset_of(used, allowed);
}

struct SideMaterial {
  std::set<std::string> fv;  // over condition, action and own-side updates
};

inline SideMaterial side_material(const Lpe& lpe, std::size_t i,
                                  const SeparationTuple::SharedPart& part,
                                  const std::set<std::size_t>& own) {
  SideMaterial m;
  collect_free_vars(*part.condition, m.fv);
  for (const auto& fv : action_free_vars(part.action)) m.fv.insert(fv);
  for (std::size_t j : own) collect_free_vars(*lpe.summands[i].updates[j], m.fv);
  return m;
}

}  // namespace detail

// Builds the two separation tuples from a parameter partition.
//
// Reduced mode detects independent summands, splits conditions by their
// top-level conjuncts, assigns action events by ownership and synchronises
// only the variables one side reads from the other. Naive mode keeps every
// summand shared with the full condition on both sides and synchronises the
// whole parameter vector plus sum variables.
inline CleavePlan plan_cleave(const Lpe& lpe, const Partition& partition,
                              CleaveMode mode = CleaveMode::Reduced) {
  require_well_formed(lpe);
  std::set<std::size_t> all;
  for (std::size_t j = 0; j < lpe.params.size(); ++j) all.insert(j);
  for (std::size_t j : partition.left)
    if (j >= lpe.params.size())
      throw Error(Errc::InvalidPartition,
                  "parameter index " + std::to_string(j) + " out of range");
  for (std::size_t j : partition.right)
    if (j >= lpe.params.size())
      throw Error(Errc::InvalidPartition,
                  "parameter index " + std::to_string(j) + " out of range");
  std::set<std::size_t> covered = partition.left;
  covered.insert(partition.right.begin(), partition.right.end());
  if (covered != all)
    throw Error(Errc::InvalidPartition,
                "the two sides must cover every parameter index");
  for (const auto& a : lpe.actions)
    if (a.label == kTagLabel || a.label.find('#') != std::string::npos)
      throw Error(Errc::InvalidPartition,
                  "declared action '" + a.label + "' collides with generated labels");

  CleavePlan plan;
  plan.partition = partition;
  plan.mode = mode;
  plan.left.left_side = true;
  plan.right.left_side = false;
  plan.left.params = partition.left;
  plan.right.params = partition.right;

  const std::set<std::size_t>& V = partition.left;
  const std::set<std::size_t>& W = partition.right;

  if (mode == CleaveMode::Reduced) {
    for (std::size_t i = 0; i < lpe.summands.size(); ++i) {
      if (detail::independent_on(lpe, i, V, W))
        plan.left.independent.insert(i);  // both-sides candidates tie-break to V
      else if (detail::independent_on(lpe, i, W, V))
        plan.right.independent.insert(i);
    }
  }

  for (std::size_t i = 0; i < lpe.summands.size(); ++i) {
    if (plan.right.independent.count(i) == 0) plan.left.present.insert(i);
    if (plan.left.independent.count(i) == 0) plan.right.present.insert(i);
  }

  std::set<std::string> v_names = detail::names_at(lpe, V);
  std::set<std::string> w_names = detail::names_at(lpe, W);

  for (std::size_t i = 0; i < lpe.summands.size(); ++i) {
    if (plan.left.independent.count(i) != 0 || plan.right.independent.count(i) != 0)
      continue;
    const Summand& sm = lpe.summands[i];
    std::set<std::string> sums = detail::sum_var_names(sm);
    std::set<std::string> v_scope = v_names;
    v_scope.insert(sums.begin(), sums.end());
    std::set<std::string> w_scope = w_names;
    w_scope.insert(sums.begin(), sums.end());

    SeparationTuple::SharedPart lv;
    SeparationTuple::SharedPart rv;

    if (mode == CleaveMode::Naive) {
      lv.condition = sm.condition;
      rv.condition = sm.condition;
    } else {
      std::vector<ExprPtr> v_conj, w_conj;
      for (const ExprPtr& c : conjuncts(sm.condition)) {
        std::set<std::string> fv = free_vars(c);
        if (detail::subset_of(fv, v_scope))
          v_conj.push_back(c);
        else if (detail::subset_of(fv, w_scope))
          w_conj.push_back(c);
        else
          v_conj.push_back(c);  // mixed conjuncts tie-break to V
      }
      lv.condition = conjunction(v_conj);
      rv.condition = conjunction(w_conj);
    }

    for (const ActionExpr& a : sm.action) {
      std::set<std::string> fv;
      for (const auto& arg : a.args) collect_free_vars(*arg, fv);
      if (detail::subset_of(fv, v_scope))
        lv.action.push_back(a);
      else if (detail::subset_of(fv, w_scope))
        rv.action.push_back(a);
      else
        lv.action.push_back(a);  // mixed events tie-break to V
    }

    std::vector<ExprPtr> sync_args;
    if (mode == CleaveMode::Naive) {
      for (const auto& [n, s] : lpe.params) sync_args.push_back(var(n));
      for (const auto& [n, s] : sm.sum_vars) sync_args.push_back(var(n));
    } else {
      detail::SideMaterial mv = detail::side_material(lpe, i, lv, V);
      detail::SideMaterial mw = detail::side_material(lpe, i, rv, W);
      std::set<std::string> taken;
      for (const auto& [n, s] : sm.sum_vars)
        if (mv.fv.count(n) != 0 && mw.fv.count(n) != 0 && taken.insert(n).second)
          sync_args.push_back(var(n));
      for (std::size_t j = 0; j < lpe.params.size(); ++j) {
        const std::string& n = lpe.params[j].first;
        if (W.count(j) != 0 && mv.fv.count(n) != 0 && taken.insert(n).second)
          sync_args.push_back(var(n));
      }
      for (std::size_t j = 0; j < lpe.params.size(); ++j) {
        const std::string& n = lpe.params[j].first;
        if (V.count(j) != 0 && mw.fv.count(n) != 0 && taken.insert(n).second)
          sync_args.push_back(var(n));
      }
    }
    lv.sync_args = sync_args;
    rv.sync_args = std::move(sync_args);

    plan.left.shared.emplace(i, std::move(lv));
    plan.right.shared.emplace(i, std::move(rv));
  }

  return plan;
}

// ---------------------------------------------------------------------------
// Component induction
// ---------------------------------------------------------------------------

// The component process induced by one separation tuple. Shared summands
// additionally sum over the missing parameters and carry a synchronisation
// action; independent summands carry the tag label. Summands are kept in
// original index order (ascending over J).
//
// `shared_keep` names variables that must stay bound in shared summands even
// when unused, so that a later restriction of those summands stays in scope.
inline Lpe induce_component(const Lpe& lpe, const SeparationTuple& tuple,
                            const std::set<std::string>& shared_keep = {}) {
  Lpe out;
  out.name = lpe.name + (tuple.left_side ? "_V" : "_W");
  out.sorts = lpe.sorts;
  for (std::size_t j : tuple.params) out.params.push_back(lpe.params[j]);

  std::set<std::size_t> complement;
  for (std::size_t j = 0; j < lpe.params.size(); ++j)
    if (tuple.params.count(j) == 0) complement.insert(j);

  SortTable sorts = lpe.sort_table();
  std::set<std::string> used_labels;
  std::map<std::size_t, std::vector<Sort>> sync_sorts;
  bool any_tag = false;

  for (std::size_t i : tuple.present) {
    const Summand& orig = lpe.summands[i];
    Summand sm;
    std::vector<std::pair<std::string, Sort>> binders;
    if (tuple.independent.count(i) != 0) {
      binders = orig.sum_vars;
      sm.condition = orig.condition;
      sm.action = orig.action;
      sm.action.push_back(ActionExpr{kTagLabel, {}});
      any_tag = true;
    } else {
      const auto& part = tuple.shared.at(i);
      binders = orig.sum_vars;
      for (std::size_t j : complement) binders.push_back(lpe.params[j]);
      sm.condition = part.condition;
      sm.action = part.action;
      sm.action.push_back(ActionExpr{sync_label(i, tuple.left_side), part.sync_args});

      TypeEnv env;
      for (const auto& [n, s] : lpe.params) env[n] = s;
      for (const auto& [n, s] : orig.sum_vars) env[n] = s;
      std::vector<Sort>& arg_sorts = sync_sorts[i];
      for (const ExprPtr& a : part.sync_args)
        arg_sorts.push_back(type_of(*a, env, sorts));
    }
    for (std::size_t j : tuple.params) sm.updates.push_back(orig.updates[j]);

    // Sum operators over variables that do not occur freely are omitted.
    std::set<std::string> used;
    collect_free_vars(*sm.condition, used);
    for (const auto& a : sm.action)
      for (const auto& arg : a.args) collect_free_vars(*arg, used);
    for (const auto& u : sm.updates) collect_free_vars(*u, used);
    if (tuple.independent.count(i) == 0)
      used.insert(shared_keep.begin(), shared_keep.end());
    for (auto& [n, s] : binders)
      if (used.count(n) != 0) sm.sum_vars.emplace_back(std::move(n), std::move(s));

    for (const auto& a : sm.action) used_labels.insert(a.label);
    out.summands.push_back(std::move(sm));
  }

  for (const auto& decl : lpe.actions)
    if (used_labels.count(decl.label) != 0) out.actions.push_back(decl);
  for (const auto& [i, arg_sorts] : sync_sorts)
    out.actions.push_back({sync_label(i, tuple.left_side), arg_sorts});
  if (any_tag) out.actions.push_back({kTagLabel, {}});
  return out;
}

// ---------------------------------------------------------------------------
// Composition context
// ---------------------------------------------------------------------------

// The synchronisation context: fuse the paired sync actions, hide the fused
// labels, allow exactly the original label multisets (tagged for independent
// summands) and hide the tag on top.
inline ContextPtr build_context(const Lpe& lpe, const CleavePlan& plan,
                                const std::string& left_id = "left.aut",
                                const std::string& right_id = "right.aut") {
  std::set<std::size_t> shared = plan.shared_indices();

  std::vector<CommRule> rules;
  std::set<std::string> fused;
  for (std::size_t i : shared) {
    CommRule r;
    r.lhs.add(Event{sync_label(i, true), {}});
    r.lhs.add(Event{sync_label(i, false), {}});
    r.result = fused_sync_label(i);
    rules.push_back(std::move(r));
    fused.insert(fused_sync_label(i));
  }

  AllowSet allowed;
  for (const Summand& sm : lpe.summands) {
    ActionMultiset labels;
    for (const auto& a : sm.action) labels.add(Event{a.label, {}});
    allowed.insert(labels);
  }
  for (const auto& tuple : {plan.left, plan.right})
    for (std::size_t i : tuple.independent) {
      ActionMultiset labels;
      for (const auto& a : lpe.summands[i].action) labels.add(Event{a.label, {}});
      labels.add(Event{kTagLabel, {}});
      allowed.insert(labels);
    }

  ContextPtr inner = ctx_par(ctx_leaf(left_id), ctx_leaf(right_id));
  inner = ctx_comm(CommSet(std::move(rules)), std::move(inner));
  inner = ctx_hide(std::move(fused), std::move(inner));
  inner = ctx_allow(std::move(allowed), std::move(inner));
  return ctx_hide({kTagLabel}, std::move(inner));
}

// ---------------------------------------------------------------------------
// Requirement checking
// ---------------------------------------------------------------------------

struct CheckEntry {
  bool pass = true;
  std::string reason;
};

struct CleaveReport {
  CheckEntry req1;
  std::map<std::size_t, CheckEntry> req2;
  std::map<std::size_t, CheckEntry> req3;
  std::map<std::size_t, CheckEntry> req4;

  bool all_pass() const {
    if (!req1.pass) return false;
    for (const auto* m : {&req2, &req3, &req4})
      for (const auto& [i, e] : *m)
        if (!e.pass) return false;
    return true;
  }
};

namespace detail {

inline bool expr_in(const ExprPtr& e, const std::vector<ExprPtr>& pool) {
  for (const auto& p : pool)
    if (expr_equal(*e, *p)) return true;
  return false;
}

inline bool action_items_partition(const MultiActionExpr& whole,
                                   const MultiActionExpr& a, const MultiActionExpr& b) {
  std::vector<const ActionExpr*> pool;
  for (const auto& x : a) pool.push_back(&x);
  for (const auto& x : b) pool.push_back(&x);
  if (pool.size() != whole.size()) return false;
  std::vector<bool> used(pool.size(), false);
  for (const auto& item : whole) {
    bool matched = false;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (used[k] || pool[k]->label != item.label ||
          pool[k]->args.size() != item.args.size())
        continue;
      bool eq = true;
      for (std::size_t j = 0; j < item.args.size(); ++j)
        if (!expr_equal(*pool[k]->args[j], *item.args[j])) {
          eq = false;
          break;
        }
      if (eq) {
        used[k] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace detail

// Static approximation of the cleave requirements. REQ1 and REQ2 are exact;
// REQ3 holds when the side conditions are made of the original conjuncts,
// jointly covering them, and the action events partition the original ones;
// REQ4 holds when both sync argument lists are identical and cover every
// cross-side variable either side reads.
inline CleaveReport check_cleave_syntactic(const Lpe& lpe, const CleavePlan& plan) {
  CleaveReport report;
  const std::set<std::size_t>& V = plan.left.params;
  const std::set<std::size_t>& W = plan.right.params;

  std::set<std::size_t> all;
  for (std::size_t i = 0; i < lpe.summands.size(); ++i) all.insert(i);
  {
    std::set<std::size_t> jv_expect, jw_expect;
    for (std::size_t i : all) {
      if (plan.right.independent.count(i) == 0) jv_expect.insert(i);
      if (plan.left.independent.count(i) == 0) jw_expect.insert(i);
    }
    if (plan.left.present != jv_expect || plan.right.present != jw_expect)
      report.req1 = {false, "present summand sets must be I minus the other side's independent set"};
    else if (!std::includes(plan.left.present.begin(), plan.left.present.end(),
                            plan.left.independent.begin(), plan.left.independent.end()) ||
             !std::includes(plan.right.present.begin(), plan.right.present.end(),
                            plan.right.independent.begin(), plan.right.independent.end()))
      report.req1 = {false, "independent summands must be present in their component"};
  }

  for (const auto* tuple : {&plan.left, &plan.right}) {
    const std::set<std::size_t>& own = tuple->left_side ? V : W;
    const std::set<std::size_t>& other = tuple->left_side ? W : V;
    for (std::size_t i : tuple->independent) {
      CheckEntry entry;
      const Summand& sm = lpe.summands[i];
      for (std::size_t j : other)
        if (!detail::is_var_named(*sm.updates[j], lpe.params[j].first)) {
          entry = {false, "update of parameter '" + lpe.params[j].first +
                              "' is not the identity"};
          break;
        }
      if (entry.pass && !detail::independent_on(lpe, i, own, other))
        entry = {false, "condition, action or own updates leave the component scope"};
      report.req2[i] = std::move(entry);
    }
  }

  for (std::size_t i : plan.shared_indices()) {
    const Summand& sm = lpe.summands[i];
    const auto& lv = plan.left.shared.at(i);
    const auto& rv = plan.right.shared.at(i);

    CheckEntry r3;
    std::vector<ExprPtr> orig_conj = conjuncts(sm.condition);
    for (const auto* side : {&lv, &rv}) {
      for (const ExprPtr& c : conjuncts(side->condition))
        if (!detail::expr_in(c, orig_conj)) {
          r3 = {false, "condition conjunct '" + render_expr(c) +
                           "' does not occur in the original condition"};
          break;
        }
      if (!r3.pass) break;
    }
    if (r3.pass) {
      std::vector<ExprPtr> both = conjuncts(lv.condition);
      for (const ExprPtr& c : conjuncts(rv.condition)) both.push_back(c);
      for (const ExprPtr& c : orig_conj)
        if (!detail::expr_in(c, both)) {
          r3 = {false, "original conjunct '" + render_expr(c) +
                           "' is assigned to neither side"};
          break;
        }
    }
    if (r3.pass && !detail::action_items_partition(sm.action, lv.action, rv.action))
      r3 = {false, "action events do not partition the original multi-action"};
    report.req3[i] = std::move(r3);

    CheckEntry r4;
    if (lv.sync_args.size() != rv.sync_args.size())
      r4 = {false, "sync argument lists differ in length"};
    else
      for (std::size_t k = 0; k < lv.sync_args.size(); ++k)
        if (!expr_equal(*lv.sync_args[k], *rv.sync_args[k])) {
          r4 = {false, "sync argument lists differ syntactically"};
          break;
        }
    if (r4.pass) {
      detail::SideMaterial mv = detail::side_material(lpe, i, lv, V);
      detail::SideMaterial mw = detail::side_material(lpe, i, rv, W);
      std::set<std::string> synced;
      for (const ExprPtr& a : lv.sync_args)
        if (const auto* v = std::get_if<Expr::Var>(&a->node)) synced.insert(v->name);
      auto missing = [&](const std::string& n) { return synced.count(n) == 0; };
      for (std::size_t j = 0; j < lpe.params.size() && r4.pass; ++j) {
        const std::string& n = lpe.params[j].first;
        if (W.count(j) != 0 && mv.fv.count(n) != 0 && missing(n))
          r4 = {false, "parameter '" + n + "' is read by the V side but not synchronised"};
        else if (V.count(j) != 0 && mw.fv.count(n) != 0 && missing(n))
          r4 = {false, "parameter '" + n + "' is read by the W side but not synchronised"};
      }
      for (const auto& [n, s] : sm.sum_vars)
        if (r4.pass && mv.fv.count(n) != 0 && mw.fv.count(n) != 0 && missing(n))
          r4 = {false, "sum variable '" + n + "' occurs on both sides but is not synchronised"};
    }
    report.req4[i] = std::move(r4);
  }

  return report;
}

// ---------------------------------------------------------------------------
// Semantic requirement checking (bounded enumeration)
// ---------------------------------------------------------------------------

struct SemanticReport {
  std::map<std::size_t, CheckEntry> req3;
  std::map<std::size_t, CheckEntry> req4;

  bool all_pass() const {
    for (const auto* m : {&req3, &req4})
      for (const auto& [i, e] : *m)
        if (!e.pass) return false;
    return true;
  }
};

namespace detail {

template <typename Fn>
void for_each_assignment(const std::vector<std::pair<std::string, Sort>>& vars,
                         std::uint64_t nat_bound, Fn&& fn) {
  std::vector<std::vector<Value>> domains;
  domains.reserve(vars.size());
  for (const auto& [n, s] : vars) domains.push_back(enumerate_sort(s, nat_bound));
  std::vector<std::size_t> idx(vars.size(), 0);
  std::vector<Value> current(vars.size());
  while (true) {
    for (std::size_t i = 0; i < vars.size(); ++i) current[i] = domains[i][idx[i]];
    fn(current);
    std::size_t k = vars.size();
    while (k > 0) {
      --k;
      if (++idx[k] < domains[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (vars.empty()) return;
  }
}

inline std::string values_key(const std::vector<Value>& vals) {
  std::string key;
  for (const auto& v : vals) {
    key += to_string(v);
    key += ',';
  }
  return key;
}

inline std::string describe_binding(const std::vector<std::pair<std::string, Sort>>& vars,
                                    const std::vector<Value>& vals) {
  std::string s = "(";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i > 0) s += ", ";
    s += vars[i].first + "=" + to_string(vals[i]);
  }
  return s + ")";
}

struct WorkBudget {
  std::uint64_t used = 0;
  std::uint64_t limit = 0;

  void charge(std::uint64_t n = 1) {
    used += n;
    if (used > limit)
      throw Error(Errc::DomainTooLarge,
                  "semantic check exceeds the evaluation budget of " +
                      std::to_string(limit));
  }
};

}  // namespace detail

// Checks REQ3 and REQ4 directly against their quantified definitions by
// enumerating all parameter and sum values over bounded domains. Reports the
// first counterexample per failed requirement.
inline SemanticReport check_cleave_semantic(const Lpe& lpe, const CleavePlan& plan,
                                            std::uint64_t nat_bound,
                                            std::uint64_t budget = 50'000'000) {
  SemanticReport report;
  detail::WorkBudget work{0, budget};
  SortTable sorts = lpe.sort_table();

  const std::set<std::size_t>& V = plan.left.params;
  const std::set<std::size_t>& W = plan.right.params;
  std::set<std::size_t> w_minus_v, v_minus_w;
  for (std::size_t j : W)
    if (V.count(j) == 0) w_minus_v.insert(j);
  for (std::size_t j : V)
    if (W.count(j) == 0) v_minus_w.insert(j);

  auto params_at = [&](const std::set<std::size_t>& idxs) {
    return project(lpe.params, idxs);
  };
  std::vector<std::pair<std::string, Sort>> v_params = params_at(V);
  std::vector<std::pair<std::string, Sort>> w_params = params_at(W);
  std::vector<std::pair<std::string, Sort>> wmv_params = params_at(w_minus_v);
  std::vector<std::pair<std::string, Sort>> vmw_params = params_at(v_minus_w);

  auto bind_all = [](Env& env, const std::vector<std::pair<std::string, Sort>>& vars,
                     const std::vector<Value>& vals) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      env.bind(vars[i].first, vars[i].second, vals[i]);
  };

  for (std::size_t r : plan.shared_indices()) {
    const Summand& sm = lpe.summands[r];
    const auto& lv = plan.left.shared.at(r);
    const auto& rv = plan.right.shared.at(r);

    auto eval_sync = [&](const std::vector<ExprPtr>& args, const Env& env) {
      std::vector<Value> out;
      out.reserve(args.size());
      for (const auto& a : args) out.push_back(eval(*a, env));
      return out;
    };
    auto eval_updates = [&](const std::set<std::size_t>& side, const Env& env) {
      std::vector<std::string> out;
      for (std::size_t j : side) out.push_back(to_string(eval(*sm.updates[j], env)));
      return out;
    };

    // REQ3: every original transition is matched by a synchronising pair.
    CheckEntry r3;
    detail::for_each_assignment(lpe.params, nat_bound, [&](const std::vector<Value>& iota) {
      if (!r3.pass) return;
      Env base;
      bind_all(base, lpe.params, iota);
      detail::for_each_assignment(sm.sum_vars, nat_bound, [&](const std::vector<Value>& l) {
        if (!r3.pass) return;
        work.charge();
        Env env = base;
        bind_all(env, sm.sum_vars, l);
        if (!eval_bool(*sm.condition, env)) return;
        std::string where = detail::describe_binding(lpe.params, iota) +
                            (sm.sum_vars.empty()
                                 ? ""
                                 : " with " + detail::describe_binding(sm.sum_vars, l));
        if (!eval_bool(*lv.condition, env) || !eval_bool(*rv.condition, env)) {
          r3 = {false, "component conditions do not cover the original at " + where};
          return;
        }
        if (eval_sync(lv.sync_args, env) != eval_sync(rv.sync_args, env)) {
          r3 = {false, "sync vectors disagree at " + where};
          return;
        }
        ActionMultiset combined =
            madd(interpret_multiaction(lv.action, env), interpret_multiaction(rv.action, env));
        if (combined != interpret_multiaction(sm.action, env))
          r3 = {false, "split actions do not recombine to the original at " + where};
      });
    });
    report.req3[r] = std::move(r3);

    // REQ4: every synchronising pair is matched by an original transition.
    struct Cand {
      ActionMultiset act;
      std::vector<std::string> g_vals;
      std::string who;
    };
    using HKeyed = std::map<std::string, std::vector<Cand>>;

    auto build_side = [&](const std::vector<std::pair<std::string, Sort>>& own,
                          const std::vector<std::pair<std::string, Sort>>& foreign,
                          const SeparationTuple::SharedPart& part,
                          const std::set<std::size_t>& update_side) {
      std::map<std::string, HKeyed> table;
      detail::for_each_assignment(own, nat_bound, [&](const std::vector<Value>& mine) {
        HKeyed& slot = table[detail::values_key(mine)];
        Env base;
        bind_all(base, own, mine);
        detail::for_each_assignment(foreign, nat_bound, [&](const std::vector<Value>& theirs) {
          Env env = base;
          bind_all(env, foreign, theirs);
          detail::for_each_assignment(sm.sum_vars, nat_bound,
                                      [&](const std::vector<Value>& l) {
            work.charge();
            Env full = env;
            bind_all(full, sm.sum_vars, l);
            if (!eval_bool(*part.condition, full)) return;
            std::vector<Value> h = eval_sync(part.sync_args, full);
            Cand cand;
            cand.act = interpret_multiaction(part.action, full);
            cand.g_vals = eval_updates(update_side, full);
            cand.who = detail::describe_binding(foreign, theirs);
            if (!sm.sum_vars.empty())
              cand.who += " " + detail::describe_binding(sm.sum_vars, l);
            slot[detail::values_key(h)].push_back(std::move(cand));
          });
        });
      });
      return table;
    };

    auto cands_v = build_side(v_params, wmv_params, lv, V);
    auto cands_w = build_side(w_params, vmw_params, rv, W);

    CheckEntry r4;
    detail::for_each_assignment(lpe.params, nat_bound, [&](const std::vector<Value>& iota) {
      if (!r4.pass) return;
      auto itv = cands_v.find(detail::values_key(project(iota, V)));
      auto itw = cands_w.find(detail::values_key(project(iota, W)));
      if (itv == cands_v.end() || itw == cands_w.end()) return;

      // All original moves from iota, computed once on demand.
      struct Move {
        ActionMultiset act;
        std::vector<std::string> gv;
        std::vector<std::string> gw;
      };
      std::optional<std::vector<Move>> moves;
      auto original_moves = [&]() -> const std::vector<Move>& {
        if (!moves) {
          moves.emplace();
          Env base;
          bind_all(base, lpe.params, iota);
          detail::for_each_assignment(sm.sum_vars, nat_bound,
                                      [&](const std::vector<Value>& l) {
            work.charge();
            Env env = base;
            bind_all(env, sm.sum_vars, l);
            if (!eval_bool(*sm.condition, env)) return;
            moves->push_back({interpret_multiaction(sm.action, env),
                              eval_updates(V, env), eval_updates(W, env)});
          });
        }
        return *moves;
      };

      for (const auto& [hkey, as] : itv->second) {
        if (!r4.pass) break;
        auto match = itw->second.find(hkey);
        if (match == itw->second.end()) continue;
        for (const Cand& a : as) {
          if (!r4.pass) break;
          for (const Cand& b : match->second) {
            work.charge();
            ActionMultiset combined = madd(a.act, b.act);
            bool found = false;
            for (const Move& m : original_moves())
              if (m.act == combined && m.gv == a.g_vals && m.gw == b.g_vals) {
                found = true;
                break;
              }
            if (!found) {
              r4 = {false,
                    "synchronising pair has no original counterpart at " +
                        detail::describe_binding(lpe.params, iota) + "; V side " +
                        a.who + ", W side " + b.who};
              break;
            }
          }
        }
      }
    });
    report.req4[r] = std::move(r4);
  }

  return report;
}

}  // namespace alp
