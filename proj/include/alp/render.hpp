#pragma once

#include <string>

#include "alp/data.hpp"
#include "alp/lpe.hpp"
#include "alp/parser.hpp"

namespace alp {

// ---------------------------------------------------------------------------
// Expression rendering (minimal parentheses)
// ---------------------------------------------------------------------------

namespace detail {

inline int binop_level(BinaryOp op) {
  switch (op) {
    case BinaryOp::Implies: return 1;
    case BinaryOp::Or: return 2;
    case BinaryOp::And: return 3;
    case BinaryOp::Eq:
    case BinaryOp::Neq:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Plus:
    case BinaryOp::Monus: return 5;
  }
  return 0;
}

inline const char* binop_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Implies: return "=>";
    case BinaryOp::Or: return "||";
    case BinaryOp::And: return "&&";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Neq: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Plus: return "+";
    case BinaryOp::Monus: return "-";
  }
  return "?";
}

inline std::string render_expr_prec(const Expr& e, int min_level) {
  struct Visitor {
    const Expr& expr;
    int min_level;

    std::string operator()(const Expr::Lit& l) const { return to_string(l.value); }
    std::string operator()(const Expr::Var& v) const { return v.name; }

    std::string operator()(const Expr::Unary& u) const {
      return "!" + render_expr_prec(*u.operand, 6);
    }

    std::string operator()(const Expr::Binary& b) const {
      int level = binop_level(b.op);
      bool right_assoc = b.op == BinaryOp::Implies;
      bool non_assoc = level == 4;
      int left_min = level + (right_assoc || non_assoc ? 1 : 0);
      int right_min = level + (right_assoc ? 0 : 1);
      std::string s = render_expr_prec(*b.lhs, left_min) + " " + binop_symbol(b.op) +
                      " " + render_expr_prec(*b.rhs, right_min);
      if (level < min_level) s = "(" + s + ")";
      return s;
    }

    std::string operator()(const Expr::Ite& i) const {
      return "if(" + render_expr_prec(*i.cond, 0) + ", " +
             render_expr_prec(*i.then_branch, 0) + ", " +
             render_expr_prec(*i.else_branch, 0) + ")";
    }
  };
  return std::visit(Visitor{e, min_level}, e.node);
}

}  // namespace detail

inline std::string render_expr(const Expr& e) { return detail::render_expr_prec(e, 0); }
inline std::string render_expr(const ExprPtr& e) { return render_expr(*e); }

// ---------------------------------------------------------------------------
// Process rendering
// ---------------------------------------------------------------------------

inline std::string render_multiaction(const MultiActionExpr& m) {
  if (m.empty()) return "tau";
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i > 0) s += "|";
    s += m[i].label;
    if (!m[i].args.empty()) {
      s += "(";
      for (std::size_t j = 0; j < m[i].args.size(); ++j) {
        if (j > 0) s += ", ";
        s += render_expr(m[i].args[j]);
      }
      s += ")";
    }
  }
  return s;
}

// Renders a process plus its initial values (and optional invariant) in the
// input grammar. Generated labels keep their '#' segments, so component
// processes round-trip only under the allow_generated parser option.
inline std::string render_lpe(const Lpe& lpe, const std::vector<Value>& init,
                              const ExprPtr& inv = nullptr) {
  std::string out;
  for (const auto& s : lpe.sorts) {
    out += "sort " + s.name + " = { ";
    for (std::size_t i = 0; i < s.constructors.size(); ++i) {
      if (i > 0) out += ", ";
      out += s.constructors[i];
    }
    out += " };\n";
  }
  if (!lpe.sorts.empty()) out += "\n";

  for (const auto& a : lpe.actions) {
    out += "act " + a.label;
    for (std::size_t i = 0; i < a.param_sorts.size(); ++i)
      out += (i == 0 ? ": " : " # ") + to_string(a.param_sorts[i]);
    out += ";\n";
  }
  if (!lpe.actions.empty()) out += "\n";

  out += "proc " + lpe.name + "(";
  for (std::size_t i = 0; i < lpe.params.size(); ++i) {
    if (i > 0) out += ", ";
    out += lpe.params[i].first + ": " + to_string(lpe.params[i].second);
  }
  out += ") =\n";
  if (lpe.summands.empty()) {
    // The grammar has no empty process; emit an inert summand instead.
    out += "    false -> tau . " + lpe.name + "(";
    for (std::size_t j = 0; j < lpe.params.size(); ++j) {
      if (j > 0) out += ", ";
      out += lpe.params[j].first;
    }
    out += ");\n";
  }
  for (std::size_t i = 0; i < lpe.summands.size(); ++i) {
    const Summand& sm = lpe.summands[i];
    out += i == 0 ? "    " : "  + ";
    if (!sm.sum_vars.empty()) {
      out += "sum ";
      for (std::size_t j = 0; j < sm.sum_vars.size(); ++j) {
        if (j > 0) out += ", ";
        out += sm.sum_vars[j].first + ": " + to_string(sm.sum_vars[j].second);
      }
      out += " . ";
    }
    out += render_expr(sm.condition) + " -> " + render_multiaction(sm.action) + " . " +
           lpe.name + "(";
    for (std::size_t j = 0; j < sm.updates.size(); ++j) {
      if (j > 0) out += ", ";
      out += render_expr(sm.updates[j]);
    }
    out += ")";
    out += i + 1 == lpe.summands.size() ? ";\n" : "\n";
  }
  out += "\n";

  out += "init " + lpe.name + "(";
  for (std::size_t i = 0; i < init.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(init[i]);
  }
  out += ");\n";

  if (inv != nullptr) out += "inv " + render_expr(inv) + ";\n";
  return out;
}

}  // namespace alp
