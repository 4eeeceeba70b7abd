#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "alp/error.hpp"

namespace alp {

// ---------------------------------------------------------------------------
// Sorts
// ---------------------------------------------------------------------------

enum class SortKind { Bool, Nat, Enum, Unit };

// A data sort. Enum sorts carry their name and constructor list; the other
// kinds are structural. Unit is the singleton sort used for data-less actions.
struct Sort {
  SortKind kind = SortKind::Bool;
  std::string name;                        // Enum only
  std::vector<std::string> constructors;   // Enum only, non-empty, duplicate-free

  static Sort boolean() { return Sort{SortKind::Bool, {}, {}}; }
  static Sort nat() { return Sort{SortKind::Nat, {}, {}}; }
  static Sort unit() { return Sort{SortKind::Unit, {}, {}}; }
  static Sort enumeration(std::string n, std::vector<std::string> ctors) {
    return Sort{SortKind::Enum, std::move(n), std::move(ctors)};
  }

  friend bool operator==(const Sort& a, const Sort& b) {
    if (a.kind != b.kind) return false;
    return a.kind != SortKind::Enum || a.name == b.name;
  }
  friend bool operator!=(const Sort& a, const Sort& b) { return !(a == b); }
};

inline std::string to_string(const Sort& s) {
  switch (s.kind) {
    case SortKind::Bool: return "Bool";
    case SortKind::Nat: return "Nat";
    case SortKind::Unit: return "Unit";
    case SortKind::Enum: return s.name;
  }
  return "?";
}

// Maps enum sort names to their full definitions.
using SortTable = std::map<std::string, Sort>;

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct EnumValue {
  std::string sort;      // sort name; may be empty for values read back from files
  std::uint32_t index = 0;
  std::string name;      // constructor name; the identity used for comparison

  friend bool operator==(const EnumValue& a, const EnumValue& b) {
    return a.name == b.name;
  }
  friend bool operator<(const EnumValue& a, const EnumValue& b) {
    return a.name < b.name;
  }
};

struct UnitValue {
  friend bool operator==(UnitValue, UnitValue) { return true; }
  friend bool operator<(UnitValue, UnitValue) { return false; }
};

// Semantic values: closed expressions evaluate to exactly one of these.
using Value = std::variant<bool, std::uint64_t, EnumValue, UnitValue>;

inline std::string to_string(const Value& v) {
  struct {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::uint64_t n) const { return std::to_string(n); }
    std::string operator()(const EnumValue& e) const { return e.name; }
    std::string operator()(UnitValue) const { return "unit"; }
  } r;
  return std::visit(r, v);
}

inline Sort sort_of(const Value& v, const SortTable& sorts) {
  if (std::holds_alternative<bool>(v)) return Sort::boolean();
  if (std::holds_alternative<std::uint64_t>(v)) return Sort::nat();
  if (std::holds_alternative<UnitValue>(v)) return Sort::unit();
  const auto& e = std::get<EnumValue>(v);
  auto it = sorts.find(e.sort);
  if (it == sorts.end())
    throw Error(Errc::SortMismatch, "unknown enum sort '" + e.sort + "'");
  return it->second;
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnaryOp { Not };
enum class BinaryOp { And, Or, Implies, Eq, Neq, Lt, Le, Gt, Ge, Plus, Monus };

struct Expr {
  struct Lit {
    Value value;
  };
  struct Var {
    std::string name;
  };
  struct Unary {
    UnaryOp op;
    ExprPtr operand;
  };
  struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct Ite {
    ExprPtr cond;
    ExprPtr then_branch;
    ExprPtr else_branch;
  };

  std::variant<Lit, Var, Unary, Binary, Ite> node;
  int line = 0;  // 0 = no source position (programmatic expression)
  int column = 0;
};

inline ExprPtr lit(Value v, int line = 0, int col = 0) {
  return std::make_shared<Expr>(Expr{Expr::Lit{std::move(v)}, line, col});
}
inline ExprPtr lit_bool(bool b) { return lit(Value{b}); }
inline ExprPtr lit_nat(std::uint64_t n) { return lit(Value{n}); }
inline ExprPtr var(std::string name, int line = 0, int col = 0) {
  return std::make_shared<Expr>(Expr{Expr::Var{std::move(name)}, line, col});
}
inline ExprPtr unary(UnaryOp op, ExprPtr e, int line = 0, int col = 0) {
  return std::make_shared<Expr>(Expr{Expr::Unary{op, std::move(e)}, line, col});
}
inline ExprPtr binary(BinaryOp op, ExprPtr l, ExprPtr r, int line = 0, int col = 0) {
  return std::make_shared<Expr>(Expr{Expr::Binary{op, std::move(l), std::move(r)}, line, col});
}
inline ExprPtr ite(ExprPtr c, ExprPtr t, ExprPtr e, int line = 0, int col = 0) {
  return std::make_shared<Expr>(
      Expr{Expr::Ite{std::move(c), std::move(t), std::move(e)}, line, col});
}

inline std::string at_location(const Expr& e) {
  if (e.line == 0) return "";
  return " at " + std::to_string(e.line) + ":" + std::to_string(e.column);
}

// ---------------------------------------------------------------------------
// Environments
// ---------------------------------------------------------------------------

// Finite map from variable name to sorted value. Environments play the role
// of substitutions: states are canonical value vectors, never syntax.
class Env {
public:
  void bind(const std::string& name, Sort sort, Value value) {
    bindings_[name] = {std::move(sort), std::move(value)};
  }

  const std::pair<Sort, Value>* find(const std::string& name) const {
    auto it = bindings_.find(name);
    return it == bindings_.end() ? nullptr : &it->second;
  }

  bool contains(const std::string& name) const {
    return bindings_.count(name) != 0;
  }

  const Value& value_of(const std::string& name) const {
    const auto* b = find(name);
    if (b == nullptr)
      throw Error(Errc::UnboundVariable, "unbound variable '" + name + "'");
    return b->second;
  }

  std::size_t size() const { return bindings_.size(); }

  const std::map<std::string, std::pair<Sort, Value>>& bindings() const {
    return bindings_;
  }

private:
  std::map<std::string, std::pair<Sort, Value>> bindings_;
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline bool value_bool(const Value& v, const Expr& where) {
  if (const bool* b = std::get_if<bool>(&v)) return *b;
  throw Error(Errc::SortMismatch, "expected Bool operand" + at_location(where));
}

inline std::uint64_t value_nat(const Value& v, const Expr& where) {
  if (const std::uint64_t* n = std::get_if<std::uint64_t>(&v)) return *n;
  throw Error(Errc::SortMismatch, "expected Nat operand" + at_location(where));
}

inline bool values_comparable(const Value& a, const Value& b) {
  return a.index() == b.index();
}

}  // namespace detail

// Evaluates a well-typed expression whose free variables are all bound in
// `env`. Total and deterministic; monus floors at zero.
inline Value eval(const Expr& e, const Env& env) {
  struct Visitor {
    const Expr& expr;
    const Env& env;

    Value operator()(const Expr::Lit& l) const { return l.value; }

    Value operator()(const Expr::Var& v) const {
      const auto* b = env.find(v.name);
      if (b == nullptr)
        throw Error(Errc::UnboundVariable,
                    "unbound variable '" + v.name + "'" + at_location(expr));
      return b->second;
    }

    Value operator()(const Expr::Unary& u) const {
      Value operand = eval(*u.operand, env);
      return Value{!detail::value_bool(operand, expr)};
    }

    Value operator()(const Expr::Binary& b) const {
      using detail::value_bool;
      using detail::value_nat;
      switch (b.op) {
        case BinaryOp::And:
          return Value{value_bool(eval(*b.lhs, env), expr) &&
                       value_bool(eval(*b.rhs, env), expr)};
        case BinaryOp::Or:
          return Value{value_bool(eval(*b.lhs, env), expr) ||
                       value_bool(eval(*b.rhs, env), expr)};
        case BinaryOp::Implies:
          return Value{!value_bool(eval(*b.lhs, env), expr) ||
                       value_bool(eval(*b.rhs, env), expr)};
        case BinaryOp::Eq:
        case BinaryOp::Neq: {
          Value l = eval(*b.lhs, env);
          Value r = eval(*b.rhs, env);
          if (!detail::values_comparable(l, r))
            throw Error(Errc::SortMismatch,
                        "equality on differently sorted values" + at_location(expr));
          bool eq = l == r;
          return Value{b.op == BinaryOp::Eq ? eq : !eq};
        }
        case BinaryOp::Lt:
          return Value{value_nat(eval(*b.lhs, env), expr) <
                       value_nat(eval(*b.rhs, env), expr)};
        case BinaryOp::Le:
          return Value{value_nat(eval(*b.lhs, env), expr) <=
                       value_nat(eval(*b.rhs, env), expr)};
        case BinaryOp::Gt:
          return Value{value_nat(eval(*b.lhs, env), expr) >
                       value_nat(eval(*b.rhs, env), expr)};
        case BinaryOp::Ge:
          return Value{value_nat(eval(*b.lhs, env), expr) >=
                       value_nat(eval(*b.rhs, env), expr)};
        case BinaryOp::Plus:
          return Value{value_nat(eval(*b.lhs, env), expr) +
                       value_nat(eval(*b.rhs, env), expr)};
        case BinaryOp::Monus: {
          std::uint64_t l = value_nat(eval(*b.lhs, env), expr);
          std::uint64_t r = value_nat(eval(*b.rhs, env), expr);
          return Value{l > r ? l - r : 0};
        }
      }
      throw Error(Errc::SortMismatch, "bad binary operator");
    }

    Value operator()(const Expr::Ite& i) const {
      return detail::value_bool(eval(*i.cond, env), expr) ? eval(*i.then_branch, env)
                                                          : eval(*i.else_branch, env);
    }
  };
  return std::visit(Visitor{e, env}, e.node);
}

inline bool eval_bool(const Expr& e, const Env& env) {
  return detail::value_bool(eval(e, env), e);
}

// ---------------------------------------------------------------------------
// Free variables, substitution, structural equality
// ---------------------------------------------------------------------------

inline void collect_free_vars(const Expr& e, std::set<std::string>& out) {
  struct Visitor {
    std::set<std::string>& out;
    void operator()(const Expr::Lit&) const {}
    void operator()(const Expr::Var& v) const { out.insert(v.name); }
    void operator()(const Expr::Unary& u) const { collect_free_vars(*u.operand, out); }
    void operator()(const Expr::Binary& b) const {
      collect_free_vars(*b.lhs, out);
      collect_free_vars(*b.rhs, out);
    }
    void operator()(const Expr::Ite& i) const {
      collect_free_vars(*i.cond, out);
      collect_free_vars(*i.then_branch, out);
      collect_free_vars(*i.else_branch, out);
    }
  };
  std::visit(Visitor{out}, e.node);
}

// The expression language has no binders, so every occurrence is free.
inline std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  collect_free_vars(e, out);
  return out;
}

inline std::set<std::string> free_vars(const ExprPtr& e) { return free_vars(*e); }

// Capture is impossible (no binders); plain syntactic replacement.
inline ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& repl) {
  struct Visitor {
    const ExprPtr& original;
    const std::map<std::string, ExprPtr>& repl;

    ExprPtr operator()(const Expr::Lit&) const { return original; }
    ExprPtr operator()(const Expr::Var& v) const {
      auto it = repl.find(v.name);
      return it == repl.end() ? original : it->second;
    }
    ExprPtr operator()(const Expr::Unary& u) const {
      return unary(u.op, substitute(u.operand, repl), original->line, original->column);
    }
    ExprPtr operator()(const Expr::Binary& b) const {
      return binary(b.op, substitute(b.lhs, repl), substitute(b.rhs, repl),
                    original->line, original->column);
    }
    ExprPtr operator()(const Expr::Ite& i) const {
      return ite(substitute(i.cond, repl), substitute(i.then_branch, repl),
                 substitute(i.else_branch, repl), original->line, original->column);
    }
  };
  return std::visit(Visitor{e, repl}, e->node);
}

inline bool expr_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  struct Visitor {
    const Expr& other;
    bool operator()(const Expr::Lit& l) const {
      return l.value == std::get<Expr::Lit>(other.node).value;
    }
    bool operator()(const Expr::Var& v) const {
      return v.name == std::get<Expr::Var>(other.node).name;
    }
    bool operator()(const Expr::Unary& u) const {
      const auto& o = std::get<Expr::Unary>(other.node);
      return u.op == o.op && expr_equal(*u.operand, *o.operand);
    }
    bool operator()(const Expr::Binary& b) const {
      const auto& o = std::get<Expr::Binary>(other.node);
      return b.op == o.op && expr_equal(*b.lhs, *o.lhs) && expr_equal(*b.rhs, *o.rhs);
    }
    bool operator()(const Expr::Ite& i) const {
      const auto& o = std::get<Expr::Ite>(other.node);
      return expr_equal(*i.cond, *o.cond) &&
             expr_equal(*i.then_branch, *o.then_branch) &&
             expr_equal(*i.else_branch, *o.else_branch);
    }
  };
  return std::visit(Visitor{b}, a.node);
}

inline bool is_literal_true(const Expr& e) {
  const auto* l = std::get_if<Expr::Lit>(&e.node);
  if (l == nullptr) return false;
  const bool* b = std::get_if<bool>(&l->value);
  return b != nullptr && *b;
}

// Top-level conjuncts, recursively flattened through `&&`; literal `true`
// conjuncts are dropped, so `true` has no conjuncts at all.
inline void collect_conjuncts(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (const auto* b = std::get_if<Expr::Binary>(&e->node); b && b->op == BinaryOp::And) {
    collect_conjuncts(b->lhs, out);
    collect_conjuncts(b->rhs, out);
    return;
  }
  if (!is_literal_true(*e)) out.push_back(e);
}

inline std::vector<ExprPtr> conjuncts(const ExprPtr& e) {
  std::vector<ExprPtr> out;
  collect_conjuncts(e, out);
  return out;
}

inline ExprPtr conjunction(const std::vector<ExprPtr>& cs) {
  if (cs.empty()) return lit_bool(true);
  ExprPtr acc = cs.front();
  for (std::size_t i = 1; i < cs.size(); ++i)
    acc = binary(BinaryOp::And, acc, cs[i]);
  return acc;
}

// ---------------------------------------------------------------------------
// Sort checking
// ---------------------------------------------------------------------------

using TypeEnv = std::map<std::string, Sort>;

// Infers the sort of an expression, raising SortMismatch/UnboundVariable
// diagnostics with source locations. `sorts` resolves enum literals.
inline Sort type_of(const Expr& e, const TypeEnv& vars, const SortTable& sorts) {
  struct Visitor {
    const Expr& expr;
    const TypeEnv& vars;
    const SortTable& sorts;

    Sort fail(const std::string& what) const {
      throw Error(Errc::SortMismatch, what + at_location(expr));
    }

    Sort operator()(const Expr::Lit& l) const { return sort_of(l.value, sorts); }

    Sort operator()(const Expr::Var& v) const {
      auto it = vars.find(v.name);
      if (it == vars.end())
        throw Error(Errc::UnboundVariable,
                    "unbound variable '" + v.name + "'" + at_location(expr));
      return it->second;
    }

    Sort operator()(const Expr::Unary& u) const {
      if (type_of(*u.operand, vars, sorts).kind != SortKind::Bool)
        fail("'!' expects a Bool operand");
      return Sort::boolean();
    }

    Sort operator()(const Expr::Binary& b) const {
      Sort l = type_of(*b.lhs, vars, sorts);
      Sort r = type_of(*b.rhs, vars, sorts);
      switch (b.op) {
        case BinaryOp::And:
        case BinaryOp::Or:
        case BinaryOp::Implies:
          if (l.kind != SortKind::Bool || r.kind != SortKind::Bool)
            fail("boolean connective expects Bool operands");
          return Sort::boolean();
        case BinaryOp::Eq:
        case BinaryOp::Neq:
          if (!(l == r)) fail("'==' / '!=' expect equally sorted operands");
          return Sort::boolean();
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
          if (l.kind != SortKind::Nat || r.kind != SortKind::Nat)
            fail("comparison expects Nat operands");
          return Sort::boolean();
        case BinaryOp::Plus:
        case BinaryOp::Monus:
          if (l.kind != SortKind::Nat || r.kind != SortKind::Nat)
            fail("arithmetic expects Nat operands");
          return Sort::nat();
      }
      return fail("bad binary operator");
    }

    Sort operator()(const Expr::Ite& i) const {
      if (type_of(*i.cond, vars, sorts).kind != SortKind::Bool)
        fail("if(c,t,e) expects a Bool condition");
      Sort t = type_of(*i.then_branch, vars, sorts);
      Sort e2 = type_of(*i.else_branch, vars, sorts);
      if (!(t == e2)) fail("if(c,t,e) branches must have one sort");
      return t;
    }
  };
  return std::visit(Visitor{e, vars, sorts}, e.node);
}

// ---------------------------------------------------------------------------
// Domain enumeration
// ---------------------------------------------------------------------------

// Deterministic, duplicate-free listing of a bounded domain. Nat is cut off
// at `nat_bound` inclusive; the other sorts are finite as given.
inline std::vector<Value> enumerate_sort(const Sort& s, std::uint64_t nat_bound = 0) {
  std::vector<Value> out;
  switch (s.kind) {
    case SortKind::Bool:
      out.push_back(Value{false});
      out.push_back(Value{true});
      break;
    case SortKind::Nat:
      for (std::uint64_t n = 0; n <= nat_bound; ++n) out.push_back(Value{n});
      break;
    case SortKind::Enum:
      for (std::uint32_t i = 0; i < s.constructors.size(); ++i)
        out.push_back(Value{EnumValue{s.name, i, s.constructors[i]}});
      break;
    case SortKind::Unit:
      out.push_back(Value{UnitValue{}});
      break;
  }
  return out;
}

}  // namespace alp
