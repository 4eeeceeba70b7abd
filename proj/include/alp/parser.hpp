#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "alp/data.hpp"
#include "alp/error.hpp"
#include "alp/lpe.hpp"

namespace alp {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Ident,
  Number,
  String,
  Hash,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Dot,
  Plus,
  Minus,
  Arrow,     // ->
  FatArrow,  // =>
  Assign,    // =
  EqEq,
  Neq,
  Le,
  Ge,
  Lt,
  Gt,
  AndAnd,
  OrOr,
  Not,
  Bar,
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& text) {
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
      for (std::size_t k = 0; k < n; ++k) {
        if (text[i + k] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      i += n;
    };
    while (i < text.size()) {
      char c = text[i];
      if (c == '%') {  // comment to end of line
        while (i < text.size() && text[i] != '\n') advance(1);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
        continue;
      }
      Token t;
      t.line = line;
      t.column = col;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
          ++j;
        t.kind = Tok::Ident;
        t.text = text.substr(i, j - i);
        advance(j - i);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        t.kind = Tok::Number;
        t.text = text.substr(i, j - i);
        advance(j - i);
      } else if (c == '"') {
        std::size_t j = i + 1;
        while (j < text.size() && text[j] != '"') ++j;
        if (j >= text.size())
          throw Error(Errc::ParseError, "parse error at " + std::to_string(line) + ":" +
                                            std::to_string(col) + ": unterminated string");
        t.kind = Tok::String;
        t.text = text.substr(i + 1, j - i - 1);
        advance(j - i + 1);
      } else {
        auto two = [&](char a, char b) {
          return c == a && i + 1 < text.size() && text[i + 1] == b;
        };
        if (two('-', '>')) {
          t.kind = Tok::Arrow;
          advance(2);
        } else if (two('=', '>')) {
          t.kind = Tok::FatArrow;
          advance(2);
        } else if (two('=', '=')) {
          t.kind = Tok::EqEq;
          advance(2);
        } else if (two('!', '=')) {
          t.kind = Tok::Neq;
          advance(2);
        } else if (two('<', '=')) {
          t.kind = Tok::Le;
          advance(2);
        } else if (two('>', '=')) {
          t.kind = Tok::Ge;
          advance(2);
        } else if (two('&', '&')) {
          t.kind = Tok::AndAnd;
          advance(2);
        } else if (two('|', '|')) {
          t.kind = Tok::OrOr;
          advance(2);
        } else {
          switch (c) {
            case '#': t.kind = Tok::Hash; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case '{': t.kind = Tok::LBrace; break;
            case '}': t.kind = Tok::RBrace; break;
            case ',': t.kind = Tok::Comma; break;
            case ';': t.kind = Tok::Semi; break;
            case ':': t.kind = Tok::Colon; break;
            case '.': t.kind = Tok::Dot; break;
            case '+': t.kind = Tok::Plus; break;
            case '-': t.kind = Tok::Minus; break;
            case '<': t.kind = Tok::Lt; break;
            case '>': t.kind = Tok::Gt; break;
            case '=': t.kind = Tok::Assign; break;
            case '!': t.kind = Tok::Not; break;
            case '|': t.kind = Tok::Bar; break;
            default:
              throw Error(Errc::ParseError,
                          "parse error at " + std::to_string(line) + ":" +
                              std::to_string(col) + ": unexpected character '" +
                              std::string(1, c) + "'");
          }
          advance(1);
        }
      }
      tokens_.push_back(std::move(t));
    }
    Token eof;
    eof.kind = Tok::Eof;
    eof.line = line;
    eof.column = col;
    tokens_.push_back(eof);
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = pos_ + ahead;
    return k < tokens_.size() ? tokens_[k] : tokens_.back();
  }
  Token next() {
    Token t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  std::size_t mark() const { return pos_; }
  void rewind(std::size_t m) { pos_ = m; }

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Specification parser
// ---------------------------------------------------------------------------

struct ParserOptions {
  // Generated labels contain '#'; user input may not, so rendered component
  // processes only parse back when this is set.
  bool allow_generated = false;
};

struct ParsedSpec {
  Lpe lpe;
  std::vector<Value> init;
  ExprPtr inv;  // null when absent
};

namespace detail {

[[noreturn]] inline void parse_fail(const Token& t, const std::string& expected) {
  throw Error(Errc::ParseError, "parse error at " + std::to_string(t.line) + ":" +
                                    std::to_string(t.column) + ": expected " + expected +
                                    (t.kind == Tok::Eof ? " before end of input"
                                                        : ", found '" + t.text + "'"));
}

class SpecParser {
public:
  SpecParser(const std::string& text, ParserOptions opts)
      : lex_(text), opts_(opts) {}

  ParsedSpec parse() {
    bool have_proc = false;
    while (true) {
      const Token& t = lex_.peek();
      if (t.kind == Tok::Ident && t.text == "sort") {
        parse_sort_decl();
      } else if (t.kind == Tok::Ident && t.text == "act") {
        parse_act_decl();
      } else if (t.kind == Tok::Ident && t.text == "proc") {
        if (have_proc) parse_fail(t, "a single proc declaration");
        parse_proc_decl();
        have_proc = true;
      } else if (t.kind == Tok::Ident && t.text == "init") {
        break;
      } else {
        parse_fail(t, "'sort', 'act', 'proc' or 'init'");
      }
    }
    if (!have_proc) parse_fail(lex_.peek(), "a proc declaration");
    parse_init();
    if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "inv") parse_inv();
    if (lex_.peek().kind != Tok::Eof) parse_fail(lex_.peek(), "end of input");

    auto diags = well_formed(spec_.lpe);
    if (!diags.empty()) {
      std::string msg = "parse error: specification is ill-formed:";
      for (const auto& d : diags) msg += "\n  " + to_string(d);
      throw Error(Errc::ParseError, msg);
    }
    return std::move(spec_);
  }

  // Expression entry point used for CLI-supplied invariants.
  ExprPtr parse_single_expr() {
    ExprPtr e = parse_expr();
    if (lex_.peek().kind != Tok::Eof) parse_fail(lex_.peek(), "end of expression");
    return e;
  }

  void seed_sorts(const std::vector<Sort>& sorts) {
    for (const auto& s : sorts) {
      sorts_[s.name] = s;
      for (std::uint32_t i = 0; i < s.constructors.size(); ++i)
        ctors_[s.constructors[i]] = {s.name, i};
      spec_.lpe.sorts.push_back(s);
    }
  }

private:
  Token expect(Tok kind, const std::string& what) {
    if (lex_.peek().kind != kind) parse_fail(lex_.peek(), what);
    return lex_.next();
  }

  Token expect_keyword(const std::string& kw) {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Ident || t.text != kw) parse_fail(t, "'" + kw + "'");
    return lex_.next();
  }

  bool is_reserved_word(const std::string& s) const {
    static const std::set<std::string> words = {"sort", "act",  "proc", "init",
                                                "inv",  "sum",  "tau",  "true",
                                                "false", "if",  "unit"};
    return words.count(s) != 0;
  }

  std::string parse_plain_name(const std::string& what) {
    Token t = expect(Tok::Ident, what);
    if (is_reserved_word(t.text)) parse_fail(t, what + " (found a keyword)");
    return t.text;
  }

  // Label-position names. `#`-joined segments form generated names such as
  // sync#1#V and are only accepted with allow_generated.
  std::string parse_label_name(const std::string& what) {
    Token t = expect(Tok::Ident, what);
    if (is_reserved_word(t.text)) parse_fail(t, what + " (found a keyword)");
    std::string name = t.text;
    while (lex_.peek().kind == Tok::Hash) {
      Token hash = lex_.next();
      if (!opts_.allow_generated)
        throw Error(Errc::ParseError,
                    "parse error at " + std::to_string(hash.line) + ":" +
                        std::to_string(hash.column) +
                        ": '#' is reserved for generated labels");
      const Token& seg = lex_.peek();
      if (seg.kind != Tok::Ident && seg.kind != Tok::Number)
        parse_fail(seg, "a generated label segment");
      name += "#" + lex_.next().text;
    }
    return name;
  }

  Sort parse_sortref() {
    Token t = expect(Tok::Ident, "a sort name");
    if (t.text == "Bool") return Sort::boolean();
    if (t.text == "Nat") return Sort::nat();
    if (t.text == "Unit") return Sort::unit();
    auto it = sorts_.find(t.text);
    if (it == sorts_.end()) parse_fail(t, "a declared sort name");
    return it->second;
  }

  void parse_sort_decl() {
    expect_keyword("sort");
    std::string name = parse_plain_name("a sort name");
    if (name == "Bool" || name == "Nat" || name == "Unit" || sorts_.count(name) != 0)
      throw Error(Errc::ParseError, "parse error: sort '" + name + "' already exists");
    expect(Tok::Assign, "'='");
    expect(Tok::LBrace, "'{'");
    std::vector<std::string> ctors;
    ctors.push_back(parse_plain_name("a constructor name"));
    while (lex_.peek().kind == Tok::Comma) {
      lex_.next();
      ctors.push_back(parse_plain_name("a constructor name"));
    }
    expect(Tok::RBrace, "'}'");
    expect(Tok::Semi, "';'");
    for (std::uint32_t i = 0; i < ctors.size(); ++i) {
      if (ctors_.count(ctors[i]) != 0)
        throw Error(Errc::ParseError,
                    "parse error: constructor '" + ctors[i] + "' already declared");
      ctors_[ctors[i]] = {name, i};
    }
    Sort s = Sort::enumeration(name, std::move(ctors));
    sorts_[name] = s;
    spec_.lpe.sorts.push_back(std::move(s));
  }

  void parse_act_decl() {
    expect_keyword("act");
    while (true) {
      ActionDecl decl;
      decl.label = parse_label_name("an action label");
      if (lex_.peek().kind == Tok::Colon) {
        lex_.next();
        decl.param_sorts.push_back(parse_sortref());
        while (lex_.peek().kind == Tok::Hash) {
          lex_.next();
          decl.param_sorts.push_back(parse_sortref());
        }
      }
      for (const auto& a : spec_.lpe.actions)
        if (a.label == decl.label)
          throw Error(Errc::ParseError,
                      "parse error: action '" + decl.label + "' declared twice");
      if (ctors_.count(decl.label) != 0)
        throw Error(Errc::ParseError,
                    "parse error: '" + decl.label + "' already names a constructor");
      spec_.lpe.actions.push_back(std::move(decl));
      if (lex_.peek().kind != Tok::Comma) break;
      lex_.next();
    }
    expect(Tok::Semi, "';'");
  }

  void parse_proc_decl() {
    expect_keyword("proc");
    spec_.lpe.name = parse_label_name("a process name");
    expect(Tok::LParen, "'('");
    if (lex_.peek().kind != Tok::RParen) {
      while (true) {
        std::string pname = parse_plain_name("a parameter name");
        expect(Tok::Colon, "':'");
        Sort psort = parse_sortref();
        if (ctors_.count(pname) != 0)
          throw Error(Errc::ParseError,
                      "parse error: parameter '" + pname + "' shadows a constructor");
        spec_.lpe.params.emplace_back(pname, std::move(psort));
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.next();
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Assign, "'='");
    spec_.lpe.summands.push_back(parse_summand());
    while (lex_.peek().kind == Tok::Plus) {
      lex_.next();
      spec_.lpe.summands.push_back(parse_summand());
    }
    expect(Tok::Semi, "';'");
  }

  Summand parse_summand() {
    Summand s;
    if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "sum") {
      lex_.next();
      while (true) {
        std::string vname = parse_plain_name("a sum variable name");
        expect(Tok::Colon, "':'");
        Sort vsort = parse_sortref();
        if (ctors_.count(vname) != 0)
          throw Error(Errc::ParseError,
                      "parse error: sum variable '" + vname + "' shadows a constructor");
        s.sum_vars.emplace_back(vname, std::move(vsort));
        if (lex_.peek().kind != Tok::Comma) break;
        lex_.next();
      }
      expect(Tok::Dot, "'.'");
    }

    // Optional condition: speculative expression parse, committed only when
    // followed by '->'; otherwise the condition defaults to true.
    std::size_t save = lex_.mark();
    bool have_cond = false;
    try {
      ExprPtr cond = parse_expr();
      if (lex_.peek().kind == Tok::Arrow) {
        lex_.next();
        s.condition = std::move(cond);
        have_cond = true;
      }
    } catch (const Error&) {
      // fall through to the unconditional form
    }
    if (!have_cond) {
      lex_.rewind(save);
      s.condition = lit_bool(true);
    }

    s.action = parse_multiaction();
    expect(Tok::Dot, "'.'");
    Token pname = lex_.peek();
    std::string target = parse_label_name("the process name");
    if (target != spec_.lpe.name)
      parse_fail(pname, "recursion on '" + spec_.lpe.name + "'");
    expect(Tok::LParen, "'('");
    if (lex_.peek().kind != Tok::RParen) {
      s.updates.push_back(parse_expr());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.next();
        s.updates.push_back(parse_expr());
      }
    }
    expect(Tok::RParen, "')'");
    return s;
  }

  MultiActionExpr parse_multiaction() {
    MultiActionExpr m;
    if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "tau") {
      lex_.next();
      return m;  // empty list encodes tau
    }
    m.push_back(parse_action_expr());
    while (lex_.peek().kind == Tok::Bar) {
      lex_.next();
      m.push_back(parse_action_expr());
    }
    return m;
  }

  ActionExpr parse_action_expr() {
    ActionExpr a;
    a.label = parse_label_name("an action label");
    if (lex_.peek().kind == Tok::LParen) {
      lex_.next();
      if (lex_.peek().kind != Tok::RParen) {
        a.args.push_back(parse_expr());
        while (lex_.peek().kind == Tok::Comma) {
          lex_.next();
          a.args.push_back(parse_expr());
        }
      }
      expect(Tok::RParen, "')'");
    }
    return a;
  }

  void parse_init() {
    expect_keyword("init");
    Token nt = lex_.peek();
    std::string name = parse_label_name("the process name");
    if (name != spec_.lpe.name) parse_fail(nt, "init of '" + spec_.lpe.name + "'");
    expect(Tok::LParen, "'('");
    std::vector<ExprPtr> args;
    if (lex_.peek().kind != Tok::RParen) {
      args.push_back(parse_expr());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.next();
        args.push_back(parse_expr());
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Semi, "';'");

    if (args.size() != spec_.lpe.params.size())
      throw Error(Errc::ParseError,
                  "parse error: init supplies " + std::to_string(args.size()) +
                      " argument(s) for " + std::to_string(spec_.lpe.params.size()) +
                      " parameter(s)");
    Env empty;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (!free_vars(args[i]).empty())
        throw Error(Errc::ParseError, "parse error: init argument " + std::to_string(i) +
                                          " is not a closed expression");
      Sort got = type_of(*args[i], {}, sorts_);
      if (!(got == spec_.lpe.params[i].second))
        throw Error(Errc::ParseError,
                    "parse error: init argument " + std::to_string(i) + " has sort " +
                        to_string(got) + ", expected " +
                        to_string(spec_.lpe.params[i].second));
      spec_.init.push_back(eval(*args[i], empty));
    }
  }

  void parse_inv() {
    expect_keyword("inv");
    ExprPtr e = parse_expr();
    expect(Tok::Semi, "';'");
    TypeEnv env;
    for (const auto& [n, s] : spec_.lpe.params) env[n] = s;
    Sort got = type_of(*e, env, sorts_);
    if (got.kind != SortKind::Bool)
      throw Error(Errc::ParseError, "parse error: invariant must be a Bool expression");
    for (const auto& v : free_vars(e))
      if (env.count(v) == 0)
        throw Error(Errc::ParseError,
                    "parse error: invariant mentions '" + v +
                        "', which is not a process parameter");
    spec_.inv = std::move(e);
  }

  // --- expressions -----------------------------------------------------

  ExprPtr parse_expr() { return parse_implies(); }

  ExprPtr parse_implies() {
    ExprPtr l = parse_or();
    if (lex_.peek().kind == Tok::FatArrow) {
      Token t = lex_.next();
      return binary(BinaryOp::Implies, std::move(l), parse_implies(), t.line, t.column);
    }
    return l;
  }

  ExprPtr parse_or() {
    ExprPtr l = parse_and();
    while (lex_.peek().kind == Tok::OrOr) {
      Token t = lex_.next();
      l = binary(BinaryOp::Or, std::move(l), parse_and(), t.line, t.column);
    }
    return l;
  }

  ExprPtr parse_and() {
    ExprPtr l = parse_cmp();
    while (lex_.peek().kind == Tok::AndAnd) {
      Token t = lex_.next();
      l = binary(BinaryOp::And, std::move(l), parse_cmp(), t.line, t.column);
    }
    return l;
  }

  ExprPtr parse_cmp() {
    ExprPtr l = parse_add();
    BinaryOp op;
    switch (lex_.peek().kind) {
      case Tok::EqEq: op = BinaryOp::Eq; break;
      case Tok::Neq: op = BinaryOp::Neq; break;
      case Tok::Lt: op = BinaryOp::Lt; break;
      case Tok::Le: op = BinaryOp::Le; break;
      case Tok::Gt: op = BinaryOp::Gt; break;
      case Tok::Ge: op = BinaryOp::Ge; break;
      default: return l;
    }
    Token t = lex_.next();
    return binary(op, std::move(l), parse_add(), t.line, t.column);
  }

  ExprPtr parse_add() {
    ExprPtr l = parse_unary();
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      Token t = lex_.next();
      BinaryOp op = t.kind == Tok::Plus ? BinaryOp::Plus : BinaryOp::Monus;
      l = binary(op, std::move(l), parse_unary(), t.line, t.column);
    }
    return l;
  }

  ExprPtr parse_unary() {
    if (lex_.peek().kind == Tok::Not) {
      Token t = lex_.next();
      return unary(UnaryOp::Not, parse_unary(), t.line, t.column);
    }
    return parse_atom();
  }

  ExprPtr parse_atom() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::Number: {
        Token n = lex_.next();
        return lit(Value{static_cast<std::uint64_t>(std::stoull(n.text))}, n.line,
                   n.column);
      }
      case Tok::LParen: {
        lex_.next();
        ExprPtr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false") {
          Token b = lex_.next();
          return lit(Value{b.text == "true"}, b.line, b.column);
        }
        if (t.text == "unit") {
          Token u = lex_.next();
          return lit(Value{UnitValue{}}, u.line, u.column);
        }
        if (t.text == "if") {
          Token kw = lex_.next();
          expect(Tok::LParen, "'('");
          ExprPtr c = parse_expr();
          expect(Tok::Comma, "','");
          ExprPtr th = parse_expr();
          expect(Tok::Comma, "','");
          ExprPtr el = parse_expr();
          expect(Tok::RParen, "')'");
          return ite(std::move(c), std::move(th), std::move(el), kw.line, kw.column);
        }
        if (is_reserved_word(t.text)) parse_fail(t, "an expression");
        Token id = lex_.next();
        auto ctor = ctors_.find(id.text);
        if (ctor != ctors_.end())
          return lit(Value{EnumValue{ctor->second.first, ctor->second.second, id.text}},
                     id.line, id.column);
        return var(id.text, id.line, id.column);
      }
      default:
        parse_fail(t, "an expression");
    }
  }

  Lexer lex_;
  ParserOptions opts_;
  ParsedSpec spec_;
  SortTable sorts_;
  std::map<std::string, std::pair<std::string, std::uint32_t>> ctors_;
};

}  // namespace detail

// Parses a textual specification into a well-formed process, evaluated
// initial values and an optional state invariant.
inline ParsedSpec parse_spec(const std::string& text, ParserOptions opts = {}) {
  detail::SpecParser p(text, opts);
  return p.parse();
}

// Parses one expression (e.g. a CLI-supplied invariant) against the sorts
// and parameters of an existing process. Must be Bool-sorted and mention
// only process parameters.
inline ExprPtr parse_invariant_expr(const std::string& text, const Lpe& lpe) {
  detail::SpecParser p(text, ParserOptions{});
  p.seed_sorts(lpe.sorts);
  ExprPtr e = p.parse_single_expr();
  TypeEnv env;
  for (const auto& [n, s] : lpe.params) env[n] = s;
  Sort got = type_of(*e, env, lpe.sort_table());
  if (got.kind != SortKind::Bool)
    throw Error(Errc::ParseError, "invariant must be a Bool expression");
  for (const auto& v : free_vars(e))
    if (env.count(v) == 0)
      throw Error(Errc::FreeVariableNotInScope,
                  "invariant mentions '" + v + "', which is not a process parameter");
  return e;
}

}  // namespace alp
