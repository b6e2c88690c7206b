#include "relcheck/fol.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

namespace relcheck {

FormulaPtr mk_atom(Prim p, std::vector<std::string> args) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Atom;
  f->prim = p;
  f->args = std::move(args);
  return f;
}

FormulaPtr mk_defined(std::string name, std::vector<std::string> args) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Defined;
  f->name = std::move(name);
  f->args = std::move(args);
  return f;
}

FormulaPtr mk_not(FormulaPtr g) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Not;
  f->lhs = std::move(g);
  return f;
}

FormulaPtr mk_binary(Kind k, FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

FormulaPtr mk_quant(Kind k, std::string var, Sort s, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->var = std::move(var);
  f->sort = s;
  f->lhs = std::move(body);
  return f;
}

bool is_binary(Kind k) {
  return k == Kind::And || k == Kind::Or || k == Kind::Implies || k == Kind::Iff;
}

bool is_quantifier(Kind k) {
  return k == Kind::Forall || k == Kind::Exists || k == Kind::ExistsUnique;
}

bool same_formula(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Atom: return a.prim == b.prim && a.args == b.args;
    case Kind::Defined: return a.name == b.name && a.args == b.args;
    case Kind::Not: return same_formula(*a.lhs, *b.lhs);
    case Kind::Forall:
    case Kind::Exists:
    case Kind::ExistsUnique:
      return a.var == b.var && a.sort == b.sort && same_formula(*a.lhs, *b.lhs);
    default: return same_formula(*a.lhs, *b.lhs) && same_formula(*a.rhs, *b.rhs);
  }
}

namespace {

std::string position_prefix(int line, int column) {
  return std::to_string(line) + ":" + std::to_string(column) + ": ";
}

}  // namespace

ParseError::ParseError(ParseErrorKind k, int line_, int column_, const std::string& msg)
    : std::runtime_error(position_prefix(line_, column_) + msg),
      kind(k),
      line(line_),
      column(column_) {}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok {
  Ident, LParen, RParen, Comma, Colon, Dot, Bang, And, Or, Imp, Iff, Eq, Neq,
  Forall, Exists, Exists1, End
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '\'' || c >= 0x80;
}

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    unsigned char c = s[i];
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    const int l0 = line, c0 = col;
    auto push = [&](Tok k, size_t n) {
      out.push_back({k, s.substr(i, n), l0, c0});
      advance(n);
    };
    if (s.compare(i, 3, "<->") == 0) {
      push(Tok::Iff, 3);
    } else if (s.compare(i, 2, "->") == 0) {
      push(Tok::Imp, 2);
    } else if (s.compare(i, 2, "!=") == 0) {
      push(Tok::Neq, 2);
    } else if (c == '!') {
      push(Tok::Bang, 1);
    } else if (c == '(') {
      push(Tok::LParen, 1);
    } else if (c == ')') {
      push(Tok::RParen, 1);
    } else if (c == ',') {
      push(Tok::Comma, 1);
    } else if (c == ':') {
      push(Tok::Colon, 1);
    } else if (c == '.') {
      push(Tok::Dot, 1);
    } else if (c == '&') {
      push(Tok::And, 1);
    } else if (c == '|') {
      push(Tok::Or, 1);
    } else if (c == '=') {
      push(Tok::Eq, 1);
    } else if (ident_char(c)) {
      size_t j = i;
      while (j < s.size() && ident_char(static_cast<unsigned char>(s[j]))) ++j;
      std::string word = s.substr(i, j - i);
      if (word == "forall") {
        push(Tok::Forall, j - i);
      } else if (word == "exists") {
        if (j < s.size() && s[j] == '!' && (j + 1 >= s.size() || s[j + 1] != '=')) {
          push(Tok::Exists1, j - i + 1);
        } else {
          push(Tok::Exists, j - i);
        }
      } else {
        push(Tok::Ident, j - i);
      }
    } else {
      throw ParseError(ParseErrorKind::Syntax, l0, c0,
                       std::string("unexpected character '") + static_cast<char>(c) + "'");
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Bang: return "'!'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Imp: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::Eq: return "'='";
    case Tok::Neq: return "'!='";
    case Tok::Forall: return "'forall'";
    case Tok::Exists: return "'exists'";
    case Tok::Exists1: return "'exists!'";
    case Tok::End: return "end of input";
  }
  return "?";
}

// ---------------------------------------------------------------- parser

struct FreeInfo {
  std::optional<Sort> sort;
  int line = 0;
  int column = 0;
};

struct PendingEq {
  std::string a, b;
  int line, column;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseOptions& opts) : toks_(std::move(toks)), opts_(opts) {}

  FormulaPtr run() {
    FormulaPtr f = parse_iff();
    if (peek().kind != Tok::End) fail_expected("end of input");
    resolve_pending();
    return f;
  }

 private:
  std::vector<Token> toks_;
  const ParseOptions& opts_;
  size_t pos_ = 0;
  std::vector<std::pair<std::string, Sort>> scope_;
  std::map<std::string, FreeInfo> free_;
  std::vector<PendingEq> pending_;

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail_expected(const std::string& what) {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(ParseErrorKind::Syntax, t.line, t.column,
                     "syntax error: expected " + what + ", found " + got);
  }
  const Token& expect(Tok k) {
    if (peek().kind != k) fail_expected(describe(k));
    return next();
  }

  FormulaPtr parse_iff() {
    FormulaPtr l = parse_imp();
    while (accept(Tok::Iff)) l = mk_binary(Kind::Iff, l, parse_imp());
    return l;
  }

  FormulaPtr parse_imp() {
    FormulaPtr l = parse_or();
    if (accept(Tok::Imp)) return mk_binary(Kind::Implies, l, parse_imp());
    return l;
  }

  FormulaPtr parse_or() {
    FormulaPtr l = parse_and();
    while (accept(Tok::Or)) l = mk_binary(Kind::Or, l, parse_and());
    return l;
  }

  FormulaPtr parse_and() {
    FormulaPtr l = parse_unary();
    while (accept(Tok::And)) l = mk_binary(Kind::And, l, parse_unary());
    return l;
  }

  FormulaPtr parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Bang:
        next();
        return mk_not(parse_unary());
      case Tok::Forall:
      case Tok::Exists:
      case Tok::Exists1:
        return parse_quantifier();
      case Tok::LParen: {
        next();
        FormulaPtr f = parse_iff();
        expect(Tok::RParen);
        return f;
      }
      case Tok::Ident:
        return parse_atom();
      default:
        fail_expected("formula");
    }
  }

  FormulaPtr parse_quantifier() {
    const Token& q = next();
    Kind k = q.kind == Tok::Forall ? Kind::Forall
                                   : (q.kind == Tok::Exists ? Kind::Exists : Kind::ExistsUnique);
    std::vector<std::pair<std::string, Sort>> binders;
    do {
      const Token& v = expect(Tok::Ident);
      expect(Tok::Colon);
      const Token& s = expect(Tok::Ident);
      auto sort = parse_sort(s.text);
      if (!sort)
        throw ParseError(ParseErrorKind::Syntax, s.line, s.column,
                         "syntax error: unknown sort '" + s.text + "' (expected Ob or Si)");
      binders.emplace_back(v.text, *sort);
    } while (accept(Tok::Comma));
    expect(Tok::Dot);
    for (auto& b : binders) scope_.push_back(b);
    FormulaPtr body = parse_iff();
    scope_.resize(scope_.size() - binders.size());
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      body = mk_quant(k, it->first, it->second, body);
    return body;
  }

  std::optional<Sort> known_sort(const std::string& v) {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == v) return it->second;
    auto fs = opts_.free_sorts.find(v);
    if (fs != opts_.free_sorts.end()) return fs->second;
    auto fi = free_.find(v);
    if (fi != free_.end()) return fi->second.sort;
    return std::nullopt;
  }

  bool is_bound(const std::string& v) const {
    for (auto& b : scope_)
      if (b.first == v) return true;
    return false;
  }

  void note_free(const std::string& v, const Token& t) {
    if (is_bound(v) || opts_.free_sorts.count(v)) return;
    if (!free_.count(v)) free_[v] = FreeInfo{std::nullopt, t.line, t.column};
  }

  void require(const std::string& v, Sort s, const Token& at, const std::string& pred, int idx) {
    note_free(v, at);
    auto k = known_sort(v);
    if (!k) {
      free_[v].sort = s;
      return;
    }
    if (*k != s)
      throw ParseError(ParseErrorKind::Sort, at.line, at.column,
                       "sort error: argument " + std::to_string(idx + 1) + " of " + pred +
                           " must be " + to_string(s) + ", but " + v + " is " + to_string(*k));
  }

  FormulaPtr equality(const Token& a, const Token& b) {
    note_free(a.text, a);
    note_free(b.text, b);
    auto sa = known_sort(a.text), sb = known_sort(b.text);
    if (sa && sb && *sa != *sb)
      throw ParseError(ParseErrorKind::Sort, a.line, a.column,
                       "sort error: " + a.text + ":" + to_string(*sa) + " compared with " +
                           b.text + ":" + to_string(*sb));
    if (!sa || !sb) pending_.push_back({a.text, b.text, a.line, a.column});
    return mk_atom(Prim::Eq, {a.text, b.text});
  }

  FormulaPtr parse_atom() {
    const Token& name = next();
    if (peek().kind == Tok::Eq || peek().kind == Tok::Neq) {
      bool neg = next().kind == Tok::Neq;
      const Token& rhs = expect(Tok::Ident);
      FormulaPtr e = equality(name, rhs);
      return neg ? mk_not(e) : e;
    }
    expect(Tok::LParen);
    std::vector<Token> args;
    if (peek().kind != Tok::RParen) {
      do {
        args.push_back(expect(Tok::Ident));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    std::vector<std::string> names;
    for (auto& a : args) names.push_back(a.text);

    std::vector<Sort> sig;
    FormulaPtr out;
    if (name.text == "T" || name.text == "R") {
      sig = {Sort::Ob, Sort::Si};
      out = mk_atom(name.text == "T" ? Prim::T : Prim::R, names);
    } else if (opts_.defs && opts_.defs->contains(name.text)) {
      sig = opts_.defs->at(name.text).sorts;
      out = mk_defined(name.text, names);
    } else {
      throw ParseError(ParseErrorKind::UnknownPredicate, name.line, name.column,
                       "unknown predicate '" + name.text + "'");
    }
    if (sig.size() != args.size())
      throw ParseError(ParseErrorKind::Sort, name.line, name.column,
                       "arity error: " + name.text + " takes " + std::to_string(sig.size()) +
                           " arguments, given " + std::to_string(args.size()));
    for (size_t i = 0; i < args.size(); ++i)
      require(args[i].text, sig[i], args[i], name.text, static_cast<int>(i));
    return out;
  }

  // Equalities between variables whose sorts were unknown when parsed. Only
  // free variables can be unknown, since binders carry sorts.
  void resolve_pending() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& p : pending_) {
        auto& fa = free_[p.a];
        auto& fb = free_[p.b];
        auto sa = opts_.free_sorts.count(p.a) ? std::optional(opts_.free_sorts.at(p.a)) : fa.sort;
        auto sb = opts_.free_sorts.count(p.b) ? std::optional(opts_.free_sorts.at(p.b)) : fb.sort;
        if (sa && sb && *sa != *sb)
          throw ParseError(ParseErrorKind::Sort, p.line, p.column,
                           "sort error: " + p.a + ":" + to_string(*sa) + " compared with " + p.b +
                               ":" + to_string(*sb));
        if (sa && !sb) {
          fb.sort = sa;
          changed = true;
        } else if (sb && !sa) {
          fa.sort = sb;
          changed = true;
        }
      }
    }
    for (auto& [v, info] : free_)
      if (!info.sort)
        throw ParseError(ParseErrorKind::Sort, info.line, info.column,
                         "sort error: cannot infer the sort of free variable " + v);
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const ParseOptions& opts) {
  Parser p(lex(text), opts);
  return p.run();
}

// ---------------------------------------------------------------- rendering

namespace {

const char* op_text(Kind k) {
  switch (k) {
    case Kind::And: return " & ";
    case Kind::Or: return " | ";
    case Kind::Implies: return " -> ";
    case Kind::Iff: return " <-> ";
    default: return "?";
  }
}

const char* quant_text(Kind k) {
  return k == Kind::Forall ? "forall" : (k == Kind::Exists ? "exists" : "exists!");
}

std::string join_args(const std::vector<std::string>& a) {
  std::string s;
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) s += ",";
    s += a[i];
  }
  return s;
}

void render(const Formula& f, std::string& out);

void render_wrapped(const Formula& f, bool wrap, std::string& out) {
  if (wrap) out += "(";
  render(f, out);
  if (wrap) out += ")";
}

void render(const Formula& f, std::string& out) {
  switch (f.kind) {
    case Kind::Atom:
      if (f.prim == Prim::Eq) {
        out += f.args[0] + "=" + f.args[1];
      } else {
        out += (f.prim == Prim::T ? "T(" : "R(") + join_args(f.args) + ")";
      }
      return;
    case Kind::Defined:
      out += f.name + "(" + join_args(f.args) + ")";
      return;
    case Kind::Not: {
      const Formula& g = *f.lhs;
      if (g.kind == Kind::Atom && g.prim == Prim::Eq) {
        out += g.args[0] + "!=" + g.args[1];
        return;
      }
      out += "!";
      render_wrapped(g, is_binary(g.kind) || is_quantifier(g.kind), out);
      return;
    }
    case Kind::Forall:
    case Kind::Exists:
    case Kind::ExistsUnique: {
      out += quant_text(f.kind);
      out += " ";
      const Formula* cur = &f;
      bool first = true;
      while (true) {
        if (!first) out += ", ";
        first = false;
        out += cur->var + ":" + to_string(cur->sort);
        if (cur->lhs->kind != f.kind) break;
        cur = cur->lhs.get();
      }
      out += ". ";
      render_wrapped(*cur->lhs, is_binary(cur->lhs->kind), out);
      return;
    }
    default: {
      const Formula& l = *f.lhs;
      const Formula& r = *f.rhs;
      const bool right_assoc = f.kind == Kind::Implies;
      auto needs = [&](const Formula& c, bool is_left) {
        if (is_quantifier(c.kind)) return true;
        if (!is_binary(c.kind)) return false;
        if (c.kind != f.kind) return true;
        return right_assoc ? is_left : !is_left;
      };
      render_wrapped(l, needs(l, true), out);
      out += op_text(f.kind);
      render_wrapped(r, needs(r, false), out);
      return;
    }
  }
}

}  // namespace

std::string render_formula(const Formula& f) {
  std::string out;
  render(f, out);
  return out;
}

// ---------------------------------------------------------------- queries

namespace {

void collect_free(const Formula& f, std::vector<std::string>& bound,
                  std::map<std::string, Sort>& out, const DefinitionTable* defs) {
  auto note = [&](const std::string& v, std::optional<Sort> s) {
    for (auto& b : bound)
      if (b == v) return;
    if (s) {
      out[v] = *s;
    } else if (!out.count(v)) {
      out[v] = Sort::Ob;  // placeholder; fixed below if an equality partner is sorted
    }
  };
  switch (f.kind) {
    case Kind::Atom:
      if (f.prim == Prim::Eq) {
        note(f.args[0], std::nullopt);
        note(f.args[1], std::nullopt);
      } else {
        note(f.args[0], Sort::Ob);
        note(f.args[1], Sort::Si);
      }
      return;
    case Kind::Defined:
      for (size_t i = 0; i < f.args.size(); ++i) {
        std::optional<Sort> s;
        if (defs && defs->contains(f.name)) s = defs->at(f.name).sorts.at(i);
        note(f.args[i], s);
      }
      return;
    case Kind::Not: collect_free(*f.lhs, bound, out, defs); return;
    case Kind::Forall:
    case Kind::Exists:
    case Kind::ExistsUnique:
      bound.push_back(f.var);
      collect_free(*f.lhs, bound, out, defs);
      bound.pop_back();
      return;
    default:
      collect_free(*f.lhs, bound, out, defs);
      collect_free(*f.rhs, bound, out, defs);
  }
}

}  // namespace

std::map<std::string, Sort> free_variables(const Formula& f, const DefinitionTable* defs) {
  std::vector<std::string> bound;
  std::map<std::string, Sort> out;
  collect_free(f, bound, out, defs);
  return out;
}

std::set<std::string> all_variables(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    for (auto& a : g.args) out.insert(a);
    if (is_quantifier(g.kind)) out.insert(g.var);
    if (g.lhs) go(*g.lhs);
    if (g.rhs) go(*g.rhs);
  };
  go(f);
  return out;
}

std::set<std::string> predicates_used(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (g.kind == Kind::Atom) out.insert(g.prim == Prim::T ? "T" : (g.prim == Prim::R ? "R" : "="));
    if (g.kind == Kind::Defined) out.insert(g.name);
    if (g.lhs) go(*g.lhs);
    if (g.rhs) go(*g.rhs);
  };
  go(f);
  return out;
}

bool only_primitives(const Formula& f) {
  for (auto& p : predicates_used(f))
    if (p != "T" && p != "R" && p != "=") return false;
  return true;
}

int count_atoms(const Formula& f, const std::string& name) {
  int n = 0;
  if (f.kind == Kind::Defined && f.name == name) ++n;
  if (f.kind == Kind::Atom) {
    const char* p = f.prim == Prim::T ? "T" : (f.prim == Prim::R ? "R" : "=");
    if (name == p) ++n;
  }
  if (f.lhs) n += count_atoms(*f.lhs, name);
  if (f.rhs) n += count_atoms(*f.rhs, name);
  return n;
}

// ---------------------------------------------------------------- definitions

void DefinitionTable::declare(const std::string& name, std::vector<std::string> params,
                              std::vector<Sort> sorts, std::string file) {
  if (name == "T" || name == "R")
    throw std::runtime_error("cannot redefine primitive predicate " + name);
  if (defs_.count(name)) throw std::runtime_error("duplicate definition " + name);
  if (params.size() != sorts.size())
    throw std::runtime_error("definition " + name + ": parameter/sort count mismatch");
  defs_[name] = Definition{name, std::move(params), std::move(sorts), nullptr, std::move(file)};
  order_.push_back(name);
}

void DefinitionTable::set_body(const std::string& name, FormulaPtr body) {
  auto it = defs_.find(name);
  if (it == defs_.end()) throw std::runtime_error("undeclared definition " + name);
  it->second.body = std::move(body);
}

bool DefinitionTable::contains(const std::string& name) const { return defs_.count(name) != 0; }

const Definition& DefinitionTable::at(const std::string& name) const {
  auto it = defs_.find(name);
  if (it == defs_.end()) throw std::runtime_error("unknown definition " + name);
  return it->second;
}

std::set<std::string> DefinitionTable::dependencies(const std::string& name) const {
  std::set<std::string> out;
  const Definition& d = at(name);
  if (!d.body) return out;
  for (auto& p : predicates_used(*d.body))
    if (defs_.count(p)) out.insert(p);
  return out;
}

void DefinitionTable::check_acyclic() const {
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    int& s = state[n];
    if (s == 2) return;
    if (s == 1) {
      std::string cyc;
      auto it = std::find(stack.begin(), stack.end(), n);
      for (; it != stack.end(); ++it) cyc += *it + " -> ";
      throw std::runtime_error("definitions are cyclic: " + cyc + n);
    }
    s = 1;
    stack.push_back(n);
    for (auto& d : dependencies(n)) visit(d);
    stack.pop_back();
    state[n] = 2;
  };
  for (auto& n : order_) visit(n);
}

// ---------------------------------------------------------------- expansion

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string c = base + std::to_string(i);
    if (!avoid.count(c)) return c;
  }
}

FormulaPtr substitute(const FormulaPtr& f, std::map<std::string, std::string> sigma,
                      std::set<std::string>& avoid) {
  if (sigma.empty()) return f;
  auto rename = [&](const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (auto& a : args) {
      auto it = sigma.find(a);
      out.push_back(it == sigma.end() ? a : it->second);
    }
    return out;
  };
  switch (f->kind) {
    case Kind::Atom: return mk_atom(f->prim, rename(f->args));
    case Kind::Defined: return mk_defined(f->name, rename(f->args));
    case Kind::Not: return mk_not(substitute(f->lhs, sigma, avoid));
    case Kind::Forall:
    case Kind::Exists:
    case Kind::ExistsUnique: {
      sigma.erase(f->var);
      std::string v = f->var;
      bool captured = false;
      for (auto& [from, to] : sigma)
        if (to == v) captured = true;
      if (captured) {
        v = fresh_name(f->var, avoid);
        avoid.insert(v);
        sigma[f->var] = v;
      }
      return mk_quant(f->kind, v, f->sort, substitute(f->lhs, sigma, avoid));
    }
    default:
      return mk_binary(f->kind, substitute(f->lhs, sigma, avoid),
                       substitute(f->rhs, sigma, avoid));
  }
}

}  // namespace

FormulaPtr expand_defined(const FormulaPtr& f, const DefinitionTable& defs, int depth) {
  if (depth <= 0) return f;
  switch (f->kind) {
    case Kind::Atom: return f;
    case Kind::Defined: {
      const Definition& d = defs.at(f->name);
      std::map<std::string, std::string> sigma;
      for (size_t i = 0; i < d.params.size(); ++i)
        if (d.params[i] != f->args[i]) sigma[d.params[i]] = f->args[i];
      std::set<std::string> avoid = all_variables(*d.body);
      for (auto& a : f->args) avoid.insert(a);
      FormulaPtr body = substitute(d.body, sigma, avoid);
      FormulaPtr expanded = expand_defined(body, defs, depth == kExpandAll ? depth : depth - 1);
      auto tagged = std::make_shared<Formula>(*expanded);
      tagged->origin = std::make_shared<Origin>(Origin{f->name, f->args});
      return tagged;
    }
    case Kind::Not: return mk_not(expand_defined(f->lhs, defs, depth));
    case Kind::Forall:
    case Kind::Exists:
    case Kind::ExistsUnique:
      return mk_quant(f->kind, f->var, f->sort, expand_defined(f->lhs, defs, depth));
    default:
      return mk_binary(f->kind, expand_defined(f->lhs, defs, depth),
                       expand_defined(f->rhs, defs, depth));
  }
}

// ---------------------------------------------------------------- AST dump

namespace {

void dump(const Formula& f, int indent, std::string& out) {
  out.append(static_cast<size_t>(indent) * 2, ' ');
  switch (f.kind) {
    case Kind::Atom:
      out += "Atom " + std::string(f.prim == Prim::T ? "T" : (f.prim == Prim::R ? "R" : "=")) +
             "(" + join_args(f.args) + ")\n";
      return;
    case Kind::Defined: out += "Defined " + f.name + "(" + join_args(f.args) + ")\n"; return;
    case Kind::Not: out += "Not\n"; break;
    case Kind::And: out += "And\n"; break;
    case Kind::Or: out += "Or\n"; break;
    case Kind::Implies: out += "Implies\n"; break;
    case Kind::Iff: out += "Iff\n"; break;
    case Kind::Forall: out += "Forall " + f.var + ":" + to_string(f.sort) + "\n"; break;
    case Kind::Exists: out += "Exists " + f.var + ":" + to_string(f.sort) + "\n"; break;
    case Kind::ExistsUnique:
      out += "ExistsUnique " + f.var + ":" + to_string(f.sort) + "\n";
      break;
  }
  if (f.lhs) dump(*f.lhs, indent + 1, out);
  if (f.rhs) dump(*f.rhs, indent + 1, out);
}

}  // namespace

std::string dump_ast(const Formula& f) {
  std::string out;
  dump(f, 0, out);
  return out;
}

// ---------------------------------------------------------------- corpus

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  std::vector<std::string> out;
  if (j.contains(key))
    for (auto& x : j.at(key)) out.push_back(x.get<std::string>());
  return out;
}

CorpusEntry load_entry(const std::string& dir, const nlohmann::json& j,
                       const DefinitionTable& defs) {
  CorpusEntry e;
  e.name = j.at("name").get<std::string>();
  e.file = j.at("file").get<std::string>();
  e.systems = string_list(j, "systems");
  e.tags = string_list(j, "tags");
  e.text = read_file(dir + "/" + e.file);
  ParseOptions po;
  po.defs = &defs;
  try {
    e.formula = parse_formula(e.text, po);
  } catch (const ParseError& err) {
    throw std::runtime_error(e.file + ":" + err.what());
  }
  auto fv = free_variables(*e.formula, &defs);
  if (!fv.empty())
    throw std::runtime_error(e.file + ": formula is not closed (free " + fv.begin()->first + ")");
  return e;
}

}  // namespace

const CorpusEntry* Corpus::find(const std::string& name) const {
  for (auto& e : axioms)
    if (e.name == name) return &e;
  for (auto& e : lemmas)
    if (e.name == name) return &e;
  return nullptr;
}

std::vector<std::string> Corpus::files() const {
  std::vector<std::string> out;
  for (auto& n : defs.names()) out.push_back(defs.at(n).file);
  for (auto& e : axioms) out.push_back(e.file);
  for (auto& e : lemmas) out.push_back(e.file);
  return out;
}

Corpus load_corpus(const std::string& dir) {
  Corpus c;
  c.dir = dir;
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(dir + "/manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(dir + "/manifest.json: " + e.what());
  }
  c.version = m.value("version", "");
  for (auto& d : m.at("definitions")) {
    std::vector<std::string> params;
    std::vector<Sort> sorts;
    for (auto& p : d.at("params")) {
      std::string s = p.get<std::string>();
      auto colon = s.find(':');
      auto sort = colon == std::string::npos ? std::nullopt : parse_sort(s.substr(colon + 1));
      if (!sort) throw std::runtime_error("manifest: bad parameter '" + s + "'");
      params.push_back(s.substr(0, colon));
      sorts.push_back(*sort);
    }
    c.defs.declare(d.at("name").get<std::string>(), params, sorts, d.at("file").get<std::string>());
  }
  for (auto& name : c.defs.names()) {
    const Definition& d = c.defs.at(name);
    ParseOptions po;
    po.defs = &c.defs;
    for (size_t i = 0; i < d.params.size(); ++i) po.free_sorts[d.params[i]] = d.sorts[i];
    FormulaPtr body;
    try {
      body = parse_formula(read_file(dir + "/" + d.file), po);
    } catch (const ParseError& err) {
      throw std::runtime_error(d.file + ":" + err.what());
    }
    for (auto& [v, s] : free_variables(*body, &c.defs)) {
      (void)s;
      if (std::find(d.params.begin(), d.params.end(), v) == d.params.end())
        throw std::runtime_error(d.file + ": free variable " + v + " is not a parameter");
    }
    c.defs.set_body(name, body);
  }
  c.defs.check_acyclic();
  for (auto& a : m.at("axioms")) c.axioms.push_back(load_entry(dir, a, c.defs));
  if (m.contains("lemmas"))
    for (auto& a : m.at("lemmas")) c.lemmas.push_back(load_entry(dir, a, c.defs));
  return c;
}

std::string default_corpus_dir() {
  if (const char* env = std::getenv("RELCHECK_CORPUS"); env && *env) return env;
#ifdef RELCHECK_DEFAULT_CORPUS
  return RELCHECK_DEFAULT_CORPUS;
#else
  return "corpus";
#endif
}

}  // namespace relcheck
