#pragma once

#include <limits>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "relcheck/sort.hpp"

namespace relcheck {

enum class Kind { Atom, Defined, Not, And, Or, Implies, Iff, Forall, Exists, ExistsUnique };
enum class Prim { T, R, Eq };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Where an expanded subformula came from: the defined atom it replaced.
struct Origin {
  std::string name;
  std::vector<std::string> args;
};

struct Formula {
  Kind kind = Kind::Atom;
  Prim prim = Prim::T;            // Atom
  std::string name;               // Defined
  std::vector<std::string> args;  // Atom, Defined
  std::string var;                // quantifiers
  Sort sort = Sort::Ob;           // quantifiers
  FormulaPtr lhs;                 // Not operand, quantifier body, binary left
  FormulaPtr rhs;                 // binary right
  std::shared_ptr<const Origin> origin;  // ignored by equality and rendering
};

FormulaPtr mk_atom(Prim p, std::vector<std::string> args);
FormulaPtr mk_defined(std::string name, std::vector<std::string> args);
FormulaPtr mk_not(FormulaPtr f);
FormulaPtr mk_binary(Kind k, FormulaPtr l, FormulaPtr r);
FormulaPtr mk_quant(Kind k, std::string var, Sort s, FormulaPtr body);

bool is_binary(Kind k);
bool is_quantifier(Kind k);

// Structural equality; origin tags are ignored.
bool same_formula(const Formula& a, const Formula& b);

enum class ParseErrorKind { Syntax, Sort, UnknownPredicate };

struct ParseError : std::runtime_error {
  ParseErrorKind kind;
  int line;
  int column;
  ParseError(ParseErrorKind k, int line, int column, const std::string& msg);
};

struct Definition {
  std::string name;
  std::vector<std::string> params;
  std::vector<Sort> sorts;
  FormulaPtr body;
  std::string file;
};

class DefinitionTable {
 public:
  // Signature only; body may be set later with set_body.
  void declare(const std::string& name, std::vector<std::string> params, std::vector<Sort> sorts,
               std::string file = {});
  void set_body(const std::string& name, FormulaPtr body);
  bool contains(const std::string& name) const;
  const Definition& at(const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }
  // Names referenced directly by a definition body.
  std::set<std::string> dependencies(const std::string& name) const;
  // Throws std::runtime_error naming the cycle if the dependency graph is not a DAG.
  void check_acyclic() const;

 private:
  std::map<std::string, Definition> defs_;
  std::vector<std::string> order_;
};

struct ParseOptions {
  const DefinitionTable* defs = nullptr;
  // Sorts of free variables; unlisted free variables are inferred from usage.
  std::map<std::string, Sort> free_sorts;
};

FormulaPtr parse_formula(const std::string& text, const ParseOptions& opts = {});
std::string render_formula(const Formula& f);
inline std::string render_formula(const FormulaPtr& f) { return render_formula(*f); }

// Free variables with their sorts (sorts read off atoms and binders).
std::map<std::string, Sort> free_variables(const Formula& f, const DefinitionTable* defs = nullptr);
std::set<std::string> all_variables(const Formula& f);
// Names of predicates used: "T", "R", "=" and defined names.
std::set<std::string> predicates_used(const Formula& f);
bool only_primitives(const Formula& f);
int count_atoms(const Formula& f, const std::string& name);

constexpr int kExpandAll = std::numeric_limits<int>::max();

// Replaces defined atoms by their bodies, renaming bound variables that would
// capture an argument. Depth counts layers of definitions.
FormulaPtr expand_defined(const FormulaPtr& f, const DefinitionTable& defs, int depth);

// Pretty indented tree dump.
std::string dump_ast(const Formula& f);

struct CorpusEntry {
  std::string name;
  std::string file;
  std::vector<std::string> systems;
  std::vector<std::string> tags;
  std::string text;
  FormulaPtr formula;
};

struct Corpus {
  std::string version;
  std::string dir;
  DefinitionTable defs;
  std::vector<CorpusEntry> axioms;
  std::vector<CorpusEntry> lemmas;

  const CorpusEntry* find(const std::string& name) const;
  // Every file listed in the manifest, definitions first.
  std::vector<std::string> files() const;
};

// Loads manifest.json and every listed file. Errors name the offending file.
Corpus load_corpus(const std::string& dir);
// RELCHECK_CORPUS if set, else the build-time default.
std::string default_corpus_dir();

}  // namespace relcheck
