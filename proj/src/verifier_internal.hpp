#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "relcheck/verifier.hpp"

namespace relcheck::detail {

struct Res {
  Truth t = Truth::Unknown;
  Bindings w;
  std::string why;
};

// Candidate values for one quantified variable.
//   exact: if any value makes the block go the searched way, one of these does.
//   all_values: the list holds every value satisfying the searched literals
//   (needed to confirm uniqueness).
struct Candidates {
  std::vector<Entity> values;
  bool exact = false;
  bool all_values = false;
};

struct Block {
  Kind kind = Kind::Exists;
  std::vector<std::pair<std::string, Sort>> vars;
  const Formula* body = nullptr;
};

// A literal seen by the constraint solvers: predicate name and argument names.
struct Lit {
  std::string pred;
  const std::vector<std::string>* args = nullptr;
  bool positive = true;
};
using Branch = std::vector<Lit>;

class Evaluator;

// Decides a whole block from a lemma; nullopt when it does not apply.
using BlockDecider = std::function<std::optional<Res>(Evaluator&, const Block&)>;
// Candidates for one variable of a block; nullopt when it does not apply.
using Provider = std::function<std::optional<Candidates>(Evaluator&, const Block&,
                                                         const std::string& var,
                                                         const std::set<std::string>& unbound)>;

class Evaluator {
 public:
  Evaluator(ModelKind kind, const Budget& budget, const DefinitionTable* defs,
            const EvalContext& ctx);

  Verdict run(const FormulaPtr& f, const Assignment& a);

  // Environment access for providers.
  const Entity* lookup(const std::string& name) const;
  const Observer* observer(const std::string& name) const;
  const Signal* signal(const std::string& name) const;
  void push(const std::string& name, const Entity& e) { env_.emplace_back(name, e); }
  void pop() { env_.pop_back(); }
  // Evaluates a subformula under the current environment.
  Res eval(const Formula& f);
  // Every entity visible to the block body, excluding the given names.
  std::vector<std::pair<std::string, Entity>> visible(const Formula& body,
                                                      const std::set<std::string>& exclude);
  const std::set<std::string>& free_of(const Formula& f);
  // Leaves mentioning var in the formula, as literals (polarity ignored).
  void leaves_with(const Formula& f, const std::string& var, std::vector<Lit>& out);
  std::string current_origin() const;
  bool ftl() const { return kind_ == ModelKind::Ftl; }
  ModelKind kind() const { return kind_; }
  const Budget& budget() const { return budget_; }
  Rng& rng() { return rng_; }
  std::size_t cap() const { return static_cast<std::size_t>(budget_.max_witness_candidates); }
  std::size_t samples() const { return static_cast<std::size_t>(budget_.max_sample_points); }

 private:
  bool is_leaf(const Formula& f) const;
  Res eval_leaf(const Formula& f);
  Res eval_predicate(const std::string& name, const std::vector<std::string>& args,
                     const Formula& f);
  Res eval_quantifier(const Formula& f);
  Res eval_unique(const Formula& f);
  Res solve(const Block& b, std::vector<std::string> unbound, const std::string& just_bound);
  std::optional<Res> settle(const Block& b, const std::set<std::string>& unbound,
                            const std::string& just_bound);
  Candidates candidates(const Block& b, const std::string& var, Sort sort,
                        const std::set<std::string>& unbound, bool searching_true);
  void branches(const Formula& f, bool positive, const std::set<std::string>& unbound,
                std::vector<Branch>& out, bool& overflow);

  ModelKind kind_;
  Budget budget_;
  const DefinitionTable* defs_;
  EvalContext ctx_;
  const Formula* root_ = nullptr;
  std::vector<std::pair<std::string, Entity>> env_;
  std::vector<const Origin*> origins_;
  std::map<const Formula*, std::set<std::string>> free_cache_;
  std::vector<FormulaPtr> keep_alive_;
  Rng rng_;
  std::size_t work_ = 0;
};

// Keyed lemma-backed providers and deciders: "Origin/var" or "Entry/var".
const Provider* find_provider(const std::string& key);
const BlockDecider* find_decider(const std::string& key);

// Generic candidate constructions (verifier_solve.cpp).
std::optional<Candidates> class_orbit(Evaluator& ev, const Block& b, const std::string& var,
                                      Sort sort, const std::set<std::string>& unbound);
std::optional<Candidates> incidence_orbit(Evaluator& ev, const Block& b, const std::string& var,
                                          Sort sort, const std::set<std::string>& unbound);
Candidates solve_branch(Evaluator& ev, const Block& b, const Branch& br, const std::string& var,
                        Sort sort, const std::set<std::string>& unbound);
Candidates sample_values(Evaluator& ev, const Block& b, Sort sort);

// Helpers shared by the candidate constructions.
std::vector<Vec4> known_points(Evaluator& ev, const Formula& body,
                               const std::set<std::string>& exclude);
void add_unique(std::vector<Entity>& out, const Entity& e);
std::optional<Observer> try_observer(ModelKind k, const Vec4& base, const Vec4& dir);
std::optional<Signal> try_signal(const Vec4& beg, const Vec4& end);
// Fixed lists of directions used to build generic lines.
const std::vector<Vec4>& timelike_directions();
const std::vector<Vec4>& spacelike_directions();
const std::vector<Vec4>& null_directions();
std::vector<Scalar> quadratic_roots(const Scalar& a2, const Scalar& a1, const Scalar& a0);

}  // namespace relcheck::detail
