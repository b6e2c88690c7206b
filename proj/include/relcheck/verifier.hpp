#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "relcheck/fol.hpp"
#include "relcheck/model.hpp"

namespace relcheck {

enum class Truth { True, False, Unknown };
const char* to_string(Truth t);

struct Budget {
  std::uint64_t max_witness_candidates = 64;
  std::uint64_t max_sample_points = 8;
  // Numerator and denominator magnitude cap for generated rationals.
  std::uint64_t coordinate_bound = 12;
  std::uint64_t seed = 42;
};

// Throws std::invalid_argument unless every field is positive.
void validate_budget(const Budget& b);

struct Binding {
  std::string name;
  Entity value;
};
using Bindings = std::vector<Binding>;
using Assignment = std::map<std::string, Entity>;

struct Verdict {
  Truth truth = Truth::Unknown;
  // Witnesses for a True existential, the counterexample for a False universal.
  Bindings bindings;
  // For Unknown: the quantifier that ran out of candidates, or the failing evaluator.
  std::string reason;
};

struct EvalContext {
  // Corpus entry being checked; enables the witness constructors written for it.
  std::string entry;
  // Evaluate the root through its expanded body even if it carries an origin tag.
  bool structural_root = false;
  // Universal quantifier nodes whose variable is fixed by the caller's assignment.
  std::map<const Formula*, Entity> instantiated;
};

// Sound three-valued evaluation in the canonical model of the given kind.
// Defined atoms without a registered evaluator are expanded through defs.
Verdict evaluate_bounded(const FormulaPtr& f, ModelKind model, const Assignment& assignment,
                         const Budget& budget, const DefinitionTable* defs = nullptr,
                         const EvalContext& ctx = {});

// Defined predicates decided exactly by a geometric evaluator.
bool is_registered(const std::string& name);
std::vector<std::string> registered_predicates();
// Throws Unsupported or ScalarError where the evaluator is not defined.
bool evaluate_registered(const std::string& name, const std::vector<const Entity*>& args);

// ------------------------------------------------------------ generators

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic random source; only raw 64-bit draws are used so that
// sequences agree across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  long uniform(long lo, long hi);  // inclusive
  bool chance(int percent) { return uniform(0, 99) < percent; }
  // n/d with |n| <= bound and 1 <= d <= den_cap.
  Scalar rational(long bound, long den_cap = 1);
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(uniform(0, static_cast<long>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 eng_;
};

// Per-case seed derived from the suite seed, an entry name and the case index.
std::uint64_t case_seed(std::uint64_t seed, const std::string& entry, std::size_t index);

// Rational boosts, Pythagorean rotations and an integer translation.
PoincareMap random_isometry(Rng& rng, long bound);

// Named structural patterns, e.g. "parallel timelike pair" or
// "null-connected event pair". Throws GenerationError for unknown patterns or
// patterns the model cannot realize.
Assignment generate_configuration(const std::string& pattern, ModelKind model,
                                  const Budget& budget, Rng& rng);
std::vector<std::string> configuration_patterns();

// Bindings for the outer universals of a corpus entry, biased toward
// configurations that satisfy the antecedent.
Assignment generate_instance(const std::string& entry, ModelKind model, const Budget& budget,
                             Rng& rng);
// Argument tuples for a registered predicate (names are the definition's params).
Assignment generate_arguments(const std::string& predicate, const Definition& def,
                              ModelKind model, const Budget& budget, Rng& rng);

// Events with zero and with two future null segments ending on a spacelike observer.
struct IsoCounterexample {
  Signal no_signal;
  Signal two_signals;
};
std::optional<IsoCounterexample> iso_counterexample(const Observer& a);

// ------------------------------------------------------------ suites

enum class System { SimpleRel, SimpleRelFtl };
const char* to_string(System s);

struct CaseResult {
  std::size_t index = 0;
  Truth truth = Truth::Unknown;
  Bindings bindings;
  std::string reason;
};

struct EntryReport {
  std::string name;
  std::vector<CaseResult> cases;
  std::size_t count(Truth t) const;
};

struct Report {
  std::string suite;
  std::string system;
  std::string model;
  std::string corpus_version;
  Budget budget;
  std::size_t cases = 0;
  std::vector<EntryReport> entries;
  // Not part of the serialized report, which must be byte-identical across runs.
  double wall_seconds = 0;
};

// Deterministic JSON; scalars are strings. Passing cases list only their index.
std::string report_json(const Report& r);
// Fixed-width table with columns axiom, pass, fail, unknown.
std::string summary_table(const Report& r);

Report run_axiom_suite(const Corpus& corpus, System system, ModelKind model,
                       const Budget& budget, std::size_t cases,
                       const std::vector<std::string>& only = {});
Report run_lemma_suite(const Corpus& corpus, ModelKind model, const Budget& budget,
                       std::size_t cases, const std::vector<std::string>& only = {});
// Compares each registered evaluator with the bounded evaluation of its
// expanded definition. True = agreement, False = disagreement, Unknown =
// definition undecided.
Report check_definitional_equivalence(const Corpus& corpus, const std::vector<std::string>& preds,
                                      ModelKind model, const Budget& budget, std::size_t cases);
// Every registered predicate before and after random isometries.
Report invariance_suite(const Corpus& corpus, ModelKind model, const Budget& budget,
                        std::size_t maps);
// Plain AxIso on FTL observers: an event with no signal to the observer and one with two.
Report iso_control_suite(const Corpus& corpus, const Budget& budget, std::size_t observers);

// Binds the leading universal quantifiers of f to values from the assignment.
std::map<const Formula*, Entity> instantiate_universals(const Formula& f, const Assignment& a);

}  // namespace relcheck
