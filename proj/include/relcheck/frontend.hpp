#pragma once

#include <string>
#include <vector>

#include "relcheck/fol.hpp"
#include "relcheck/model.hpp"
#include "relcheck/verifier.hpp"

namespace relcheck {

// Spatial axis shown against time; 1, 2 or 3.
int parse_plane(const std::string& name);

// Static Minkowski diagram of a scenario projected onto the (x_axis, t) plane.
std::string render_diagram(const Scenario& s, int axis);

struct QueryResult {
  FormulaPtr formula;
  // Free variables not named by the scenario, bound existentially.
  std::vector<std::string> existential;
  Verdict verdict;
};

// Evaluates a formula over the entities of a scenario.
QueryResult evaluate_query(const Scenario& s, const std::string& text, const Corpus& corpus,
                           const Budget& budget);

}  // namespace relcheck
