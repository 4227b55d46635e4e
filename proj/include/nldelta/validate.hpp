#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nldelta/model.hpp"

// Random-problem harness: the consistency-matrix path against the transfer
// oracle plus the scattering invariants, one deviation column per check.

namespace nldelta {

struct CorpusOptions {
  int size = 50;
  std::uint64_t seed = 7;
  bool allow_singular = false;  // adds alpha in {-0.5, -1}
};

/// N in {1,2,3}, real z in [0.5, 20], alpha in {0,1,2}, k in [0.3, 5],
/// positions in [-2, 2], A = 1, left incidence. Deterministic in the seed.
std::vector<ScatteringProblem> generate_corpus(const CorpusOptions& opts);

struct CheckColumn {
  std::string name;
  double tolerance = 0.0;
  double max_deviation = 0.0;
  int evaluated = 0;  // problems the check applied to
  int failures = 0;

  bool passed() const { return failures == 0; }
};

/// Deviations of one problem, keyed by column name. Checks that do not apply
/// (e.g. unitarity for complex couplings) are absent.
struct ProblemCheck {
  std::map<std::string, double> deviations;
  std::string error;  // set when a solver threw
};

ProblemCheck check_problem(const ScatteringProblem& problem);

struct ValidationReport {
  std::vector<CheckColumn> columns;
  int problems = 0;
  std::vector<std::string> failures;  // one line per failing (problem, check)

  bool passed() const { return failures.empty(); }
};

/// Column names and tolerances, in report order.
const std::vector<CheckColumn>& validation_columns();

ValidationReport run_validation(const CorpusOptions& opts);

std::string describe(const ScatteringProblem& problem);

}  // namespace nldelta
