#pragma once

#include <optional>
#include <vector>

#include "nldelta/model.hpp"
#include "nldelta/numerics.hpp"

// Reference solvers that share no code with the consistency-matrix paths:
// piecewise plane waves marched across the centers using only continuity and
// the slope jump psi'(c+) - psi'(c-) = f(|psi(c)|) psi(c).

namespace nldelta::oracle {

/// a e^{ikx} + b e^{-ikx} on [left_edge, right_edge].
struct PlaneWaveRegion {
  Complex a_coeff;
  Complex b_coeff;
  double left_edge;
  double right_edge;
};

struct TransferResult {
  Complex incident;   // a of the leftmost region
  Complex reflected;  // b of the leftmost region
  std::vector<Complex> psi_at_centers;
  std::vector<PlaneWaveRegion> regions;  // left to right, N + 1 entries
};

/// Fixes psi = t e^{ikx} beyond the last center and marches right to left.
/// Exact: every psi(c_i) is known from the region to its right before the
/// jump is applied. Works in the left-incidence frame (right-incident
/// problems are mirrored). Throws DomainError on a singular modulus.
TransferResult transfer_scatter(const ScatteringProblem& problem, double t_modulus);

struct OracleBranch {
  Complex transmission;
  Complex reflection;
  std::vector<Complex> psi_at_centers;  // ordered like problem.centers()
  double t_modulus = 0.0;

  double t_intensity() const { return std::norm(transmission); }
  double r_intensity() const { return std::norm(reflection); }
};

/// All roots of |incident(t)| - |A|, each rescaled to the problem's incident
/// amplitude. Ordered by t.
std::vector<OracleBranch> oracle_branches(const ScatteringProblem& problem,
                                          std::optional<RootScanConfig> cfg = std::nullopt);

// ---------------------------------------------------------------------------
// Bound states by shooting
// ---------------------------------------------------------------------------

/// Normalised coefficient of the growing exponential beyond the last center,
/// starting from psi = gamma e^{nu (x - c_1)} on the left. Zero for a bound
/// state. Sign carries the bracket information.
double shooting_mismatch(const BoundProblem& problem, double nu, double gamma);

/// Integral of psi^2 for the shot solution (growing tail dropped).
double shooting_norm(const BoundProblem& problem, double nu, double gamma);

/// psi(c_i) of the shot solution.
std::vector<double> shooting_center_values(const BoundProblem& problem, double nu, double gamma);

struct ShootingGrid {
  double nu_min = 1e-4;
  double nu_max = 10.0;
  int nu_points = 1200;
  double gamma_min = 1e-4;
  double gamma_max = 1e2;
  int gamma_points = 240;
};

struct ShotState {
  double nu;
  double gamma;
  std::vector<double> psi_at_centers;
};

/// Joint (gamma, nu) search for states with vanishing growing tail and unit
/// norm. Throws ConvergenceError if nothing is found.
std::vector<ShotState> shooting_states(const BoundProblem& problem, const ShootingGrid& grid);

/// nu values of shooting_states(), ascending.
std::vector<double> shooting_bound(const BoundProblem& problem, const ShootingGrid& grid);

}  // namespace nldelta::oracle
