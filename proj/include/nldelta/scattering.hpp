#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nldelta/model.hpp"
#include "nldelta/numerics.hpp"

namespace nldelta {

/// Consistency matrix of the Lippmann-Schwinger equation evaluated at the
/// centers: Phi_ii = 1 + g_i, Phi_ij = g_j exp(ik|c_i - c_j|).
struct PhiMatrix {
  Eigen::MatrixXcd entries;
  Complex determinant;
};

/// psi(c_i) relative to psi(c_N) for a trial modulus |psi(c_N)| = r.
struct CenterChain {
  std::vector<Complex> ratios;  // last entry exactly 1
  std::vector<double> moduli;   // r |ratios[i]|
  std::vector<Complex> g_values;
};

// All functions below work in the left-incidence frame. A right-incident
// problem is handled through its mirror image, so chain and matrix indices
// then refer to problem.mirrored().centers().

/// Phi built from the given center moduli. Propagates DomainError.
PhiMatrix build_phi(const ScatteringProblem& problem, const std::vector<double>& moduli);

/// Triangular back-substitution from the gauge psi(c_N) = r_trial (real).
/// Each g_j is evaluated at the modulus already fixed by the centers to its
/// right. Throws DomainError when a modulus hits a singular point of f.
CenterChain back_substitute(const ScatteringProblem& problem, double r_trial);

/// r |det Phi(moduli(r))| - |A|. NaN where the chain is undefined.
double closure_residual(const ScatteringProblem& problem, double r_trial);

/// Every self-consistent branch, ordered by |psi(c_N)|. Roots are located by
/// scan_closure().
/// Throws NoBranchError if the closure has no root in the scanned range.
std::vector<ScatteringSolution> solve_scattering(const ScatteringProblem& problem,
                                                 std::optional<RootScanConfig> cfg = std::nullopt);

/// psi(x) from the Lippmann-Schwinger sum of a solved branch.
Complex evaluate_wavefunction(const ScatteringProblem& problem, const ScatteringSolution& solution,
                              double x);

/// N = 1 power-law problems from the modulus equation directly (Kerr case via
/// the closed-form cubic). Returns every branch.
std::vector<ScatteringSolution> single_delta_closed_form(const ScatteringProblem& problem);

/// Linear problems: psi = Phi^{-1} A e^{ikc} with constant g. One branch.
ScatteringSolution solve_linear_direct(const ScatteringProblem& problem);

}  // namespace nldelta
