#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nldelta/model.hpp"

namespace nldelta {

/// Bound-state consistency matrix for real psi:
///   Phi_ii = 1 - (Omega_i / 2nu) |psi_i|^alpha_i,
///   Phi_ij = -(Omega_j / 2nu) e^{-nu |c_i - c_j|} |psi_j|^alpha_j.
struct BoundPhiMatrix {
  Eigen::MatrixXd entries;
  double determinant = 0.0;
};

BoundPhiMatrix build_bound_phi(const BoundProblem& problem, double nu, const std::vector<double>& psi);

/// Symmetric double well: two equal centers a distance `separation` apart.
struct SymmetricDoubleSpec {
  double omega = 1.0;
  double alpha = 0.0;
  double separation = 1.0;
  double amplitude = 0.0;  // A = |psi(c_1)| = |psi(c_2)|, 0 when unset
  double beta = 0.0;       // Omega A^alpha

  /// Sets amplitude and the derived beta together.
  SymmetricDoubleSpec with_amplitude(double a) const;
};

/// Closed form for one center. Throws DomainError for alpha >= 2 and
/// ValidationError for omega <= 0.
BoundStateSolution solve_single_bound(double omega, double alpha, double c = 0.0);

/// Integral of psi^2 from the closed-form self and cross terms. Equals 1 for
/// a normalised state. psi is taken in center order.
double bound_norm(const BoundProblem& problem, double nu, const std::vector<Complex>& psi);

/// psi(x) = sum_j (Omega_j / 2nu) e^{-nu |x - c_j|} |psi_j|^alpha_j psi_j.
Complex bound_wavefunction(const BoundStateSolution& solution, const BoundProblem& problem, double x);

struct ParityDiagnostic {
  Parity parity = Parity::None;
  int roots = 0;
  std::string note;
};

struct SymmetricDoubleResult {
  std::vector<BoundStateSolution> states;  // ascending nu
  std::vector<ParityDiagnostic> diagnostics;
  /// Largest |x_LW - x_cubic| over the accepted states.
  double cubic_deviation = 0.0;
  /// A below which the odd equation has no nontrivial Lambert-W root
  /// (d Omega A^alpha <= 2); 0 for alpha == 0.
  double odd_threshold_amplitude = 0.0;
};

/// Centers at -d/2 and +d/2. Each parity is reduced to one equation in A with
/// x = 2nu eliminated through Lambert W; every root is returned, each cross
/// checked against the explicit quadratic in x. Throws NoBoundStateError
/// (with the per-parity diagnostics in the message) when no state exists.
SymmetricDoubleResult solve_symmetric_double_detailed(double omega, double alpha, double separation);

std::vector<BoundStateSolution> solve_symmetric_double(double omega, double alpha, double separation);

/// x_{+/-}(A) from the Lambert-W route. Lower branch candidates are included
/// when the argument lies in [-1/e, 0). Trivial and nonpositive roots dropped.
std::vector<double> lambert_x(Parity parity, const SymmetricDoubleSpec& spec);

/// Positive roots of x^2 - 2 d beta A^2 x - 2 beta A^2 (2 - d beta) = 0: the
/// normalisation cubic with e^{-dx/2} eliminated, divided by x. The sign of
/// the parity cancels, so both parities share it.
std::vector<double> cubic_x(const SymmetricDoubleSpec& spec);

/// Normalisation residual of the symmetric state with amplitude A and x = 2nu,
/// 4 beta^2 A^2 (1 + (x/beta - 1)(1 + dx/2)) / x^3 - 1, evaluated as
/// 4 beta A^2 (1 - d beta/2 + dx/2) / x^2 - 1.
double symmetric_norm_residual(const SymmetricDoubleSpec& spec, double x);

struct NuScan {
  double nu_min = 1e-3;
  double nu_max = 0.0;  // 0 selects 2 max_i (Omega_i/2)^{2/(2-alpha_i)} + 1
  int seeds = 64;
};

NuScan default_nu_scan(const BoundProblem& problem);

/// Damped Newton on {Phi psi = 0, bound_norm = 1} from sign-pattern and nu
/// seeds. Solutions deduplicated by nu within 1e-8. Throws ConvergenceError
/// listing the seeds when nothing converges.
std::vector<BoundStateSolution> solve_general_bound(const BoundProblem& problem,
                                                    std::optional<NuScan> scan = std::nullopt);

enum class BoundMethod { SingleClosedForm, SymmetricLambertW, GeneralNewton };

std::string to_string(BoundMethod m);

struct BoundReport {
  BoundMethod method = BoundMethod::GeneralNewton;
  std::vector<BoundStateSolution> states;
  std::vector<ParityDiagnostic> diagnostics;  // symmetric double well only
};

/// One center: closed form. Two equal centers: Lambert W. Otherwise Newton.
/// Propagates NoBoundStateError / ConvergenceError / DomainError.
BoundReport solve_bound(const BoundProblem& problem);

}  // namespace nldelta
