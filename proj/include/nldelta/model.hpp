#pragma once

#include <complex>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "nldelta/errors.hpp"

namespace nldelta {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Nonlinear response f(|psi|) of a single delta site.
// ---------------------------------------------------------------------------

/// f(m) = coupling * m^exponent.
struct PowerLaw {
  Complex coupling;
  double exponent = 0.0;
};

/// f(m) = coupling, independent of the modulus.
struct Linear {
  Complex coupling;
};

/// User supplied f(m). The map may throw DomainError where it is undefined;
/// the scattering scanners treat such points as holes.
struct CustomResponse {
  std::function<Complex(double)> map;
  std::string label = "custom";
};

using Nonlinearity = std::variant<PowerLaw, Linear, CustomResponse>;

/// f(|psi|) for the given response.
/// Throws DomainError for modulus < 0, or modulus == 0 with a negative
/// power-law exponent.
Complex evaluate_f(const Nonlinearity& nl, double modulus);

/// g = (i / 2k) f(|psi|), the effective opacity entering the consistency
/// matrix. Requires k > 0.
Complex effective_g(const Nonlinearity& nl, double modulus, double k);

/// Coupling z of a PowerLaw/Linear response (0 for custom maps).
Complex coupling_of(const Nonlinearity& nl);
/// Exponent alpha of a PowerLaw response (0 for Linear and custom maps).
double exponent_of(const Nonlinearity& nl);
/// True when f does not depend on the modulus (Linear, or PowerLaw with alpha 0).
bool is_linear(const Nonlinearity& nl);

// ---------------------------------------------------------------------------
// Scattering problem
// ---------------------------------------------------------------------------

struct DeltaCenter {
  double position = 0.0;
  Nonlinearity response = Linear{};

  static DeltaCenter power_law(double position, Complex coupling, double exponent) {
    return {position, PowerLaw{coupling, exponent}};
  }
  static DeltaCenter linear(double position, Complex coupling) {
    return {position, Linear{coupling}};
  }
};

enum class Incidence { Left, Right };

/// Centers closer than this are rejected as duplicates.
inline constexpr double kDuplicateTolerance = 1e-12;

/// Validated scattering configuration: centers strictly increasing, k > 0,
/// |A| > 0. Construct through validate_and_sort().
class ScatteringProblem {
 public:
  const std::vector<DeltaCenter>& centers() const noexcept { return centers_; }
  std::size_t size() const noexcept { return centers_.size(); }
  double wavenumber() const noexcept { return k_; }
  Complex incident_amplitude() const noexcept { return amplitude_; }
  Incidence incidence() const noexcept { return incidence_; }

  /// Copy with a different wavenumber (validated).
  ScatteringProblem with_wavenumber(double k) const;
  /// Copy with a different incidence side.
  ScatteringProblem with_incidence(Incidence side) const;

  /// Geometry reflected through x -> -x, with the incidence side flipped. A
  /// right-incident problem becomes the equivalent left-incident one.
  ScatteringProblem mirrored() const;

  /// Largest |z| over power-law/linear centers.
  double max_coupling_modulus() const;

 private:
  friend ScatteringProblem validate_and_sort(std::vector<DeltaCenter>, double, Complex,
                                             Incidence);
  ScatteringProblem() = default;

  std::vector<DeltaCenter> centers_;
  double k_ = 1.0;
  Complex amplitude_{1.0, 0.0};
  Incidence incidence_ = Incidence::Left;
};

/// Sorts centers by position and validates every field.
/// Throws ValidationError naming the field (centers, centers[i].position, k, A).
ScatteringProblem validate_and_sort(std::vector<DeltaCenter> centers, double k, Complex amplitude,
                                    Incidence incidence = Incidence::Left);

// ---------------------------------------------------------------------------
// Bound-state problem (attractive convention: -Omega delta |psi|^alpha psi)
// ---------------------------------------------------------------------------

struct BoundCenter {
  double position = 0.0;
  double strength = 1.0;  // Omega > 0
  double exponent = 0.0;  // alpha
};

class BoundProblem {
 public:
  const std::vector<BoundCenter>& centers() const noexcept { return centers_; }
  std::size_t size() const noexcept { return centers_.size(); }

 private:
  friend BoundProblem validate_bound_problem(std::vector<BoundCenter>);
  BoundProblem() = default;
  std::vector<BoundCenter> centers_;
};

/// Sorts and validates: nonempty, finite, Omega > 0, distinct positions.
BoundProblem validate_bound_problem(std::vector<BoundCenter> centers);

// ---------------------------------------------------------------------------
// Solutions
// ---------------------------------------------------------------------------

/// One self-consistent scattering branch.
struct ScatteringSolution {
  std::vector<Complex> psi_at_centers;  // ordered like problem.centers()
  Complex reflection;
  Complex transmission;
  int branch_index = 0;
  double closure_residual = 0.0;  // |r |det Phi| - |A|| at the accepted root
  double psi_cn_modulus = 0.0;    // |psi| at the last center in the incidence frame
  bool grazing = false;           // root found as a tangency rather than a sign change

  double t_intensity() const { return std::norm(transmission); }
  double r_intensity() const { return std::norm(reflection); }
};

enum class Parity { Even, Odd, None };

std::string to_string(Parity p);
std::string to_string(Incidence side);

struct BoundStateSolution {
  double nu = 0.0;
  double energy = 0.0;  // always -nu^2
  std::vector<Complex> psi_at_centers;
  Parity parity = Parity::None;
  double norm_residual = 0.0;
  int branch_index = 0;
};

/// Convenience constructor enforcing energy = -nu^2.
BoundStateSolution make_bound_solution(double nu, std::vector<Complex> psi, Parity parity,
                                       double norm_residual, int branch_index = 0);

}  // namespace nldelta
