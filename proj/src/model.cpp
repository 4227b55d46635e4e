#include "nldelta/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nldelta {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_response(const Nonlinearity& nl, const std::string& field) {
  std::visit(Overloaded{
                 [&](const PowerLaw& p) {
                   if (!finite(p.coupling)) throw ValidationError(field + ".z", "coupling must be finite");
                   if (!std::isfinite(p.exponent))
                     throw ValidationError(field + ".alpha", "exponent must be finite");
                 },
                 [&](const Linear& l) {
                   if (!finite(l.coupling)) throw ValidationError(field + ".z", "coupling must be finite");
                 },
                 [&](const CustomResponse& c) {
                   if (!c.map) throw ValidationError(field, "custom response has no map");
                 },
             },
             nl);
}

}  // namespace

Complex evaluate_f(const Nonlinearity& nl, double modulus) {
  if (!(modulus >= 0.0)) throw DomainError("evaluate_f: modulus must be >= 0");
  return std::visit(Overloaded{
                        [&](const PowerLaw& p) -> Complex {
                          if (p.exponent == 0.0) return p.coupling;
                          if (modulus == 0.0) {
                            if (p.exponent < 0.0)
                              throw DomainError("evaluate_f: |psi|^alpha diverges at psi = 0 for alpha < 0");
                            return Complex{0.0, 0.0};
                          }
                          return p.coupling * std::pow(modulus, p.exponent);
                        },
                        [](const Linear& l) -> Complex { return l.coupling; },
                        [&](const CustomResponse& c) -> Complex { return c.map(modulus); },
                    },
                    nl);
}

Complex effective_g(const Nonlinearity& nl, double modulus, double k) {
  if (!(k > 0.0)) throw DomainError("effective_g: k must be > 0");
  return Complex{0.0, 1.0 / (2.0 * k)} * evaluate_f(nl, modulus);
}

Complex coupling_of(const Nonlinearity& nl) {
  if (auto p = std::get_if<PowerLaw>(&nl)) return p->coupling;
  if (auto l = std::get_if<Linear>(&nl)) return l->coupling;
  return {0.0, 0.0};
}

double exponent_of(const Nonlinearity& nl) {
  if (auto p = std::get_if<PowerLaw>(&nl)) return p->exponent;
  return 0.0;
}

bool is_linear(const Nonlinearity& nl) {
  if (std::holds_alternative<Linear>(nl)) return true;
  if (auto p = std::get_if<PowerLaw>(&nl)) return p->exponent == 0.0;
  return false;
}

ScatteringProblem validate_and_sort(std::vector<DeltaCenter> centers, double k, Complex amplitude,
                                    Incidence incidence) {
  if (centers.empty()) throw ValidationError("centers", "at least one delta center is required");
  if (!(std::isfinite(k) && k > 0.0)) throw ValidationError("k", "wavenumber must be finite and > 0");
  if (!finite(amplitude) || std::abs(amplitude) == 0.0)
    throw ValidationError("A", "incident amplitude must be finite and nonzero");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const std::string field = "centers[" + std::to_string(i) + "]";
    if (!std::isfinite(centers[i].position))
      throw ValidationError(field + ".c", "position must be finite");
    check_response(centers[i].response, field);
  }
  std::stable_sort(centers.begin(), centers.end(),
                   [](const DeltaCenter& a, const DeltaCenter& b) { return a.position < b.position; });
  for (std::size_t i = 1; i < centers.size(); ++i) {
    if (centers[i].position - centers[i - 1].position < kDuplicateTolerance)
      throw ValidationError("centers", "duplicate center position " + std::to_string(centers[i].position));
  }
  ScatteringProblem p;
  p.centers_ = std::move(centers);
  p.k_ = k;
  p.amplitude_ = amplitude;
  p.incidence_ = incidence;
  return p;
}

ScatteringProblem ScatteringProblem::with_wavenumber(double k) const {
  if (!(std::isfinite(k) && k > 0.0)) throw ValidationError("k", "wavenumber must be finite and > 0");
  ScatteringProblem p = *this;
  p.k_ = k;
  return p;
}

ScatteringProblem ScatteringProblem::with_incidence(Incidence side) const {
  ScatteringProblem p = *this;
  p.incidence_ = side;
  return p;
}

ScatteringProblem ScatteringProblem::mirrored() const {
  ScatteringProblem p = *this;
  std::reverse(p.centers_.begin(), p.centers_.end());
  for (auto& c : p.centers_) c.position = -c.position;
  p.incidence_ = incidence_ == Incidence::Left ? Incidence::Right : Incidence::Left;
  return p;
}

double ScatteringProblem::max_coupling_modulus() const {
  double m = 0.0;
  for (const auto& c : centers_) m = std::max(m, std::abs(coupling_of(c.response)));
  return m;
}

BoundProblem validate_bound_problem(std::vector<BoundCenter> centers) {
  if (centers.empty()) throw ValidationError("centers", "at least one delta center is required");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const std::string field = "centers[" + std::to_string(i) + "]";
    if (!std::isfinite(centers[i].position)) throw ValidationError(field + ".c", "position must be finite");
    if (!(std::isfinite(centers[i].strength) && centers[i].strength > 0.0))
      throw ValidationError(field + ".omega", "strength must be finite and > 0");
    if (!std::isfinite(centers[i].exponent)) throw ValidationError(field + ".alpha", "exponent must be finite");
  }
  std::stable_sort(centers.begin(), centers.end(),
                   [](const BoundCenter& a, const BoundCenter& b) { return a.position < b.position; });
  for (std::size_t i = 1; i < centers.size(); ++i) {
    if (centers[i].position - centers[i - 1].position < kDuplicateTolerance)
      throw ValidationError("centers", "duplicate center position " + std::to_string(centers[i].position));
  }
  BoundProblem p;
  p.centers_ = std::move(centers);
  return p;
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::None: return "none";
  }
  return "none";
}

std::string to_string(Incidence side) { return side == Incidence::Left ? "left" : "right"; }

BoundStateSolution make_bound_solution(double nu, std::vector<Complex> psi, Parity parity,
                                       double norm_residual, int branch_index) {
  BoundStateSolution s;
  s.nu = nu;
  s.energy = -nu * nu;
  s.psi_at_centers = std::move(psi);
  s.parity = parity;
  s.norm_residual = norm_residual;
  s.branch_index = branch_index;
  return s;
}

}  // namespace nldelta
