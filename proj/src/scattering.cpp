#include "nldelta/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nldelta {
namespace {

constexpr Complex kI{0.0, 1.0};

ScatteringProblem left_frame(const ScatteringProblem& p) {
  return p.incidence() == Incidence::Left ? p : p.mirrored();
}

Complex phase(double angle) { return std::polar(1.0, angle); }

// R and T read off the asymptotic regions of the Lippmann-Schwinger sum.
void fill_amplitudes(const ScatteringProblem& left, const std::vector<Complex>& psi,
                     const std::vector<Complex>& g, ScatteringSolution& out) {
  const double k = left.wavenumber();
  const Complex a = left.incident_amplitude();
  Complex fwd{0.0, 0.0}, back{0.0, 0.0};
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double c = left.centers()[j].position;
    fwd += g[j] * psi[j] * phase(-k * c);
    back += g[j] * psi[j] * phase(k * c);
  }
  out.transmission = 1.0 - fwd / a;
  out.reflection = -back / a;
}

// Convert left-frame center values back to the caller's ordering.
std::vector<Complex> to_problem_order(const ScatteringProblem& problem, std::vector<Complex> psi) {
  if (problem.incidence() == Incidence::Right) std::reverse(psi.begin(), psi.end());
  return psi;
}

ScatteringSolution branch_from_root(const ScatteringProblem& problem, const ScatteringProblem& left, double r,
                                    int index, bool grazing) {
  const CenterChain chain = back_substitute(left, r);
  const PhiMatrix phi = build_phi(left, chain.moduli);
  const std::size_t n = left.size();
  const double k = left.wavenumber();
  const Complex a = left.incident_amplitude();

  // Restore the physical phase: psi(c_N) = A e^{ikc_N} / det Phi.
  std::vector<Complex> psi(n);
  psi[n - 1] = a * phase(k * left.centers()[n - 1].position) / phi.determinant;
  for (std::size_t i = 0; i + 1 < n; ++i) psi[i] = chain.ratios[i] * psi[n - 1];

  ScatteringSolution s;
  fill_amplitudes(left, psi, chain.g_values, s);
  s.psi_at_centers = to_problem_order(problem, std::move(psi));
  s.branch_index = index;
  s.closure_residual = std::abs(closure_residual(left, r));
  s.psi_cn_modulus = r;
  s.grazing = grazing;
  return s;
}

}  // namespace

PhiMatrix build_phi(const ScatteringProblem& problem, const std::vector<double>& moduli) {
  const ScatteringProblem left = left_frame(problem);
  const std::size_t n = left.size();
  if (moduli.size() != n) throw ValidationError("moduli", "length must equal the number of centers");
  const double k = left.wavenumber();
  std::vector<Complex> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = effective_g(left.centers()[j].response, moduli[j], k);

  PhiMatrix phi;
  phi.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (i == j) {
        phi.entries(ii, jj) = 1.0 + g[j];
      } else {
        const double dist = std::abs(left.centers()[i].position - left.centers()[j].position);
        phi.entries(ii, jj) = g[j] * phase(k * dist);
      }
    }
  }
  phi.determinant = n == 1 ? phi.entries(0, 0) : phi.entries.partialPivLu().determinant();
  return phi;
}

CenterChain back_substitute(const ScatteringProblem& problem, double r_trial) {
  if (!(r_trial > 0.0)) throw DomainError("back_substitute: trial modulus must be > 0");
  const ScatteringProblem left = left_frame(problem);
  const std::size_t n = left.size();
  const double k = left.wavenumber();
  const auto& centers = left.centers();

  // Unscaled values psi_hat with psi_hat(c_N) = r_trial.
  std::vector<Complex> psi(n);
  CenterChain chain;
  chain.moduli.assign(n, 0.0);
  chain.g_values.assign(n, Complex{});
  psi[n - 1] = r_trial;
  chain.moduli[n - 1] = r_trial;
  chain.g_values[n - 1] = effective_g(centers[n - 1].response, r_trial, k);

  // Rows i < N minus row N leave an upper-triangular homogeneous system:
  //   e^{-ikc_i} psi_i + sum_{i<j<N} g_j e^{-ikc_j}(e^{2ik(c_j-c_i)} - 1) psi_j
  //     + e^{-ikc_N}[g_N (e^{2ik(c_N-c_i)} - 1) - 1] psi_N = 0.
  const double cn = centers[n - 1].position;
  for (std::size_t ii = n - 1; ii-- > 0;) {
    const double ci = centers[ii].position;
    Complex acc = phase(-k * cn) * (1.0 - chain.g_values[n - 1] * (phase(2.0 * k * (cn - ci)) - 1.0)) * psi[n - 1];
    for (std::size_t j = ii + 1; j + 1 < n; ++j) {
      const double cj = centers[j].position;
      acc -= chain.g_values[j] * phase(-k * cj) * (phase(2.0 * k * (cj - ci)) - 1.0) * psi[j];
    }
    psi[ii] = phase(k * ci) * acc;
    chain.moduli[ii] = std::abs(psi[ii]);
    chain.g_values[ii] = effective_g(centers[ii].response, chain.moduli[ii], k);
  }

  chain.ratios.resize(n);
  for (std::size_t i = 0; i < n; ++i) chain.ratios[i] = psi[i] / r_trial;
  chain.ratios[n - 1] = 1.0;
  return chain;
}

double closure_residual(const ScatteringProblem& problem, double r_trial) {
  try {
    const CenterChain chain = back_substitute(problem, r_trial);
    const PhiMatrix phi = build_phi(problem, chain.moduli);
    const double value = r_trial * std::abs(phi.determinant) - std::abs(problem.incident_amplitude());
    return std::isfinite(value) ? value : std::numeric_limits<double>::quiet_NaN();
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::vector<ScatteringSolution> solve_scattering(const ScatteringProblem& problem,
                                                 std::optional<RootScanConfig> cfg) {
  const ScatteringProblem left = left_frame(problem);
  auto h = [&left](double r) { return closure_residual(left, r); };

  RootScanConfig scan;
  const std::vector<ScanRoot> roots = scan_closure(h, problem, cfg, &scan);

  if (roots.empty())
    throw NoBranchError("no scattering branch: the closure equation has no root for |psi(c_N)| in [" +
                        std::to_string(scan.r_min) + ", " + std::to_string(scan.r_max) +
                        "]; widen the scan range (r_max)");

  std::vector<ScatteringSolution> out;
  out.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i)
    out.push_back(branch_from_root(problem, left, roots[i].value, static_cast<int>(i), roots[i].grazing));
  return out;
}

Complex evaluate_wavefunction(const ScatteringProblem& problem, const ScatteringSolution& solution, double x) {
  const ScatteringProblem left = left_frame(problem);
  const bool mirrored = problem.incidence() == Incidence::Right;
  const double xl = mirrored ? -x : x;
  const double k = left.wavenumber();
  const std::size_t n = left.size();
  Complex psi = left.incident_amplitude() * phase(k * xl);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex pj = solution.psi_at_centers[mirrored ? n - 1 - j : j];
    const Complex g = effective_g(left.centers()[j].response, std::abs(pj), k);
    psi -= g * phase(k * std::abs(xl - left.centers()[j].position)) * pj;
  }
  return psi;
}

std::vector<ScatteringSolution> single_delta_closed_form(const ScatteringProblem& problem) {
  if (problem.size() != 1) throw ValidationError("centers", "closed form requires exactly one center");
  const ScatteringProblem left = left_frame(problem);
  const auto& response = left.centers()[0].response;
  if (std::holds_alternative<CustomResponse>(response))
    throw ValidationError("centers[0]", "closed form requires a power-law response");
  const double k = left.wavenumber();
  const double c = left.centers()[0].position;
  const Complex a = left.incident_amplitude();
  const double a_mod = std::abs(a);
  const Complex z_hat = coupling_of(response) / (2.0 * k);
  const double alpha = exponent_of(response);

  std::vector<double> moduli;
  if (is_linear(response)) {
    moduli.push_back(a_mod / std::abs(1.0 + kI * z_hat));
  } else if (alpha == 2.0) {
    moduli = solve_modulus_cubic(z_hat, a_mod);
  } else {
    // |x + i zh x^{alpha+1}|^2 = |A|^2, kept as one product so alpha < 0 cannot overflow near 0
    auto h = [&](double x) {
      try {
        const Complex f_hat = evaluate_f(response, x) / (2.0 * k);
        return std::norm(x + kI * (x * f_hat)) - a_mod * a_mod;
      } catch (const DomainError&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    for (const auto& r : scan_closure(h, problem, std::nullopt)) moduli.push_back(r.value);
  }
  if (moduli.empty()) throw NoBranchError("single delta: modulus equation has no positive root");

  std::vector<ScatteringSolution> out;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const double x = moduli[i];
    const Complex g = effective_g(response, x, k);
    ScatteringSolution s;
    s.psi_at_centers = {a * phase(k * c) / (1.0 + g)};
    s.reflection = -g * phase(2.0 * k * c) / (1.0 + g);
    s.transmission = 1.0 / (1.0 + g);
    s.branch_index = static_cast<int>(i);
    s.closure_residual = std::abs(x * std::abs(1.0 + g) - a_mod);
    s.psi_cn_modulus = x;
    out.push_back(std::move(s));
  }
  return out;
}

ScatteringSolution solve_linear_direct(const ScatteringProblem& problem) {
  const ScatteringProblem left = left_frame(problem);
  for (const auto& c : left.centers()) {
    if (!is_linear(c.response)) throw ValidationError("centers", "direct solve requires linear centers");
  }
  const std::size_t n = left.size();
  const double k = left.wavenumber();
  const PhiMatrix phi = build_phi(left, std::vector<double>(n, 1.0));
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    rhs(static_cast<Eigen::Index>(i)) = left.incident_amplitude() * phase(k * left.centers()[i].position);
  const Eigen::VectorXcd sol = phi.entries.partialPivLu().solve(rhs);

  std::vector<Complex> psi(sol.data(), sol.data() + sol.size());
  std::vector<Complex> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = effective_g(left.centers()[j].response, 1.0, k);
  ScatteringSolution s;
  fill_amplitudes(left, psi, g, s);
  s.psi_cn_modulus = std::abs(psi.back());
  s.psi_at_centers = to_problem_order(problem, std::move(psi));
  return s;
}

}  // namespace nldelta
