#include "nldelta/bound_states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nldelta/numerics.hpp"

namespace nldelta {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double single_amplitude(double omega, double alpha) {
  return alpha < 2.0 ? std::pow(omega / 2.0, 1.0 / (2.0 - alpha)) : 1.0;
}

BoundProblem symmetric_pair(double omega, double alpha, double d) {
  return validate_bound_problem({{-0.5 * d, omega, alpha}, {0.5 * d, omega, alpha}});
}

// Mirror-symmetric geometry and couplings.
bool is_symmetric(const BoundProblem& problem) {
  const auto& cs = problem.centers();
  const std::size_t n = cs.size();
  const double mid = 0.5 * (cs.front().position + cs.back().position);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = cs[i];
    const auto& b = cs[n - 1 - i];
    if (std::abs((a.position - mid) + (b.position - mid)) > 1e-12 * (1.0 + std::abs(mid)) ||
        a.strength != b.strength || a.exponent != b.exponent)
      return false;
  }
  return true;
}

Parity classify(const BoundProblem& problem, const std::vector<double>& psi) {
  if (psi.size() < 2 || !is_symmetric(problem)) return Parity::None;
  const std::size_t n = psi.size();
  double scale = 0.0;
  for (double v : psi) scale = std::max(scale, std::abs(v));
  bool even = true, odd = true;
  for (std::size_t i = 0; i < n; ++i) {
    even = even && std::abs(psi[i] - psi[n - 1 - i]) <= 1e-6 * scale;
    odd = odd && std::abs(psi[i] + psi[n - 1 - i]) <= 1e-6 * scale;
  }
  if (even) return Parity::Even;
  if (odd) return Parity::Odd;
  return Parity::None;
}

std::vector<Complex> to_complex(const std::vector<double>& v) { return {v.begin(), v.end()}; }

}  // namespace

SymmetricDoubleSpec SymmetricDoubleSpec::with_amplitude(double a) const {
  SymmetricDoubleSpec s = *this;
  s.amplitude = a;
  s.beta = omega * std::pow(a, alpha);
  return s;
}

BoundPhiMatrix build_bound_phi(const BoundProblem& problem, double nu, const std::vector<double>& psi) {
  const auto& cs = problem.centers();
  const auto n = static_cast<Eigen::Index>(cs.size());
  if (psi.size() != cs.size()) throw ValidationError("psi", "length must equal the number of centers");
  BoundPhiMatrix phi;
  phi.entries.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& c = cs[static_cast<std::size_t>(j)];
    const double w = c.strength / (2.0 * nu) * std::pow(std::abs(psi[static_cast<std::size_t>(j)]), c.exponent);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dist = std::abs(cs[static_cast<std::size_t>(i)].position - c.position);
      phi.entries(i, j) = (i == j ? 1.0 : 0.0) - w * std::exp(-nu * dist);
    }
  }
  phi.determinant = phi.entries.partialPivLu().determinant();
  return phi;
}

BoundStateSolution solve_single_bound(double omega, double alpha, double c) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega", "must be finite and > 0");
  if (!std::isfinite(alpha)) throw ValidationError("alpha", "must be finite");
  if (alpha >= 2.0)
    throw DomainError("single delta bound state: alpha = " + std::to_string(alpha) +
                      " >= 2, the closed form (Omega/2)^{1/(2-alpha)} is singular");
  const double psi = std::pow(omega / 2.0, 1.0 / (2.0 - alpha));
  const double nu = std::pow(omega / 2.0, 2.0 / (2.0 - alpha));
  const BoundProblem p = validate_bound_problem({{c, omega, alpha}});
  const double residual = std::abs(bound_norm(p, nu, {psi}) - 1.0);
  return make_bound_solution(nu, {psi}, Parity::None, residual, 0);
}

double bound_norm(const BoundProblem& problem, double nu, const std::vector<Complex>& psi) {
  const auto& cs = problem.centers();
  const std::size_t n = cs.size();
  if (psi.size() != n) throw ValidationError("psi", "length must equal the number of centers");
  std::vector<Complex> weight(n);
  for (std::size_t i = 0; i < n; ++i)
    weight[i] = cs[i].strength / (2.0 * nu) * std::pow(std::abs(psi[i]), cs[i].exponent) * psi[i];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += std::norm(weight[i]) / nu;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = cs[j].position - cs[i].position;
      total += 2.0 * (weight[i] * std::conj(weight[j])).real() * std::exp(-nu * d) * (1.0 / nu + d);
    }
  }
  return total;
}

Complex bound_wavefunction(const BoundStateSolution& solution, const BoundProblem& problem, double x) {
  const auto& cs = problem.centers();
  const double nu = solution.nu;
  Complex psi{0.0, 0.0};
  for (std::size_t j = 0; j < cs.size(); ++j) {
    const Complex pj = solution.psi_at_centers[j];
    psi += cs[j].strength / (2.0 * nu) * std::exp(-nu * std::abs(x - cs[j].position)) *
           std::pow(std::abs(pj), cs[j].exponent) * pj;
  }
  return psi;
}

// ---------------------------------------------------------------------------
// Symmetric double well
// ---------------------------------------------------------------------------

std::vector<double> lambert_x(Parity parity, const SymmetricDoubleSpec& spec) {
  const double beta = spec.beta;
  const double d = spec.separation;
  const double half = 0.5 * d * beta;
  const double sign = parity == Parity::Odd ? -1.0 : 1.0;
  const double arg = sign * half * std::exp(-half);

  // For the odd sign the two real branches are w = -d beta / 2 (x = 0) and
  // the nontrivial root. The trivial one sits on W0 when d beta / 2 <= 1 and
  // on W-1 otherwise; dropping it by branch avoids comparing against a
  // value that the branch point (or underflow of arg) makes inaccurate.
  std::vector<LambertBranch> branches{LambertBranch::Principal};
  if (sign < 0.0) {
    if (half == 1.0) return {};
    branches = {half < 1.0 ? LambertBranch::Lower : LambertBranch::Principal};
  }

  std::vector<double> out;
  for (auto br : branches) {
    double w;
    try {
      w = lambert_w(br, arg);
    } catch (const DomainError&) {
      continue;
    }
    double x = beta + 2.0 * w / d;
    // W is ill-conditioned next to -1/e; a few Newton steps on the same
    // equation (odd: divided by x, so the trivial root is gone) recover the
    // digits. Kept only while the steps shrink.
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 4 && x > 0.0 && std::isfinite(x); ++it) {
      const double e = std::exp(-0.5 * d * x);
      double h, dh;
      if (sign < 0.0) {
        const double em1 = std::expm1(-0.5 * d * x);
        h = 1.0 + beta * em1 / x;
        dh = beta * (-0.5 * d * e * x - em1) / (x * x);
      } else {
        h = x - beta - beta * e;
        dh = 1.0 + 0.5 * d * beta * e;
      }
      const double step = h / dh;
      if (!std::isfinite(step) || !(std::abs(step) < last) || !(x - step > 0.0)) break;
      x -= step;
      last = std::abs(step);
    }
    // x = 0 is the trivial solution of the odd equation.
    if (!(x > 1e-9 * beta) || !std::isfinite(x)) continue;
    if (std::none_of(out.begin(), out.end(), [&](double y) { return std::abs(y - x) <= 1e-12 * x; }))
      out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> cubic_x(const SymmetricDoubleSpec& spec) {
  const double a2 = spec.amplitude * spec.amplitude;
  const double b = -2.0 * spec.separation * spec.beta * a2;
  const double c = -2.0 * spec.beta * a2 * (2.0 - spec.separation * spec.beta);
  double disc = b * b - 4.0 * c;
  // At the odd threshold the two roots merge and rounding in 2 - d beta can
  // push the discriminant just below zero.
  if (disc < 0.0 && disc >= -1e-8 * (b * b + 4.0 * std::abs(c))) disc = 0.0;
  if (disc < 0.0) return {};
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  std::vector<double> out;
  for (double x : {q, q != 0.0 ? c / q : 0.0}) {
    if (x > 0.0) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double symmetric_norm_residual(const SymmetricDoubleSpec& spec, double x) {
  const double beta = spec.beta;
  const double a = spec.amplitude;
  const double d = spec.separation;
  // 1 + (x/beta - 1)(1 + dx/2) = (x/beta)(1 - d beta/2 + dx/2); the expanded
  // form cancels to O(x^2) near the odd threshold
  return 4.0 * beta * a * a * (1.0 - 0.5 * d * beta + 0.5 * d * x) / (x * x) - 1.0;
}

SymmetricDoubleResult solve_symmetric_double_detailed(double omega, double alpha, double separation) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("omega", "must be finite and > 0");
  if (!(separation > 0.0) || !std::isfinite(separation))
    throw ValidationError("separation", "must be finite and > 0");
  if (!std::isfinite(alpha)) throw ValidationError("alpha", "must be finite");

  SymmetricDoubleSpec base{omega, alpha, separation, 0.0, 0.0};
  const BoundProblem problem = symmetric_pair(omega, alpha, separation);
  const double a_ref = single_amplitude(omega, alpha);
  const double a_lo = a_ref * 1e-6;
  const double a_hi = a_ref * 1e6;

  SymmetricDoubleResult result;
  if (alpha != 0.0) result.odd_threshold_amplitude = std::pow(2.0 / (separation * omega), 1.0 / alpha);

  auto x_of = [&](Parity parity, double a) {
    const auto xs = lambert_x(parity, base.with_amplitude(a));
    return xs.empty() ? kNaN : xs.front();
  };
  auto residual_of = [&](Parity parity, double a) {
    const double x = x_of(parity, a);
    return std::isnan(x) ? kNaN : symmetric_norm_residual(base.with_amplitude(a), x);
  };

  RootScanConfig cfg;
  cfg.n_scan = 2000;
  // Near the branch point x carries rounding noise well above 1e-14; the
  // residual has no poles, so the acceptance check only needs to be loose.
  cfg.refine_tol = 1e-10;
  cfg.spacing = GridSpacing::Log;

  auto amplitude_roots = [&](Parity parity) -> std::vector<double> {
    std::vector<double> amps;
    try {
      if (parity == Parity::Even || alpha == 0.0) {
        if (parity == Parity::Odd && separation * omega <= 2.0) return amps;
        cfg.r_min = a_lo;
        cfg.r_max = a_hi;
        amps = find_all_positive_roots([&](double a) { return residual_of(parity, a); }, cfg);
      } else {
        // Odd states live on one side of A_th; scan the log distance to it so
        // weakly bound threshold states are resolved.
        const double a_th = result.odd_threshold_amplitude;
        const double dir = alpha > 0.0 ? 1.0 : -1.0;
        const double span = alpha > 0.0 ? std::log(std::max(a_hi, 1e3 * a_th) / a_th)
                                        : std::log(a_th / std::min(a_lo, 1e-3 * a_th));
        // Closer to A_th the branch-point conditioning of W swamps x.
        cfg.r_min = 1e-6 / std::abs(alpha);
        cfg.r_max = span;
        for (double u : find_all_positive_roots(
                 [&](double u) { return residual_of(parity, a_th * std::exp(dir * u)); }, cfg))
          amps.push_back(a_th * std::exp(dir * u));
      }
    } catch (const ScanError&) {
    }
    return amps;
  };

  for (Parity parity : {Parity::Even, Parity::Odd}) {
    ParityDiagnostic diag;
    diag.parity = parity;
    const double sign = parity == Parity::Odd ? -1.0 : 1.0;
    std::ostringstream note;
    for (double a : amplitude_roots(parity)) {
      const SymmetricDoubleSpec spec = base.with_amplitude(a);
      const double x = x_of(parity, a);
      double dev = std::numeric_limits<double>::infinity();
      for (double xc : cubic_x(spec)) dev = std::min(dev, std::abs(xc - x));
      if (!(dev <= 1e-8 * std::max(1.0, x))) {
        std::ostringstream msg;
        msg << "symmetric double well: Lambert-W x = " << x << " and cubic route disagree by " << dev
            << " at A = " << a;
        throw ConvergenceError(msg.str());
      }
      result.cubic_deviation = std::max(result.cubic_deviation, dev);
      const std::vector<double> psi{a, sign * a};
      const double nu = 0.5 * x;
      const double residual = std::abs(bound_norm(problem, nu, to_complex(psi)) - 1.0);
      result.states.push_back(make_bound_solution(nu, to_complex(psi), parity, residual));
      ++diag.roots;
      if (parity == Parity::Odd) note << (diag.roots > 1 ? "; " : "") << "d beta = " << separation * spec.beta;
    }

    std::ostringstream full;
    full << to_string(parity) << ": " << diag.roots << " state(s)";
    if (parity == Parity::Odd) {
      if (diag.roots > 0) {
        full << " (" << note.str() << ", each above the threshold d beta = 2)";
      } else if (alpha == 0.0) {
        full << "; an odd state requires d > 2/beta = " << 2.0 / omega << ", here d = " << separation;
      } else {
        full << "; d > 2/beta holds only for A " << (alpha > 0.0 ? ">" : "<") << " "
             << result.odd_threshold_amplitude << " and the normalisation has no root there";
      }
    }
    diag.note = full.str();
    result.diagnostics.push_back(diag);
  }

  if (result.states.empty()) {
    std::string msg = "no bound state for the symmetric double well:";
    for (const auto& d : result.diagnostics) msg += " [" + d.note + "]";
    throw NoBoundStateError(msg);
  }
  std::sort(result.states.begin(), result.states.end(),
            [](const BoundStateSolution& a, const BoundStateSolution& b) { return a.nu < b.nu; });
  for (std::size_t i = 0; i < result.states.size(); ++i) result.states[i].branch_index = static_cast<int>(i);
  return result;
}

std::vector<BoundStateSolution> solve_symmetric_double(double omega, double alpha, double separation) {
  return solve_symmetric_double_detailed(omega, alpha, separation).states;
}

// ---------------------------------------------------------------------------
// General N
// ---------------------------------------------------------------------------

NuScan default_nu_scan(const BoundProblem& problem) {
  double top = 0.0;
  for (const auto& c : problem.centers()) {
    const double a = single_amplitude(c.strength, c.exponent);
    top = std::max(top, a * a);
  }
  NuScan scan;
  scan.nu_max = 2.0 * top + 1.0;
  return scan;
}

namespace {

// Unknowns v = (psi_1..psi_N, log nu).
Eigen::VectorXd bound_residual(const BoundProblem& problem, const Eigen::VectorXd& v) {
  const auto& cs = problem.centers();
  const auto n = static_cast<Eigen::Index>(cs.size());
  const double nu = std::exp(v(n));
  Eigen::VectorXd r(n + 1);
  std::vector<Complex> psi(cs.size());
  for (Eigen::Index i = 0; i < n; ++i) psi[static_cast<std::size_t>(i)] = v(i);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& c = cs[static_cast<std::size_t>(j)];
      const double dist = std::abs(cs[static_cast<std::size_t>(i)].position - c.position);
      sum += c.strength / (2.0 * nu) * std::exp(-nu * dist) * std::pow(std::abs(v(j)), c.exponent) * v(j);
    }
    r(i) = v(i) - sum;
  }
  r(n) = bound_norm(problem, nu, psi) - 1.0;
  return r;
}

std::optional<Eigen::VectorXd> newton(const BoundProblem& problem, Eigen::VectorXd v) {
  const Eigen::Index m = v.size();
  Eigen::VectorXd r = bound_residual(problem, v);
  for (int it = 0; it < 100; ++it) {
    const double rn = r.norm();
    if (!std::isfinite(rn)) return std::nullopt;
    if (rn < 1e-14) return v;

    Eigen::MatrixXd jac(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      const double h = 1e-7 * std::max(1.0, std::abs(v(c)));
      Eigen::VectorXd vp = v, vm = v;
      vp(c) += h;
      vm(c) -= h;
      jac.col(c) = (bound_residual(problem, vp) - bound_residual(problem, vm)) / (2.0 * h);
    }
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) return std::nullopt;

    double lambda = 1.0;
    bool moved = false;
    while (lambda >= 1e-4) {
      Eigen::VectorXd trial = v + lambda * step;
      trial(m - 1) = std::clamp(trial(m - 1), -60.0, 20.0);
      const Eigen::VectorXd rt = bound_residual(problem, trial);
      if (rt.allFinite() && rt.norm() < (1.0 - 1e-4 * lambda) * rn) {
        v = trial;
        r = rt;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) return rn < 1e-11 ? std::optional<Eigen::VectorXd>(v) : std::nullopt;
  }
  return r.norm() < 1e-11 ? std::optional<Eigen::VectorXd>(v) : std::nullopt;
}

// Scale factor taking bound_norm of lambda * psi to one, or 1 if no bracket.
double normalising_scale(const BoundProblem& problem, double nu, const std::vector<double>& psi) {
  auto gap = [&](double log_l) {
    std::vector<Complex> scaled(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) scaled[i] = std::exp(log_l) * psi[i];
    return bound_norm(problem, nu, scaled) - 1.0;
  };
  double lo = std::log(1e-8), hi = std::log(1e8);
  if (!(gap(lo) < 0.0 && gap(hi) > 0.0)) return 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace

std::vector<BoundStateSolution> solve_general_bound(const BoundProblem& problem, std::optional<NuScan> scan_opt) {
  NuScan scan = scan_opt.value_or(default_nu_scan(problem));
  if (scan.nu_max == 0.0) scan.nu_max = default_nu_scan(problem).nu_max;
  if (!(scan.nu_min > 0.0 && scan.nu_max > scan.nu_min && scan.seeds >= 1))
    throw ValidationError("nu_scan", "needs 0 < nu_min < nu_max and at least one seed");

  const auto& cs = problem.centers();
  const std::size_t n = cs.size();
  const int free_signs = static_cast<int>(std::min<std::size_t>(n - 1, 7));
  const int patterns = 1 << free_signs;

  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = single_amplitude(cs[i].strength, cs[i].exponent);

  std::vector<BoundStateSolution> found;
  for (int pattern = 0; pattern < patterns; ++pattern) {
    std::vector<double> signed_amp = base;
    for (int b = 0; b < free_signs; ++b) {
      if (pattern & (1 << b)) signed_amp[static_cast<std::size_t>(b) + 1] *= -1.0;
    }
    for (int s = 0; s < scan.seeds; ++s) {
      const double frac = scan.seeds == 1 ? 0.0 : static_cast<double>(s) / (scan.seeds - 1);
      const double nu0 = scan.nu_min * std::pow(scan.nu_max / scan.nu_min, frac);
      const double lambda = normalising_scale(problem, nu0, signed_amp);

      Eigen::VectorXd v(static_cast<Eigen::Index>(n) + 1);
      for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = lambda * signed_amp[i];
      v(static_cast<Eigen::Index>(n)) = std::log(nu0);

      const auto sol = newton(problem, v);
      if (!sol) continue;
      const double nu = std::exp((*sol)(static_cast<Eigen::Index>(n)));
      std::vector<double> psi(n);
      for (std::size_t i = 0; i < n; ++i) psi[i] = (*sol)(static_cast<Eigen::Index>(i));

      const double det = build_bound_phi(problem, nu, psi).determinant;
      const double residual = std::abs(bound_norm(problem, nu, to_complex(psi)) - 1.0);
      if (!(std::abs(det) < 1e-8 && residual < 1e-8)) continue;
      if (std::any_of(found.begin(), found.end(), [&](const BoundStateSolution& b) { return std::abs(b.nu - nu) < 1e-8; }))
        continue;
      if (psi.front() < 0.0) {
        for (double& p : psi) p = -p;
      }
      found.push_back(make_bound_solution(nu, to_complex(psi), classify(problem, psi), residual));
    }
  }

  if (found.empty()) {
    std::ostringstream msg;
    msg << "general bound solver: no seed converged (" << patterns << " sign patterns x " << scan.seeds
        << " nu seeds log-spaced in [" << scan.nu_min << ", " << scan.nu_max << "])";
    throw ConvergenceError(msg.str());
  }
  std::sort(found.begin(), found.end(),
            [](const BoundStateSolution& a, const BoundStateSolution& b) { return a.nu < b.nu; });
  for (std::size_t i = 0; i < found.size(); ++i) found[i].branch_index = static_cast<int>(i);
  return found;
}

std::string to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::SingleClosedForm:
      return "single-closed-form";
    case BoundMethod::SymmetricLambertW:
      return "symmetric-lambert-w";
    case BoundMethod::GeneralNewton:
      break;
  }
  return "general-newton";
}

BoundReport solve_bound(const BoundProblem& problem) {
  const auto& cs = problem.centers();
  BoundReport report;
  if (cs.size() == 1) {
    report.method = BoundMethod::SingleClosedForm;
    report.states = {solve_single_bound(cs[0].strength, cs[0].exponent, cs[0].position)};
  } else if (cs.size() == 2 && is_symmetric(problem)) {
    report.method = BoundMethod::SymmetricLambertW;
    auto res = solve_symmetric_double_detailed(cs[0].strength, cs[0].exponent, cs[1].position - cs[0].position);
    report.states = std::move(res.states);
    report.diagnostics = std::move(res.diagnostics);
  } else {
    report.method = BoundMethod::GeneralNewton;
    report.states = solve_general_bound(problem);
  }
  return report;
}

}  // namespace nldelta
