#include "nldelta/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "nldelta/oracle.hpp"
#include "nldelta/scattering.hpp"

namespace nldelta {
namespace {

constexpr double kFdStep = 1e-5;

Complex phase(double angle) { return std::polar(1.0, angle); }

// Largest distance from each value to its nearest partner, both directions.
double matched_deviation(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : INFINITY;
  double worst = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    for (double x : a) {
      double best = INFINITY;
      for (double y : b) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    std::swap(a, b);
  }
  return worst;
}

bool real_couplings(const ScatteringProblem& p) {
  for (const auto& c : p.centers()) {
    if (std::holds_alternative<CustomResponse>(c.response) || coupling_of(c.response).imag() != 0.0) return false;
  }
  return true;
}

bool all_linear(const ScatteringProblem& p) {
  return std::all_of(p.centers().begin(), p.centers().end(), [](const DeltaCenter& c) { return is_linear(c.response); });
}

// Left-frame center values of a solution.
std::vector<Complex> left_psi(const ScatteringProblem& p, std::vector<Complex> psi) {
  if (p.incidence() == Incidence::Right) std::reverse(psi.begin(), psi.end());
  return psi;
}

double phi_row_deviation(const ScatteringProblem& problem, const ScatteringSolution& s, double* t_det) {
  const ScatteringProblem left = problem.incidence() == Incidence::Left ? problem : problem.mirrored();
  const std::vector<Complex> psi = left_psi(problem, s.psi_at_centers);
  std::vector<double> moduli;
  for (const Complex& v : psi) moduli.push_back(std::abs(v));
  const PhiMatrix phi = build_phi(left, moduli);
  const Complex a = left.incident_amplitude();
  double worst = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    Complex row{0.0, 0.0};
    for (std::size_t j = 0; j < psi.size(); ++j)
      row += phi.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * psi[j];
    worst = std::max(worst, std::abs(row - a * phase(left.wavenumber() * left.centers()[i].position)));
  }
  *t_det = std::abs(s.transmission * phi.determinant - 1.0);
  return worst / std::abs(a);
}

// psi'(c+) - psi'(c-) against f(|psi(c)|) psi(c), one-sided second-order stencils.
double jump_deviation(const ScatteringProblem& problem, const ScatteringSolution& s) {
  const auto& cs = problem.centers();
  double worst = 0.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double c = cs[i].position;
    double h = kFdStep;
    if (i > 0) h = std::min(h, 0.25 * (c - cs[i - 1].position));
    if (i + 1 < cs.size()) h = std::min(h, 0.25 * (cs[i + 1].position - c));
    auto psi = [&](double x) { return evaluate_wavefunction(problem, s, x); };
    const Complex p0 = psi(c);
    const Complex right = (-3.0 * p0 + 4.0 * psi(c + h) - psi(c + 2.0 * h)) / (2.0 * h);
    const Complex left = (3.0 * p0 - 4.0 * psi(c - h) + psi(c - 2.0 * h)) / (2.0 * h);
    const Complex expected = evaluate_f(cs[i].response, std::abs(s.psi_at_centers[i])) * s.psi_at_centers[i];
    worst = std::max(worst, std::abs(right - left - expected));
  }
  return worst;
}

// Continuity and slope jump re-evaluated on the oracle's plane-wave regions.
double transfer_jump_deviation(const ScatteringProblem& problem, double t_modulus) {
  const ScatteringProblem left = problem.incidence() == Incidence::Left ? problem : problem.mirrored();
  const oracle::TransferResult tr = oracle::transfer_scatter(problem, t_modulus);
  const double k = left.wavenumber();
  const Complex ik{0.0, k};
  double worst = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    const double c = left.centers()[i].position;
    const auto& l = tr.regions[i];
    const auto& r = tr.regions[i + 1];
    const Complex e = phase(k * c);
    const Complex psi_l = l.a_coeff * e + l.b_coeff / e;
    const Complex psi_r = r.a_coeff * e + r.b_coeff / e;
    const Complex d_l = ik * (l.a_coeff * e - l.b_coeff / e);
    const Complex d_r = ik * (r.a_coeff * e - r.b_coeff / e);
    const Complex f = evaluate_f(left.centers()[i].response, std::abs(psi_r));
    worst = std::max({worst, std::abs(psi_l - psi_r), std::abs(d_r - d_l - f * psi_r)});
  }
  return worst;
}

std::vector<double> t2_of(const std::vector<ScatteringSolution>& v) {
  std::vector<double> out;
  for (const auto& s : v) out.push_back(s.t_intensity());
  return out;
}

}  // namespace

std::vector<ScatteringProblem> generate_corpus(const CorpusOptions& opts) {
  if (opts.size < 1) throw ValidationError("corpus", "must be >= 1");
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), z(0.5, 20.0), kd(0.3, 5.0);
  std::vector<double> exponents{0.0, 1.0, 2.0};
  if (opts.allow_singular) exponents.insert(exponents.end(), {-0.5, -1.0});
  std::uniform_int_distribution<std::size_t> pick(0, exponents.size() - 1);

  std::vector<ScatteringProblem> out;
  while (static_cast<int>(out.size()) < opts.size) {
    const int n = count(rng);
    std::vector<DeltaCenter> centers;
    for (int i = 0; i < n; ++i) {
      const double c = pos(rng);
      const double zz = z(rng);
      centers.push_back(DeltaCenter::power_law(c, zz, exponents[pick(rng)]));
    }
    const double k = kd(rng);
    try {
      out.push_back(validate_and_sort(std::move(centers), k, 1.0));
    } catch (const ValidationError&) {
      // coincident positions: draw again
    }
  }
  return out;
}

const std::vector<CheckColumn>& validation_columns() {
  static const std::vector<CheckColumn> cols{
      {"branches", 0.0},      {"T2_oracle", 1e-8},     {"unitarity", 1e-10},   {"phi_rows", 1e-10},
      {"T_detPhi", 1e-10},    {"jump", 1e-6},          {"residual", 1e-11},    {"closed_form", 1e-10},
      {"linear_direct", 1e-10}, {"transfer_jump", 1e-12},
  };
  return cols;
}

ProblemCheck check_problem(const ScatteringProblem& problem) {
  ProblemCheck out;
  auto& dev = out.deviations;
  std::vector<ScatteringSolution> green;
  std::vector<oracle::OracleBranch> ref;
  try {
    green = solve_scattering(problem);
  } catch (const NoBranchError&) {
    // zero branches; the count column compares it with the oracle
  } catch (const Error& e) {
    out.error = std::string("green: ") + e.what();
  }
  try {
    ref = oracle::oracle_branches(problem);
  } catch (const Error& e) {
    out.error += (out.error.empty() ? "" : "; ") + std::string("oracle: ") + e.what();
  }
  dev["branches"] = std::abs(static_cast<double>(green.size()) - static_cast<double>(ref.size()));

  std::vector<double> ref_t2;
  for (const auto& b : ref) ref_t2.push_back(b.t_intensity());
  if (!green.empty() || !ref.empty()) dev["T2_oracle"] = matched_deviation(t2_of(green), ref_t2);

  const bool real = real_couplings(problem);
  double unit = 0.0, rows = 0.0, tdet = 0.0, jump = 0.0, resid = 0.0;
  for (const auto& s : green) {
    unit = std::max(unit, std::abs(s.t_intensity() + s.r_intensity() - 1.0));
    double td = 0.0;
    rows = std::max(rows, phi_row_deviation(problem, s, &td));
    tdet = std::max(tdet, td);
    jump = std::max(jump, jump_deviation(problem, s));
    resid = std::max(resid, s.closure_residual);
  }
  if (!green.empty()) {
    if (real) dev["unitarity"] = unit;
    dev["phi_rows"] = rows;
    dev["T_detPhi"] = tdet;
    dev["jump"] = jump;
    dev["residual"] = resid;
  }

  try {
    if (problem.size() == 1 && !green.empty())
      dev["closed_form"] = matched_deviation(t2_of(single_delta_closed_form(problem)), t2_of(green));
    if (all_linear(problem) && !green.empty())
      dev["linear_direct"] = matched_deviation({solve_linear_direct(problem).t_intensity()}, t2_of(green));
    double tj = 0.0;
    for (const auto& b : ref) tj = std::max(tj, transfer_jump_deviation(problem, b.t_modulus));
    if (!ref.empty()) dev["transfer_jump"] = tj;
  } catch (const Error& e) {
    out.error += (out.error.empty() ? "" : "; ") + std::string(e.what());
  }
  return out;
}

std::string describe(const ScatteringProblem& problem) {
  std::ostringstream s;
  s.precision(6);
  s << "k=" << problem.wavenumber() << " centers=[";
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const auto& c = problem.centers()[i];
    s << (i ? ", " : "") << "(c=" << c.position << " z=" << coupling_of(c.response).real();
    if (coupling_of(c.response).imag() != 0.0) s << (coupling_of(c.response).imag() > 0 ? "+" : "") << coupling_of(c.response).imag() << "i";
    s << " a=" << exponent_of(c.response) << ")";
  }
  s << "]";
  return s.str();
}

ValidationReport run_validation(const CorpusOptions& opts) {
  const std::vector<ScatteringProblem> corpus = generate_corpus(opts);
  ValidationReport report;
  report.columns = validation_columns();
  report.problems = static_cast<int>(corpus.size());

  for (std::size_t p = 0; p < corpus.size(); ++p) {
    const ProblemCheck pc = check_problem(corpus[p]);
    if (!pc.error.empty()) report.failures.push_back("#" + std::to_string(p) + " " + describe(corpus[p]) + ": " + pc.error);
    for (auto& col : report.columns) {
      const auto it = pc.deviations.find(col.name);
      if (it == pc.deviations.end()) continue;
      ++col.evaluated;
      col.max_deviation = std::max(col.max_deviation, it->second);
      if (!(it->second <= col.tolerance)) {
        ++col.failures;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3g > %.0e", it->second, col.tolerance);
        report.failures.push_back("#" + std::to_string(p) + " " + describe(corpus[p]) + ": " + col.name + " " + buf);
      }
    }
  }
  return report;
}

}  // namespace nldelta
