#include "nldelta/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

namespace nldelta {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

struct NaNEncountered {};

// Roots closer than tol are merged; the relative guard keeps distinct roots
// far below tol apart.
bool same_root(double a, double b, double tol) {
  return std::abs(a - b) < std::min(tol, 1e-9 * std::max(std::abs(a), std::abs(b)));
}

bool singular_at_zero(const ScatteringProblem& problem) {
  for (const auto& c : problem.centers()) {
    if (std::holds_alternative<CustomResponse>(c.response)) return true;
    if (exponent_of(c.response) < 0.0) return true;
  }
  return false;
}

// Plain bisection, used when the bracketing solver meets a NaN inside the
// interval. Returns NaN if the midpoint itself is undefined.
double bisect(const ScalarFunction& h, double a, double b, double fa, double tol, int max_iters) {
  for (int it = 0; it < max_iters && (b - a) > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = h(m);
    if (std::isnan(fm)) return kNaN;
    if (fm == 0.0) return m;
    if (sign_of(fm) == sign_of(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void RootScanConfig::validate() const {
  if (!(r_min > 0.0)) throw ValidationError("scan.r_min", "must be > 0");
  if (!(r_max > r_min)) throw ValidationError("scan.r_max", "must exceed r_min");
  if (n_scan < 2) throw ValidationError("scan.n_scan", "must be >= 2");
  if (!(refine_tol > 0.0)) throw ValidationError("scan.refine_tol", "must be > 0");
  if (max_refine_iters < 1) throw ValidationError("scan.max_refine_iters", "must be >= 1");
}

std::vector<double> scan_grid(const RootScanConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_scan;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  auto linear = [&](double lo, double hi, int count, bool include_lo) {
    for (int i = include_lo ? 0 : 1; i < count; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  };
  auto geometric = [&](double lo, double hi, int count) {
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < count; ++i)
      grid.push_back(lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1)));
  };
  switch (cfg.spacing) {
    case GridSpacing::Linear:
      linear(cfg.r_min, cfg.r_max, n, true);
      break;
    case GridSpacing::Log:
      geometric(cfg.r_min, cfg.r_max, n);
      break;
    case GridSpacing::Mixed: {
      const int n_log = n / 4;
      const int n_lin = n - n_log;
      const double split = cfg.r_max / static_cast<double>(std::max(n_lin, 2));
      if (n_log < 2 || n_lin < 2 || split <= cfg.r_min * 2.0) {
        linear(cfg.r_min, cfg.r_max, n, true);
      } else {
        geometric(cfg.r_min, split, n_log);
        linear(split, cfg.r_max, n_lin, false);
      }
      break;
    }
  }
  grid.front() = cfg.r_min;
  grid.back() = cfg.r_max;
  return grid;
}

double refine_root(const ScalarFunction& h, std::pair<double, double> bracket, double tol, int max_iters) {
  auto [a, b] = bracket;
  if (a > b) std::swap(a, b);
  const double fa = h(a);
  const double fb = h(b);
  if (std::isnan(fa) || std::isnan(fb)) throw BracketError("refine_root: h is undefined at a bracket endpoint");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (sign_of(fa) == sign_of(fb)) throw BracketError("refine_root: h has the same sign at both endpoints");

  // Narrow to the requested tolerance, then keep going while double precision
  // still resolves the interval so |h(root)| is as small as it can be.
  auto done = [tol](double lo, double hi) {
    const double width = hi - lo;
    const double scale = std::max(std::abs(lo), std::abs(hi));
    return width <= std::max(4.0 * kEps * scale, std::min(1e-3 * tol, 1e-3 * tol * scale));
  };
  auto guarded = [&h](double x) {
    const double v = h(x);
    if (std::isnan(v)) throw NaNEncountered{};
    return v;
  };

  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iters);
  try {
    auto [lo, hi] = boost::math::tools::toms748_solve(guarded, a, b, fa, fb, done, iters);
    const double flo = h(lo);
    const double fhi = h(hi);
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
  } catch (const NaNEncountered&) {
    return bisect(h, a, b, fa, std::max(std::min(tol, tol * std::abs(b)) * 1e-3, 4.0 * kEps * std::abs(b)),
                  max_iters);
  }
}

std::vector<ScanRoot> scan_roots(const ScalarFunction& h, const RootScanConfig& cfg) {
  const std::vector<double> grid = scan_grid(cfg);
  const std::size_t n = grid.size();
  std::vector<double> values(n);
  bool any_finite = false;
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = h(grid[i]);
    if (std::isinf(values[i])) values[i] = std::copysign(std::numeric_limits<double>::max(), values[i]);
    if (!std::isnan(values[i])) any_finite = true;
  }
  if (!any_finite) throw ScanError("scan_roots: every grid evaluation is NaN");

  std::vector<ScanRoot> roots;
  auto accept = [&](double r, double scale, bool grazing) {
    const double hr = h(r);
    if (std::isnan(hr)) return;
    // A sign change across a pole refines to a point where |h| stays large.
    if (std::abs(hr) > 10.0 * cfg.refine_tol * (1.0 + scale)) return;
    roots.push_back({r, grazing});
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[i];
    if (std::isnan(v)) continue;
    if (v == 0.0) {
      // Neighbouring finite values decide whether this is a crossing or a touch.
      int left = 0, right = 0;
      if (i > 0 && !std::isnan(values[i - 1])) left = sign_of(values[i - 1]);
      if (i + 1 < n && !std::isnan(values[i + 1])) right = sign_of(values[i + 1]);
      roots.push_back({grid[i], left != 0 && left == right});
      continue;
    }
    if (i + 1 < n) {
      const double w = values[i + 1];
      if (std::isnan(w) || w == 0.0) continue;
      if (sign_of(v) != sign_of(w)) {
        const double r = refine_root(h, {grid[i], grid[i + 1]}, cfg.refine_tol, cfg.max_refine_iters);
        if (!std::isnan(r)) accept(r, std::max(std::abs(v), std::abs(w)), false);
      }
    }
  }

  std::sort(roots.begin(), roots.end(), [](const ScanRoot& a, const ScanRoot& b) { return a.value < b.value; });
  std::vector<ScanRoot> unique;
  for (const auto& r : roots) {
    if (!unique.empty() && same_root(unique.back().value, r.value, cfg.refine_tol)) {
      unique.back().grazing = unique.back().grazing || r.grazing;
      continue;
    }
    unique.push_back(r);
  }
  return unique;
}

std::vector<double> find_all_positive_roots(const ScalarFunction& h, const RootScanConfig& cfg) {
  std::vector<double> out;
  for (const auto& r : scan_roots(h, cfg)) out.push_back(r.value);
  return out;
}

RootScanConfig default_scan_config(const ScatteringProblem& problem) {
  const double a = std::abs(problem.incident_amplitude());
  RootScanConfig cfg;
  cfg.r_min = 1e-9 * a;
  cfg.r_max = std::max(10.0 * a, a * (1.0 + problem.max_coupling_modulus() / problem.wavenumber()));
  cfg.n_scan = 4096;
  cfg.refine_tol = 1e-12;
  cfg.spacing = GridSpacing::Mixed;
  return cfg;
}

std::vector<ScanRoot> scan_closure(const ScalarFunction& h, const ScatteringProblem& problem,
                                   const std::optional<RootScanConfig>& cfg, RootScanConfig* used) {
  if (cfg) {
    if (used) *used = *cfg;
    return scan_roots(h, *cfg);
  }
  RootScanConfig scan = default_scan_config(problem);
  std::vector<ScanRoot> roots;
  if (singular_at_zero(problem)) {
    // Singular responses can place roots many decades below r_min.
    RootScanConfig deep = scan;
    deep.r_min = 1e-300 * std::abs(problem.incident_amplitude());
    deep.r_max = scan.r_min;
    deep.n_scan = std::max(2, scan.n_scan / 4);
    deep.spacing = GridSpacing::Log;
    try {
      roots = scan_roots(h, deep);
    } catch (const ScanError&) {
    }
  }
  auto merge = [&](const std::vector<ScanRoot>& more) {
    for (const auto& r : more) {
      if (roots.empty() || !same_root(roots.back().value, r.value, scan.refine_tol)) roots.push_back(r);
    }
  };
  merge(scan_roots(h, scan));

  for (int doubling = 0; doubling < 3; ++doubling) {
    const double top = scan.r_max;
    const bool root_near_top =
        std::any_of(roots.begin(), roots.end(), [&](const ScanRoot& r) { return r.value >= 0.9 * top; });
    if (!root_near_top && h(top) > 0.0) break;
    RootScanConfig ext = scan;
    ext.r_min = top;
    ext.r_max = 2.0 * top;
    ext.n_scan = std::max(2, scan.n_scan / 2);
    ext.spacing = GridSpacing::Linear;
    try {
      merge(scan_roots(h, ext));
    } catch (const ScanError&) {
    }
    scan.r_max = ext.r_max;
  }
  if (used) {
    *used = scan;
    if (singular_at_zero(problem)) used->r_min = 1e-300 * std::abs(problem.incident_amplitude());
  }
  return roots;
}

std::vector<double> solve_real_cubic(double a, double b, double c, double d) {
  auto poly = [&](double y) { return ((a * y + b) * y + c) * y + d; };
  auto dpoly = [&](double y) { return (3.0 * a * y + 2.0 * b) * y + c; };
  std::vector<double> roots;

  const double scale = std::max({std::abs(b), std::abs(c), std::abs(d)});
  if (std::abs(a) <= 1e-14 * scale) {
    // Quadratic (or linear) fallback.
    if (std::abs(b) <= 1e-14 * std::max(std::abs(c), std::abs(d))) {
      if (c != 0.0) roots.push_back(-d / c);
    } else {
      const double disc = c * c - 4.0 * b * d;
      if (disc >= 0.0) {
        const double q = -0.5 * (c + std::copysign(std::sqrt(disc), c));
        if (q != 0.0) roots.push_back(d / q);
        roots.push_back(q / b);
      }
    }
  } else {
    const double B = b / a, C = c / a, D = d / a;
    // Depressed cubic t^3 + p t + q with y = t - B/3.
    const double p = C - B * B / 3.0;
    const double q = 2.0 * B * B * B / 27.0 - B * C / 3.0 + D;
    const double shift = -B / 3.0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    const double disc_scale = q * q / 4.0 + std::abs(p * p * p) / 27.0;
    if (std::abs(disc) <= 1e-14 * disc_scale) {
      // Repeated root.
      if (p == 0.0) {
        roots.push_back(shift);
      } else {
        roots.push_back(3.0 * q / p + shift);
        roots.push_back(-1.5 * q / p + shift);
      }
    } else if (disc > 0.0) {
      const double s = std::sqrt(disc);
      const double u = std::cbrt(-q / 2.0 + s);
      const double v = std::cbrt(-q / 2.0 - s);
      roots.push_back(u + v + shift);
    } else {
      const double m = 2.0 * std::sqrt(-p / 3.0);
      const double theta = std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0;
      for (int j = 0; j < 3; ++j)
        roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * j / 3.0) + shift);
    }
  }

  // Newton polish; a step is kept only if it reduces the residual.
  for (auto& y : roots) {
    for (int it = 0; it < 4; ++it) {
      const double f = poly(y);
      const double df = dpoly(y);
      if (f == 0.0 || df == 0.0) break;
      const double next = y - f / df;
      if (std::abs(poly(next)) < std::abs(f)) y = next;
      else break;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> solve_modulus_cubic(Complex z_hat, double a_mod) {
  if (!(a_mod > 0.0)) throw DomainError("solve_modulus_cubic: |A| must be > 0");
  const double a2 = a_mod * a_mod;
  if (z_hat == Complex{0.0, 0.0}) return {a_mod};
  const double zz = std::norm(z_hat);
  std::vector<double> xs;
  for (double y : solve_real_cubic(zz, -2.0 * z_hat.imag(), 1.0, -a2)) {
    if (y > 0.0) xs.push_back(std::sqrt(y));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

namespace {

// Series about the branch point in p = sqrt(2 (e y + 1)); p -> -p selects
// the lower branch.
double branch_point_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

double halley(double w, double y, bool principal) {
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    double next = w - f / denom;
    // Keep iterates on their branch.
    if (principal && next < -1.0) next = 0.5 * (w - 1.0);
    if (!principal && next > -1.0) next = 0.5 * (w - 1.0);
    const double step = next - w;
    w = next;
    if (std::abs(step) <= 4.0 * kEps * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

}  // namespace

double lambert_w(LambertBranch branch, double y) {
  constexpr double inv_e = 1.0 / std::numbers::e;
  if (std::isnan(y)) throw DomainError("lambert_w: argument is NaN");
  const bool principal = branch == LambertBranch::Principal;

  if (y < -inv_e) {
    // -1/e itself is not exactly representable; accept a few ulps below it.
    if (y >= -inv_e * (1.0 + 8.0 * kEps)) return -1.0;
    throw DomainError("lambert_w: argument below -1/e");
  }
  if (!principal && y >= 0.0) throw DomainError("lambert_w: lower branch requires -1/e <= y < 0");
  if (principal && y == 0.0) return 0.0;
  if (std::isinf(y)) return y;

  const double p2 = 2.0 * (std::numbers::e * y + 1.0);
  const double p = std::sqrt(std::max(p2, 0.0));
  if (p < 1e-3) return branch_point_series(principal ? p : -p);

  double w;
  if (principal) {
    if (y < -0.25) {
      w = branch_point_series(p);
    } else if (y < 3.0) {
      const double l = std::log1p(y);
      w = l * (1.0 - std::log1p(l) / (2.0 + l));
    } else {
      const double l1 = std::log(y);
      const double l2 = std::log(l1);
      w = l1 - l2 + l2 / l1;
    }
  } else {
    if (y < -0.25) {
      w = branch_point_series(-p);
    } else {
      const double l1 = std::log(-y);
      const double l2 = std::log(-l1);
      w = l1 - l2 + l2 / l1;
    }
  }
  return halley(w, y, principal);
}

}  // namespace nldelta
