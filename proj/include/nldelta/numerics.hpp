#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nldelta/model.hpp"

namespace nldelta {

using ScalarFunction = std::function<double(double)>;

enum class GridSpacing {
  Linear,
  Log,
  /// Geometric points from r_min up to the first linear step, then uniform.
  /// Resolves roots near zero without thinning the bulk of the range.
  Mixed,
};

struct RootScanConfig {
  double r_min = 1e-9;
  double r_max = 10.0;
  int n_scan = 4096;
  double refine_tol = 1e-12;
  int max_refine_iters = 200;
  GridSpacing spacing = GridSpacing::Mixed;

  /// Throws ValidationError unless 0 < r_min < r_max, n_scan >= 2, refine_tol > 0.
  void validate() const;
};

/// Grid abscissae for a scan, ascending, endpoints included.
std::vector<double> scan_grid(const RootScanConfig& cfg);

struct ScanRoot {
  double value = 0.0;
  /// Zero hit exactly on a grid node with the same sign on both sides.
  bool grazing = false;
};

/// Every root isolated by a sign change (or an exact zero) on the scan grid,
/// refined and sorted ascending. NaN grid values are never used as bracket
/// endpoints. Throws ScanError when every grid value is NaN.
std::vector<ScanRoot> scan_roots(const ScalarFunction& h, const RootScanConfig& cfg);

/// Values of scan_roots().
std::vector<double> find_all_positive_roots(const ScalarFunction& h, const RootScanConfig& cfg);

/// Default scan for a closure in r = |psi(c_N)|:
/// r_min = 1e-9 |A|, r_max = max(10 |A|, |A| (1 + max|z| / k)), 4096 nodes.
RootScanConfig default_scan_config(const ScatteringProblem& problem);

/// Scan policy shared by every closure solver. With an explicit `cfg` only
/// that range is scanned. Otherwise the default range is used, r_max is
/// doubled (at most three times) while roots keep appearing in its last
/// tenth or h(r_max) <= 0, and problems whose response is singular at zero
/// modulus also get a geometric segment from 1e-300 |A| up to r_min.
std::vector<ScanRoot> scan_closure(const ScalarFunction& h, const ScatteringProblem& problem,
                                   const std::optional<RootScanConfig>& cfg, RootScanConfig* used = nullptr);

/// Root of h inside [a, b]. Throws BracketError if h(a), h(b) share a sign.
/// Refines until the bracket is narrower than tol (and as far as double
/// precision allows, bounded by max_iters).
double refine_root(const ScalarFunction& h, std::pair<double, double> bracket, double tol,
                   int max_iters = 200);

/// Positive roots x of |zh|^2 x^6 - 2 Im(zh) x^4 + x^2 - |A|^2 = 0, ascending.
/// Solved as a cubic in y = x^2 in closed form and polished. For Im(zh) > 0
/// up to three roots may exist.
std::vector<double> solve_modulus_cubic(Complex z_hat, double a_mod);

/// Real roots of a y^3 + b y^2 + c y + d = 0 (a may be 0), ascending.
std::vector<double> solve_real_cubic(double a, double b, double c, double d);

enum class LambertBranch { Principal = 0, Lower = -1 };

/// Real Lambert W: w e^w = y. Principal branch for y >= -1/e (w >= -1),
/// lower branch for -1/e <= y < 0 (w <= -1). Throws DomainError outside.
double lambert_w(LambertBranch branch, double y);

}  // namespace nldelta
