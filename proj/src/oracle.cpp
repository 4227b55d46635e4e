#include "nldelta/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nldelta::oracle {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One exponential segment anchored at a center: P e^{nu s} + Q e^{-nu s}.
struct Segment {
  double p;
  double q;
};

struct Shot {
  std::vector<double> psi;       // values at the centers
  std::vector<Segment> segments; // segment i starts at center i
};

Shot shoot(const BoundProblem& problem, double nu, double gamma) {
  const auto& cs = problem.centers();
  const std::size_t n = cs.size();
  Shot shot;
  shot.psi.resize(n);
  shot.segments.resize(n);
  double value = gamma;
  double slope = nu * gamma;
  for (std::size_t i = 0; i < n; ++i) {
    shot.psi[i] = value;
    const double kick = cs[i].strength * std::pow(std::abs(value), cs[i].exponent) * value;
    slope -= kick;
    const double p = 0.5 * (value + slope / nu);
    const double q = 0.5 * (value - slope / nu);
    shot.segments[i] = {p, q};
    if (i + 1 < n) {
      const double s = cs[i + 1].position - cs[i].position;
      const double grow = std::exp(nu * s);
      const double decay = std::exp(-nu * s);
      value = p * grow + q * decay;
      slope = nu * (p * grow - q * decay);
    }
  }
  return shot;
}

}  // namespace

TransferResult transfer_scatter(const ScatteringProblem& problem, double t_modulus) {
  if (!(t_modulus > 0.0)) throw DomainError("transfer_scatter: t_modulus must be > 0");
  const ScatteringProblem left = problem.incidence() == Incidence::Left ? problem : problem.mirrored();
  const auto& cs = left.centers();
  const std::size_t n = cs.size();
  const double k = left.wavenumber();

  TransferResult out;
  out.psi_at_centers.resize(n);
  out.regions.resize(n + 1);
  Complex a = t_modulus, b = 0.0;
  out.regions[n] = {a, b, cs[n - 1].position, std::numeric_limits<double>::infinity()};

  for (std::size_t i = n; i-- > 0;) {
    const double c = cs[i].position;
    const Complex ep = std::polar(1.0, k * c);
    const Complex em = std::conj(ep);
    const Complex psi = a * ep + b * em;
    const Complex d_right = kI * k * (a * ep - b * em);
    const Complex d_left = d_right - evaluate_f(cs[i].response, std::abs(psi)) * psi;
    a = 0.5 * em * (psi + d_left / (kI * k));
    b = 0.5 * ep * (psi - d_left / (kI * k));
    out.psi_at_centers[i] = psi;
    const double edge = i > 0 ? cs[i - 1].position : -std::numeric_limits<double>::infinity();
    out.regions[i] = {a, b, edge, c};
  }
  out.incident = a;
  out.reflected = b;
  return out;
}

std::vector<OracleBranch> oracle_branches(const ScatteringProblem& problem, std::optional<RootScanConfig> cfg) {
  const double a_mod = std::abs(problem.incident_amplitude());
  auto m = [&](double t) {
    try {
      const double v = std::abs(transfer_scatter(problem, t).incident) - a_mod;
      return std::isfinite(v) ? v : kNaN;
    } catch (const DomainError&) {
      return kNaN;
    }
  };

  std::vector<OracleBranch> out;
  for (const auto& root : scan_closure(m, problem, cfg)) {
    const TransferResult tr = transfer_scatter(problem, root.value);
    // Pure phase at a root: rescaling keeps every modulus.
    const Complex scale = problem.incident_amplitude() / tr.incident;
    OracleBranch br;
    br.t_modulus = root.value;
    br.transmission = root.value / tr.incident;
    br.reflection = tr.reflected / tr.incident;
    br.psi_at_centers = tr.psi_at_centers;
    for (auto& v : br.psi_at_centers) v *= scale;
    if (problem.incidence() == Incidence::Right) std::reverse(br.psi_at_centers.begin(), br.psi_at_centers.end());
    out.push_back(std::move(br));
  }
  return out;
}

double shooting_mismatch(const BoundProblem& problem, double nu, double gamma) {
  const Segment last = shoot(problem, nu, gamma).segments.back();
  const double scale = std::abs(last.p) + std::abs(last.q);
  return scale > 0.0 ? last.p / scale : 0.0;
}

double shooting_norm(const BoundProblem& problem, double nu, double gamma) {
  const auto& cs = problem.centers();
  const Shot shot = shoot(problem, nu, gamma);
  double total = gamma * gamma / (2.0 * nu);
  for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
    const double s = cs[i + 1].position - cs[i].position;
    const auto [p, q] = shot.segments[i];
    total += p * p * std::expm1(2.0 * nu * s) / (2.0 * nu) + 2.0 * p * q * s -
             q * q * std::expm1(-2.0 * nu * s) / (2.0 * nu);
  }
  const double q = shot.segments.back().q;
  return total + q * q / (2.0 * nu);
}

std::vector<double> shooting_center_values(const BoundProblem& problem, double nu, double gamma) {
  return shoot(problem, nu, gamma).psi;
}

namespace {

struct NuRoot {
  double nu;
  int slope;                  // sign of d mismatch / d nu; neighbouring roots alternate
  std::vector<double> shape;  // atan(psi(c_i) / gamma) for i >= 2
};

NuRoot make_root(const BoundProblem& problem, double gamma, double nu, int slope) {
  const auto psi = shooting_center_values(problem, nu, gamma);
  NuRoot r{nu, slope, {}};
  for (std::size_t i = 1; i < psi.size(); ++i) r.shape.push_back(std::atan(psi[i] / gamma));
  return r;
}

double shape_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

// Roots of the mismatch in [lo, hi]. The growing coefficient is
// exponentially sensitive to nu, so roots come in tight clusters (about
// e^{-nu d} apart in a wide well): every root found on the log grid is
// followed by a few zoomed scans around it.
std::vector<NuRoot> nu_roots(const BoundProblem& problem, double gamma, double lo, double hi, int points) {
  auto m = [&](double nu) { return shooting_mismatch(problem, nu, gamma); };
  std::vector<std::pair<double, int>> raw;
  std::vector<double> dips;
  // Returns the abscissa of the smallest |m| seen.
  auto scan = [&](double a, double b, int count, bool log_spaced) {
    std::vector<double> grid(static_cast<std::size_t>(count));
    std::vector<double> val(grid.size());
    for (int i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / (count - 1);
      grid[static_cast<std::size_t>(i)] = log_spaced ? a * std::pow(b / a, t) : a + (b - a) * t;
      val[static_cast<std::size_t>(i)] = m(grid[static_cast<std::size_t>(i)]);
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      // A same-sign dip of |m| may hide a pair of roots inside one cell.
      if (log_spaced && i > 0 && (val[i - 1] < 0.0) == (val[i] < 0.0) && (val[i + 1] < 0.0) == (val[i] < 0.0) &&
          std::abs(val[i]) < std::abs(val[i - 1]) && std::abs(val[i]) <= std::abs(val[i + 1]))
        dips.push_back(grid[i]);
      if (val[i] == 0.0) {
        raw.push_back({grid[i], val[i + 1] > 0.0 ? 1 : -1});
      } else if (val[i + 1] != 0.0 && (val[i] < 0.0) != (val[i + 1] < 0.0)) {
        try {
          raw.push_back({refine_root(m, {grid[i], grid[i + 1]}, 1e-15 * grid[i + 1], 300), val[i + 1] > 0.0 ? 1 : -1});
        } catch (const BracketError&) {
        }
      }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (std::abs(val[i]) < std::abs(val[best])) best = i;
    }
    return grid[best];
  };

  scan(lo, hi, points, true);
  const double cell = std::pow(hi / lo, 1.0 / (points - 1)) - 1.0;
  std::vector<double> centres = dips;
  for (const auto& r : raw) centres.push_back(r.first);
  for (double centre : centres) {
    const double start = centre;
    for (double h = 2.0 * cell * start; h > 1e-12 * start; h /= 16.0)
      centre = scan(std::max(lo, centre - h), std::min(hi, centre + h), 65, false);
  }

  std::sort(raw.begin(), raw.end());
  std::vector<NuRoot> out;
  for (const auto& [nu, slope] : raw) {
    if (!out.empty() && std::abs(out.back().nu - nu) <= 1e-13 * nu) continue;
    out.push_back(make_root(problem, gamma, nu, slope));
  }
  return out;
}

// Same-slope root of `roots` closest to (nu, shape).
std::optional<NuRoot> follow(const std::vector<NuRoot>& roots, double nu, const std::vector<double>& shape, int slope) {
  std::optional<NuRoot> best;
  double best_d = 0.0;
  for (const auto& r : roots) {
    if (r.slope != slope) continue;
    const double d = std::abs(std::log(r.nu / nu)) + shape_distance(r.shape, shape);
    if (!best || d < best_d) {
      best = r;
      best_d = d;
    }
  }
  return best;
}

struct CurvePoint {
  double gamma;
  double nu;
  double gap;  // norm - 1
  std::vector<double> shape;
};

class CurveWalker {
 public:
  CurveWalker(const BoundProblem& problem, const ShootingGrid& grid) : problem_(problem), grid_(grid) {}

  double gap(double gamma, double nu) const { return shooting_norm(problem_, nu, gamma) - 1.0; }

  CurvePoint point(double gamma, const NuRoot& r) const { return {gamma, r.nu, gap(gamma, r.nu), r.shape}; }

  // Root with the given slope nearest (guess, shape), searched in [lo, hi].
  std::optional<CurvePoint> at(double gamma, double guess, const std::vector<double>& shape, double lo, double hi,
                               int slope) const {
    lo = std::max(lo, grid_.nu_min);
    hi = std::min(hi, grid_.nu_max);
    if (!(hi > lo)) return std::nullopt;
    const auto r = follow(nu_roots(problem_, gamma, lo, hi, 32), guess, shape, slope);
    if (!r) return std::nullopt;
    return point(gamma, *r);
  }

  // Point on the curve through a and b at gamma between them.
  std::optional<CurvePoint> between(const CurvePoint& a, const CurvePoint& b, double gamma, int slope) const {
    const double t = std::log(gamma / a.gamma) / std::log(b.gamma / a.gamma);
    const double guess = a.nu * std::pow(b.nu / a.nu, t);
    std::vector<double> shape(a.shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) shape[i] = a.shape[i] + t * (b.shape[i] - a.shape[i]);
    const double w = std::exp(std::abs(std::log(b.nu / a.nu)) + 1e-9);
    return at(gamma, guess, shape, std::min(a.nu, b.nu) / w, std::max(a.nu, b.nu) * w, slope);
  }

  // Unit-norm point between a and b, whose gaps have opposite signs.
  std::optional<ShotState> crossing(CurvePoint lo, CurvePoint hi, int slope) const {
    for (int it = 0; it < 200 && std::abs(hi.gamma - lo.gamma) > 1e-15 * hi.gamma; ++it) {
      const auto mid = between(lo, hi, std::sqrt(lo.gamma * hi.gamma), slope);
      if (!mid) return std::nullopt;
      if ((mid->gap < 0.0) == (lo.gap < 0.0)) {
        lo = *mid;
      } else {
        hi = *mid;
      }
    }
    const double gamma = std::sqrt(lo.gamma * hi.gamma);
    const double nu = std::sqrt(lo.nu * hi.nu);
    // A jump between curves shows up as a gap that never closes.
    if (std::abs(hi.nu - lo.nu) > 1e-9 * nu || std::abs(gap(gamma, nu)) > 1e-7 ||
        std::abs(shooting_mismatch(problem_, nu, gamma)) > 1e-7)
      return std::nullopt;
    return ShotState{nu, gamma, shooting_center_values(problem_, nu, gamma)};
  }

  // Golden-section search for the extremum of the gap on the curve through
  // a, m, b (ascending gamma) in the direction that could flip its sign.
  std::optional<CurvePoint> extremum(const CurvePoint& a, const CurvePoint& m, const CurvePoint& b, int slope) const {
    const double s = m.gap > 0.0 ? 1.0 : -1.0;
    constexpr double kGolden = 0.6180339887498949;
    double lo = std::log(a.gamma), hi = std::log(b.gamma);
    CurvePoint best = m;
    auto eval = [&](double lg) -> std::optional<CurvePoint> {
      const double g = std::exp(lg);
      const auto p = g < m.gamma ? between(a, m, g, slope) : between(m, b, g, slope);
      if (p && s * p->gap < s * best.gap) best = *p;
      return p;
    };
    double c = hi - kGolden * (hi - lo), d = lo + kGolden * (hi - lo);
    auto pc = eval(c), pd = eval(d);
    for (int it = 0; it < 120 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
      if (!pc || !pd || s * best.gap < 0.0) break;
      if (s * pc->gap < s * pd->gap) {
        hi = d;
        d = c;
        pd = pc;
        c = hi - kGolden * (hi - lo);
        pc = eval(c);
      } else {
        lo = c;
        c = d;
        pc = pd;
        d = lo + kGolden * (hi - lo);
        pd = eval(d);
      }
    }
    return best;
  }

  // Crossing on the arc joining two opposite-slope curve ends a and b at the
  // same gamma: the curve turns back in gamma between there and `beyond`, so
  // nu is the parameter along the arc.
  std::optional<ShotState> fold_crossing(CurvePoint a, CurvePoint b, double beyond) const {
    const double g_lo = std::min(a.gamma, beyond), g_hi = std::max(a.gamma, beyond);
    auto on_arc = [&](double nu, const CurvePoint& p, const CurvePoint& q) -> std::optional<CurvePoint> {
      auto m = [&](double g) { return shooting_mismatch(problem_, nu, g); };
      std::vector<double> found;
      const int count = 65;
      double prev_g = g_lo, prev = m(g_lo);
      for (int i = 1; i < count; ++i) {
        const double g = g_lo * std::pow(g_hi / g_lo, static_cast<double>(i) / (count - 1));
        const double v = m(g);
        if ((v < 0.0) != (prev < 0.0)) {
          try {
            found.push_back(refine_root(m, {prev_g, g}, 1e-15 * g, 300));
          } catch (const BracketError&) {
          }
        }
        prev_g = g;
        prev = v;
      }
      const double t = std::log(nu / p.nu) / std::log(q.nu / p.nu);
      std::optional<CurvePoint> best;
      double best_d = 0.0;
      for (double g : found) {
        const NuRoot r = make_root(problem_, g, nu, 0);
        double d = 0.0;
        for (std::size_t i = 0; i < r.shape.size(); ++i) d += std::abs(r.shape[i] - (p.shape[i] + t * (q.shape[i] - p.shape[i])));
        if (!best || d < best_d) {
          best = CurvePoint{g, nu, gap(g, nu), r.shape};
          best_d = d;
        }
      }
      return best;
    };
    for (int it = 0; it < 200 && std::abs(b.nu - a.nu) > 1e-15 * b.nu; ++it) {
      const auto mid = on_arc(std::sqrt(a.nu * b.nu), a, b);
      if (!mid) return std::nullopt;
      if ((mid->gap < 0.0) == (a.gap < 0.0)) {
        a = *mid;
      } else {
        b = *mid;
      }
    }
    const double gamma = std::sqrt(a.gamma * b.gamma);
    const double nu = std::sqrt(a.nu * b.nu);
    if (std::abs(b.gamma - a.gamma) > 1e-9 * gamma || std::abs(gap(gamma, nu)) > 1e-7 ||
        std::abs(shooting_mismatch(problem_, nu, gamma)) > 1e-7)
      return std::nullopt;
    return ShotState{nu, gamma, shooting_center_values(problem_, nu, gamma)};
  }

  // Walk from `known` toward `absent` (a gamma where the curve was not
  // found) and return the last point reached, stopping early when the gap
  // changes sign.
  CurvePoint toward_edge(CurvePoint known, double absent, int slope) const {
    for (int it = 0; it < 100 && std::abs(std::log(known.gamma / absent)) > 1e-14; ++it) {
      const double g = std::sqrt(known.gamma * absent);
      const auto p = at(g, known.nu, known.shape, grid_.nu_min, known.nu * std::exp(1.0), slope);
      if (!p) {
        absent = g;
        continue;
      }
      if ((p->gap < 0.0) != (known.gap < 0.0)) return *p;
      known = *p;
    }
    return known;
  }

 private:
  const BoundProblem& problem_;
  const ShootingGrid& grid_;
};

}  // namespace

std::vector<ShotState> shooting_states(const BoundProblem& problem, const ShootingGrid& grid) {
  if (!(grid.nu_min > 0.0 && grid.nu_max > grid.nu_min && grid.gamma_min > 0.0 &&
        grid.gamma_max > grid.gamma_min && grid.nu_points >= 2 && grid.gamma_points >= 2))
    throw ValidationError("nu_grid", "needs 0 < min < max and at least two points per axis");

  const int g_n = grid.gamma_points;
  std::vector<double> gammas(static_cast<std::size_t>(g_n));
  for (int j = 0; j < g_n; ++j)
    gammas[static_cast<std::size_t>(j)] =
        grid.gamma_min * std::pow(grid.gamma_max / grid.gamma_min, static_cast<double>(j) / (g_n - 1));

  std::vector<std::vector<NuRoot>> roots(gammas.size());
  for (std::size_t j = 0; j < gammas.size(); ++j)
    roots[j] = nu_roots(problem, gammas[j], grid.nu_min, grid.nu_max, grid.nu_points);

  // Chain roots of the same slope sign and similar shape into nu(gamma)
  // curves.
  struct Curve {
    int slope;
    std::size_t first;  // gamma index of points[0]
    std::vector<CurvePoint> points;
  };
  const CurveWalker walker(problem, grid);
  std::vector<Curve> curves;
  std::vector<std::vector<int>> owner(gammas.size());
  for (std::size_t j = 0; j < gammas.size(); ++j) owner[j].assign(roots[j].size(), -1);
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    for (std::size_t r = 0; r < roots[j].size(); ++r) {
      int id = owner[j][r];
      const NuRoot& here = roots[j][r];
      if (id < 0) {
        id = static_cast<int>(curves.size());
        curves.push_back({here.slope, j, {}});
        owner[j][r] = id;
      }
      curves[static_cast<std::size_t>(id)].points.push_back(walker.point(gammas[j], here));
      if (j + 1 >= gammas.size()) continue;
      const auto next = follow(roots[j + 1], here.nu, here.shape, here.slope);
      if (!next || std::abs(std::log(next->nu / here.nu)) > 2.0) continue;
      for (std::size_t q = 0; q < roots[j + 1].size(); ++q) {
        if (roots[j + 1][q].nu == next->nu && owner[j + 1][q] < 0) owner[j + 1][q] = id;
      }
    }
  }

  std::vector<ShotState> found;
  auto keep = [&](const std::optional<ShotState>& st) {
    if (!st) return;
    const bool dup = std::any_of(found.begin(), found.end(), [&](const ShotState& s) {
      return std::abs(s.nu - st->nu) < 1e-8 * std::max(1.0, st->nu) &&
             std::abs(s.gamma - st->gamma) < 1e-8 * std::max(1.0, st->gamma);
    });
    if (!dup) found.push_back(*st);
  };
  auto bracket = [&](const CurvePoint& a, const CurvePoint& b, int slope) {
    if ((a.gap < 0.0) != (b.gap < 0.0)) keep(walker.crossing(a, b, slope));
  };

  for (const Curve& c : curves) {
    const auto& pts = c.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) bracket(pts[i], pts[i + 1], c.slope);
    // Narrow dips of the norm between grid gammas.
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const double s = pts[i].gap > 0.0 ? 1.0 : -1.0;
      if ((pts[i - 1].gap > 0.0) != (s > 0.0) || (pts[i + 1].gap > 0.0) != (s > 0.0)) continue;
      if (!(s * pts[i].gap <= s * pts[i - 1].gap && s * pts[i].gap <= s * pts[i + 1].gap)) continue;
      const auto e = walker.extremum(pts[i - 1], pts[i], pts[i + 1], c.slope);
      if (e && (e->gap > 0.0) != (s > 0.0)) {
        bracket(pts[i - 1], *e, c.slope);
        bracket(*e, pts[i + 1], c.slope);
      }
    }
    // Curves that are born or end between grid gammas.
    if (c.first > 0) bracket(walker.toward_edge(pts.front(), gammas[c.first - 1], c.slope), pts.front(), c.slope);
    const std::size_t last = c.first + pts.size() - 1;
    if (last + 1 < gammas.size()) bracket(pts.back(), walker.toward_edge(pts.back(), gammas[last + 1], c.slope), c.slope);
  }

  // Two opposite-slope curves ending (or starting) at the same grid gamma
  // are the arms of a fold; the norm may cross one only on the joining arc.
  for (std::size_t x = 0; x < curves.size(); ++x) {
    for (std::size_t y = x + 1; y < curves.size(); ++y) {
      const Curve& cx = curves[x];
      const Curve& cy = curves[y];
      if (cx.slope == cy.slope) continue;
      auto try_pair = [&](const CurvePoint& a, const CurvePoint& b, std::size_t j, int dir) {
        if (std::abs(std::log(a.nu / b.nu)) > 0.5 || (a.gap < 0.0) == (b.gap < 0.0)) return;
        const std::size_t k = dir > 0 ? j + 1 : j - 1;
        keep(walker.fold_crossing(a, b, gammas[k]));
      };
      const std::size_t x_last = cx.first + cx.points.size() - 1;
      const std::size_t y_last = cy.first + cy.points.size() - 1;
      if (x_last == y_last && x_last + 1 < gammas.size()) try_pair(cx.points.back(), cy.points.back(), x_last, 1);
      if (cx.first == cy.first && cx.first > 0) try_pair(cx.points.front(), cy.points.front(), cx.first, -1);
    }
  }

  if (found.empty()) throw ConvergenceError("shooting: no normalised state on the (gamma, nu) grid");
  std::sort(found.begin(), found.end(), [](const ShotState& a, const ShotState& b) { return a.nu < b.nu; });
  return found;
}

std::vector<double> shooting_bound(const BoundProblem& problem, const ShootingGrid& grid) {
  std::vector<double> out;
  for (const auto& s : shooting_states(problem, grid)) out.push_back(s.nu);
  return out;
}

}  // namespace nldelta::oracle
