#include <doctest.h>

#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "nldelta/numerics.hpp"

using namespace nldelta;
using doctest::Approx;

namespace {

// Plain bisection, the oracle for every bracketed root below.
template <class F>
double bisect(F f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 1e-16 * std::max(1.0, std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Brute-force positive roots of p(y) on a dense grid, bisected.
template <class F>
std::vector<double> brute_roots(F p, double hi, int n = 200000) {
  std::vector<double> out;
  double prev_y = hi / n, prev = p(prev_y);
  for (int i = 2; i <= n; ++i) {
    const double y = hi * i / n;
    const double v = p(y);
    if ((v < 0.0) != (prev < 0.0)) out.push_back(bisect(p, prev_y, y));
    prev_y = y;
    prev = v;
  }
  return out;
}

RootScanConfig cfg(double lo, double hi) {
  RootScanConfig c;
  c.r_min = lo;
  c.r_max = hi;
  return c;
}

}  // namespace

TEST_CASE("find_all_positive_roots examples") {
  auto one = find_all_positive_roots([](double r) { return r - 1.0; }, cfg(0.01, 10.0));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Approx(1.0).epsilon(1e-12));

  auto three = find_all_positive_roots([](double r) { return (r - 1.0) * (r - 2.0) * (r - 3.0); }, cfg(0.01, 10.0));
  REQUIRE(three.size() == 3);
  CHECK(three[0] == Approx(1.0).epsilon(1e-12));
  CHECK(three[1] == Approx(2.0).epsilon(1e-12));
  CHECK(three[2] == Approx(3.0).epsilon(1e-12));

  CHECK(find_all_positive_roots([](double r) { return r * r + 1.0; }, cfg(0.01, 10.0)).empty());
}

TEST_CASE("scan skips NaN holes and reports roots beside them") {
  auto h = [](double r) { return (r > 1.4 && r < 1.6) ? NAN : (r - 1.0) * (r - 2.5); };
  auto roots = find_all_positive_roots(h, cfg(0.01, 10.0));
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == Approx(1.0).epsilon(1e-12));
  CHECK(roots[1] == Approx(2.5).epsilon(1e-12));

  // a sign flip across a hole is not a root
  auto pole = [](double r) { return std::abs(r - 2.0) < 0.01 ? NAN : 1.0 / (r - 2.0); };
  CHECK(find_all_positive_roots(pole, cfg(0.01, 10.0)).empty());

  CHECK_THROWS_AS(find_all_positive_roots([](double) { return NAN; }, cfg(0.01, 10.0)), ScanError);
}

TEST_CASE("returned roots satisfy the residual bound") {
  auto h = [](double r) { return std::sin(3.0 * r) * std::exp(-0.1 * r); };
  RootScanConfig c = cfg(0.05, 20.0);
  for (const auto& root : scan_roots(h, c)) CHECK(std::abs(h(root.value)) < 10.0 * c.refine_tol * 2.0);
}

TEST_CASE("tangent double root is reported once and flagged") {
  // exact zero on a grid node with equal signs on both sides
  RootScanConfig c = cfg(1.0, 3.0);
  c.n_scan = 3;
  c.spacing = GridSpacing::Linear;
  auto roots = scan_roots([](double r) { return (r - 2.0) * (r - 2.0); }, c);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].value == 2.0);
  CHECK(roots[0].grazing);
}

TEST_CASE("RootScanConfig validation") {
  CHECK_THROWS_AS(cfg(0.0, 1.0).validate(), ValidationError);
  CHECK_THROWS_AS(cfg(2.0, 1.0).validate(), ValidationError);
  RootScanConfig c = cfg(0.1, 1.0);
  c.n_scan = 1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = cfg(0.1, 1.0);
  c.refine_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("scan grid is ascending with endpoints") {
  for (auto spacing : {GridSpacing::Linear, GridSpacing::Log, GridSpacing::Mixed}) {
    RootScanConfig c = cfg(1e-9, 10.0);
    c.spacing = spacing;
    auto g = scan_grid(c);
    CHECK(g.front() == 1e-9);
    CHECK(g.back() == 10.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  }
}

TEST_CASE("refine_root examples") {
  CHECK(refine_root([](double r) { return r - 2.0; }, {1.0, 3.0}, 1e-14) == Approx(2.0).epsilon(1e-14));
  CHECK(refine_root([](double r) { return std::cos(r); }, {1.0, 2.0}, 1e-14) ==
        Approx(std::numbers::pi / 2).epsilon(1e-14));
  CHECK(refine_root([](double r) { return r * r * r - 2.0; }, {1.0, 2.0}, 1e-14) ==
        Approx(std::cbrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(refine_root([](double r) { return r * r + 1.0; }, {1.0, 2.0}, 1e-12), BracketError);
}

TEST_CASE("modulus cubic: linear limit and Kerr example") {
  auto lin = solve_modulus_cubic(0.0, 1.0);
  REQUIRE(lin.size() == 1);
  CHECK(lin[0] == 1.0);

  const double y = bisect([](double v) { return v * v * v + v - 1.0; }, 0.0, 1.0);
  CHECK(y == Approx(0.6823278038280193).epsilon(1e-15));
  auto kerr = solve_modulus_cubic(1.0, 1.0);
  REQUIRE(kerr.size() == 1);
  CHECK(kerr[0] == Approx(std::sqrt(y)).epsilon(1e-14));
  CHECK(kerr[0] == Approx(0.826031).epsilon(1e-6));
}

TEST_CASE("modulus cubic: three roots for imaginary zh") {
  // s^2 y^3 - 2 s y^2 + y - 1 with zh = i s; search s until the brute scan sees three roots
  double s_found = 0.0;
  std::vector<double> brute;
  for (double s = 0.05; s < 5.0 && brute.size() != 3; s += 0.01) {
    auto p = [s](double v) { return s * s * v * v * v - 2.0 * s * v * v + v - 1.0; };
    brute = brute_roots(p, 10.0, 20000);
    s_found = s;
  }
  REQUIRE(brute.size() == 3);
  INFO("s = " << s_found);
  auto x = solve_modulus_cubic(Complex(0.0, s_found), 1.0);
  REQUIRE(x.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(x[i] * x[i] == Approx(brute[i]).epsilon(1e-10));
}

TEST_CASE("modulus cubic: real zh has exactly one root") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-20.0, 20.0), a(0.1, 5.0);
  for (int i = 0; i < 200; ++i) {
    const Complex zh{re(rng), 0.0};
    const double am = a(rng);
    auto x = solve_modulus_cubic(zh, am);
    REQUIRE(x.size() == 1);
    const double y = x[0] * x[0];
    CHECK(std::abs(std::norm(zh) * y * y * y + y - am * am) < 1e-10 * (1.0 + am * am));
  }
}

TEST_CASE("modulus cubic agrees with scanning the same polynomial") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> part(-3.0, 3.0), a(0.2, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Complex zh{part(rng), part(rng)};
    const double am = a(rng);
    auto h = [&](double x) {
      const double y = x * x;
      return std::norm(zh) * y * y * y - 2.0 * zh.imag() * y * y + y - am * am;
    };
    RootScanConfig c = cfg(1e-6, 10.0 * am + 10.0);
    c.n_scan = 20000;
    auto scanned = find_all_positive_roots(h, c);
    auto closed = solve_modulus_cubic(zh, am);
    REQUIRE(scanned.size() == closed.size());
    for (std::size_t j = 0; j < closed.size(); ++j) CHECK(closed[j] == Approx(scanned[j]).epsilon(1e-10));
  }
}

TEST_CASE("real cubic solver") {
  auto r = solve_real_cubic(1.0, -6.0, 11.0, -6.0);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == Approx(1.0));
  CHECK(r[1] == Approx(2.0));
  CHECK(r[2] == Approx(3.0));
  auto q = solve_real_cubic(0.0, 1.0, -3.0, 2.0);
  REQUIRE(q.size() == 2);
  CHECK(q[0] == Approx(1.0));
  CHECK(q[1] == Approx(2.0));
}

TEST_CASE("lambert_w examples") {
  const double e = std::numbers::e;
  CHECK(lambert_w(LambertBranch::Principal, 0.0) == 0.0);
  CHECK(lambert_w(LambertBranch::Principal, e) == Approx(1.0).epsilon(1e-15));
  CHECK(lambert_w(LambertBranch::Principal, -1.0 / e) == Approx(-1.0).epsilon(1e-7));
  CHECK(lambert_w(LambertBranch::Lower, -1.0 / e) == Approx(-1.0).epsilon(1e-7));
  CHECK_THROWS_AS(lambert_w(LambertBranch::Principal, -0.5), DomainError);
  CHECK_THROWS_AS(lambert_w(LambertBranch::Lower, 0.0), DomainError);
  CHECK_THROWS_AS(lambert_w(LambertBranch::Lower, 0.1), DomainError);
}

TEST_CASE("lambert_w round trip and reference values") {
  std::mt19937_64 rng(3);
  const double e = std::numbers::e;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    // principal: y over [-1/e, 1e6] with log spacing above 1
    const double t = u(rng);
    const double y0 = t < 0.5 ? -1.0 / e + 2.0 * t * (1.0 + 1.0 / e) : std::pow(10.0, 12.0 * (t - 0.5));
    const double w0 = lambert_w(LambertBranch::Principal, y0);
    CHECK(w0 >= -1.0);
    CHECK(std::abs(w0 * std::exp(w0) - y0) <= 1e-12 * std::max(std::abs(y0), 1e-300));
    CHECK(w0 == Approx(boost::math::lambert_w0(y0)).epsilon(1e-12));

    const double y1 = -std::exp(-1.0 - 700.0 * u(rng)) * (1.0 - 1e-15);
    const double w1 = lambert_w(LambertBranch::Lower, y1);
    CHECK(w1 <= -1.0);
    CHECK(std::abs(w1 * std::exp(w1) - y1) <= 1e-12 * std::abs(y1));
    CHECK(w1 == Approx(boost::math::lambert_wm1(y1)).epsilon(1e-12));
  }
}
