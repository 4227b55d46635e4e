#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nldelta/oracle.hpp"
#include "nldelta/scattering.hpp"

using namespace nldelta;
using doctest::Approx;

namespace {

const Complex I{0.0, 1.0};
Complex ph(double a) { return std::polar(1.0, a); }

ScatteringProblem kerr3(double z, double k, std::vector<double> c = {0.0, 1.0, 2.0}) {
  std::vector<DeltaCenter> cs;
  for (double x : c) cs.push_back(DeltaCenter::power_law(x, z, 2.0));
  return validate_and_sort(cs, k, 1.0);
}

double y_kerr() {
  double a = 0.0, b = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    (m * m * m + m - 1.0 < 0.0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

// 3x3 determinant by cofactor expansion along the first row.
Complex det3(const Eigen::MatrixXcd& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

}  // namespace

TEST_CASE("build_phi entries and determinant") {
  auto one = validate_and_sort({DeltaCenter::linear(0.0, 2.0)}, 1.0, 1.0);
  auto phi1 = build_phi(one, {1.0});
  CHECK(std::abs(phi1.entries(0, 0) - (1.0 + I)) < 1e-15);
  CHECK(std::abs(phi1.determinant - (1.0 + I)) < 1e-15);

  auto free2 = validate_and_sort({DeltaCenter::linear(0.0, 0.0), DeltaCenter::linear(1.3, 0.0)}, 0.7, 1.0);
  auto phi0 = build_phi(free2, {1.0, 1.0});
  CHECK((phi0.entries - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);
  CHECK(std::abs(phi0.determinant - 1.0) < 1e-15);
}

TEST_CASE("N = 3 determinant matches the explicit expansion") {
  const double k = 0.83;
  const std::vector<double> c{0.0, 1.0, 2.0};
  auto p = validate_and_sort({DeltaCenter::linear(c[0], 1.7), DeltaCenter::linear(c[1], 1.7), DeltaCenter::linear(c[2], 1.7)},
                             k, 1.0);
  auto phi = build_phi(p, {1.0, 1.0, 1.0});
  const Complex g = I * 1.7 / (2.0 * k);
  const Complex e21 = ph(2 * k * (c[1] - c[0])), e31 = ph(2 * k * (c[2] - c[0])), e32 = ph(2 * k * (c[2] - c[1]));
  const Complex expansion = 1.0 + 3.0 * g + g * g * (1.0 - e21) + g * g * (1.0 - e31) + g * g * (1.0 - e32) +
                          g * g * g * (1.0 - e21 + e31 - e32);
  CHECK(std::abs(phi.determinant - expansion) < 1e-12 * std::abs(expansion));
  CHECK(std::abs(phi.determinant - det3(phi.entries)) < 1e-12 * std::abs(expansion));
  // off-diagonal pattern g_j e^{ik|c_i - c_j|}
  CHECK(std::abs(phi.entries(0, 2) - g * ph(k * 2.0)) < 1e-15);
  CHECK(std::abs(phi.entries(2, 1) - g * ph(k * 1.0)) < 1e-15);
}

TEST_CASE("back_substitute: free wave keeps a constant modulus") {
  auto p = validate_and_sort({DeltaCenter::linear(-1.0, 0.0), DeltaCenter::linear(0.2, 0.0), DeltaCenter::linear(1.5, 0.0)},
                             1.3, 1.0);
  auto chain = back_substitute(p, 0.7);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(chain.ratios[i] - ph(1.3 * (p.centers()[i].position - 1.5))) < 1e-14);
    CHECK(chain.moduli[i] == Approx(0.7).epsilon(1e-14));
  }
  CHECK(chain.ratios[2] == Complex(1.0, 0.0));
}

TEST_CASE("back_substitute: N = 2 modulus relation") {
  const double k = 1.1, c1 = -0.4, c2 = 0.9;
  auto p = validate_and_sort({DeltaCenter::power_law(c1, 3.0, 1.0), DeltaCenter::power_law(c2, Complex(2.0, 0.5), 2.0)},
                             k, 1.0);
  for (double r : {0.1, 0.6, 2.0}) {
    auto chain = back_substitute(p, r);
    const Complex g2 = effective_g(PowerLaw{Complex(2.0, 0.5), 2.0}, r, k);
    CHECK(chain.moduli[0] == Approx(r * std::abs(g2 * (1.0 - ph(2 * k * (c2 - c1))) + 1.0)).epsilon(1e-13));
    CHECK(std::abs(chain.ratios[0]) * r == Approx(chain.moduli[0]).epsilon(1e-13));
  }
}

TEST_CASE("back_substitute: N = 3 follows the row reduction, not a g3 phase of e^{-2ik(c3-c2)}") {
  const double k = 0.9;
  const std::vector<double> c{0.0, 1.0, 2.0};
  auto p = kerr3(2.0, k, c);
  const double r = 0.5;
  auto chain = back_substitute(p, r);
  const Complex g3 = effective_g(PowerLaw{2.0, 2.0}, r, k);
  const Complex g2 = effective_g(PowerLaw{2.0, 2.0}, chain.moduli[1], k);
  // psi(c2)/psi(c3)
  const Complex r2 = ph(k * (c[1] - c[2])) * (1.0 + g3 * (1.0 - ph(2 * k * (c[2] - c[1]))));
  CHECK(std::abs(chain.ratios[1] - r2) < 1e-14);
  // psi(c1)/psi(c3) with the g3 term as (1 - e^{2ik(c3-c1)})
  const Complex mixed = 1.0 - ph(2 * k * (c[1] - c[0])) + ph(2 * k * (c[2] - c[0])) - ph(2 * k * (c[2] - c[1]));
  const Complex derived = ph(k * (c[0] - c[2])) *
                          (1.0 + g2 * (1.0 - ph(2 * k * (c[1] - c[0]))) + g3 * (1.0 - ph(2 * k * (c[2] - c[0]))) + g2 * g3 * mixed);
  const Complex wrong_phase = ph(k * (c[0] - c[2])) *
                          (1.0 + g2 * (1.0 - ph(2 * k * (c[1] - c[0]))) + g3 * (1.0 - ph(-2 * k * (c[2] - c[1]))) + g2 * g3 * mixed);
  CHECK(std::abs(chain.ratios[0] - derived) < 1e-13);
  CHECK(std::abs(chain.ratios[0] - wrong_phase) > 1e-3);

  // and the transfer oracle at the same transmitted modulus agrees
  auto tr = oracle::transfer_scatter(p, r);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(tr.psi_at_centers[i] / tr.psi_at_centers[2] - chain.ratios[i]) < 1e-13);
}

TEST_CASE("closure residual examples") {
  auto free1 = validate_and_sort({DeltaCenter::linear(0.0, 0.0)}, 1.0, Complex(0.6, 0.8));
  for (double r : {0.2, 1.0, 3.0}) CHECK(closure_residual(free1, r) == Approx(r - 1.0).epsilon(1e-14));

  auto kerr = validate_and_sort({DeltaCenter::power_law(0.0, 2.0, 2.0)}, 1.0, 1.0);
  auto roots = find_all_positive_roots([&](double r) { return closure_residual(kerr, r); }, default_scan_config(kerr));
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == Approx(std::sqrt(y_kerr())).epsilon(1e-12));

  // N = 2 linear: |psi(c2)| |(1 - e^{2ik(c2-c1)}) g1 g2 + g1 + g2 + 1| = |A|
  const double k = 1.7, c1 = 0.0, c2 = 1.2;
  auto two = validate_and_sort({DeltaCenter::linear(c1, 2.5), DeltaCenter::linear(c2, 1.5)}, k, 1.0);
  auto r2 = find_all_positive_roots([&](double r) { return closure_residual(two, r); }, default_scan_config(two));
  REQUIRE(r2.size() == 1);
  const Complex g1 = I * 2.5 / (2 * k), g2 = I * 1.5 / (2 * k);
  CHECK(r2[0] * std::abs((1.0 - ph(2 * k * (c2 - c1))) * g1 * g2 + g1 + g2 + 1.0) == Approx(1.0).epsilon(1e-12));

  auto singular = validate_and_sort({DeltaCenter::power_law(0.0, 1.0, -1.0)}, 1.0, 1.0);
  CHECK(std::isnan(closure_residual(singular, 0.0)));
}

TEST_CASE("solve_scattering: linear single delta") {
  auto p = validate_and_sort({DeltaCenter::linear(0.0, 2.0)}, 1.0, 1.0);
  auto s = solve_scattering(p);
  REQUIRE(s.size() == 1);
  CHECK(std::abs(s[0].transmission - 1.0 / (1.0 + I)) < 1e-14);
  CHECK(std::abs(s[0].reflection - (-I / (1.0 + I))) < 1e-14);
  CHECK(s[0].t_intensity() == Approx(0.5).epsilon(1e-14));
  CHECK(s[0].r_intensity() == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("solve_scattering: Kerr single delta") {
  auto p = validate_and_sort({DeltaCenter::power_law(0.0, 2.0, 2.0)}, 1.0, 1.0);
  auto s = solve_scattering(p);
  REQUIRE(s.size() == 1);
  const double y = y_kerr();
  CHECK(s[0].t_intensity() == Approx(1.0 / (1.0 + y * y)).epsilon(1e-12));
  CHECK(s[0].t_intensity() == Approx(0.68233).epsilon(1e-5));
}

TEST_CASE("solve_scattering: strong Kerr chain is multistable near a resonance") {
  auto base = kerr3(20.0, 1.0);
  std::size_t best = 0;
  double k_best = 0.0;
  for (double k = 2.0; k < 4.0 && best < 3; k += 0.01) {
    auto s = solve_scattering(base.with_wavenumber(k));
    if (s.size() > best) {
      best = s.size();
      k_best = k;
    }
  }
  INFO("k = " << k_best);
  CHECK(best >= 3);
  auto s = solve_scattering(base.with_wavenumber(k_best));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].psi_cn_modulus > s[i - 1].psi_cn_modulus);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].branch_index == static_cast<int>(i));
}

TEST_CASE("evaluate_wavefunction consistency and asymptotics") {
  auto p = validate_and_sort({DeltaCenter::power_law(-0.5, 3.0, 2.0), DeltaCenter::power_law(0.7, Complex(1.0, 0.4), 1.0)},
                             1.3, Complex(0.8, 0.3));
  auto sols = solve_scattering(p);
  const double k = p.wavenumber();
  const Complex a = p.incident_amplitude();
  for (const auto& s : sols) {
    for (std::size_t i = 0; i < p.size(); ++i)
      CHECK(std::abs(evaluate_wavefunction(p, s, p.centers()[i].position) - s.psi_at_centers[i]) < 1e-12);
    for (double x : {5.0, 40.0}) CHECK(std::abs(evaluate_wavefunction(p, s, x) * ph(-k * x) - a * s.transmission) < 1e-12);
    for (double x : {-5.0, -40.0})
      CHECK(std::abs(evaluate_wavefunction(p, s, x) - a * ph(k * x) - a * s.reflection * ph(-k * x)) < 1e-12);
  }
}

TEST_CASE("single delta closed form") {
  for (double z : {0.5, 2.0, 7.0}) {
    auto p = validate_and_sort({DeltaCenter::linear(0.3, z)}, 1.4, 1.0);
    auto cf = single_delta_closed_form(p);
    REQUIRE(cf.size() == 1);
    CHECK(cf[0].t_intensity() == Approx(4 * 1.4 * 1.4 / (4 * 1.4 * 1.4 + z * z)).epsilon(1e-14));
  }

  auto kerr = validate_and_sort({DeltaCenter::power_law(0.0, 2.0, 2.0)}, 1.0, 1.0);
  auto cf = single_delta_closed_form(kerr);
  auto gen = solve_scattering(kerr);
  REQUIRE(cf.size() == gen.size());
  CHECK(std::abs(cf[0].transmission - gen[0].transmission) < 1e-10);
  CHECK(std::abs(cf[0].reflection - gen[0].reflection) < 1e-10);

  // z = 2i, alpha = 2, k = 1: every branch solves x^2 |1 + i zh x^2|^2 = |A|^2 with zh = i
  auto gain = validate_and_sort({DeltaCenter::power_law(0.0, Complex(0.0, 2.0), 2.0)}, 1.0, 1.0);
  auto branches = single_delta_closed_form(gain);
  REQUIRE(!branches.empty());
  for (const auto& b : branches) {
    const double x = b.psi_cn_modulus;
    CHECK(std::abs(x * x * std::norm(1.0 + I * I * x * x) - 1.0) < 1e-10);
  }
  CHECK_THROWS_AS(single_delta_closed_form(kerr3(2.0, 1.0)), ValidationError);
}

TEST_CASE("invariants over random real problems") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), z(0.5, 20.0), kk(0.3, 5.0);
  std::uniform_int_distribution<int> n(1, 3), alpha(0, 2);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<DeltaCenter> cs;
    const int m = n(rng);
    for (int i = 0; i < m; ++i) cs.push_back(DeltaCenter::power_law(pos(rng), z(rng), alpha(rng)));
    auto p = validate_and_sort(cs, kk(rng), 1.0);
    for (const auto& s : solve_scattering(p)) {
      CHECK(s.t_intensity() + s.r_intensity() == Approx(1.0).epsilon(1e-10));
      std::vector<double> moduli;
      for (auto v : s.psi_at_centers) moduli.push_back(std::abs(v));
      auto phi = build_phi(p, moduli);
      CHECK(std::abs(s.transmission * phi.determinant - 1.0) < 1e-10);
      for (std::size_t i = 0; i < p.size(); ++i) {
        Complex row = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) row += phi.entries(i, j) * s.psi_at_centers[j];
        CHECK(std::abs(row - ph(p.wavenumber() * p.centers()[i].position)) < 1e-10);
      }
      CHECK(s.closure_residual < 1e-11);
    }
  }
}

TEST_CASE("linear limit: one branch equal to the direct solve") {
  auto p = validate_and_sort({DeltaCenter::linear(-1.0, 3.0), DeltaCenter::linear(0.1, Complex(1.0, -0.5)),
                              DeltaCenter::linear(1.3, 6.0)},
                             2.1, Complex(0.0, 2.0));
  auto s = solve_scattering(p);
  REQUIRE(s.size() == 1);
  auto d = solve_linear_direct(p);
  CHECK(std::abs(s[0].transmission - d.transmission) < 1e-10);
  CHECK(std::abs(s[0].reflection - d.reflection) < 1e-10);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(s[0].psi_at_centers[i] - d.psi_at_centers[i]) < 1e-10);
}

TEST_CASE("parity symmetric chain: left and right incidence agree") {
  for (double alpha : {0.0, 1.0, 2.0}) {
    std::vector<DeltaCenter> cs;
    for (double c : {-1.0, 0.0, 1.0}) cs.push_back(DeltaCenter::power_law(c, I, alpha));
    for (double k : {0.4, 1.3, 2.9}) {
      auto l = solve_scattering(validate_and_sort(cs, k, 1.0, Incidence::Left));
      auto r = solve_scattering(validate_and_sort(cs, k, 1.0, Incidence::Right));
      REQUIRE(l.size() == r.size());
      for (std::size_t i = 0; i < l.size(); ++i) {
        CHECK(std::abs(l[i].transmission - r[i].transmission) < 1e-10);
        CHECK(std::abs(l[i].reflection - r[i].reflection) < 1e-10);
      }
    }
  }
}

TEST_CASE("right incidence equals the mirrored left problem") {
  auto p = validate_and_sort({DeltaCenter::power_law(-0.3, 4.0, 2.0), DeltaCenter::power_law(1.1, 2.0, 1.0)}, 1.2, 1.0,
                             Incidence::Right);
  auto right = solve_scattering(p);
  auto left = solve_scattering(p.mirrored());
  REQUIRE(right.size() == left.size());
  for (std::size_t i = 0; i < right.size(); ++i) {
    CHECK(std::abs(right[i].transmission - left[i].transmission) < 1e-12);
    // psi listed in the caller's center order
    CHECK(std::abs(right[i].psi_at_centers[0] - left[i].psi_at_centers[1]) < 1e-12);
  }
}

TEST_CASE("no branch is reported, not invented") {
  // x^2 + (z/2k)^2 = |A|^2 has no root once z/2k > |A|
  auto p = validate_and_sort({DeltaCenter::power_law(0.0, 20.0, -1.0)}, 1.0, 1.0);
  CHECK_THROWS_AS(solve_scattering(p), NoBranchError);
}
