#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nldelta/bound_states.hpp"
#include "nldelta/oracle.hpp"
#include "nldelta/scattering.hpp"

using namespace nldelta;
using doctest::Approx;

namespace {

const Complex I{0.0, 1.0};

ScatteringProblem chain(std::vector<double> c, Complex z, double alpha, double k) {
  std::vector<DeltaCenter> cs;
  for (double x : c) cs.push_back(DeltaCenter::power_law(x, z, alpha));
  return validate_and_sort(cs, k, 1.0);
}

std::vector<double> sorted_t2(const std::vector<ScatteringSolution>& v) {
  std::vector<double> out;
  for (const auto& s : v) out.push_back(s.t_intensity());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> sorted_t2(const std::vector<oracle::OracleBranch>& v) {
  std::vector<double> out;
  for (const auto& s : v) out.push_back(s.t_intensity());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("transfer: free propagation") {
  auto p = chain({-1.0, 0.5}, 0.0, 0.0, 1.7);
  auto tr = oracle::transfer_scatter(p, 0.8);
  CHECK(std::abs(tr.incident - 0.8) < 1e-15);
  CHECK(std::abs(tr.reflected) < 1e-15);
  CHECK(tr.regions.size() == 3);
}

TEST_CASE("transfer: linear delta transmission") {
  for (double z : {0.5, 2.0, 9.0}) {
    const double k = 1.3;
    auto tr = oracle::transfer_scatter(chain({0.4}, z, 0.0, k), 1.0);
    CHECK(std::norm(1.0 / tr.incident) == Approx(4 * k * k / (4 * k * k + z * z)).epsilon(1e-14));
  }
}

TEST_CASE("transfer: linear in t for alpha = 0") {
  auto p = chain({-0.5, 0.3, 1.1}, Complex(2.0, 0.7), 0.0, 0.9);
  auto a = oracle::transfer_scatter(p, 0.3);
  auto b = oracle::transfer_scatter(p, 0.3 * 4.5);
  for (std::size_t i = 0; i < a.regions.size(); ++i) {
    CHECK(std::abs(4.5 * a.regions[i].a_coeff - b.regions[i].a_coeff) < 1e-12);
    CHECK(std::abs(4.5 * a.regions[i].b_coeff - b.regions[i].b_coeff) < 1e-12);
  }
}

TEST_CASE("transfer: singular exponent at zero modulus") {
  CHECK_THROWS_AS(oracle::transfer_scatter(chain({0.0}, 1.0, -0.5, 1.0), 0.0), DomainError);
}

TEST_CASE("oracle branches: Kerr single delta") {
  auto br = oracle::oracle_branches(chain({0.0}, 2.0, 2.0, 1.0));
  REQUIRE(br.size() == 1);
  CHECK(br[0].t_intensity() == Approx(0.68233).epsilon(1e-5));
  CHECK(br[0].t_intensity() == Approx(solve_scattering(chain({0.0}, 2.0, 2.0, 1.0))[0].t_intensity()).epsilon(1e-10));
}

TEST_CASE("oracle branches: linear problems give one branch equal to the consistency path") {
  auto p = chain({-1.0, 0.0, 1.5}, 3.0, 0.0, 2.2);
  auto br = oracle::oracle_branches(p);
  auto gs = solve_scattering(p);
  REQUIRE(br.size() == 1);
  CHECK(std::abs(br[0].transmission - gs[0].transmission) < 1e-12);
  CHECK(std::abs(br[0].reflection - gs[0].reflection) < 1e-12);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(br[0].psi_at_centers[i] - gs[0].psi_at_centers[i]) < 1e-12);
}

TEST_CASE("oracle branches: strong Kerr counts match") {
  auto base = chain({0.0, 1.0, 2.0}, 20.0, 2.0, 1.0);
  int multi = 0;
  for (double k = 2.5; k < 3.5; k += 0.05) {
    auto p = base.with_wavenumber(k);
    auto gs = sorted_t2(solve_scattering(p));
    auto br = sorted_t2(oracle::oracle_branches(p));
    REQUIRE(gs.size() == br.size());
    for (std::size_t i = 0; i < gs.size(); ++i) CHECK(gs[i] == Approx(br[i]).epsilon(1e-8));
    multi += gs.size() > 1;
  }
  CHECK(multi > 0);
}

TEST_CASE("oracle branches: imaginary coupling chain, both incidences") {
  for (auto side : {Incidence::Left, Incidence::Right}) {
    for (double k : {0.5, 1.1, 2.4}) {
      std::vector<DeltaCenter> cs;
      for (double c : {-1.0, 0.0, 1.0}) cs.push_back(DeltaCenter::power_law(c, I, 2.0));
      auto p = validate_and_sort(cs, k, 1.0, side);
      auto gs = solve_scattering(p);
      auto br = oracle::oracle_branches(p);
      REQUIRE(gs.size() == br.size());
      // both ordered by the modulus at the last center in the incidence frame
      for (std::size_t i = 0; i < gs.size(); ++i) {
        CHECK(std::abs(gs[i].transmission - br[i].transmission) < 1e-8);
        CHECK(std::abs(gs[i].reflection - br[i].reflection) < 1e-8);
      }
    }
  }
}

TEST_CASE("shooting: single delta") {
  oracle::ShootingGrid grid;
  auto lin = oracle::shooting_bound(validate_bound_problem({{0.0, 2.0, 0.0}}), grid);
  REQUIRE(lin.size() == 1);
  CHECK(lin[0] == Approx(1.0).epsilon(1e-8));

  auto p = validate_bound_problem({{0.0, 2.0, 1.0}});
  CHECK(std::abs(oracle::shooting_mismatch(p, 1.0, 1.0)) < 1e-14);
  CHECK(oracle::shooting_norm(p, 1.0, 1.0) == Approx(1.0).epsilon(1e-14));
  auto kerr = oracle::shooting_bound(p, grid);
  REQUIRE(kerr.size() == 1);
  CHECK(kerr[0] == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("shooting: symmetric pair matches the Lambert W states") {
  for (double alpha : {0.0, 0.5}) {
    auto p = validate_bound_problem({{-1.5, 2.0, alpha}, {1.5, 2.0, alpha}});
    oracle::ShootingGrid grid;
    grid.nu_min = 1e-7;
    auto shot = oracle::shooting_states(p, grid);
    for (const auto& lw : solve_symmetric_double(2.0, alpha, 3.0)) {
      const bool found = std::any_of(shot.begin(), shot.end(), [&](const oracle::ShotState& s) {
        return std::abs(s.nu - lw.nu) < 1e-6 && std::abs(std::abs(s.psi_at_centers[0]) - std::abs(s.psi_at_centers[1])) < 1e-6;
      });
      CHECK_MESSAGE(found, "nu = " << lw.nu);
    }
  }
}
