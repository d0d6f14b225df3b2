#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>

#include "mimitag/tmm.hpp"
#include "test_util.hpp"

using namespace mimitag;
using testutil::constant;

namespace {

// Closed-form Fresnel power coefficients for one lossless interface.
struct FresnelPowers {
  double Rs, Ts, Rp, Tp;
};

FresnelPowers fresnel(double n0, double n1, double theta0_rad) {
  const double c0 = std::cos(theta0_rad);
  const double s1 = n0 * std::sin(theta0_rad) / n1;
  const double c1 = std::sqrt(1.0 - s1 * s1);
  const double rs = (n0 * c0 - n1 * c1) / (n0 * c0 + n1 * c1);
  const double rp = (n1 * c0 - n0 * c1) / (n1 * c0 + n0 * c1);
  const double ts = 2.0 * n0 * c0 / (n0 * c0 + n1 * c1);
  const double tp = 2.0 * n0 * c0 / (n1 * c0 + n0 * c1);
  return {rs * rs, n1 * c1 / (n0 * c0) * ts * ts, rp * rp,
          n1 * c1 / (n0 * c0) * tp * tp};
}

std::vector<MaterialRef> material_pool() {
  return {testutil::silver(), testutil::zinc_oxide(), constant("glass", 1.5),
          constant("hi", 2.4, 0.0), constant("lossy", 1.8, 0.35)};
}

StackSpec random_stack(std::mt19937_64& rng, bool lossless_only) {
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<MaterialRef> pool =
      lossless_only ? std::vector<MaterialRef>{constant("glass", 1.5),
                                               constant("hi", 2.4),
                                               constant("lo", 1.38)}
                    : material_pool();
  StackSpec s;
  s.ambient = testutil::air();
  s.exit = uniform() < 0.5 ? testutil::pet() : constant("exit", 1.3 + uniform());
  const int layers = static_cast<int>(rng() % 7);  // 0..6
  for (int i = 0; i < layers; ++i) {
    s.layers.push_back(
        {pool[rng() % pool.size()], 1.0 + 299.0 * uniform()});
  }
  return s;
}

}  // namespace

TEST_CASE("vanishing phase thickness gives the identity matrix") {
  const Layer layer{constant("glass", 1.5), 1e-9};
  const Mat2c m = layer_matrix(layer, 550.0, {0.0, Polarization::s});
  CHECK(std::abs(m.m00 - 1.0) < 1e-9);
  CHECK(std::abs(m.m11 - 1.0) < 1e-9);
  CHECK(std::abs(m.m01) < 1e-9);
  CHECK(std::abs(m.m10) < 1e-9);
}

TEST_CASE("quarter-wave layer has zero diagonal and -i/eta, -i eta entries") {
  const double n1 = 2.0;
  const Layer layer{constant("material", n1), 550.0 / (4.0 * n1)};
  const Mat2c m = layer_matrix(layer, 550.0, {0.0, Polarization::s});
  CHECK(std::abs(m.m00) < 1e-12);
  CHECK(std::abs(m.m11) < 1e-12);
  CHECK(std::abs(m.m01 - std::complex<double>(0.0, -1.0 / n1)) < 1e-12);
  CHECK(std::abs(m.m10 - std::complex<double>(0.0, -n1)) < 1e-12);
}

TEST_CASE("silver layer matrix is unimodular despite complex entries") {
  const Layer layer{testutil::silver(), 30.0};
  const Mat2c m = layer_matrix(layer, 550.0, {0.0, Polarization::s});
  CHECK(std::abs(m.det() - 1.0) < 1e-12);
}

TEST_CASE("layer matrices are unimodular across materials, angles, pols") {
  std::mt19937_64 rng(5);
  const auto pool = material_pool();
  for (int trial = 0; trial < 200; ++trial) {
    const Layer layer{pool[rng() % pool.size()],
                      1.0 + static_cast<double>(rng() % 300)};
    const double angle = static_cast<double>(rng() % 80);
    const Polarization pol =
        rng() % 2 == 0 ? Polarization::s : Polarization::p;
    const double wl = 360.0 + static_cast<double>(rng() % 420);
    const Mat2c m = layer_matrix(layer, wl, {angle, pol});
    // det = cos^2 + sin^2 cancels cosh-sized terms in strongly absorbing
    // layers; the achievable accuracy scales with the entry magnitudes.
    const double scale = std::norm(m.m00) + std::norm(m.m01) +
                         std::norm(m.m10) + std::norm(m.m11);
    CHECK(std::abs(m.det() - 1.0) < 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("layer matrix rejects unpolarized queries and bad angles") {
  const Layer layer{constant("glass", 1.5), 100.0};
  CHECK_THROWS_AS(layer_matrix(layer, 550.0, {0.0, Polarization::unpolarized}),
                  ValidationError);
  CHECK_THROWS_AS(layer_matrix(layer, 550.0, {90.0, Polarization::s}),
                  ValidationError);
  CHECK_THROWS_AS(layer_matrix(layer, 550.0, {-1.0, Polarization::s}),
                  ValidationError);
}

TEST_CASE("empty stack between identical media transmits everything") {
  StackSpec s;
  s.ambient = testutil::air();
  s.exit = testutil::air();
  const std::vector<double> grid{550.0, 600.0};
  const SpectralResponse r = simulate(s, grid, {0.0, Polarization::s});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(r.R[i]) < 1e-15);
    CHECK(std::abs(r.T[i] - 1.0) < 1e-15);
  }
}

TEST_CASE("single interface reproduces the Fresnel 4% reflection") {
  StackSpec s = testutil::bare_pet_stack();
  s.exit = constant("glass", 1.5);
  const std::vector<double> grid{550.0};
  const SpectralResponse r = simulate(s, grid, {0.0, Polarization::s});
  CHECK(std::abs(r.R[0] - 0.04) < 1e-12);
  CHECK(std::abs(r.T[0] - 0.96) < 1e-12);
}

TEST_CASE("single lossless interface matches closed-form Fresnel powers") {
  const double pairs[][2] = {{1.0, 1.5}, {1.33, 2.25}};
  const std::vector<double> grid{600.0};
  for (const auto& pair : pairs) {
    StackSpec s;
    s.ambient = constant("a", pair[0]);
    s.exit = constant("b", pair[1]);
    for (double angle : {0.0, 30.0, 60.0}) {
      const FresnelPowers expected =
          fresnel(pair[0], pair[1], angle * std::numbers::pi / 180.0);
      const SpectralResponse rs = simulate(s, grid, {angle, Polarization::s});
      const SpectralResponse rp = simulate(s, grid, {angle, Polarization::p});
      CHECK(std::abs(rs.R[0] - expected.Rs) < 1e-12);
      CHECK(std::abs(rs.T[0] - expected.Ts) < 1e-12);
      CHECK(std::abs(rp.R[0] - expected.Rp) < 1e-12);
      CHECK(std::abs(rp.T[0] - expected.Tp) < 1e-12);
    }
  }
}

TEST_CASE("quarter-wave stack formula R = ((n0 ns - n1^2)/(n0 ns + n1^2))^2") {
  const double n0 = 1.0, n1 = 1.38, ns = 1.5, lambda0 = 550.0;
  StackSpec s;
  s.ambient = constant("air", n0);
  s.exit = constant("glass", ns);
  s.layers = {{constant("coat", n1), lambda0 / (4.0 * n1)}};
  const SpectralResponse r =
      simulate(s, std::vector<double>{lambda0}, {0.0, Polarization::s});
  const double num = n0 * ns - n1 * n1;
  const double den = n0 * ns + n1 * n1;
  CHECK(std::abs(r.R[0] - (num / den) * (num / den)) < 1e-10);
}

TEST_CASE("paper stack shows transmission maxima near 405 and 748 nm") {
  const std::vector<double> grid = make_grid(350.0, 800.0, 1.0);
  const SpectralResponse r = simulate(testutil::paper_stack(), grid,
                                      {0.0, Polarization::unpolarized});
  const std::vector<double> peaks = local_maxima(r.grid_nm, r.T);
  const auto near = [&peaks](double target, double tol) {
    for (double p : peaks) {
      if (std::abs(p - target) <= tol) {
        return true;
      }
    }
    return false;
  };
  CHECK(near(405.0, 20.0));
  CHECK(near(748.0, 20.0));
}

TEST_CASE("reflection dips sit at the transmission peaks") {
  const std::vector<double> grid = make_grid(350.0, 800.0, 1.0);
  const SpectralResponse r = simulate(testutil::paper_stack(), grid,
                                      {0.0, Polarization::unpolarized});
  const std::vector<double> t_peaks = local_maxima(r.grid_nm, r.T);
  const std::vector<double> r_dips = local_minima(r.grid_nm, r.R);
  REQUIRE(!t_peaks.empty());
  for (double peak : t_peaks) {
    bool found = false;
    for (double dip : r_dips) {
      if (std::abs(dip - peak) <= 10.0) {
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("reverse is an involution and swaps the end media") {
  const StackSpec s = testutil::paper_stack();
  const StackSpec rev = reverse(s);
  CHECK(rev.ambient == s.exit);
  CHECK(rev.exit == s.ambient);
  REQUIRE(rev.layers.size() == s.layers.size());
  CHECK(rev.layers.front().material == s.layers.back().material);
  CHECK(rev.layers.front().thickness_nm == s.layers.back().thickness_nm);
  const StackSpec twice = reverse(rev);
  CHECK(twice.ambient == s.ambient);
  CHECK(twice.exit == s.exit);
  for (std::size_t i = 0; i < s.layers.size(); ++i) {
    CHECK(twice.layers[i].material == s.layers[i].material);
    CHECK(twice.layers[i].thickness_nm == s.layers[i].thickness_nm);
  }
}

TEST_CASE("transmittance is reciprocal under stack reversal") {
  const std::vector<double> grid = make_grid(350.0, 800.0, 1.0);
  const StackSpec fwd = testutil::paper_stack();
  const StackSpec rev = reverse(fwd);
  for (Polarization pol : {Polarization::s, Polarization::p}) {
    SUBCASE("normal incidence") {
      const SpectralResponse a = simulate(fwd, grid, {0.0, pol});
      const SpectralResponse b = simulate(rev, grid, {0.0, pol});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(a.T[i] - b.T[i]) < 1e-9);
      }
    }
    SUBCASE("oblique, Snell-matched angles") {
      // Reciprocity pairs angles with equal transverse wavevector:
      // n_air sin(25 deg) = n_pet sin(theta_rev).
      const double theta_fwd = 25.0;
      const double theta_rev =
          std::asin(std::sin(theta_fwd * std::numbers::pi / 180.0) / 1.57) *
          180.0 / std::numbers::pi;
      const SpectralResponse a = simulate(fwd, grid, {theta_fwd, pol});
      const SpectralResponse b = simulate(rev, grid, {theta_rev, pol});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(a.T[i] - b.T[i]) < 1e-9);
      }
    }
  }
}

TEST_CASE("energy bounds hold for random stacks") {
  std::mt19937_64 rng(23);
  const std::vector<double> grid = make_grid(380.0, 780.0, 20.0);
  for (int trial = 0; trial < 120; ++trial) {
    const StackSpec s = random_stack(rng, false);
    const double angle = static_cast<double>(rng() % 81);
    const Polarization pol = static_cast<Polarization>(rng() % 3);
    const SpectralResponse r = simulate(s, grid, {angle, pol});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(r.R[i] >= -1e-9);
      CHECK(r.R[i] <= 1.0 + 1e-9);
      CHECK(r.T[i] >= -1e-9);
      CHECK(r.T[i] <= 1.0 + 1e-9);
      CHECK(r.A[i] >= -1e-9);  // no gain
      CHECK(std::abs(r.R[i] + r.T[i] + r.A[i] - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("lossless stacks absorb nothing") {
  std::mt19937_64 rng(29);
  const std::vector<double> grid = make_grid(380.0, 780.0, 25.0);
  for (int trial = 0; trial < 60; ++trial) {
    const StackSpec s = random_stack(rng, true);
    const double angle = static_cast<double>(rng() % 81);
    const Polarization pol = static_cast<Polarization>(rng() % 3);
    const SpectralResponse r = simulate(s, grid, {angle, pol});
    for (double a : r.A) {
      CHECK(std::abs(a) < 1e-9);
    }
  }
}

TEST_CASE("s and p coincide at normal incidence") {
  std::mt19937_64 rng(31);
  const std::vector<double> grid = make_grid(400.0, 700.0, 50.0);
  for (int trial = 0; trial < 40; ++trial) {
    const StackSpec s = random_stack(rng, false);
    const SpectralResponse rs = simulate(s, grid, {0.0, Polarization::s});
    const SpectralResponse rp = simulate(s, grid, {0.0, Polarization::p});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(rs.R[i] - rp.R[i]) < 1e-12);
      CHECK(std::abs(rs.T[i] - rp.T[i]) < 1e-12);
    }
  }
}

TEST_CASE("grid refinement moves no peak by more than a coarse step") {
  const StackSpec s = testutil::paper_stack();
  const SpectralResponse coarse = simulate(s, make_grid(350.0, 800.0, 1.0),
                                           {0.0, Polarization::unpolarized});
  const SpectralResponse fine = simulate(s, make_grid(350.0, 800.0, 0.5),
                                         {0.0, Polarization::unpolarized});
  const std::vector<double> coarse_peaks = local_maxima(coarse.grid_nm, coarse.T);
  const std::vector<double> fine_peaks = local_maxima(fine.grid_nm, fine.T);
  REQUIRE(!coarse_peaks.empty());
  for (double cp : coarse_peaks) {
    bool matched = false;
    for (double fp : fine_peaks) {
      if (std::abs(fp - cp) <= 1.0) {
        matched = true;
      }
    }
    CHECK(matched);
  }
}

TEST_CASE("absorbing ambient is rejected") {
  StackSpec s;
  s.ambient = testutil::silver();
  s.exit = testutil::pet();
  CHECK_THROWS_AS(
      simulate(s, std::vector<double>{550.0}, {0.0, Polarization::s}),
      LossyAmbient);
}

TEST_CASE("grid outside a material table propagates OutOfRange") {
  const StackSpec s = testutil::paper_stack();
  CHECK_THROWS_AS(
      simulate(s, std::vector<double>{300.0, 400.0}, {0.0, Polarization::s}),
      OutOfRange);
}

TEST_CASE("simulate validates its inputs") {
  const StackSpec s = testutil::bare_pet_stack();
  CHECK_THROWS_AS(simulate(s, std::vector<double>{}, {0.0, Polarization::s}),
                  ValidationError);
  CHECK_THROWS_AS(
      simulate(s, std::vector<double>{500.0, 400.0}, {0.0, Polarization::s}),
      ValidationError);
  StackSpec zero = s;
  zero.layers = {{testutil::pet(), 0.0}};
  CHECK_THROWS_AS(
      simulate(zero, std::vector<double>{500.0}, {0.0, Polarization::s}),
      ValidationError);
}

TEST_CASE("make_grid spans inclusive endpoints") {
  const std::vector<double> g = make_grid(350.0, 800.0, 1.0);
  CHECK(g.size() == 451);
  CHECK(g.front() == 350.0);
  CHECK(g.back() == 800.0);
  CHECK_THROWS_AS(make_grid(800.0, 350.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_grid(350.0, 800.0, 0.0), ValidationError);
}

TEST_CASE("non-finite numeric inputs are rejected, not propagated") {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(make_grid(350.0, inf, 1.0), ValidationError);
  CHECK_THROWS_AS(make_grid(350.0, 800.0, nan), ValidationError);
  StackSpec s = testutil::bare_pet_stack();
  s.layers = {{testutil::pet(), inf}};
  CHECK_THROWS_AS(
      simulate(s, std::vector<double>{500.0}, {0.0, Polarization::s}),
      ValidationError);
  std::istringstream in("wavelength_nm,n,k\n400,2,0\n500,inf,0\n");
  CHECK_THROWS_AS(load_material(in, "x"), ValidationError);
}

TEST_CASE("local extrema: strict neighbours, leftmost plateau point") {
  const std::vector<double> grid{1, 2, 3, 4, 5, 6};
  const std::vector<double> values{0, 1, 1, 0, 2, 1};
  const std::vector<double> maxima = local_maxima(grid, values);
  REQUIRE(maxima.size() == 2);
  CHECK(maxima[0] == 2.0);  // leftmost of the 1,1 plateau
  CHECK(maxima[1] == 5.0);
  const std::vector<double> minima = local_minima(grid, values);
  REQUIRE(minima.size() == 1);
  CHECK(minima[0] == 4.0);

  // monotone ramps have no interior extrema; endpoints never qualify
  const std::vector<double> ramp{0, 1, 2, 3, 4, 5};
  CHECK(local_maxima(grid, ramp).empty());
  CHECK(local_minima(grid, ramp).empty());
}
