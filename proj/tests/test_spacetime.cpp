#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tdfr/errors.hpp"
#include "tdfr/spacetime.hpp"

using namespace tdfr;

namespace {

Worldline linear_phi(double slope, double t_end, int samples) {
  std::vector<WorldlineSample> s;
  for (int k = 0; k < samples; ++k) {
    const double t = t_end * k / (samples - 1);
    s.push_back({t, slope * t, 0.0});
  }
  return Worldline(s, 1.0);
}

}  // namespace

TEST_CASE("dilation factor examples") {
  CHECK(dilation_factor(0.0, 0.0, 1.0, 1.0) == 1.0);
  CHECK(dilation_factor(0.2, 0.0, 1.0, 1.0) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(dilation_factor(0.0, 0.2, 1.0, 1.0) == doctest::Approx(0.98).epsilon(1e-15));
  CHECK(std::abs(dilation_factor(0.2, 0.2, 1.0, 1e6) - 1.0) < 1e-12);
  CHECK(std::abs(dilation_factor(0.2, 0.2, 1.0, 1e8) - 1.0) < 1e-12);

  CHECK_THROWS_AS(dilation_factor(0.0, 0.0, 0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(dilation_factor(0.0, 0.0, 1.0, -1.0), ArgumentError);
  CHECK_THROWS_AS(dilation_factor(-1.0, 0.0, 1.0, 1.0), WeakFieldError);
  CHECK_THROWS_AS(dilation_factor(0.0, 2.0, 1.0, 1.0), WeakFieldError);
}

TEST_CASE("dilation factor monotonicity") {
  for (int i = 0; i < 20; ++i) {
    const double phi = -0.4 + 0.04 * i;
    const double p = 0.05 * i;
    CHECK(dilation_factor(phi + 0.01, p, 1.0) > dilation_factor(phi, p, 1.0));
    CHECK(dilation_factor(phi, p + 0.01, 1.0) < dilation_factor(phi, p, 1.0));
  }
}

TEST_CASE("static hamiltonian and rest energy") {
  CHECK(static_hamiltonian(-1.0, 0.0, 5.0) == 5.0);
  CHECK(static_hamiltonian(-1.2, 0.0, 1.0) == doctest::Approx(1.0954451150103322).epsilon(1e-15));
  CHECK(rest_energy(1.0, 0.0) == 1.0);
  CHECK(rest_energy(2.0, 0.5) == 2.5);
  CHECK(static_hamiltonian(-1.0, 0.0, rest_energy(3.0, 0.25)) == 3.25);

  // H - [H_rest (1 + phi) + p^2 / 2 H_rest] is O(phi^2, phi p^2, p^4): with
  // p^2 ~ phi every term shrinks 16x when phi drops 4x.
  const double h_rest = 2.0;
  const auto remainder = [&](double phi, double p) {
    const double first = h_rest * (1.0 + phi) + p * p / (2.0 * h_rest);
    return static_hamiltonian(-(1.0 + 2.0 * phi), p * p, h_rest) - first;
  };
  const double q1 = remainder(1e-2, 1e-1);
  const double q2 = remainder(0.25e-2, 0.5e-1);
  CHECK(q1 / q2 == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("worldline validation") {
  CHECK_THROWS_AS(Worldline({{0, 0, 0}}, 1.0), ArgumentError);
  CHECK_THROWS_AS(Worldline({{0, 0, 0}, {0, 0, 0}}, 1.0), ArgumentError);
  CHECK_THROWS_AS(Worldline({{1, 0, 0}, {0, 0, 0}}, 1.0), ArgumentError);
  CHECK_THROWS_AS(Worldline({{0, 0, 0}, {1, NAN, 0}}, 1.0), ArgumentError);
  CHECK_THROWS_AS(Worldline({{0, 0, 0}, {1, 0, 0}}, 0.0), ArgumentError);
}

TEST_CASE("dilation profiles") {
  SUBCASE("comoving") {
    const Worldline w({{0, 0, 0}, {2.5, 0, 0}, {5, 0, 0}}, 1.0);
    const DilationProfile p = dilation_profile(w, {});
    CHECK(p.tau_total() == 5.0);
    for (double a : p.alphas()) CHECK(a == 1.0);
  }
  SUBCASE("linear potential ramp") {
    const DilationProfile p = dilation_profile(linear_phi(0.02, 10.0, 1001), {});
    CHECK(std::abs(p.tau_total() - 11.0) < 1e-6);
    CHECK(p.tau_at(5.0) == doctest::Approx(5.25).epsilon(1e-12));
    CHECK(p.alpha_at(2.5) == doctest::Approx(1.05).epsilon(1e-12));
  }
  SUBCASE("coarse versus fine quadrature") {
    const auto smooth = [](int n) {
      std::vector<WorldlineSample> s;
      for (int k = 0; k < n; ++k) {
        const double t = 2.0 * k / (n - 1);
        s.push_back({t, 0.1 * std::sin(t), 0.0});
      }
      return dilation_profile(Worldline(s, 1.0), {}).tau_total();
    };
    const double exact = 2.0 + 0.1 * (1.0 - std::cos(2.0));
    const double coarse = smooth(2);
    const double fine = smooth(10001);
    // Trapezoid bound: (b - a)^3 / 12 max|f''| with f'' = -0.1 sin t.
    CHECK(std::abs(coarse - exact) <= 8.0 / 12.0 * 0.1);
    CHECK(std::abs(fine - exact) <= 8.0 / 12.0 * 0.1 / 1e8);
    CHECK(std::abs(coarse - fine) <= 8.0 / 12.0 * 0.1 * (1 + 1e-8));
  }
  SUBCASE("static, at rest, any potential: tau = t_end - t_start") {
    const Worldline w({{1.0, 0, 0}, {1.7, 0, 0}, {4.0, 0, 0}}, 1.0);
    CHECK(dilation_profile(w, {}).tau_total() == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("large mass drops the kinetic term") {
    const Worldline w({{0, 0.1, 0.5}, {1, 0.1, 0.5}}, 1.0);
    CHECK(dilation_profile(w, {1.0, false}).final_alpha() == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(dilation_profile(w, {1.0, true}).final_alpha() == doctest::Approx(0.975).epsilon(1e-15));
  }
  SUBCASE("weak-field guard") {
    const Worldline w({{0, 0.0, 0}, {1, 0.5, 0}}, 1.0);
    CHECK_THROWS_AS(dilation_profile(w, {}), WeakFieldError);
    CHECK_NOTHROW(dilation_profile(w, {10.0, true}));
  }
  SUBCASE("custom law") {
    const Worldline w({{0, 0.0, 0}, {1, 0.2, 0}}, 1.0);
    const DilationLaw flipped = [](double phi, double p, double m, double c) {
      return dilation_factor(-phi, p, m, c);
    };
    CHECK(dilation_profile(w, {}, flipped).final_alpha() == doctest::Approx(0.8));
  }
}

TEST_CASE("profile rejects bad tables") {
  CHECK_THROWS_AS(DilationProfile({0.0}, {1.0}), ArgumentError);
  CHECK_THROWS_AS(DilationProfile({0.0, 1.0}, {1.0, -0.1}), WeakFieldError);
  CHECK_THROWS_AS(DilationProfile({0.0, 1.0, 2.0}, {1.0, 1.0}), ArgumentError);
}

TEST_CASE("worldline csv") {
  const auto rows = read_worldline_csv(TDFR_TEST_DATA_DIR "/hover.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[2].t == 2.0);
  CHECK(rows[2].phi == 0.12);
  CHECK_THROWS_AS(read_worldline_csv(TDFR_TEST_DATA_DIR "/missing.csv"), IoError);
  CHECK_THROWS_AS(read_worldline_csv(TDFR_TEST_DATA_DIR "/comoving.json"), ArgumentError);
}
