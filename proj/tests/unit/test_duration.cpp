#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "nergpsa/duration.hpp"
#include "nergpsa/errors.hpp"

using namespace nergpsa;
using doctest::Approx;

namespace {

const std::string kData = NERGPSA_DATA_DIR;

double closed_form(double d, double t0, double zeta) {
  const double g3 = std::pow(d / t0, 3.0);
  return t0 / (2.0 * std::numbers::pi * zeta) * g3 / (g3 + 1.0 / 3.0);
}

}  // namespace

TEST_CASE("oscillator decay term") {
  const auto osc = Oscillator::from_period(2.0, 0.05);
  CHECK(oscillator_duration(10.0, osc) == Approx(6.3493).epsilon(1e-4));
  Scenario scn;
  CHECK(rms_duration(user_duration(10.0), osc, scn, RmsDurationModel::closed_form()) ==
        Approx(16.3493).epsilon(1e-4));
  // long motions: D_o tends to T0/(2πζ)
  CHECK(oscillator_duration(1e4, osc) == Approx(2.0 / (2 * std::numbers::pi * 0.05)));
  // short motions: D_o ~ 3 γ³ T0/(2πζ)
  CHECK(oscillator_duration(0.01, osc) == Approx(closed_form(0.01, 2.0, 0.05)));
}

TEST_CASE("rms duration never falls below the ground-motion duration") {
  Scenario scn;
  for (double t0 : {0.01, 0.1, 1.0, 10.0}) {
    for (double d : {0.5, 5.0, 50.0}) {
      const auto osc = Oscillator::from_period(t0, 0.05);
      CHECK(rms_duration(user_duration(d), osc, scn, {}) >= d);
    }
  }
}

TEST_CASE("rms/gm ratio is non-increasing in D_gm once gamma exceeds (2/3)^(1/3)") {
  const double t0 = 1.0;
  const auto osc = Oscillator::from_period(t0, 0.05);
  Scenario scn;
  const double g_min = std::cbrt(2.0 / 3.0);
  double prev = INFINITY;
  for (double g = g_min; g < 100.0; g *= 1.05) {
    const double r = rms_duration(user_duration(g * t0), osc, scn, {}) / (g * t0);
    CHECK(r <= prev * (1.0 + 1e-14));
    prev = r;
  }
}

TEST_CASE("example BT15 table reproduces the closed form") {
  const auto tbl = Bt15Table::load(kData + "/bt15_example.json");
  const auto model = RmsDurationModel::bt15(tbl);
  for (double m : {4.5, 6.0, 7.3}) {
    for (double r : {1.0, 20.0, 800.0}) {
      Scenario scn;
      scn.magnitude = m;
      scn.r_rup_km = r;
      for (double t0 : {0.05, 1.0, 8.0}) {
        const auto osc = Oscillator::from_period(t0, 0.05);
        const double d = 12.0;
        CHECK(rms_duration(user_duration(d), osc, scn, model) ==
              Approx(d + closed_form(d, t0, 0.05)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("BT15 table domain") {
  const auto tbl = Bt15Table::load(kData + "/bt15_example.json");
  CHECK_THROWS_AS(tbl.ratio(3.5, 10.0, 0.1, 0.05), DomainError);
  CHECK_THROWS_AS(Bt15Table({4, 5}, {1, 10}, {{1, 0, 1, 1, 0, 3, 1}}), ValidationError);
  RmsDurationModel bad{RmsDurationModel::Variant::bt15, std::nullopt};
  Scenario scn;
  CHECK_THROWS_AS(rms_duration(user_duration(5.0), Oscillator(1, 0.05), scn, bad), ConfigError);
}

TEST_CASE("BT15 ratio below one is floored") {
  Bt15Table low({4.0, 8.0}, {1.0, 100.0},
                std::vector<std::vector<double>>(4, {0.5, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0}));
  Scenario scn;
  CHECK(rms_duration(user_duration(7.0), Oscillator(1, 0.05), scn, RmsDurationModel::bt15(low)) ==
        7.0);
}

TEST_CASE("BT15 interpolation is bilinear in (M, ln R)") {
  auto node = [](double c0) { return std::vector<double>{c0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0}; };
  Bt15Table t({4.0, 6.0}, {1.0, 100.0}, {node(1.0), node(2.0), node(3.0), node(5.0)});
  CHECK(t.ratio(5.0, 10.0, 0.3, 0.05) == Approx(0.25 * (1 + 2 + 3 + 5)));
  CHECK(t.ratio(9.0, 1e4, 0.3, 0.05) == Approx(5.0));  // clamped
}

TEST_CASE("AS96 significant duration") {
  const auto c = As96Coefficients::load(kData + "/as96_coefficients.json");
  Scenario scn;
  scn.magnitude = 6.5;
  scn.r_rup_km = 40.0;
  scn.site_class = 1;
  const double ds = std::exp(*c.stress_b1 + *c.stress_b2 * 0.5);
  const double fc = 4.9e6 * 3.2 * std::cbrt(ds / std::pow(10.0, 1.5 * 6.5 + 16.05));
  const double expected = 1.0 / fc + c.c1 * (40.0 - c.r_c) + c.c2;
  CHECK(as96_d575(scn, c).d_gm == Approx(expected).epsilon(1e-12));

  // inside R_c only the source term remains
  scn.r_rup_km = 5.0;
  scn.site_class = 0;
  CHECK(as96_d575(scn, c).d_gm == Approx(1.0 / fc));

  // larger events last longer
  Scenario big = scn;
  big.magnitude = 7.5;
  CHECK(as96_d575(big, c).d_gm > as96_d575(scn, c).d_gm);
}

TEST_CASE("AS96 interval conversion") {
  const auto c = As96Coefficients::load(kData + "/as96_coefficients.json");
  const auto d = user_duration(10.0, "a0.05-0.75");
  CHECK(as96_interval(d, 0.75, c).d_gm == Approx(10.0).epsilon(0.02));
  double prev = 0.0;
  for (double i = 0.1; i < 0.99; i += 0.05) {
    const double v = as96_interval(d, i, c).d_gm;
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(as96_interval(d, 1.0, c), DomainError);
  CHECK_THROWS_AS(as96_interval(d, 0.05, c), DomainError);
  Scenario scn;
  CHECK(as96_dgm(scn, c).d_gm == Approx(as96_interval(as96_d575(scn, c), 0.85, c).d_gm));
}

TEST_CASE("duration validation") {
  CHECK_THROWS_AS(user_duration(0.0), ValidationError);
  CHECK_THROWS_AS(user_duration(-3.0), ValidationError);
  CHECK_THROWS_AS(As96Coefficients::load("/nonexistent/as96.json"), IoError);
}

TEST_CASE("AS96 additive terms") {
  const auto c = As96Coefficients::load(kData + "/as96_coefficients.json");
  Scenario a;
  a.magnitude = 6.8;
  a.r_rup_km = c.r_c;
  Scenario b = a;
  b.r_rup_km = c.r_c - 1e-12;
  CHECK(as96_d575(a, c).d_gm == Approx(as96_d575(b, c).d_gm).epsilon(1e-12));
  Scenario r1 = a;
  Scenario r2 = a;
  r1.r_rup_km = c.r_c + 15.0;
  r2.r_rup_km = c.r_c + 30.0;
  CHECK(as96_d575(r2, c).d_gm - as96_d575(r1, c).d_gm == Approx(15.0 * c.c1).epsilon(1e-12));
  for (double r : {2.0, 50.0}) {
    Scenario s0 = a;
    s0.r_rup_km = r;
    Scenario s1 = s0;
    s1.site_class = 1;
    CHECK(as96_d575(s1, c).d_gm - as96_d575(s0, c).d_gm == Approx(c.c2).epsilon(1e-12));
  }
}

TEST_CASE("AS96 interval 0.85 from the coefficient file") {
  const auto c = As96Coefficients::load(kData + "/as96_coefficients.json");
  const double l = std::log((0.85 - 0.05) / (1.0 - 0.85));
  const double ratio = std::exp(c.a1 + c.a2 * l + c.a3 * l * l);
  Scenario scn;
  scn.magnitude = 7.0;
  scn.r_rup_km = 30.0;
  CHECK(as96_dgm(scn, c).d_gm == Approx(ratio * as96_d575(scn, c).d_gm).epsilon(1e-12));
}

TEST_CASE("short periods barely change the duration") {
  const auto osc = Oscillator::from_period(0.01, 0.05);
  Scenario scn;
  CHECK(rms_duration(user_duration(20.0), osc, scn, {}) / 20.0 == Approx(1.0).epsilon(2e-3));
}

TEST_CASE("rms duration sweep") {
  Scenario scn;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double t0 = 0.01 * std::pow(1000.0, i / 19.0);
      const double d = 0.1 * std::pow(1000.0, j / 19.0);
      CHECK(rms_duration(user_duration(d), Oscillator::from_period(t0, 0.05), scn, {}) >= d);
    }
  }
}
