#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nergpsa/errors.hpp"
#include "nergpsa/residuals.hpp"

using namespace nergpsa;
using doctest::Approx;

namespace {

ResidualTable synthetic(std::size_t n_events, std::size_t n_rec, double c, double tau, double phi,
                        unsigned seed, double period = 0.2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  ResidualTable t;
  for (std::size_t e = 0; e < n_events; ++e) {
    const double db = tau * z(rng);
    const double m = 4.0 + 3.0 * static_cast<double>(e) / static_cast<double>(n_events);
    for (std::size_t s = 0; s < n_rec; ++s) {
      t.push_back({"E" + std::to_string(e), "S" + std::to_string(s), m,
                   5.0 + 10.0 * static_cast<double>(s), 300.0 + 20.0 * static_cast<double>(s),
                   period, c + db + phi * z(rng)});
    }
  }
  return t;
}

}  // namespace

TEST_CASE("balanced design recovers the generating components") {
  const auto t = synthetic(300, 15, -0.2, 0.4, 0.6, 5);
  const auto d = decompose(t);
  CHECK(std::abs(d.dc0 + 0.2) < 0.08);
  CHECK(d.tau0 == Approx(0.4).epsilon(0.1));
  CHECK(d.phi0 == Approx(0.6).epsilon(0.03));
  CHECK_FALSE(d.degenerate);
}

TEST_CASE("partition is exact") {
  const auto t = synthetic(20, 4, 0.1, 0.3, 0.5, 2);
  const auto d = decompose(t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(d.dc0 + d.dB[i] + d.dWS[i] - t[i].residual) < 1e-12);
  }
}

TEST_CASE("result does not depend on row order") {
  auto t = synthetic(30, 5, 0.0, 0.3, 0.5, 9);
  const auto a = decompose(t);
  std::mt19937 rng(1);
  std::vector<std::size_t> perm(t.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  ResidualTable shuffled;
  for (std::size_t i : perm) shuffled.push_back(t[i]);
  const auto b = decompose(shuffled);
  CHECK(a.dc0 == b.dc0);
  CHECK(a.tau0 == b.tau0);
  CHECK(a.phi0 == b.phi0);
  for (std::size_t k = 0; k < perm.size(); ++k) CHECK(b.dWS[k] == a.dWS[perm[k]]);
}

TEST_CASE("hand-computed two-event case") {
  // events A: {1, 3}, B: {-1, -3}; φ² = (1+1+1+1)/(4-2) = 2; means ±2
  ResidualTable t{{"A", "s1", 5, 10, 400, 1.0, 1.0},
                  {"A", "s2", 5, 10, 400, 1.0, 3.0},
                  {"B", "s1", 6, 10, 400, 1.0, -1.0},
                  {"B", "s2", 6, 10, 400, 1.0, -3.0}};
  const auto d = decompose(t);
  CHECK(d.phi0 == Approx(std::sqrt(2.0)));
  CHECK(d.dc0 == Approx(0.0));
  // ML: τ² + φ²/n = mean((ȳ - c)²) = 4 → τ² = 3
  CHECK(d.tau0 == Approx(std::sqrt(3.0)).epsilon(1e-6));
  CHECK(d.events[0].dB == Approx(2.0 * 3.0 / 4.0).epsilon(1e-6));
}

TEST_CASE("no between-event scatter shrinks dB to zero") {
  ResidualTable t;
  for (int e = 0; e < 10; ++e) {
    for (int s = 0; s < 4; ++s) {
      t.push_back({"E" + std::to_string(e), "S" + std::to_string(s), 5, 10, 400, 1.0,
                   (s % 2 ? 0.5 : -0.5)});
    }
  }
  const auto d = decompose(t);
  CHECK(d.tau0 == 0.0);
  for (double v : d.dB) CHECK(v == 0.0);
}

TEST_CASE("degenerate and unidentifiable inputs") {
  ResidualTable one{{"A", "s1", 5, 10, 400, 1.0, 0.2}, {"A", "s2", 5, 10, 400, 1.0, 0.4}};
  CHECK_THROWS_WITH(decompose(one), doctest::Contains("unidentifiable"));
  ResidualTable singles{{"A", "s1", 5, 10, 400, 1.0, 0.2}, {"B", "s1", 5, 10, 400, 1.0, 0.4}};
  CHECK_THROWS_WITH(decompose(singles), doctest::Contains("unidentifiable"));
  ResidualTable flat{{"A", "s1", 5, 10, 400, 1.0, 0.2},
                     {"A", "s2", 5, 10, 400, 1.0, 0.2},
                     {"B", "s1", 5, 10, 400, 1.0, -0.2},
                     {"B", "s2", 5, 10, 400, 1.0, -0.2}};
  const auto d = decompose(flat);
  CHECK(d.degenerate);
  CHECK(d.phi0 == 0.0);
  for (double v : d.dWS) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("period selection") {
  auto t = synthetic(5, 3, 0.0, 0.3, 0.5, 1, 0.1);
  auto u = synthetic(5, 3, 0.0, 0.3, 0.5, 2, 1.0);
  t.insert(t.end(), u.begin(), u.end());
  CHECK(table_periods(t) == std::vector<double>{0.1, 1.0});
  CHECK(rows_at_period(t, 1.0).size() == 15);
  CHECK(decompose(t, 0.1).period == 0.1);
}

TEST_CASE("binned statistics") {
  const auto t = synthetic(40, 6, 0.0, 0.3, 0.5, 4);
  const auto d = decompose(t);
  const auto bins = binned_stats(t, d, BinAxis::magnitude, {4.0, 5.0, 6.0, 7.0});
  REQUIRE(bins.size() == 3);
  std::size_t events = 0;
  std::size_t records = 0;
  for (const auto& b : bins) {
    events += b.n_events;
    records += b.n_records;
    CHECK(b.dB_std.has_value());
  }
  CHECK(events == 40);
  CHECK(records == t.size());
  CHECK_THROWS_AS(binned_stats(t, d, BinAxis::magnitude, {4.5, 5.0}), ValidationError);
  CHECK(parse_bin_axis("vs30") == BinAxis::vs30);
  CHECK(to_string(BinAxis::r_rup) == "r_rup");
  CHECK_THROWS_AS(parse_bin_axis("depth"), ValidationError);
}

TEST_CASE("constant residuals") {
  ResidualTable t;
  for (int e = 0; e < 5; ++e) {
    for (int s = 0; s < 3; ++s) t.push_back({"E" + std::to_string(e), "S" + std::to_string(s), 5, 10, 400, 1.0, 0.37});
  }
  const auto d = decompose(t);
  CHECK(d.dc0 == Approx(0.37));
  CHECK(d.tau0 == Approx(0.0).scale(1.0));
  CHECK(d.phi0 == Approx(0.0).scale(1.0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(d.dB[i]) < 1e-15);
    CHECK(std::abs(d.dWS[i]) < 1e-15);
  }
  for (const auto& b : binned_stats(t, d, BinAxis::magnitude, {4.0, 6.0})) {
    CHECK(*b.dWS_std == Approx(0.0).scale(1.0));
    CHECK(*b.dB_std == Approx(0.0).scale(1.0));
  }
}

TEST_CASE("between-only variance") {
  const double dd = 0.4;
  ResidualTable t;
  for (int s = 0; s < 5; ++s) {
    t.push_back({"A", "S" + std::to_string(s), 5, 10, 400, 1.0, dd});
    t.push_back({"B", "S" + std::to_string(s), 5, 10, 400, 1.0, -dd});
  }
  const auto d = decompose(t);
  CHECK(d.phi0 == Approx(0.0).scale(1.0));
  CHECK(d.tau0 == Approx(dd).epsilon(1e-9));
  CHECK(d.events[0].dB == Approx(dd).epsilon(1e-9));
}

TEST_CASE("single bin reproduces the global statistics") {
  const auto t = synthetic(25, 6, 0.0, 0.3, 0.5, 8);
  const auto d = decompose(t);
  const auto b = binned_stats(t, d, BinAxis::r_rup, {0.0, 1000.0});
  REQUIRE(b.size() == 1);
  double m = 0.0;
  for (double v : d.dWS) m += v;
  m /= static_cast<double>(d.dWS.size());
  double ss = 0.0;
  for (double v : d.dWS) ss += (v - m) * (v - m);
  CHECK(*b[0].dWS_mean == Approx(m).scale(1.0));
  CHECK(*b[0].dWS_std == Approx(std::sqrt(ss / static_cast<double>(d.dWS.size() - 1))));
  double mb = 0.0;
  for (const auto& e : d.events) mb += e.dB;
  CHECK(*b[0].dB_mean == Approx(mb / 25.0).scale(1.0));
}

TEST_CASE("binned within-event sd follows a magnitude-dependent phi") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto phi_of = [](double m) { return m <= 5.0 ? 0.6 : (m >= 6.5 ? 0.4 : 0.6 - 0.2 * (m - 5.0) / 1.5); };
  ResidualTable t;
  for (int e = 0; e < 400; ++e) {
    const double m = 4.0 + 3.5 * (e + 0.5) / 400.0;
    const double db = 0.3 * z(rng);
    for (int s = 0; s < 25; ++s) {
      t.push_back({"E" + std::to_string(e), "S" + std::to_string(s), m, 10, 400, 1.0, db + phi_of(m) * z(rng)});
    }
  }
  const auto d = decompose(t);
  const auto bins = binned_stats(t, d, BinAxis::magnitude, {4.0, 5.0, 6.5, 7.5});
  // a within-event deviation loses (1 - 1/n) of its variance to the event mean
  const double shrink = std::sqrt(24.0 / 25.0);
  CHECK(*bins[0].dWS_std == Approx(0.6 * shrink).epsilon(0.05));
  CHECK(*bins[2].dWS_std == Approx(0.4 * shrink).epsilon(0.05));
  CHECK(*bins[1].dWS_std < *bins[0].dWS_std);
  CHECK(*bins[1].dWS_std > *bins[2].dWS_std);
}
