#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rirfill/metrics.hpp"

using namespace rirfill;
using Catch::Approx;

namespace {

RirMatrix noise_matrix(std::size_t K, std::size_t N, std::uint64_t seed) {
  RirMatrix m(K, N, 8000.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  for (auto& v : m.data) v = n(rng);
  return m;
}

RirMatrix scaled(const RirMatrix& m, double c) {
  auto out = m;
  for (auto& v : out.data) v *= c;
  return out;
}

const std::vector<std::size_t> kMissing{1, 4, 5, 7};

}  // namespace

TEST_CASE("NMSE closed forms") {
  const auto h = noise_matrix(200, 8, 1);
  CHECK(nmse_db(h, scaled(h, 2.0), kMissing) == Approx(0.0).margin(1e-12));
  CHECK(nmse_db(h, h, kMissing) == kExactNmseDb);
  for (double c : {0.5, 3.0, -1.0})
    CHECK(nmse_db(h, scaled(h, c), kMissing) == Approx(20.0 * std::log10(std::abs(c - 1.0))));
}

TEST_CASE("NMSE of a constructed 1% error is -20 dB") {
  const auto h = noise_matrix(500, 8, 2);
  const auto e = noise_matrix(500, 8, 3);
  auto est = h;
  for (auto i : kMissing) {
    double hh = 0.0, ee = 0.0;
    for (std::size_t k = 0; k < 500; ++k) {
      hh += h.at(k, i) * h.at(k, i);
      ee += e.at(k, i) * e.at(k, i);
    }
    const double g = std::sqrt(0.01 * hh / ee);
    for (std::size_t k = 0; k < 500; ++k) est.at(k, i) += g * e.at(k, i);
  }
  CHECK(nmse_db(h, est, kMissing) == Approx(-20.0).margin(1e-9));
}

TEST_CASE("cosine distance closed forms") {
  const auto h = noise_matrix(100, 8, 4);
  CHECK(cosine_distance(h, scaled(h, -3.0), kMissing) == Approx(0.0).margin(1e-12));

  // Orthogonal estimates: swap halves with a sign flip in the time axis.
  RirMatrix t(4, 8, 8000.0), o(4, 8, 8000.0);
  for (std::size_t i = 0; i < 8; ++i) {
    t.at(0, i) = 1.0 + i;
    t.at(1, i) = 2.0;
    o.at(0, i) = 2.0;
    o.at(1, i) = -(1.0 + i);
  }
  CHECK(cosine_distance(t, o, kMissing) == Approx(1.0));

  auto half = o;
  for (std::size_t k = 0; k < 4; ++k) {
    half.at(k, 1) = 5.0 * t.at(k, 1);
    half.at(k, 5) = -t.at(k, 5);
  }
  CHECK(cosine_distance(t, half, kMissing) == Approx(0.5));
}

TEST_CASE("cosine distance is scale invariant, bounded and order invariant") {
  const auto h = noise_matrix(64, 8, 5), e = noise_matrix(64, 8, 6);
  const double cd = cosine_distance(h, e, kMissing);
  CHECK(cd >= 0.0);
  CHECK(cd <= 1.0);
  for (double c : {-7.0, 0.01, 3.0}) CHECK(cosine_distance(h, scaled(e, c), kMissing) == Approx(cd));
  const std::vector<std::size_t> reversed(kMissing.rbegin(), kMissing.rend());
  CHECK(cosine_distance(h, e, reversed) == Approx(cd));
  CHECK(nmse_db(h, e, reversed) == Approx(nmse_db(h, e, kMissing)));
}

TEST_CASE("zero-energy columns are reported per microphone") {
  auto h = noise_matrix(32, 8, 7);
  for (std::size_t k = 0; k < 32; ++k) h.at(k, 4) = 0.0;
  CHECK_THROWS_AS(nmse_db(h, h, kMissing), std::invalid_argument);
  const auto r = evaluate(h, scaled(h, 2.0), kMissing);
  REQUIRE(r.ok());
  REQUIRE(r.per_mic.size() == kMissing.size());
  CHECK(r.per_mic[1].error.has_value());
  CHECK_FALSE(r.per_mic[0].error.has_value());
  CHECK(r.nmse_db == Approx(0.0).margin(1e-12));
}

TEST_CASE("evaluate covers exactly the missing set") {
  const auto h = noise_matrix(32, 8, 8);
  const auto r = evaluate(h, h, kMissing, {0.5, 90.0, 0.5, 3, "sci"});
  REQUIRE(r.per_mic.size() == kMissing.size());
  for (std::size_t j = 0; j < kMissing.size(); ++j) CHECK(r.per_mic[j].mic == kMissing[j]);
  CHECK(r.nmse_db == kExactNmseDb);
  CHECK(r.cd == Approx(0.0).margin(1e-15));
  CHECK(r.key.method == "sci");
  const auto none = evaluate(h, h, {});
  CHECK(none.ok());
  CHECK(none.nmse_db == kExactNmseDb);
}

TEST_CASE("EDC of a single impulse") {
  std::vector<double> h(10, 0.0);
  h[0] = 0.7;
  const auto e = edc_db(h);
  CHECK(e[0] == 0.0);
  for (std::size_t n = 1; n < 10; ++n) CHECK(std::isinf(e[n]));
  CHECK_THROWS(edc_db(std::vector<double>(5, 0.0)));
}

TEST_CASE("EDC of an exponential decays linearly") {
  const double tau = 200.0;
  std::vector<double> h(4000);
  for (std::size_t n = 0; n < h.size(); ++n) h[n] = std::exp(-double(n) / tau);
  const auto e = edc_db(h);
  const double slope = -10.0 * std::log10(std::exp(1.0)) * 2.0 / tau;
  for (std::size_t n = 1; n < 2000; ++n) REQUIRE(e[n] - e[n - 1] == Approx(slope).epsilon(1e-6));
}

TEST_CASE("EDC is monotone and unaffected by trailing zeros") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<double> h(3000);
  for (std::size_t n = 0; n < h.size(); ++n) h[n] = g(rng) * std::exp(-double(n) / 400.0);
  const auto e = edc_db(h);
  for (std::size_t n = 1; n < e.size(); ++n) REQUIRE(e[n] <= e[n - 1]);
  auto padded = h;
  padded.resize(5000, 0.0);
  const auto ep = edc_db(padded);
  for (std::size_t n = 0; n < h.size(); ++n) REQUIRE(ep[n] == Approx(e[n]).margin(1e-9));
}

TEST_CASE("T60 of an exponential decay") {
  const double fs = 8000.0, t60 = 0.5;
  const double tau = t60 * fs / (3.0 * std::log(10.0));
  std::vector<double> h(8000);
  for (std::size_t n = 0; n < h.size(); ++n) h[n] = std::exp(-double(n) / tau);
  const double est = t60_from_edc(edc_db(h), fs);
  CHECK(est == Approx(t60).epsilon(0.05));
  auto s = h;
  for (auto& v : s) v *= -13.0;
  CHECK(t60_from_edc(edc_db(s), fs) == Approx(est).epsilon(1e-9));
}

TEST_CASE("T60 needs the decay to reach -35 dB") {
  CHECK_THROWS_AS(t60_from_edc(std::vector<double>{0.0, -1.0, -10.0, -30.0}, 8000.0), std::domain_error);
}
