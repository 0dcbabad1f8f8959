#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rirfill/room_sim.hpp"

using namespace rirfill;
using Catch::Approx;

namespace {

double energy(const std::vector<double>& h) {
  return std::inner_product(h.begin(), h.end(), h.begin(), 0.0);
}

std::size_t peak_index(const std::vector<double>& h) {
  return static_cast<std::size_t>(
      std::max_element(h.begin(), h.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
      h.begin());
}

}  // namespace

TEST_CASE("free field: single pulse at d*fs/c with 1/(4 pi d) amplitude") {
  const RoomSpec room;  // all walls anechoic
  const Vec3 src{1.0, 2.75, 1.4};
  const Vec3 mic{3.0, 2.75, 1.4};
  const auto h = simulate_rir(room, src, mic, 256);
  const double delay = 2.0 * 8000.0 / 343.0;
  CHECK(std::abs(static_cast<double>(peak_index(h)) - delay) <= 1.0);
  // The windowed-sinc pulse keeps its area; its energy dips by up to 2% at
  // half-sample delays, i.e. 1% in amplitude.
  const double area = std::accumulate(h.begin(), h.end(), 0.0);
  CHECK(area == Approx(1.0 / (4.0 * M_PI * 2.0)).epsilon(1e-4));
  CHECK(std::sqrt(energy(h) / oracle::free_field_energy(2.0)) == Approx(1.0).epsilon(0.01));
}

TEST_CASE("free field: 1/d law between two microphones") {
  const RoomSpec room;
  const Vec3 src{1.0, 2.75, 1.4};
  const auto h1 = simulate_rir(room, src, {2.0, 2.75, 1.4}, 256);
  const auto h2 = simulate_rir(room, src, {3.0, 2.75, 1.4}, 256);
  CHECK(std::sqrt(energy(h1) / energy(h2)) == Approx(2.0).epsilon(0.01));
}

TEST_CASE("free field: random pairs land within one sample") {
  const RoomSpec room;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.1, 5.9), uy(0.1, 5.4), uz(0.1, 2.7);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 s{ux(rng), uy(rng), uz(rng)};
    const Vec3 m{ux(rng), uy(rng), uz(rng)};
    const double d = distance(s, m);
    if (d < 0.3) continue;
    const auto h = simulate_rir(room, s, m, 256);
    CHECK(std::abs(static_cast<double>(peak_index(h)) - d * 8000.0 / 343.0) <= 1.0);
  }
}

TEST_CASE("cube room: mirrored source and microphone give the same response") {
  const RoomSpec room = RoomSpec::uniform({4.0, 4.0, 4.0}, 0.8);
  const Vec3 s{1.1, 1.7, 2.3}, m{2.6, 1.2, 0.9};
  auto mirror = [](Vec3 p) { return Vec3{4.0 - p.x, p.y, p.z}; };
  const auto a = simulate_rir(room, s, m, 512);
  const auto b = simulate_rir(room, mirror(s), mirror(m), 512);
  for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k] == Approx(b[k]).margin(1e-12));
  // Reciprocity of the image set.
  const auto c = simulate_rir(room, m, s, 512);
  for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k] == Approx(c[k]).margin(1e-12));
}

TEST_CASE("larger reflection coefficients never lower the energy") {
  const Vec3 s{1.0, 1.5, 1.2}, m{4.0, 3.0, 1.6};
  double last = 0.0;
  for (double beta : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    const double e = energy(simulate_rir(RoomSpec::uniform({6.0, 5.5, 2.8}, beta), s, m, 1024));
    CHECK(e >= last);
    last = e;
  }
}

TEST_CASE("inverse Sabine coefficient for the reference room") {
  const RoomSpec room;
  const double beta = reflection_coeff_for_t60(room, 0.6);
  const double alpha = 0.161 * 92.4 / (0.6 * 130.4);
  CHECK(alpha == Approx(0.190).margin(5e-4));
  CHECK(beta == Approx(std::sqrt(1.0 - alpha)).epsilon(1e-3));
  CHECK(beta == Approx(0.900).margin(1e-3));
  CHECK(reflection_coeff_for_t60(room, 1e6) == Approx(1.0).margin(1e-6));
  CHECK_THROWS_AS(reflection_coeff_for_t60(room, 0.01), std::invalid_argument);
}

TEST_CASE("array geometry") {
  const RoomSpec room;
  const auto ula = make_arc_array(64, 0.0, room);
  REQUIRE(ula.size() == 64);
  CHECK(distance(ula.positions[0], ula.positions[1]) == Approx(3.0 / 63.0).epsilon(1e-12));
  CHECK(distance(ula.positions.front(), ula.positions.back()) == Approx(3.0).epsilon(1e-12));

  const auto arc = make_arc_array(64, 1.0, room);
  const double chord = 2.0 * 1.5 * std::sin(M_PI / 126.0);
  for (std::size_t i = 1; i < 64; ++i)
    CHECK(distance(arc.positions[i - 1], arc.positions[i]) == Approx(chord).epsilon(1e-9));
  for (const auto& p : arc.positions) CHECK(distance(p, arc.center) == Approx(1.5).epsilon(1e-12));

  const auto two = make_arc_array(2, 0.0, room);
  CHECK(distance(two.positions[0], two.positions[1]) == Approx(3.0));
  CHECK_THROWS_AS(make_arc_array(1, 0.0, room), std::invalid_argument);
  CHECK_THROWS_AS(make_arc_array(64, 0.0, RoomSpec::uniform({2.0, 5.5, 2.8}, 0.0)), std::invalid_argument);
}

TEST_CASE("nine source positions on a 2 m semicircle") {
  const RoomSpec room;
  const auto array = make_arc_array(64, 0.0, room);
  const auto sources = make_source_positions(room, array);
  REQUIRE(sources.size() == 9);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    CHECK(distance(sources[i].position, array.center) == Approx(2.0).epsilon(1e-12));
    for (std::size_t j = 0; j < i; ++j) CHECK(distance(sources[i].position, sources[j].position) > 0.1);
  }
  const auto broadside = make_source(room, array, 90.0);
  CHECK(broadside.position.x == Approx(array.center.x).margin(1e-12));
  CHECK(broadside.position.y - array.center.y == Approx(2.0));
  const auto s10 = make_source(room, array, 10.0), s170 = make_source(room, array, 170.0);
  CHECK(s10.position.x - array.center.x == Approx(array.center.x - s170.position.x));
  CHECK(s10.position.y == Approx(s170.position.y));
}

TEST_CASE("broadside source on a linear array: symmetric direct arrival") {
  RoomSpec room;
  const auto array = make_arc_array(64, 0.0, room);
  const auto src = make_source(room, array, 90.0);
  const auto h = simulate_matrix(room, src, array, 256);
  REQUIRE(h.n_mics == 64);
  REQUIRE(h.n_samples == 256);
  for (std::size_t i = 0; i < 32; ++i) {
    const auto a = h.column(i), b = h.column(63 - i);
    CHECK(peak_index(a) == peak_index(b));
  }
}

TEST_CASE("matrix columns match single responses and are deterministic") {
  RoomSpec room = RoomSpec::uniform({6.0, 5.5, 2.8}, 0.7);
  const auto array = make_arc_array(4, 0.5, room);
  const auto src = make_source(room, array, 50.0);
  const auto h = simulate_matrix(room, src, array, 300);
  const auto again = simulate_matrix(room, src, array, 300);
  CHECK(h.data == again.data);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(h.column(i) == simulate_rir(room, src.position, array.positions[i], 300));
}

TEST_CASE("invalid simulation inputs") {
  const RoomSpec room;
  CHECK_THROWS(simulate_rir(room, {1, 1, 1}, {1, 1, 1}, 100));
  CHECK_THROWS(simulate_rir(room, {1, 1, 1}, {2, 1, 1}, 0));
  CHECK_THROWS(simulate_rir(room, {7, 1, 1}, {2, 1, 1}, 100));
}
