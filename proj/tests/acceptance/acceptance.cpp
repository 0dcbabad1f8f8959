// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,5,9] [--rir-model ckpt] [--stripe-model ckpt]
//              [--save-models dir]
//
// Criteria 9-11 train their own models unless checkpoints are given.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rirfill/alloc.hpp"
#include "rirfill/baseline.hpp"
#include "rirfill/checkpoint.hpp"
#include "rirfill/config.hpp"
#include "rirfill/dataset.hpp"
#include "rirfill/diffusion.hpp"
#include "rirfill/experiment.hpp"
#include "rirfill/imaging.hpp"
#include "rirfill/metrics.hpp"
#include "rirfill/room_sim.hpp"

using namespace rirfill;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void progress(const std::string& msg) {
  std::fprintf(stderr, "  .. %s\n", msg.c_str());
  std::fflush(stderr);
}

// 1. Free field.
Verdict free_field() {
  const auto t0 = std::chrono::steady_clock::now();
  const RoomSpec room;  // anechoic
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux(0.05, room.dims[0] - 0.05), uy(0.05, room.dims[1] - 0.05),
      uz(0.05, room.dims[2] - 0.05);
  constexpr int K = 256;
  constexpr int half = kFracDelayTaps / 2;
  double worst_delay = 0.0, worst_amp = 0.0, worst_energy_amp = 0.0;
  int pairs = 0, arrivals_ok = 0;
  while (pairs < 100) {
    const Vec3 s{ux(rng), uy(rng), uz(rng)}, m{ux(rng), uy(rng), uz(rng)};
    const double d = distance(s, m);
    if (d < 1.0) continue;
    ++pairs;
    const auto h = simulate_rir(room, s, m, K);
    const double delay = d * room.sample_rate / room.speed_of_sound;
    const auto peak = static_cast<std::size_t>(
        std::max_element(h.begin(), h.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
        h.begin());
    worst_delay = std::max(worst_delay, std::abs(static_cast<double>(peak) - delay));

    // Exactly one arrival: nothing outside the kernel support around the delay.
    const long lo = std::lround(delay) - half, hi = std::lround(delay) + half;
    bool single = true;
    double area = 0.0, energy = 0.0;
    for (long n = 0; n < K; ++n) {
      if (n < lo || n > hi) {
        if (h[n] != 0.0) single = false;
      } else {
        area += h[n];
        energy += h[n] * h[n];
      }
    }
    arrivals_ok += single;
    const double law = 1.0 / (4.0 * M_PI * d);
    worst_amp = std::max(worst_amp, std::abs(area / law - 1.0));
    worst_energy_amp = std::max(worst_energy_amp, std::abs(std::sqrt(energy) / law - 1.0));
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_delay <= 1.0 && worst_amp <= 0.01 && worst_energy_amp <= 0.01 &&
                    arrivals_ok == pairs && secs < 10.0;
  return {pass, fmt("100 pairs (d >= 1 m): max |peak - d fs/c| = %.3f samples (<= 1), max amplitude "
                    "error %.4f%% by pulse area and %.4f%% by sqrt(energy) (<= 1%%), single arrival in "
                    "%d/100, %.2f s (< 10 s)",
                    worst_delay, 100 * worst_amp, 100 * worst_energy_amp, arrivals_ok, secs)};
}

// 2. Inverse Sabine against the Schroeder estimate.
Verdict sabine_schroeder() {
  const auto t0 = std::chrono::steady_clock::now();
  RoomSpec room;
  const double beta = reflection_coeff_for_t60(room, 0.6);
  room.reflection.fill(beta);
  const auto array = make_arc_array(64, 0.0, room);
  const auto src = make_source(room, array, 90.0);
  // One second of response so that the decay reaches -35 dB before the end.
  std::vector<double> t60s;
  for (int mic : {0, 32, 63}) {
    const auto h = simulate_rir(room, src.position, array.positions[mic], 8000);
    t60s.push_back(t60_from_edc(edc_db(h), room.sample_rate));
  }
  // For reference only: cut to the 2048-sample inference length, the EDC has not
  // decayed 35 dB before the end and the fit follows the truncation plunge.
  const auto cut = simulate_rir(room, src.position, array.positions[32], 2048);
  const double truncated = t60_from_edc(edc_db(cut), room.sample_rate);
  const double secs = seconds_since(t0);
  bool pass = secs < 60.0;
  for (double t : t60s) pass = pass && t >= 0.45 && t <= 0.75;
  return {pass, fmt("beta = %.4f; 1 s responses: T60 at mics 0/32/63 = %.3f / %.3f / %.3f s (in [0.45, 0.75]); "
                    "not gated: %.3f s from a 2048-sample response; %.1f s (< 60 s)",
                    beta, t60s[0], t60s[1], t60s[2], truncated, secs)};
}

// 3. Patch round trip.
Verdict patch_round_trip() {
  RoomSpec room = RoomSpec::uniform({6.0, 5.5, 2.8}, 0.9);
  double worst_rel = 0.0;
  bool measured_exact = true;
  std::string shapes;
  for (int K : {64, 1000, 2048})
    for (int N : {16, 64}) {
      const auto array = make_arc_array(N, 0.5, room);
      const auto truth = simulate_matrix(room, make_source(room, array, 50.0), array, K);

      const auto full = Mask::all_measured(N);
      const auto grid = split_patches(truth, full);
      const auto rec = complete_matrix(truth, full, reassemble(grid, grid_pixels(grid)));
      // The completed matrix copies measured columns, so compare the reassembled image itself.
      const auto img = reassemble(grid, grid_pixels(grid));
      double err = 0.0, ref = 0.0;
      for (int k = 0; k < K; ++k)
        for (int i = 0; i < N; ++i) {
          const double d = img.at(k, i) - truth.at(k, i);
          err += d * d;
          ref += truth.at(k, i) * truth.at(k, i);
        }
      worst_rel = std::max(worst_rel, std::sqrt(err / ref));
      measured_exact = measured_exact && rec.data == truth.data;

      const auto mask = make_mask(N, 0.5, static_cast<std::uint64_t>(K + N));
      const auto masked = apply_mask(truth, mask);
      const auto g2 = split_patches(masked, mask);
      const auto done = complete_matrix(truth, mask, reassemble(g2, grid_pixels(g2)));
      for (auto i : mask.measured_indices())
        for (int k = 0; k < K; ++k) measured_exact = measured_exact && done.at(k, i) == truth.at(k, i);
    }
  return {measured_exact && worst_rel <= 1e-6,
          fmt("K in {64, 1000, 2048}, N in {16, 64}: measured columns bit-exact = %s, max relative error "
              "of the reassembled matrix %.3g (<= 1e-6)",
              measured_exact ? "yes" : "no", worst_rel)};
}

// 4. Patch count.
Verdict patch_count() {
  const auto offsets = tile_offsets(2048);
  RirMatrix m(2048, 64, 8000.0);
  m.data[0] = 1.0;
  const auto grid = split_patches(m, Mask::all_measured(64));
  const bool pass = offsets.size() == 43 && grid.size() == 43 && offsets.back() == 2048 - 64;
  return {pass, fmt("K = 2048: %zu time offsets, %zu patches, last offset %d (expected 43, 43, 1984)",
                    offsets.size(), grid.size(), offsets.back())};
}

// 5. Metric closed forms.
Verdict metric_closed_forms() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  RirMatrix h(512, 16, 8000.0);
  for (auto& v : h.data) v = g(rng);
  const std::vector<std::size_t> miss{0, 3, 7, 8, 15};
  auto scaled = [&](double c) {
    auto o = h;
    for (auto& v : o.data) v *= c;
    return o;
  };
  const double nmse2 = nmse_db(h, scaled(2.0), miss);
  const double cd3 = cosine_distance(h, scaled(-3.0), miss);

  // Orthogonal estimates: rotate each (even, odd) sample pair by 90 degrees.
  auto ortho = h;
  for (std::size_t k = 0; k + 1 < h.n_samples; k += 2)
    for (std::size_t i = 0; i < h.n_mics; ++i) {
      ortho.at(k, i) = -h.at(k + 1, i);
      ortho.at(k + 1, i) = h.at(k, i);
    }
  const double cd_orth = cosine_distance(h, ortho, miss);

  std::vector<double> rir(6000);
  for (std::size_t n = 0; n < rir.size(); ++n) rir[n] = g(rng) * std::exp(-double(n) / 500.0);
  const auto edc = edc_db(rir);
  bool monotone = true;
  for (std::size_t n = 1; n < edc.size(); ++n) monotone = monotone && edc[n] <= edc[n - 1];

  const double fs = 8000.0, t60 = 0.5;
  const double tau = t60 * fs / (3.0 * std::log(10.0));
  std::vector<double> decay(8000);
  for (std::size_t n = 0; n < decay.size(); ++n) decay[n] = std::exp(-double(n) / tau);
  const double est = t60_from_edc(edc_db(decay), fs);

  const bool pass = std::abs(nmse2) < 1e-9 && std::abs(cd3) < 1e-12 && std::abs(cd_orth - 1.0) < 1e-12 &&
                    monotone && std::abs(est / t60 - 1.0) <= 0.05;
  return {pass, fmt("NMSE(h, 2h) = %.2e dB, CD(h, -3h) = %.2e, CD(orthogonal) = %.12f, EDC monotone = %s, "
                    "exponential T60 %.4f s vs 0.5 s (%.2f%%, <= 5%%)",
                    nmse2, cd3, cd_orth, monotone ? "yes" : "no", est, 100 * std::abs(est / t60 - 1.0))};
}

// 6. Spline oracle.
Verdict spline_oracle() {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t N = 64, K = 6;
    RirMatrix m(K, N, 8000.0);
    for (auto& v : m.data) v = u(rng);
    const auto mask = make_mask(N, 0.1 + 0.8 * (trial % 9) / 8.0, 1000 + trial);
    const auto est = sci_interpolate(apply_mask(m, mask), mask);
    const auto known = mask.measured_indices();
    const std::vector<double> xk(known.begin(), known.end());
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> y;
      for (auto i : known) y.push_back(m.at(k, i));
      if (y.size() < 4) continue;
      const auto y2 = oracle::textbook_second_derivs(xk, y);
      for (auto i : mask.missing_indices()) {
        const double ref = oracle::spline_eval(xk, y, y2, double(i));
        worst = std::max(worst, std::abs(est.at(k, i) - ref) / std::max(1.0, std::abs(ref)));
      }
    }
  }

  // Linear spatial fields, with masks that drop both array ends.
  double worst_lin = 0.0;
  int edge_masks = 0;
  for (std::uint64_t seed = 0; seed < 200 && edge_masks < 20; ++seed) {
    const auto mask = make_mask(64, 0.5, seed);
    if (mask.measured[0] || mask.measured[63]) continue;
    ++edge_masks;
    RirMatrix m(8, 64, 8000.0);
    for (std::size_t k = 0; k < 8; ++k)
      for (std::size_t i = 0; i < 64; ++i) m.at(k, i) = (0.3 * k - 1.0) * double(i) + 0.7 * k;
    const auto est = sci_interpolate(apply_mask(m, mask), mask);
    for (std::size_t n = 0; n < m.data.size(); ++n)
      worst_lin = std::max(worst_lin, std::abs(est.data[n] - m.data[n]) / std::max(1.0, std::abs(m.data[n])));
  }
  return {worst <= 1e-9 && worst_lin <= 1e-9 && edge_masks == 20,
          fmt("50 random masked fields: max deviation from the textbook tridiagonal spline %.2e (<= 1e-9); "
              "linear fields with both ends missing (%d masks): max error %.2e",
              worst, edge_masks, worst_lin)};
}

// 7. Forward-process moments and denoiser gradients.
Verdict diffusion_statistics() {
  const auto sched = NoiseSchedule::scaled_linear(100);
  std::mt19937_64 rng(7);
  std::normal_distribution<float> n;
  const std::size_t count = 100000;
  std::vector<float> noise(count);
  for (auto& v : noise) v = n(rng);
  double worst_mean = 0.0, worst_var = 0.0;
  for (int t : {1, 5, 25, 50, 75, 100}) {
    const std::vector<float> x0(count, 0.6f);
    const auto xt = forward_sample(sched, x0, t, noise);
    double mean = 0.0, var = 0.0;
    for (float v : xt) mean += v;
    mean /= count;
    for (float v : xt) var += (v - mean) * (v - mean);
    var /= count - 1;
    const double ab = sched.alpha_bar(t);
    const double em = std::sqrt(ab) * 0.6, ev = 1.0 - ab;
    worst_mean = std::max(worst_mean, std::abs(mean - em) / std::max(std::abs(em), std::sqrt(ev)));
    worst_var = std::max(worst_var, std::abs(var / ev - 1.0));
  }

  Denoiser<double> net(DenoiserConfig{2, 2, 4, 8});
  net.init_weights(31);
  std::normal_distribution<double> nd;
  std::vector<double> x(2 * 64), r(2 * 64), out(2 * 64);
  for (auto& v : x) v = nd(rng);
  for (auto& v : r) v = nd(rng);
  const std::vector<int> steps{2, 77};
  auto loss = [&] {
    net.predict(x, steps, out);
    return std::inner_product(out.begin(), out.end(), r.begin(), 0.0);
  };
  std::vector<double> grad(net.parameter_count(), 0.0);
  net.backward(net.forward(x, steps, out), r, grad);
  std::uniform_int_distribution<std::size_t> pick(0, net.parameter_count() - 1);
  double worst_grad = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t p = pick(rng);
    auto w = net.weights();
    const double keep = w[p], h = 1e-5;
    w[p] = keep + h;
    const double up = loss();
    w[p] = keep - h;
    const double down = loss();
    w[p] = keep;
    const double fd = (up - down) / (2 * h);
    worst_grad = std::max(worst_grad, std::abs(fd - grad[p]) / std::max({std::abs(fd), std::abs(grad[p]), 1e-8}));
  }
  return {worst_mean <= 0.01 && worst_var <= 0.01 && worst_grad <= 1e-4,
          fmt("10^5 samples: max mean error %.3f%%, max variance error %.3f%% (<= 1%%); 100 parameters: max "
              "gradient relative error %.2e (<= 1e-4)",
              100 * worst_mean, 100 * worst_var, worst_grad)};
}

// 8. Measured columns survive inpainting.
Verdict repaint_fidelity(const DiffusionModel& model, const ExperimentConfig& cfg) {
  auto c = cfg;
  c.test_samples = 256;
  const auto truth = simulate_test_matrix(c, 0.0, 90.0);
  int exact = 0;
  for (int k = 1; k <= 9; ++k) {
    const auto mask = make_mask(64, k / 10.0, 800 + k);
    const auto out = inpaint_matrix(model, apply_mask(truth, mask), mask, c.repaint(k));
    bool same = true;
    for (auto i : mask.measured_indices())
      for (std::size_t s = 0; s < truth.n_samples; ++s) same = same && out.at(s, i) == truth.at(s, i);
    exact += same;
  }
  return {exact == 9, fmt("ratios 0.1..0.9 on a 64 x 256 RIR matrix: measured columns bit-exact in %d/9", exact)};
}

// 9. Toy prior.
Verdict toy_prior(const DiffusionModel& model, double train_secs) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> gains;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto test = make_stripe_patches(8, 9000 + seed);
    const auto mask = make_mask(64, 0.5, seed);
    std::vector<std::vector<std::uint8_t>> known(test.size(), std::vector<std::uint8_t>(kPatchPixels));
    Patches masked = test;
    for (std::size_t p = 0; p < test.size(); ++p)
      for (int r = 0; r < kPatchSize; ++r)
        for (int c = 0; c < kPatchSize; ++c) {
          known[p][r * kPatchSize + c] = mask.measured[c];
          if (!mask.measured[c]) masked[p][r * kPatchSize + c] = 0.0f;
        }
    RepaintOptions opts;
    opts.jump_length = 10;
    opts.resamples = 3;
    opts.seed = seed;
    const auto out = repaint_batch(model, masked, known, opts);
    double err = 0.0, zero_err = 0.0;
    for (std::size_t p = 0; p < test.size(); ++p)
      for (int i = 0; i < kPatchPixels; ++i)
        if (!known[p][i]) {
          const double d = out[p][i] - test[p][i];
          err += d * d;
          zero_err += double(test[p][i]) * test[p][i];
        }
    const double inpaint_db = 10.0 * std::log10(err / zero_err);
    gains.push_back(-inpaint_db);  // zero-fill NMSE is 0 dB
    progress(fmt("stripe seed %llu: inpainting NMSE %.2f dB", static_cast<unsigned long long>(seed), inpaint_db));
  }
  const double med = median(gains);
  const double secs = train_secs + seconds_since(t0);
  std::ostringstream all;
  for (double g : gains) all << fmt("%.2f ", g);
  return {med >= 6.0 && secs <= 1200.0,
          fmt("half-masked stripe patches: median gain over zero-fill %.2f dB (>= 6 dB); per seed %s; %.0f s "
              "including training (<= 1200 s)",
              med, all.str().c_str(), secs)};
}

struct SweepResults {
  std::vector<double> d30, d50, d70, d50_10;  // diffusion CD
  std::vector<double> s30, s50, s70, s50_10;  // SCI CD
  double secs = 0.0;
};

SweepResults desk_sweep(const DiffusionModel& model, const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepResults r;
  const auto broadside = simulate_test_matrix(cfg, 0.0, 90.0);
  const auto endfire = simulate_test_matrix(cfg, 0.0, 10.0);
  auto run = [&](const RirMatrix& truth, double angle, double ratio, std::vector<double>& d,
                 std::vector<double>& s) {
    for (auto seed : cfg.seeds) {
      const auto out = run_cell(cfg, model, truth, Cell{0.0, angle, ratio, seed});
      if (!out.diffusion.ok() || !out.sci.ok())
        throw std::runtime_error("cell failed: " + out.diffusion.error.value_or(out.sci.error.value_or("")));
      d.push_back(out.diffusion.cd);
      s.push_back(out.sci.cd);
      progress(fmt("angle %.0f ratio %.1f seed %llu: diffusion CD %.4f (NMSE %.2f dB), SCI CD %.4f (NMSE %.2f dB)",
                   angle, ratio, static_cast<unsigned long long>(seed), out.diffusion.cd, out.diffusion.nmse_db,
                   out.sci.cd, out.sci.nmse_db));
    }
  };
  run(broadside, 90.0, 0.5, r.d50, r.s50);
  run(broadside, 90.0, 0.3, r.d30, r.s30);
  run(broadside, 90.0, 0.7, r.d70, r.s70);
  run(endfire, 10.0, 0.5, r.d50_10, r.s50_10);
  r.secs = seconds_since(t0);
  return r;
}

Verdict method_vs_baseline(const SweepResults& r, double train_secs) {
  const double d = median(r.d50), s = median(r.s50);
  const double secs = train_secs + r.secs;
  return {d <= s && secs <= 3600.0,
          fmt("linear array, 90 deg, ratio 0.5, 5 seeds: median CD diffusion %.4f vs SCI %.4f (diffusion <= SCI); "
              "%.0f s for training and all desk cells (<= 3600 s)",
              d, s, secs)};
}

Verdict degradation_trends(const SweepResults& r) {
  const double a = median(r.d30), b = median(r.d50), c = median(r.d70), e = median(r.d50_10);
  return {a <= b && b <= c && b <= e,
          fmt("median diffusion CD at ratio 0.3/0.5/0.7 = %.4f / %.4f / %.4f (non-decreasing); at ratio 0.5 "
              "90 deg %.4f vs 10 deg %.4f (90 <= 10). SCI for reference: %.4f / %.4f / %.4f, 10 deg %.4f",
              a, b, c, b, e, median(r.s30), median(r.s50), median(r.s70), median(r.s50_10))};
}

}  // namespace

int main(int argc, char** argv) {
  keep_large_allocations_on_heap();
  std::set<int> only;
  std::string rir_model, stripe_model, save_dir;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) throw std::invalid_argument(a + " needs a value");
      return argv[++i];
    };
    if (a == "--only") {
      std::stringstream ss(next());
      for (std::string item; std::getline(ss, item, ',');) only.insert(std::stoi(item));
    } else if (a == "--rir-model") {
      rir_model = next();
    } else if (a == "--stripe-model") {
      stripe_model = next();
    } else if (a == "--save-models") {
      save_dir = next();
    } else {
      std::fprintf(stderr, "unknown argument %s\n", a.c_str());
      return 2;
    }
  }
  auto wanted = [&](int k) { return only.empty() || only.count(k) > 0; };

  const auto desk = ExperimentConfig::desk();
  int failed = 0, ran = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& fn) {
    if (!wanted(id)) return;
    ++ran;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("[%s] %2d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "free-field oracle", free_field);
  report(2, "Sabine/Schroeder consistency", sabine_schroeder);
  report(3, "patch round trip", patch_round_trip);
  report(4, "patch count", patch_count);
  report(5, "metric closed forms", metric_closed_forms);
  report(6, "spline oracle", spline_oracle);
  report(7, "diffusion statistics", diffusion_statistics);

  // The desk RIR model serves criteria 8, 10 and 11.
  std::optional<DiffusionModel> rir;
  double rir_train_secs = 0.0;
  auto rir_model_once = [&]() -> const DiffusionModel& {
    if (!rir) {
      const auto t0 = std::chrono::steady_clock::now();
      if (!rir_model.empty()) {
        rir = load_checkpoint(rir_model);
      } else {
        progress("training the desk RIR model");
        auto tc = desk.training;
        tc.seed = 1;
        rir = train(build_training_set(desk, 1).patches, desk.schedule(), tc, [&](int e, double l) {
          if ((e + 1) % 25 == 0) progress(fmt("epoch %d loss %.4f", e + 1, l));
        });
        if (!save_dir.empty()) save_checkpoint(save_dir + "/desk_rir.ckpt", *rir);
      }
      rir_train_secs = seconds_since(t0);
    }
    return *rir;
  };

  report(8, "RePaint fidelity", [&] { return repaint_fidelity(rir_model_once(), desk); });

  report(9, "toy-prior learning", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    DiffusionModel m = [&] {
      if (!stripe_model.empty()) return load_checkpoint(stripe_model);
      progress("training the stripe model");
      auto tc = desk.training;
      tc.seed = 9;
      tc.epochs = 350;
      tc.batch_size = 8;
      auto out = train(make_stripe_patches(200, 1), desk.schedule(), tc, [&](int e, double l) {
        if ((e + 1) % 25 == 0) progress(fmt("epoch %d loss %.4f", e + 1, l));
      });
      if (!save_dir.empty()) save_checkpoint(save_dir + "/stripe.ckpt", out);
      return out;
    }();
    return toy_prior(m, seconds_since(t0));
  });

  std::optional<SweepResults> sweep;
  auto sweep_once = [&]() -> const SweepResults& {
    if (!sweep) sweep = desk_sweep(rir_model_once(), desk);
    return *sweep;
  };
  report(10, "method vs baseline", [&] { return method_vs_baseline(sweep_once(), rir_train_secs); });
  report(11, "degradation trends", [&] { return degradation_trends(sweep_once()); });

  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
