#include "rirfill/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rirfill {

namespace {

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

void fill_normal(std::mt19937_64& rng, std::span<float> out) {
  std::normal_distribution<float> n(0.0f, 1.0f);
  for (auto& v : out) v = n(rng);
}

void check_patch(std::span<const float> p, const char* what) {
  if (p.size() != static_cast<std::size_t>(kPatchPixels))
    throw std::invalid_argument(std::string(what) + " must hold 64x64 pixels");
}

class Adam {
 public:
  explicit Adam(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<float> w, std::span<const float> g, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < w.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g[i] * g[i];
      const double mhat = m_[i] / c1;
      const double vhat = v_[i] / c2;
      w[i] = static_cast<float>(w[i] - lr * mhat / (std::sqrt(vhat) + kEps));
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  std::vector<double> m_, v_;
  int t_ = 0;
};

}  // namespace

std::vector<float> forward_sample(const NoiseSchedule& schedule, std::span<const float> x0,
                                  int t, std::span<const float> noise) {
  if (x0.size() != noise.size()) throw std::invalid_argument("forward_sample: size mismatch");
  if (t < 1 || t > schedule.steps()) throw std::out_of_range("forward_sample: t must be in [1, T]");
  const double ab = schedule.alpha_bar(t);
  const double a = std::sqrt(ab);
  const double s = std::sqrt(1.0 - ab);
  std::vector<float> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i)
    out[i] = static_cast<float>(a * x0[i] + s * noise[i]);
  return out;
}

Preconditioning preconditioning(const NoiseSchedule& schedule, double sigma_data, int t) {
  if (sigma_data <= 0.0) return {};
  const double ab = schedule.alpha_bar(t);
  const double a = std::sqrt(ab), s = std::sqrt(1.0 - ab);
  const double v = a * a * sigma_data * sigma_data + s * s;
  return {1.0 / std::sqrt(v), s / v, a * sigma_data / std::sqrt(v)};
}

void predict_noise(const DiffusionModel& model, std::span<const float> x, std::span<const int> t,
                   std::span<float> out) {
  if (model.sigma_data <= 0.0) {
    model.net.predict(x, t, out);
    return;
  }
  const std::size_t px = kPatchPixels;
  std::vector<float> scaled(x.size());
  for (std::size_t b = 0; b < t.size(); ++b) {
    const float c = static_cast<float>(preconditioning(model.schedule, model.sigma_data, t[b]).c_in);
    for (std::size_t i = b * px; i < (b + 1) * px; ++i) scaled[i] = c * x[i];
  }
  model.net.predict(scaled, t, out);
  for (std::size_t b = 0; b < t.size(); ++b) {
    const auto p = preconditioning(model.schedule, model.sigma_data, t[b]);
    const float cs = static_cast<float>(p.c_skip), co = static_cast<float>(p.c_out);
    for (std::size_t i = b * px; i < (b + 1) * px; ++i) out[i] = cs * x[i] + co * out[i];
  }
}

std::string dataset_fingerprint(std::span<const std::vector<float>> dataset) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t count = dataset.size();
  mix(&count, sizeof count);
  for (const auto& patch : dataset) mix(patch.data(), patch.size() * sizeof(float));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DiffusionModel train(std::span<const std::vector<float>> dataset, const NoiseSchedule& schedule,
                     const TrainConfig& config, const EpochCallback& on_epoch) {
  if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
  if (config.model.image_size != kPatchSize)
    throw std::invalid_argument("train: model image size must be 64");
  if (config.epochs < 1 || config.batch_size < 1)
    throw std::invalid_argument("train: epochs and batch_size must be positive");
  for (const auto& p : dataset) {
    check_patch(p, "training patch");
    for (float v : p)
      if (!(v >= -1.0f && v <= 1.0f))
        throw std::invalid_argument("train: patch pixels must lie in [-1, 1]");
  }

  DiffusionModel model{Denoiser<float>(config.model), schedule, {}, 0.0};
  if (config.precondition) {
    double sq = 0.0;
    for (const auto& p : dataset)
      for (float v : p) sq += static_cast<double>(v) * v;
    model.sigma_data = std::sqrt(sq / (static_cast<double>(dataset.size()) * kPatchPixels));
    if (model.sigma_data == 0.0) model.sigma_data = 1e-3;
  }
  model.net.init_weights(config.seed);
  std::mt19937_64 rng = stream_for(config.seed, 0x7261696eULL);

  const std::size_t n_params = model.net.parameter_count();
  std::vector<float> grad(n_params);
  std::vector<float> ema(model.net.weights().begin(), model.net.weights().end());
  Adam adam(n_params);

  const int T = schedule.steps();
  const std::size_t n = dataset.size();
  const int batch = static_cast<int>(std::min<std::size_t>(config.batch_size, n));
  const int steps_per_epoch = static_cast<int>((n + batch - 1) / batch);
  const int total_steps = steps_per_epoch * config.epochs;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<float> xt, xin, noise, pred, dout;
  std::vector<Preconditioning> pc;
  std::vector<int> steps;
  std::uniform_int_distribution<int> pick_t(1, T);
  std::bernoulli_distribution flip(0.5);

  model.meta.epochs = config.epochs;
  model.meta.batch_size = batch;
  model.meta.learning_rate = config.learning_rate;
  model.meta.seed = config.seed;
  model.meta.dataset_fingerprint = dataset_fingerprint(dataset);

  int step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    int epoch_batches = 0;
    for (std::size_t start = 0; start < n; start += batch, ++step) {
      const int b = static_cast<int>(std::min<std::size_t>(batch, n - start));
      xt.assign(static_cast<std::size_t>(b) * kPatchPixels, 0.0f);
      xin.resize(xt.size());
      noise.resize(xt.size());
      pred.resize(xt.size());
      dout.resize(xt.size());
      steps.resize(b);
      fill_normal(rng, noise);
      for (int i = 0; i < b; ++i) {
        const auto& x0 = dataset[order[start + i]];
        steps[i] = pick_t(rng);
        const bool mirrored = config.flip_augment && flip(rng);
        const double ab = schedule.alpha_bar(steps[i]);
        const float a = static_cast<float>(std::sqrt(ab));
        const float s = static_cast<float>(std::sqrt(1.0 - ab));
        float* dst = xt.data() + static_cast<std::size_t>(i) * kPatchPixels;
        const float* nz = noise.data() + static_cast<std::size_t>(i) * kPatchPixels;
        for (int r = 0; r < kPatchSize; ++r)
          for (int c = 0; c < kPatchSize; ++c) {
            const int src = r * kPatchSize + (mirrored ? kPatchSize - 1 - c : c);
            const int idx = r * kPatchSize + c;
            dst[idx] = a * x0[src] + s * nz[idx];
          }
      }

      pc.resize(b);
      for (int i = 0; i < b; ++i) {
        pc[i] = preconditioning(schedule, model.sigma_data, steps[i]);
        const std::size_t o = static_cast<std::size_t>(i) * kPatchPixels;
        const float c = static_cast<float>(pc[i].c_in);
        for (int p = 0; p < kPatchPixels; ++p) xin[o + p] = c * xt[o + p];
      }
      const auto trace = model.net.forward(xin, steps, pred);
      double loss = 0.0;
      const double norm = 1.0 / static_cast<double>(xt.size());
      for (int i = 0; i < b; ++i) {
        const std::size_t o = static_cast<std::size_t>(i) * kPatchPixels;
        for (std::size_t p = o; p < o + kPatchPixels; ++p) {
          const double eps = pc[i].c_skip * xt[p] + pc[i].c_out * pred[p];
          const double e = eps - noise[p];
          loss += e * e;
          dout[p] = static_cast<float>(2.0 * e * norm * pc[i].c_out);
        }
      }
      loss *= norm;
      if (!std::isfinite(loss)) {
        std::ostringstream os;
        os << "training diverged at epoch " << epoch << ", step " << step
           << ": loss is " << loss << " (learning rate " << config.learning_rate << ")";
        throw std::runtime_error(os.str());
      }

      std::fill(grad.begin(), grad.end(), 0.0f);
      model.net.backward(trace, dout, grad);
      if (config.grad_clip > 0.0) {
        double sq = 0.0;
        for (float g : grad) sq += static_cast<double>(g) * g;
        const double gn = std::sqrt(sq);
        if (gn > config.grad_clip) {
          const float k = static_cast<float>(config.grad_clip / gn);
          for (auto& g : grad) g *= k;
        }
      }

      const double progress = static_cast<double>(step) / std::max(1, total_steps - 1);
      const double lr = config.final_learning_rate +
                        0.5 * (config.learning_rate - config.final_learning_rate) *
                            (1.0 + std::cos(std::numbers::pi * progress));
      adam.step(model.net.weights(), grad, lr);

      if (config.ema_decay > 0.0) {
        const auto w = model.net.weights();
        // Warm-up keeps short runs from being dominated by the initial weights.
        const double warm = (1.0 + step) / (10.0 + step);
        const float d = static_cast<float>(std::min(config.ema_decay, warm));
        for (std::size_t i = 0; i < n_params; ++i) ema[i] = d * ema[i] + (1.0f - d) * w[i];
      }
      epoch_loss += loss;
      ++epoch_batches;
    }
    epoch_loss /= epoch_batches;
    model.meta.loss_history.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  model.meta.steps = step;
  if (config.ema_decay > 0.0) std::copy(ema.begin(), ema.end(), model.net.weights().begin());
  return model;
}

std::vector<int> repaint_schedule(int steps, int jump_length, int resamples) {
  if (steps < 1) throw std::invalid_argument("repaint: T must be positive");
  if (jump_length < 1 || resamples < 1)
    throw std::invalid_argument("repaint: jump length and resample count must be positive");
  // Built on 0-based model times (-1 is the clean image), then shifted by one.
  std::map<int, int> jumps;
  for (int j = 0; j < steps - jump_length; j += jump_length) jumps[j] = resamples - 1;
  std::vector<int> ts;
  int t = steps;
  ts.push_back(t);
  while (t >= 1) {
    --t;
    ts.push_back(t);
    auto it = jumps.find(t - 1);
    if (it != jumps.end() && it->second > 0) {
      --it->second;
      for (int k = 0; k < jump_length; ++k) ts.push_back(++t);
    }
  }
  return ts;
}

Patches repaint_batch(const DiffusionModel& model, const Patches& masked,
                      std::span<const std::vector<std::uint8_t>> known,
                      const RepaintOptions& options) {
  if (masked.size() != known.size())
    throw std::invalid_argument("repaint: patch and mask counts differ");
  if (options.batch_size < 1) throw std::invalid_argument("repaint: batch_size must be positive");
  const auto& sched = model.schedule;
  const std::vector<int> times =
      repaint_schedule(sched.steps(), options.jump_length, options.resamples);

  Patches out = masked;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    check_patch(masked[i], "masked patch");
    if (known[i].size() != masked[i].size())
      throw std::invalid_argument("repaint: mask shape does not match patch");
    const bool all_known = std::all_of(known[i].begin(), known[i].end(),
                                       [](std::uint8_t k) { return k != 0; });
    if (!all_known) active.push_back(i);
  }

  const std::size_t px = kPatchPixels;
  for (std::size_t c0 = 0; c0 < active.size(); c0 += options.batch_size) {
    const std::size_t nb = std::min<std::size_t>(options.batch_size, active.size() - c0);
    std::vector<std::mt19937_64> rngs;
    for (std::size_t b = 0; b < nb; ++b) rngs.push_back(stream_for(options.seed, active[c0 + b]));

    std::vector<float> x(nb * px), eps(nb * px), z(px), zk(px);
    for (std::size_t b = 0; b < nb; ++b) fill_normal(rngs[b], std::span(x).subspan(b * px, px));

    std::vector<int> tvec(nb);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      const int t = times[k];
      const int next = times[k + 1];
      if (next > t) {
        // Re-noise one step: x_{t+1} ~ N(sqrt(1 - beta) x_t, beta).
        const double beta = sched.beta(next);
        const float a = static_cast<float>(std::sqrt(1.0 - beta));
        const float s = static_cast<float>(std::sqrt(beta));
        for (std::size_t b = 0; b < nb; ++b) {
          fill_normal(rngs[b], z);
          float* xb = x.data() + b * px;
          for (std::size_t i = 0; i < px; ++i) xb[i] = a * xb[i] + s * z[i];
        }
        continue;
      }

      std::fill(tvec.begin(), tvec.end(), t);
      predict_noise(model, x, tvec, eps);

      const double ab_t = sched.alpha_bar(t);
      const double ab_prev = sched.alpha_bar(t - 1);
      const double beta = sched.beta(t);
      const double sqrt_ab = std::sqrt(ab_t);
      const double sqrt_1m_ab = std::sqrt(1.0 - ab_t);
      const double coef_x0 = beta * std::sqrt(ab_prev) / (1.0 - ab_t);
      const double coef_xt = (1.0 - ab_prev) * std::sqrt(1.0 - beta) / (1.0 - ab_t);
      const double sigma = t > 1 ? std::sqrt(beta * (1.0 - ab_prev) / (1.0 - ab_t)) : 0.0;
      const double known_a = std::sqrt(ab_prev);
      const double known_s = std::sqrt(1.0 - ab_prev);

      for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t idx = active[c0 + b];
        const auto& x0_known = masked[idx];
        const auto& m = known[idx];
        fill_normal(rngs[b], z);
        fill_normal(rngs[b], zk);
        float* xb = x.data() + b * px;
        const float* eb = eps.data() + b * px;
        for (std::size_t i = 0; i < px; ++i) {
          if (m[i]) {
            xb[i] = static_cast<float>(known_a * x0_known[i] + known_s * zk[i]);
          } else {
            double x0 = (xb[i] - sqrt_1m_ab * eb[i]) / sqrt_ab;
            x0 = std::clamp(x0, -1.0, 1.0);
            xb[i] = static_cast<float>(coef_x0 * x0 + coef_xt * xb[i] + sigma * z[i]);
          }
        }
      }
    }

    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t idx = active[c0 + b];
      auto& o = out[idx];
      const float* xb = x.data() + b * px;
      for (std::size_t i = 0; i < px; ++i)
        o[i] = known[idx][i] ? masked[idx][i] : std::clamp(xb[i], -1.0f, 1.0f);
    }
  }
  return out;
}

std::vector<float> repaint_inpaint(const DiffusionModel& model, std::span<const float> masked,
                                   std::span<const std::uint8_t> known,
                                   const RepaintOptions& options) {
  check_patch(masked, "masked patch");
  if (known.size() != masked.size())
    throw std::invalid_argument("repaint: mask shape does not match patch");
  Patches in{std::vector<float>(masked.begin(), masked.end())};
  std::vector<std::vector<std::uint8_t>> k{std::vector<std::uint8_t>(known.begin(), known.end())};
  return repaint_batch(model, in, k, options).front();
}

RirMatrix inpaint_matrix(const DiffusionModel& model, const RirMatrix& matrix, const Mask& mask,
                         const RepaintOptions& options) {
  const PatchGrid grid = split_patches(matrix, mask);
  Patches masked;
  std::vector<std::vector<std::uint8_t>> known;
  masked.reserve(grid.size());
  known.reserve(grid.size());
  for (const auto& p : grid.patches) {
    masked.push_back(p.pixels);
    known.push_back(p.known);
  }
  const Patches filled = repaint_batch(model, masked, known, options);
  const Image image = reassemble(grid, filled);
  return complete_matrix(matrix, mask, image);
}

}  // namespace rirfill
