#include "rirfill/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rirfill {

namespace {

template <typename T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
MatT<T> silu(const MatT<T>& z) {
  return (z.array() / (T(1) + (-z.array()).exp())).matrix();
}

// dL/dz given dL/da for a = silu(z).
template <typename T>
MatT<T> silu_backward(const MatT<T>& z, const MatT<T>& da) {
  const auto s = (T(1) / (T(1) + (-z.array()).exp())).eval();
  return (da.array() * s * (T(1) + z.array() * (T(1) - s))).matrix();
}

// 3x3 neighbourhoods with zero padding: P x (9 * C), column (tap, channel)
// holds channel `channel` shifted by the tap offset.
template <typename T>
MatT<T> im2col(const Eigen::Ref<const MatT<T>>& in, int size, int batch) {
  const Eigen::Index c = in.cols();
  const Eigen::Index p_total = in.rows();
  MatT<T> cols(p_total, 9 * c);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const Eigen::Index tap = (dy + 1) * 3 + (dx + 1);
      const int x_lo = std::max(0, -dx);
      const int x_hi = std::min(size, size - dx);
      for (Eigen::Index ch = 0; ch < c; ++ch) {
        const T* src = in.col(ch).data();
        T* dst = cols.col(tap * c + ch).data();
        for (int b = 0; b < batch; ++b) {
          for (int y = 0; y < size; ++y) {
            T* row = dst + (static_cast<Eigen::Index>(b) * size + y) * size;
            const int yy = y + dy;
            if (yy < 0 || yy >= size) {
              std::fill(row, row + size, T(0));
              continue;
            }
            const T* srow = src + (static_cast<Eigen::Index>(b) * size + yy) * size;
            std::fill(row, row + x_lo, T(0));
            std::copy(srow + x_lo + dx, srow + x_hi + dx, row + x_lo);
            std::fill(row + x_hi, row + size, T(0));
          }
        }
      }
    }
  }
  return cols;
}

// Adjoint of im2col.
template <typename T>
MatT<T> col2im(const MatT<T>& cols, Eigen::Index c, int size, int batch) {
  MatT<T> out = MatT<T>::Zero(cols.rows(), c);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const Eigen::Index tap = (dy + 1) * 3 + (dx + 1);
      const int x_lo = std::max(0, -dx);
      const int x_hi = std::min(size, size - dx);
      for (Eigen::Index ch = 0; ch < c; ++ch) {
        const T* src = cols.col(tap * c + ch).data();
        T* dst = out.col(ch).data();
        for (int b = 0; b < batch; ++b) {
          for (int y = 0; y < size; ++y) {
            const int yy = y + dy;
            if (yy < 0 || yy >= size) continue;
            const T* row = src + (static_cast<Eigen::Index>(b) * size + y) * size;
            T* drow = dst + (static_cast<Eigen::Index>(b) * size + yy) * size;
            for (int x = x_lo; x < x_hi; ++x) drow[x + dx] += row[x];
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
MatT<T> avg_pool(const MatT<T>& in, int size, int batch) {
  const int half = size / 2;
  MatT<T> out(static_cast<Eigen::Index>(batch) * half * half, in.cols());
  for (Eigen::Index ch = 0; ch < in.cols(); ++ch) {
    const T* src = in.col(ch).data();
    T* dst = out.col(ch).data();
    for (int b = 0; b < batch; ++b)
      for (int y = 0; y < half; ++y) {
        const T* r0 = src + (static_cast<Eigen::Index>(b) * size + 2 * y) * size;
        const T* r1 = r0 + size;
        T* d = dst + (static_cast<Eigen::Index>(b) * half + y) * half;
        for (int x = 0; x < half; ++x)
          d[x] = T(0.25) * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]);
      }
  }
  return out;
}

// Adjoint of avg_pool; `size` is the fine resolution.
template <typename T>
MatT<T> avg_pool_backward(const MatT<T>& dout, int size, int batch) {
  const int half = size / 2;
  MatT<T> din(static_cast<Eigen::Index>(batch) * size * size, dout.cols());
  for (Eigen::Index ch = 0; ch < dout.cols(); ++ch) {
    const T* src = dout.col(ch).data();
    T* dst = din.col(ch).data();
    for (int b = 0; b < batch; ++b)
      for (int y = 0; y < size; ++y) {
        const T* s = src + (static_cast<Eigen::Index>(b) * half + y / 2) * half;
        T* d = dst + (static_cast<Eigen::Index>(b) * size + y) * size;
        for (int x = 0; x < size; ++x) d[x] = T(0.25) * s[x / 2];
      }
  }
  return din;
}

// Nearest-neighbour 2x upsampling; `size` is the coarse resolution.
template <typename T>
MatT<T> upsample(const MatT<T>& in, int size, int batch) {
  const int fine = 2 * size;
  MatT<T> out(static_cast<Eigen::Index>(batch) * fine * fine, in.cols());
  for (Eigen::Index ch = 0; ch < in.cols(); ++ch) {
    const T* src = in.col(ch).data();
    T* dst = out.col(ch).data();
    for (int b = 0; b < batch; ++b)
      for (int y = 0; y < fine; ++y) {
        const T* s = src + (static_cast<Eigen::Index>(b) * size + y / 2) * size;
        T* d = dst + (static_cast<Eigen::Index>(b) * fine + y) * fine;
        for (int x = 0; x < fine; ++x) d[x] = s[x / 2];
      }
  }
  return out;
}

template <typename T>
MatT<T> upsample_backward(const MatT<T>& dout, int size, int batch) {
  const int fine = 2 * size;
  MatT<T> din = MatT<T>::Zero(static_cast<Eigen::Index>(batch) * size * size, dout.cols());
  for (Eigen::Index ch = 0; ch < dout.cols(); ++ch) {
    const T* src = dout.col(ch).data();
    T* dst = din.col(ch).data();
    for (int b = 0; b < batch; ++b)
      for (int y = 0; y < fine; ++y) {
        const T* s = src + (static_cast<Eigen::Index>(b) * fine + y) * fine;
        T* d = dst + (static_cast<Eigen::Index>(b) * size + y / 2) * size;
        for (int x = 0; x < fine; ++x) d[x / 2] += s[x];
      }
  }
  return din;
}

}  // namespace

void DenoiserConfig::validate() const {
  if (base_channels < 1) throw std::invalid_argument("base_channels must be >= 1");
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (time_embedding_dim < 2 || time_embedding_dim % 2 != 0)
    throw std::invalid_argument("time_embedding_dim must be even and >= 2");
  if (image_size < 1 || image_size % (1 << (depth - 1)) != 0)
    throw std::invalid_argument("image_size must be divisible by 2^(depth-1)");
}

template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> timestep_embedding(std::span<const int> t,
                                                                     int dim) {
  const int half = dim / 2;
  MatT<T> e(static_cast<Eigen::Index>(t.size()), dim);
  for (std::size_t b = 0; b < t.size(); ++b) {
    for (int i = 0; i < half; ++i) {
      const double freq = std::exp(-std::log(10000.0) * i / half);
      const double arg = static_cast<double>(t[b]) * freq;
      e(b, i) = static_cast<T>(std::sin(arg));
      e(b, half + i) = static_cast<T>(std::cos(arg));
    }
  }
  return e;
}

template <typename T>
Denoiser<T>::Denoiser(const DenoiserConfig& config) : config_(config) {
  config_.validate();
  const int e = config_.time_embedding_dim;
  emb_fc_ = add_linear("time.fc", e, e);
  stem_ = add_conv("stem", 1, config_.channels(0));
  for (int l = 0; l < config_.depth; ++l) {
    const std::string p = "enc" + std::to_string(l);
    const int cin = l == 0 ? config_.channels(0) : config_.channels(l - 1);
    Block blk;
    blk.conv1 = add_conv(p + ".conv1", cin, config_.channels(l));
    blk.temb = add_linear(p + ".time", e, config_.channels(l));
    blk.conv2 = add_conv(p + ".conv2", config_.channels(l), config_.channels(l));
    enc_.push_back(blk);
  }
  dec_.resize(config_.depth - 1);
  for (int l = config_.depth - 2; l >= 0; --l) {
    const std::string p = "dec" + std::to_string(l);
    Block blk;
    blk.conv1 = add_conv(p + ".conv1", config_.channels(l + 1) + config_.channels(l),
                         config_.channels(l));
    blk.temb = add_linear(p + ".time", e, config_.channels(l));
    blk.conv2 = add_conv(p + ".conv2", config_.channels(l), config_.channels(l));
    dec_[l] = blk;
  }
  head_ = add_conv("head", config_.channels(0), 1);
  weights_.assign(layout_.back().offset + layout_.back().count, T(0));
}

template <typename T>
std::size_t Denoiser<T>::add_tensor(const std::string& name, std::vector<int> shape) {
  TensorInfo info;
  info.name = name;
  info.count = 1;
  for (int s : shape) info.count *= static_cast<std::size_t>(s);
  info.shape = std::move(shape);
  info.offset = layout_.empty() ? 0 : layout_.back().offset + layout_.back().count;
  layout_.push_back(info);
  return info.offset;
}

template <typename T>
typename Denoiser<T>::Conv Denoiser<T>::add_conv(const std::string& name, int cin, int cout) {
  Conv c;
  c.cin = cin;
  c.cout = cout;
  // Row-major {cout, ky, kx, cin}.
  c.w = add_tensor(name + ".weight", {cout, 3, 3, cin});
  c.b = add_tensor(name + ".bias", {cout});
  return c;
}

template <typename T>
typename Denoiser<T>::Linear Denoiser<T>::add_linear(const std::string& name, int in, int out) {
  Linear l;
  l.in = in;
  l.out = out;
  // Row-major {out, in}.
  l.w = add_tensor(name + ".weight", {out, in});
  l.b = add_tensor(name + ".bias", {out});
  return l;
}

template <typename T>
void Denoiser<T>::init_weights(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::size_t fan_in = 1;
  for (const auto& t : layout_) {
    // Biases follow their weight tensor and share its fan-in.
    if (t.shape.size() > 1) fan_in = t.count / static_cast<std::size_t>(t.shape.front());
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < t.count; ++i)
      weights_[t.offset + i] = static_cast<T>(dist(rng));
  }
}

template <typename T>
typename Denoiser<T>::Mat Denoiser<T>::run(std::span<const T> x, std::span<const int> t,
                                           Trace* trace) const {
  const int s0 = config_.image_size;
  const std::size_t pixels = static_cast<std::size_t>(s0) * s0;
  if (t.empty() || x.size() % pixels != 0 || x.size() / pixels != t.size())
    throw std::invalid_argument("denoiser: batch shape mismatch");
  const int batch = static_cast<int>(t.size());
  const T* w = weights_.data();
  using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

  // Convolves one image at a time so the column buffer stays cache-resident.
  auto conv = [&](const Conv& c, const Mat& in, int size) -> Mat {
    Eigen::Map<const Mat> wm(w + c.w, 9 * c.cin, c.cout);
    Eigen::Map<const RowVec> bias(w + c.b, c.cout);
    const Eigen::Index per = static_cast<Eigen::Index>(size) * size;
    Mat out(in.rows(), c.cout);
    for (int b = 0; b < batch; ++b) {
      out.middleRows(b * per, per).noalias() = im2col<T>(in.middleRows(b * per, per), size, 1) * wm;
    }
    out.rowwise() += bias;
    return out;
  };
  auto linear = [&](const Linear& l, const Mat& in) -> Mat {
    Eigen::Map<const Mat> wm(w + l.w, l.in, l.out);
    Eigen::Map<const RowVec> bias(w + l.b, l.out);
    Mat out = in * wm;
    out.rowwise() += bias;
    return out;
  };

  const Mat emb = timestep_embedding<T>(t, config_.time_embedding_dim);
  const Mat emb_z = linear(emb_fc_, emb);
  const Mat emb_a = silu<T>(emb_z);

  auto block = [&](const Block& blk, Mat in, int size, BlockTrace* bt) -> Mat {
    Mat z1 = conv(blk.conv1, in, size);
    const Mat tb = linear(blk.temb, emb_a);
    const Eigen::Index per = static_cast<Eigen::Index>(size) * size;
    for (int b = 0; b < batch; ++b) z1.middleRows(b * per, per).rowwise() += tb.row(b);
    Mat a1 = silu<T>(z1);
    Mat z2 = conv(blk.conv2, a1, size);
    Mat out = silu<T>(z2);
    if (bt) {
      bt->input = std::move(in);
      bt->z1 = std::move(z1);
      bt->a1 = std::move(a1);
      bt->z2 = std::move(z2);
      bt->out = out;
    }
    return out;
  };

  const Mat xin = Eigen::Map<const Mat>(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  Mat stem = conv(stem_, xin, s0);

  const int depth = config_.depth;
  if (trace) {
    trace->batch = batch;
    trace->steps.assign(t.begin(), t.end());
    trace->x = xin;
    trace->emb = emb;
    trace->emb_z = emb_z;
    trace->emb_a = emb_a;
    trace->stem = stem;
    trace->enc.assign(depth, {});
    trace->dec.assign(depth - 1, {});
    trace->up.assign(depth - 1, {});
  }

  std::vector<Mat> skips(depth);
  Mat h = std::move(stem);
  for (int l = 0; l < depth; ++l) {
    const int size = s0 >> l;
    if (l > 0) h = avg_pool<T>(skips[l - 1], 2 * size, batch);
    skips[l] = block(enc_[l], std::move(h), size, trace ? &trace->enc[l] : nullptr);
  }
  h = skips[depth - 1];
  for (int l = depth - 2; l >= 0; --l) {
    const int size = s0 >> l;
    Mat up = upsample<T>(h, size / 2, batch);
    Mat cat(up.rows(), up.cols() + skips[l].cols());
    cat.leftCols(up.cols()) = up;
    cat.rightCols(skips[l].cols()) = skips[l];
    if (trace) trace->up[l] = std::move(up);
    h = block(dec_[l], std::move(cat), size, trace ? &trace->dec[l] : nullptr);
  }
  if (trace) trace->head_in = h;
  return conv(head_, h, s0);
}

template <typename T>
void Denoiser<T>::predict(std::span<const T> x, std::span<const int> t,
                          std::span<T> out) const {
  const Mat y = run(x, t, nullptr);
  if (out.size() != static_cast<std::size_t>(y.size()))
    throw std::invalid_argument("denoiser: output size mismatch");
  std::copy(y.data(), y.data() + y.size(), out.begin());
}

template <typename T>
typename Denoiser<T>::Trace Denoiser<T>::forward(std::span<const T> x, std::span<const int> t,
                                                 std::span<T> out) const {
  Trace trace;
  const Mat y = run(x, t, &trace);
  if (out.size() != static_cast<std::size_t>(y.size()))
    throw std::invalid_argument("denoiser: output size mismatch");
  std::copy(y.data(), y.data() + y.size(), out.begin());
  return trace;
}

template <typename T>
void Denoiser<T>::backward(const Trace& tr, std::span<const T> dout, std::span<T> grad) const {
  if (grad.size() != weights_.size()) throw std::invalid_argument("denoiser: grad size mismatch");
  if (dout.size() != static_cast<std::size_t>(tr.x.size()))
    throw std::invalid_argument("denoiser: dout size mismatch");
  const int batch = tr.batch;
  const int s0 = config_.image_size;
  const T* w = weights_.data();
  T* g = grad.data();
  using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

  // Returns dL/din unless need_input is false.
  auto conv_back = [&](const Conv& c, const Mat& in, const Mat& d, int size,
                       bool need_input) -> Mat {
    Eigen::Map<Mat> gw(g + c.w, 9 * c.cin, c.cout);
    Eigen::Map<RowVec> gb(g + c.b, c.cout);
    Eigen::Map<const Mat> wm(w + c.w, 9 * c.cin, c.cout);
    gb += d.colwise().sum();
    const Eigen::Index per = static_cast<Eigen::Index>(size) * size;
    Mat din;
    if (need_input) din.resize(in.rows(), c.cin);
    for (int b = 0; b < batch; ++b) {
      const Mat cols = im2col<T>(in.middleRows(b * per, per), size, 1);
      const auto db = d.middleRows(b * per, per);
      gw.noalias() += cols.transpose() * db;
      if (need_input) {
        const Mat dcols = db * wm.transpose();
        din.middleRows(b * per, per) = col2im<T>(dcols, c.cin, size, 1);
      }
    }
    return din;
  };

  Mat d_emb_a = Mat::Zero(tr.emb_a.rows(), tr.emb_a.cols());

  auto block_back = [&](const Block& blk, const BlockTrace& bt, const Mat& d, int size) -> Mat {
    const Mat dz2 = silu_backward<T>(bt.z2, d);
    const Mat da1 = conv_back(blk.conv2, bt.a1, dz2, size, true);
    const Mat dz1 = silu_backward<T>(bt.z1, da1);
    const Eigen::Index per = static_cast<Eigen::Index>(size) * size;
    Mat dtb(batch, dz1.cols());
    for (int b = 0; b < batch; ++b) dtb.row(b) = dz1.middleRows(b * per, per).colwise().sum();
    Eigen::Map<Mat> gw(g + blk.temb.w, blk.temb.in, blk.temb.out);
    Eigen::Map<RowVec> gb(g + blk.temb.b, blk.temb.out);
    gw.noalias() += tr.emb_a.transpose() * dtb;
    gb += dtb.colwise().sum();
    Eigen::Map<const Mat> wt(w + blk.temb.w, blk.temb.in, blk.temb.out);
    d_emb_a.noalias() += dtb * wt.transpose();
    return conv_back(blk.conv1, bt.input, dz1, size, true);
  };

  const Mat dy = Eigen::Map<const Mat>(dout.data(), static_cast<Eigen::Index>(dout.size()), 1);
  Mat dh = conv_back(head_, tr.head_in, dy, s0, true);

  const int depth = config_.depth;
  std::vector<Mat> dskip(depth);
  for (int l = 0; l <= depth - 2; ++l) {
    const int size = s0 >> l;
    const Mat dcat = block_back(dec_[l], tr.dec[l], dh, size);
    const Eigen::Index cu = tr.up[l].cols();
    dskip[l] = dcat.rightCols(dcat.cols() - cu);
    dh = upsample_backward<T>(dcat.leftCols(cu), size / 2, batch);
  }
  // dh is now the gradient w.r.t. the deepest encoder output.
  for (int l = depth - 1; l >= 0; --l) {
    const int size = s0 >> l;
    Mat d = std::move(dh);
    if (dskip[l].size() != 0) d += dskip[l];
    const Mat din = block_back(enc_[l], tr.enc[l], d, size);
    if (l > 0) {
      dh = avg_pool_backward<T>(din, 2 * size, batch);
    } else {
      conv_back(stem_, tr.x, din, s0, false);
    }
  }

  const Mat d_emb_z = silu_backward<T>(tr.emb_z, d_emb_a);
  Eigen::Map<Mat> gw(g + emb_fc_.w, emb_fc_.in, emb_fc_.out);
  Eigen::Map<RowVec> gb(g + emb_fc_.b, emb_fc_.out);
  gw.noalias() += tr.emb.transpose() * d_emb_z;
  gb += d_emb_z.colwise().sum();
}

template class Denoiser<float>;
template class Denoiser<double>;
template Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic> timestep_embedding<float>(
    std::span<const int>, int);
template Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> timestep_embedding<double>(
    std::span<const int>, int);

}  // namespace rirfill
