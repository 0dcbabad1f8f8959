#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rirfill {

struct DenoiserConfig {
  int base_channels = 8;
  int depth = 3;               // resolution levels, channels double per level
  int time_embedding_dim = 32;
  int image_size = 64;

  void validate() const;
  int channels(int level) const { return base_channels << level; }
  friend bool operator==(const DenoiserConfig&, const DenoiserConfig&) = default;
};

struct TensorInfo {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t count = 0;
};

// Noise predictor for square single-channel images: a UNet-style
// encoder-decoder with skip connections, SiLU activations, 2x2 average
// pooling, nearest upsampling and a sinusoidal timestep embedding injected as
// a per-channel bias into every block.
//
// All weights live in one flat buffer (see layout()); gradients share it.
// Activations are pixels x channels matrices whose rows run over
// (batch, row, col), so an input batch maps onto a (B*H*W) x 1 matrix.
template <typename T>
class Denoiser {
 public:
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

  explicit Denoiser(const DenoiserConfig& config);

  void init_weights(std::uint64_t seed);

  const DenoiserConfig& config() const { return config_; }
  const std::vector<TensorInfo>& layout() const { return layout_; }
  std::size_t parameter_count() const { return weights_.size(); }
  std::span<T> weights() { return weights_; }
  std::span<const T> weights() const { return weights_; }

  struct Trace;

  // x holds `batch` images of image_size^2 values; t holds one step per image.
  void predict(std::span<const T> x, std::span<const int> t, std::span<T> out) const;

  // Forward pass that keeps what backward() needs.
  Trace forward(std::span<const T> x, std::span<const int> t, std::span<T> out) const;

  // Accumulates dLoss/dweights into grad given dLoss/dout.
  void backward(const Trace& trace, std::span<const T> dout, std::span<T> grad) const;

  struct Conv {
    std::size_t w = 0, b = 0;
    int cin = 0, cout = 0;
  };
  struct Linear {
    std::size_t w = 0, b = 0;
    int in = 0, out = 0;
  };
  struct Block {
    Conv conv1;
    Linear temb;
    Conv conv2;
  };
  struct BlockTrace {
    Mat input, z1, a1, z2, out;
  };
  struct Trace {
    int batch = 0;
    std::vector<int> steps;
    Mat x, emb, emb_z, emb_a;
    Mat stem;
    std::vector<BlockTrace> enc, dec;  // dec[l] for level l < depth - 1
    std::vector<Mat> up;               // upsampled decoder inputs
    Mat head_in;
  };

 private:
  std::size_t add_tensor(const std::string& name, std::vector<int> shape);
  Conv add_conv(const std::string& name, int cin, int cout);
  Linear add_linear(const std::string& name, int in, int out);

  Mat run(std::span<const T> x, std::span<const int> t, Trace* trace) const;

  DenoiserConfig config_;
  std::vector<TensorInfo> layout_;
  std::vector<T> weights_;
  Linear emb_fc_;
  Conv stem_;
  std::vector<Block> enc_;
  std::vector<Block> dec_;
  Conv head_;
};

// Sinusoidal embedding of diffusion steps: batch x dim.
template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> timestep_embedding(std::span<const int> t,
                                                                     int dim);

extern template class Denoiser<float>;
extern template class Denoiser<double>;

}  // namespace rirfill
