#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "coggen/complex_grid.hpp"
#include "coggen/errors.hpp"
#include "coggen/forward_model.hpp"
#include "coggen/rng.hpp"
#include "coggen/sampling_mask.hpp"

namespace coggen {

enum class activation_kind : std::uint8_t { sine = 0 };

// Implicit-representation backbone shape: Fourier feature lift followed by a
// sine MLP with a linear 2-channel (re, im) head.
struct inr_config {
  std::size_t hidden_layers = 8;
  std::size_t hidden_width = 256;
  std::size_t fourier_features = 64;
  double fourier_scale = 10.0;
  activation_kind activation = activation_kind::sine;
  double omega0 = 30.0;
  static constexpr std::size_t out_channels = 2;

  std::size_t input_dim() const { return 2 * fourier_features; }
};

inline void validate(const inr_config& c) {
  require(c.hidden_layers >= 1 && c.hidden_width >= 1 && c.fourier_features >= 1,
          errc::bad_config, "inr_config: layer counts and widths must be >= 1");
  require(c.fourier_scale > 0.0 && c.omega0 > 0.0, errc::bad_config,
          "inr_config: fourier_scale and omega0 must be positive");
}

// Linear layers: index 0 maps the feature lift to the hidden width, indices
// 1..hidden_layers map width to width, and the last index is the 2-channel
// output head. Sine activations follow every layer except the head.
inline std::size_t linear_layer_count(const inr_config& c) { return c.hidden_layers + 2; }

inline std::size_t layer_in_dim(const inr_config& c, std::size_t l) {
  return l == 0 ? c.input_dim() : c.hidden_width;
}

inline std::size_t layer_out_dim(const inr_config& c, std::size_t l) {
  return l + 1 == linear_layer_count(c) ? inr_config::out_channels : c.hidden_width;
}

inline std::size_t param_count(const inr_config& c) {
  std::size_t total = 0;
  for (std::size_t l = 0; l < linear_layer_count(c); ++l)
    total += layer_out_dim(c, l) * (layer_in_dim(c, l) + 1);
  return total;
}

// Full parameter set theta. The Fourier matrix is drawn once and frozen; the
// trainable weights and biases live in one flat array, layer-major (weights
// row-major out x in, then biases), so the optimizer sees a single vector.
struct generator_params {
  inr_config config;
  std::vector<double> fourier;  // fourier_features x 2, row-major, fixed
  std::vector<double> theta;    // trainable

  std::size_t total_count() const { return theta.size(); }

  std::size_t layer_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l)
      off += layer_out_dim(config, l) * (layer_in_dim(config, l) + 1);
    return off;
  }
};

// Pixel-center coordinates, both axes normalized to (-1, 1). Column index
// drives the first coordinate, row index the second.
struct coordinate_grid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> coords;  // 2 per pixel, row-major scan

  coordinate_grid() = default;
  coordinate_grid(std::size_t h, std::size_t w) : height(h), width(w) {
    require(h > 0 && w > 0, errc::bad_dims, "coordinate_grid: dimensions must be positive");
    coords.resize(2 * h * w);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c) {
        coords[2 * (r * w + c)] = (2.0 * static_cast<double>(c) + 1.0 - static_cast<double>(w)) /
                                  static_cast<double>(w);
        coords[2 * (r * w + c) + 1] =
            (2.0 * static_cast<double>(r) + 1.0 - static_cast<double>(h)) /
            static_cast<double>(h);
      }
  }
};

namespace detail {

// Sequential scalar draws over one counter stream; Gaussians take two
// uniforms each so no counter is ever reused.
struct draw_seq {
  const counter_rng& rng;
  std::uint64_t ctr = 0;

  double uniform_sym(double bound) { return bound * (2.0 * rng.uniform(ctr++) - 1.0); }

  double gaussian() {
    const double u1 = rng.uniform_pos(ctr++);
    const double u2 = rng.uniform(ctr++);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }
};

using row_major_map =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using row_major_mut_map =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace detail

// Fresh parameters: the Fourier matrix is Normal(0, fourier_scale^2); the
// sine layers use the standard uniform scheme for sinusoidal networks (first
// layer 1/fan_in, later layers sqrt(6/fan_in)/omega0). Biases start at zero.
inline generator_params init_inr(const inr_config& config, std::uint64_t seed) {
  validate(config);
  generator_params p;
  p.config = config;
  const counter_rng rng(seed, counter_rng::init_stream);
  detail::draw_seq draw{rng};

  p.fourier.resize(config.fourier_features * 2);
  for (double& f : p.fourier) f = config.fourier_scale * draw.gaussian();

  p.theta.assign(param_count(config), 0.0);
  std::size_t off = 0;
  for (std::size_t l = 0; l < linear_layer_count(config); ++l) {
    const std::size_t in = layer_in_dim(config, l), out = layer_out_dim(config, l);
    const double fan = static_cast<double>(in);
    const double bound =
        l == 0 ? 1.0 / fan : std::sqrt(6.0 / fan) / config.omega0;
    for (std::size_t i = 0; i < out * in; ++i) p.theta[off + i] = draw.uniform_sym(bound);
    off += out * in + out;  // biases stay zero
  }
  return p;
}

// Design standard deviation of a first-layer preactivation under the init
// scheme: weights U[-1/d, 1/d] over d inputs with unit-variance sine/cosine
// features gives Var = d * (1/(3 d^2)) * E[feature^2] = 1/(6d) with
// E[gamma^2] = 1/2.
inline double first_layer_design_std(const inr_config& c) {
  return std::sqrt(1.0 / (6.0 * static_cast<double>(c.input_dim())));
}

// Shared forward/backward engine. The Fourier feature matrix of a (params,
// grid shape) pair never changes during optimization, so it is built once
// and cached; activations are kept for the backward pass.
class inr_engine {
public:
  inr_engine(const generator_params& params, std::size_t height, std::size_t width)
      : height_(height), width_(width) {
    validate(params.config);
    require(params.theta.size() == param_count(params.config), errc::bad_config,
            "inr_engine: parameter vector length does not match the config");
    const coordinate_grid grid(height, width);
    build_features(params, grid);
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }

  // f_theta(z) as a complex image.
  complex_grid forward(const generator_params& params) {
    run_forward(params);
    complex_grid img(height_, width_);
    const std::size_t n = height_ * width_;
    for (std::size_t i = 0; i < n; ++i) img.data[i] = cdouble(out_(i, 0), out_(i, 1));
    require(img.all_finite(), errc::non_finite, "inr_forward: output contains NaN or Inf");
    return img;
  }

  struct loss_grad {
    double loss = 0.0;
    std::vector<double> grad;
    complex_grid image;
  };

  // Weighted relative residual loss || v . (A f - y) ||_2 / || v . y ||_2,
  // with the denominator treated as a theta-constant, plus its exact gradient.
  loss_grad loss_and_gradient(const generator_params& params, const sampling_mask& mask,
                              const measurement_set& y, const std::vector<double>& v) {
    require(mask.height == height_ && mask.width == width_, errc::shape_mismatch,
            "loss_and_gradient: mask shape does not match the engine grid");
    require(y.values.size() == v.size(), errc::length_mismatch,
            "loss_and_gradient: weight vector is not aligned with the measurements");

    loss_grad out;
    out.image = forward(params);
    const measurement_set pred = apply_forward(mask, out.image);

    double den2 = 0.0;
    for (std::size_t i = 0; i < y.values.size(); ++i) den2 += v[i] * v[i] * std::norm(y.values[i]);
    const double den = std::sqrt(den2);
    require(den > 0.0, errc::degenerate_denominator,
            "loss_and_gradient: || v . y || is zero (empty effective curriculum)");

    std::vector<cdouble> weighted(y.values.size());
    double num2 = 0.0;
    for (std::size_t i = 0; i < y.values.size(); ++i) {
      const cdouble r = pred.values[i] - y.values[i];
      num2 += v[i] * v[i] * std::norm(r);
      weighted[i] = v[i] * v[i] * r;
    }
    const double num = std::sqrt(num2);
    out.loss = num / den;
    out.grad.assign(params.theta.size(), 0.0);
    if (num < 1e-14) return out;  // the norm is non-differentiable at 0; gradient -> 0 side

    // dL/df comes back through the adjoint: G = A^H (v^2 . r) / (num * den),
    // split into the two real output channels.
    const complex_grid g = apply_adjoint(mask, weighted);
    const std::size_t n = height_ * width_;
    Eigen::MatrixXd dout(n, 2);
    const double scale = 1.0 / (num * den);
    for (std::size_t i = 0; i < n; ++i) {
      dout(i, 0) = scale * g.data[i].real();
      dout(i, 1) = scale * g.data[i].imag();
    }
    run_backward(params, dout, out.grad);
    return out;
  }

private:
  void build_features(const generator_params& params, const coordinate_grid& grid) {
    const std::size_t nf = params.config.fourier_features;
    const std::size_t n = height_ * width_;
    features_.resize(n, 2 * nf);
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = grid.coords[2 * i], w = grid.coords[2 * i + 1];
      for (std::size_t j = 0; j < nf; ++j) {
        const double phase = two_pi * (params.fourier[2 * j] * u + params.fourier[2 * j + 1] * w);
        features_(i, j) = std::sin(phase);
        features_(i, nf + j) = std::cos(phase);
      }
    }
  }

  void run_forward(const generator_params& params) {
    const inr_config& c = params.config;
    const std::size_t layers = linear_layer_count(c);
    const std::size_t n = height_ * width_;
    pre_.resize(layers - 1);
    act_.resize(layers - 1);

    const Eigen::MatrixXd* input = &features_;
    for (std::size_t l = 0; l + 1 < layers; ++l) {
      const std::size_t in = layer_in_dim(c, l), outd = layer_out_dim(c, l);
      const std::size_t off = params.layer_offset(l);
      detail::row_major_map w(params.theta.data() + off, outd, in);
      Eigen::Map<const Eigen::VectorXd> b(params.theta.data() + off + outd * in, outd);
      pre_[l].noalias() = *input * w.transpose();
      pre_[l].rowwise() += b.transpose();
      act_[l] = (c.omega0 * pre_[l].array()).sin().matrix();
      input = &act_[l];
    }
    const std::size_t l = layers - 1;
    const std::size_t in = layer_in_dim(c, l), outd = layer_out_dim(c, l);
    const std::size_t off = params.layer_offset(l);
    detail::row_major_map w(params.theta.data() + off, outd, in);
    Eigen::Map<const Eigen::VectorXd> b(params.theta.data() + off + outd * in, outd);
    out_.resize(n, outd);
    out_.noalias() = *input * w.transpose();
    out_.rowwise() += b.transpose();
  }

  // Reverse pass from d(loss)/d(out) to the flat gradient. Relies on the
  // caches the immediately preceding run_forward left behind.
  void run_backward(const generator_params& params, const Eigen::MatrixXd& dout,
                    std::vector<double>& grad) {
    const inr_config& c = params.config;
    const std::size_t layers = linear_layer_count(c);

    Eigen::MatrixXd delta = dout;  // gradient w.r.t. the current layer's output
    for (std::size_t li = layers; li-- > 0;) {
      const std::size_t in = layer_in_dim(c, li), outd = layer_out_dim(c, li);
      const std::size_t off = params.layer_offset(li);
      const Eigen::MatrixXd& input = li == 0 ? features_ : act_[li - 1];

      detail::row_major_mut_map dw(grad.data() + off, outd, in);
      Eigen::Map<Eigen::VectorXd> db(grad.data() + off + outd * in, outd);
      dw.noalias() = delta.transpose() * input;
      db = delta.colwise().sum().transpose();

      if (li == 0) break;
      detail::row_major_map w(params.theta.data() + off, outd, in);
      Eigen::MatrixXd dinput = delta * w;
      // through the sine of layer li-1: d sin(omega0 z)/dz = omega0 cos(omega0 z)
      delta = (dinput.array() * (c.omega0 * pre_[li - 1].array()).cos() * c.omega0).matrix();
    }
  }

  std::size_t height_, width_;
  Eigen::MatrixXd features_;
  std::vector<Eigen::MatrixXd> pre_, act_;
  Eigen::MatrixXd out_;
};

// One-shot conveniences for tests and small callers; optimization loops
// should hold an inr_engine instead so the feature lift is built once.
inline complex_grid inr_forward(const generator_params& params, std::size_t height,
                                std::size_t width) {
  inr_engine engine(params, height, width);
  return engine.forward(params);
}

inline complex_grid inr_forward(const generator_params& params, const coordinate_grid& grid) {
  return inr_forward(params, grid.height, grid.width);
}

inline inr_engine::loss_grad loss_and_gradient(const generator_params& params,
                                               const sampling_mask& mask,
                                               const measurement_set& y,
                                               const std::vector<double>& v) {
  inr_engine engine(params, mask.height, mask.width);
  return engine.loss_and_gradient(params, mask, y, v);
}

}  // namespace coggen
