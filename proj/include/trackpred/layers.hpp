// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace trackpred {

enum class Activation : std::uint8_t { Tanh = 0, Relu = 1 };

/// Recurrent cell parameters; gate order inside the stacked tensors is
/// input, forget, candidate, output.
struct LstmCell {
  int input_size = 0;
  int hidden_size = 0;
  std::vector<double> w_ih;  // (4H) x input_size, row-major
  std::vector<double> w_hh;  // (4H) x H
  std::vector<double> b;     // 4H

  static LstmCell zeros(int input, int hidden);
};

/// Everything the backward pass needs from one forward step.
struct LstmStepCache {
  std::vector<double> x, h_prev, c_prev;
  std::vector<double> gates;  // post-activation, 4H
  std::vector<double> c, h, tanh_c;
};

struct LstmGrad {
  std::vector<double> w_ih, w_hh, b;
  static LstmGrad zeros_like(const LstmCell& cell);
};

/// One step: updates h and c in place; fills `cache` when non-null.
void lstm_step(const LstmCell& cell, std::span<const double> x, std::vector<double>& h, std::vector<double>& c,
               LstmStepCache* cache);

/// Reverse step. dh/dc are the gradients flowing into h_t and c_t. Parameter
/// gradients and the dx/dh_prev/dc_prev outputs all accumulate (callers zero
/// them once). dx may be empty when the input gradient is not needed.
void lstm_step_backward(const LstmCell& cell, const LstmStepCache& cache, std::span<const double> dh,
                        std::span<const double> dc, LstmGrad& grad, std::span<double> dx, std::span<double> dh_prev,
                        std::span<double> dc_prev);

/// Valid 2D convolution over a feature-last input ([row][col][in_ch]),
/// producing a channel-first output ([out_ch][row][col]).
struct Conv2d {
  int in_ch = 0;
  int out_ch = 0;
  int kh = 3;
  int kw = 3;
  std::vector<double> w;  // [oc][ic][kh][kw]
  std::vector<double> b;  // [oc]

  static Conv2d zeros(int in_ch, int out_ch, int kh, int kw);
  int out_rows(int rows) const { return rows - kh + 1; }
  int out_cols(int cols) const { return cols - kw + 1; }
};

struct Conv2dGrad {
  std::vector<double> w, b;
  static Conv2dGrad zeros_like(const Conv2d& conv);
};

void conv2d_forward(const Conv2d& conv, std::span<const double> in, int rows, int cols, std::span<double> out);
/// Parameter gradients only; the grid input is data, not a learned tensor.
void conv2d_backward(const Conv2d& conv, std::span<const double> in, int rows, int cols, std::span<const double> dout,
                     Conv2dGrad& grad);

struct Linear {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // out x in
  std::vector<double> b;  // out

  static Linear zeros(int in, int out);
};

struct LinearGrad {
  std::vector<double> w, b;
  static LinearGrad zeros_like(const Linear& linear);
};

void linear_forward(const Linear& linear, std::span<const double> x, std::span<double> y);
void linear_backward(const Linear& linear, std::span<const double> x, std::span<const double> dy, LinearGrad& grad,
                     std::span<double> dx);

inline double apply_activation(Activation a, double x) {
  if (a == Activation::Relu) return x > 0.0 ? x : 0.0;
  return std::tanh(x);
}
inline double activation_grad(Activation a, double y) {
  // Expressed in terms of the activation output y.
  if (a == Activation::Relu) return y > 0.0 ? 1.0 : 0.0;
  return 1.0 - y * y;
}

}  // namespace trackpred
