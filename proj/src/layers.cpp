// SPDX-License-Identifier: Apache-2.0
#include "trackpred/layers.hpp"

#include <cmath>

#include "trackpred/errors.hpp"
#include "trackpred/kernels.hpp"

namespace trackpred {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmCell LstmCell::zeros(int input, int hidden) {
  if (input <= 0 || hidden <= 0) throw ConfigError("lstm cell sizes must be positive");
  LstmCell cell;
  cell.input_size = input;
  cell.hidden_size = hidden;
  cell.w_ih.assign(static_cast<std::size_t>(4 * hidden) * input, 0.0);
  cell.w_hh.assign(static_cast<std::size_t>(4 * hidden) * hidden, 0.0);
  cell.b.assign(static_cast<std::size_t>(4 * hidden), 0.0);
  return cell;
}

LstmGrad LstmGrad::zeros_like(const LstmCell& cell) {
  LstmGrad g;
  g.w_ih.assign(cell.w_ih.size(), 0.0);
  g.w_hh.assign(cell.w_hh.size(), 0.0);
  g.b.assign(cell.b.size(), 0.0);
  return g;
}

void lstm_step(const LstmCell& cell, std::span<const double> x, std::vector<double>& h, std::vector<double>& c,
               LstmStepCache* cache) {
  const int in = cell.input_size;
  const int hs = cell.hidden_size;
  if (static_cast<int>(x.size()) != in) throw ShapeMismatch("lstm input size mismatch");
  if (static_cast<int>(h.size()) != hs || static_cast<int>(c.size()) != hs)
    throw ShapeMismatch("lstm state size mismatch");

  std::vector<double> z = cell.b;
  kernels::matvec_acc(cell.w_ih.data(), 4 * hs, in, x.data(), z.data());
  kernels::matvec_acc(cell.w_hh.data(), 4 * hs, hs, h.data(), z.data());

  if (cache != nullptr) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev = h;
    cache->c_prev = c;
    cache->gates.resize(static_cast<std::size_t>(4) * hs);
    cache->c.resize(hs);
    cache->h.resize(hs);
    cache->tanh_c.resize(hs);
  }

  for (int j = 0; j < hs; ++j) {
    const double gi = sigmoid(z[j]);
    const double gf = sigmoid(z[hs + j]);
    const double gg = std::tanh(z[2 * hs + j]);
    const double go = sigmoid(z[3 * hs + j]);
    const double cn = gf * c[j] + gi * gg;
    const double tc = std::tanh(cn);
    const double hn = go * tc;
    if (cache != nullptr) {
      cache->gates[j] = gi;
      cache->gates[hs + j] = gf;
      cache->gates[2 * hs + j] = gg;
      cache->gates[3 * hs + j] = go;
      cache->c[j] = cn;
      cache->tanh_c[j] = tc;
      cache->h[j] = hn;
    }
    c[j] = cn;
    h[j] = hn;
  }
}

void lstm_step_backward(const LstmCell& cell, const LstmStepCache& cache, std::span<const double> dh,
                        std::span<const double> dc, LstmGrad& grad, std::span<double> dx, std::span<double> dh_prev,
                        std::span<double> dc_prev) {
  const int in = cell.input_size;
  const int hs = cell.hidden_size;
  if (static_cast<int>(dh.size()) != hs || static_cast<int>(dc.size()) != hs)
    throw ShapeMismatch("lstm state gradient size mismatch");
  if (!dx.empty() && static_cast<int>(dx.size()) != in) throw ShapeMismatch("lstm input gradient size mismatch");
  if (static_cast<int>(dh_prev.size()) != hs || static_cast<int>(dc_prev.size()) != hs)
    throw ShapeMismatch("lstm previous-state gradient size mismatch");

  std::vector<double> dz(static_cast<std::size_t>(4) * hs);
  for (int j = 0; j < hs; ++j) {
    const double gi = cache.gates[j];
    const double gf = cache.gates[hs + j];
    const double gg = cache.gates[2 * hs + j];
    const double go = cache.gates[3 * hs + j];
    const double tc = cache.tanh_c[j];
    const double dcj = dc[j] + dh[j] * go * (1.0 - tc * tc);
    dz[j] = dcj * gg * gi * (1.0 - gi);
    dz[hs + j] = dcj * cache.c_prev[j] * gf * (1.0 - gf);
    dz[2 * hs + j] = dcj * gi * (1.0 - gg * gg);
    dz[3 * hs + j] = dh[j] * tc * go * (1.0 - go);
    dc_prev[j] += dcj * gf;
  }

  for (int j = 0; j < 4 * hs; ++j) grad.b[j] += dz[j];
  kernels::ger_acc(grad.w_ih.data(), 4 * hs, in, dz.data(), cache.x.data());
  kernels::ger_acc(grad.w_hh.data(), 4 * hs, hs, dz.data(), cache.h_prev.data());
  if (!dx.empty()) kernels::matvec_t_acc(cell.w_ih.data(), 4 * hs, in, dz.data(), dx.data());
  kernels::matvec_t_acc(cell.w_hh.data(), 4 * hs, hs, dz.data(), dh_prev.data());
}

Conv2d Conv2d::zeros(int in_ch, int out_ch, int kh, int kw) {
  if (in_ch <= 0 || out_ch <= 0 || kh <= 0 || kw <= 0) throw ConfigError("conv sizes must be positive");
  Conv2d conv;
  conv.in_ch = in_ch;
  conv.out_ch = out_ch;
  conv.kh = kh;
  conv.kw = kw;
  conv.w.assign(static_cast<std::size_t>(out_ch) * in_ch * kh * kw, 0.0);
  conv.b.assign(static_cast<std::size_t>(out_ch), 0.0);
  return conv;
}

Conv2dGrad Conv2dGrad::zeros_like(const Conv2d& conv) {
  Conv2dGrad g;
  g.w.assign(conv.w.size(), 0.0);
  g.b.assign(conv.b.size(), 0.0);
  return g;
}

void conv2d_forward(const Conv2d& conv, std::span<const double> in, int rows, int cols, std::span<double> out) {
  const int orows = conv.out_rows(rows);
  const int ocols = conv.out_cols(cols);
  if (orows <= 0 || ocols <= 0) throw ShapeMismatch("conv input smaller than kernel");
  if (in.size() != static_cast<std::size_t>(rows) * cols * conv.in_ch) throw ShapeMismatch("conv input size mismatch");
  if (out.size() != static_cast<std::size_t>(conv.out_ch) * orows * ocols)
    throw ShapeMismatch("conv output size mismatch");

  for (int oc = 0; oc < conv.out_ch; ++oc) {
    for (int i = 0; i < orows; ++i) {
      for (int j = 0; j < ocols; ++j) {
        double acc = conv.b[oc];
        for (int ki = 0; ki < conv.kh; ++ki) {
          for (int kj = 0; kj < conv.kw; ++kj) {
            const double* cell = in.data() + (static_cast<std::size_t>(i + ki) * cols + (j + kj)) * conv.in_ch;
            const double* wrow =
                conv.w.data() + ((static_cast<std::size_t>(oc) * conv.in_ch) * conv.kh + ki) * conv.kw + kj;
            // wrow strides by kh*kw per input channel.
            for (int ic = 0; ic < conv.in_ch; ++ic)
              acc += wrow[static_cast<std::size_t>(ic) * conv.kh * conv.kw] * cell[ic];
          }
        }
        out[(static_cast<std::size_t>(oc) * orows + i) * ocols + j] = acc;
      }
    }
  }
}

void conv2d_backward(const Conv2d& conv, std::span<const double> in, int rows, int cols, std::span<const double> dout,
                     Conv2dGrad& grad) {
  const int orows = conv.out_rows(rows);
  const int ocols = conv.out_cols(cols);
  if (in.size() != static_cast<std::size_t>(rows) * cols * conv.in_ch) throw ShapeMismatch("conv input size mismatch");
  if (dout.size() != static_cast<std::size_t>(conv.out_ch) * orows * ocols)
    throw ShapeMismatch("conv output gradient size mismatch");

  for (int oc = 0; oc < conv.out_ch; ++oc) {
    for (int i = 0; i < orows; ++i) {
      for (int j = 0; j < ocols; ++j) {
        const double g = dout[(static_cast<std::size_t>(oc) * orows + i) * ocols + j];
        if (g == 0.0) continue;
        grad.b[oc] += g;
        for (int ki = 0; ki < conv.kh; ++ki) {
          for (int kj = 0; kj < conv.kw; ++kj) {
            const double* cell = in.data() + (static_cast<std::size_t>(i + ki) * cols + (j + kj)) * conv.in_ch;
            double* wrow = grad.w.data() + ((static_cast<std::size_t>(oc) * conv.in_ch) * conv.kh + ki) * conv.kw + kj;
            for (int ic = 0; ic < conv.in_ch; ++ic)
              wrow[static_cast<std::size_t>(ic) * conv.kh * conv.kw] += g * cell[ic];
          }
        }
      }
    }
  }
}

Linear Linear::zeros(int in, int out) {
  if (in <= 0 || out <= 0) throw ConfigError("linear sizes must be positive");
  Linear l;
  l.in = in;
  l.out = out;
  l.w.assign(static_cast<std::size_t>(out) * in, 0.0);
  l.b.assign(static_cast<std::size_t>(out), 0.0);
  return l;
}

LinearGrad LinearGrad::zeros_like(const Linear& linear) {
  LinearGrad g;
  g.w.assign(linear.w.size(), 0.0);
  g.b.assign(linear.b.size(), 0.0);
  return g;
}

void linear_forward(const Linear& linear, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != linear.in || static_cast<int>(y.size()) != linear.out)
    throw ShapeMismatch("linear size mismatch");
  kernels::matvec(linear.w.data(), linear.out, linear.in, x.data(), y.data());
  for (int i = 0; i < linear.out; ++i) y[i] += linear.b[i];
}

void linear_backward(const Linear& linear, std::span<const double> x, std::span<const double> dy, LinearGrad& grad,
                     std::span<double> dx) {
  if (static_cast<int>(x.size()) != linear.in || static_cast<int>(dy.size()) != linear.out)
    throw ShapeMismatch("linear gradient size mismatch");
  if (!dx.empty() && static_cast<int>(dx.size()) != linear.in) throw ShapeMismatch("linear dx size mismatch");
  kernels::ger_acc(grad.w.data(), linear.out, linear.in, dy.data(), x.data());
  for (int i = 0; i < linear.out; ++i) grad.b[i] += dy[i];
  if (!dx.empty()) kernels::matvec_t_acc(linear.w.data(), linear.out, linear.in, dy.data(), dx.data());
}

}  // namespace trackpred
