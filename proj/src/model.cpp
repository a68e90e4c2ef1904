// SPDX-License-Identifier: Apache-2.0
#include "trackpred/model.hpp"

#include <cmath>
#include <random>

#include "trackpred/errors.hpp"

namespace trackpred {
namespace {

struct TensorRef {
  std::vector<double>* tensor;
  int fan_in;
};

std::vector<TensorRef> tensor_refs(ModelParams& p) {
  const ModelConfig& c = p.cfg;
  const int conv_fan = c.grid_features * c.conv_kernel * c.conv_kernel;
  return {
      {&p.ego.w_ih, 2},
      {&p.ego.w_hh, c.hidden_ego()},
      {&p.ego.b, c.hidden_ego()},
      {&p.conv_horizon.w, conv_fan},
      {&p.conv_horizon.b, conv_fan},
      {&p.cell_horizon.w_ih, c.stream_input()},
      {&p.cell_horizon.w_hh, c.hidden_stream()},
      {&p.cell_horizon.b, c.hidden_stream()},
      {&p.conv_neighbor.w, conv_fan},
      {&p.conv_neighbor.b, conv_fan},
      {&p.cell_neighbor.w_ih, c.stream_input()},
      {&p.cell_neighbor.w_hh, c.hidden_stream()},
      {&p.cell_neighbor.b, c.hidden_stream()},
      {&p.decoder.w_ih, 2},
      {&p.decoder.w_hh, c.decoder_hidden()},
      {&p.decoder.b, c.decoder_hidden()},
      {&p.out.w, c.decoder_hidden()},
      {&p.out.b, c.decoder_hidden()},
  };
}

void check_sample(const ModelConfig& cfg, const Sample& sample, bool need_future) {
  if (static_cast<int>(sample.history.size()) != cfg.history_points)
    throw ShapeMismatch("sample history length does not match model");
  if (need_future && static_cast<int>(sample.future.size()) != cfg.horizon_steps)
    throw ShapeMismatch("sample future length does not match model");
  if (sample.horizon_grid.size() != cfg.grid_size() || sample.neighbor_grid.size() != cfg.grid_size())
    throw ShapeMismatch("sample grid size does not match model");
}

/// conv -> activation -> one recurrent step from the zero state.
void run_stream(const Conv2d& conv, const LstmCell& cell, const ModelConfig& cfg, std::span<const double> grid,
                std::vector<double>& act, LstmStepCache* cache, std::vector<double>& h, std::vector<double>& c) {
  act.resize(static_cast<std::size_t>(cfg.stream_input()));
  conv2d_forward(conv, grid, cfg.grid_rows, cfg.grid_cols, act);
  for (double& v : act) v = apply_activation(cfg.activation, v);
  h.assign(static_cast<std::size_t>(cfg.hidden_stream()), 0.0);
  c.assign(static_cast<std::size_t>(cfg.hidden_stream()), 0.0);
  lstm_step(cell, act, h, c, cache);
}

}  // namespace

void ModelConfig::validate() const {
  if (history_points < 2) throw ConfigError("model.history_points must be at least 2");
  if (horizon_steps < 1) throw ConfigError("model.horizon_steps must be positive");
  if (grid_rows < 1 || grid_cols < 1 || grid_features < 1) throw ConfigError("model grid dimensions must be positive");
  if (conv_kernel < 1) throw ConfigError("model.conv_kernel must be positive");
  if (conv_kernel > grid_rows || conv_kernel > grid_cols)
    throw ConfigError("model.conv_kernel exceeds the grid dimensions");
  if (hidden_size < 2) throw ConfigError("model.hidden_size must be at least 2");
  if (conv_channels < 1) throw ConfigError("model.conv_channels must be positive");
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.cfg = cfg;
  p.ego = LstmCell::zeros(2, cfg.hidden_ego());
  p.conv_horizon = Conv2d::zeros(cfg.grid_features, cfg.conv_channels, cfg.conv_kernel, cfg.conv_kernel);
  p.cell_horizon = LstmCell::zeros(cfg.stream_input(), cfg.hidden_stream());
  p.conv_neighbor = Conv2d::zeros(cfg.grid_features, cfg.conv_channels, cfg.conv_kernel, cfg.conv_kernel);
  p.cell_neighbor = LstmCell::zeros(cfg.stream_input(), cfg.hidden_stream());
  p.decoder = LstmCell::zeros(2, cfg.decoder_hidden());
  p.out = Linear::zeros(cfg.decoder_hidden(), 2);
  return p;
}

ModelParams ModelParams::seeded(const ModelConfig& cfg, std::uint64_t seed) {
  ModelParams p = zeros(cfg);
  std::mt19937_64 rng(seed);
  for (const TensorRef& ref : tensor_refs(p)) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(ref.fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : *ref.tensor) v = dist(rng);
  }
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const std::vector<double>* t : tensor_list(*this)) n += t->size();
  return n;
}

std::vector<std::vector<double>*> tensor_list(ModelParams& p) {
  std::vector<std::vector<double>*> out;
  for (const TensorRef& ref : tensor_refs(p)) out.push_back(ref.tensor);
  return out;
}

std::vector<const std::vector<double>*> tensor_list(const ModelParams& p) {
  std::vector<const std::vector<double>*> out;
  for (const TensorRef& ref : tensor_refs(const_cast<ModelParams&>(p))) out.push_back(ref.tensor);
  return out;
}

std::vector<Vec2> forward_normalized(const ModelParams& params, const Sample& sample, ModelTrace* trace) {
  const ModelConfig& cfg = params.cfg;
  check_sample(cfg, sample, false);

  // Ego encoder over per-step displacements.
  const int enc_steps = cfg.history_points - 1;
  std::vector<double> h_ego(static_cast<std::size_t>(cfg.hidden_ego()), 0.0);
  std::vector<double> c_ego(h_ego.size(), 0.0);
  if (trace != nullptr) trace->ego_steps.resize(static_cast<std::size_t>(enc_steps));
  for (int t = 0; t < enc_steps; ++t) {
    const Vec2 d = sample.history[t + 1] - sample.history[t];
    const double x[2] = {d.x, d.y};
    lstm_step(params.ego, std::span<const double>(x, 2), h_ego, c_ego,
              trace != nullptr ? &trace->ego_steps[t] : nullptr);
  }

  // Interaction streams.
  std::vector<double> act_h, act_n, h_h, c_h, h_n, c_n;
  run_stream(params.conv_horizon, params.cell_horizon, cfg, sample.horizon_grid, act_h,
             trace != nullptr ? &trace->horizon_step : nullptr, h_h, c_h);
  run_stream(params.conv_neighbor, params.cell_neighbor, cfg, sample.neighbor_grid, act_n,
             trace != nullptr ? &trace->neighbor_step : nullptr, h_n, c_n);
  if (trace != nullptr) {
    trace->act_horizon = act_h;
    trace->act_neighbor = act_n;
  }

  // Decoder state starts as the concatenated embeddings (both the hidden and
  // the cell half, so the embedding stays visible past the first step);
  // inputs are fed-back outputs.
  std::vector<double> h_dec;
  h_dec.reserve(static_cast<std::size_t>(cfg.decoder_hidden()));
  h_dec.insert(h_dec.end(), h_ego.begin(), h_ego.end());
  h_dec.insert(h_dec.end(), h_h.begin(), h_h.end());
  h_dec.insert(h_dec.end(), h_n.begin(), h_n.end());
  std::vector<double> c_dec(h_dec);

  const int steps = cfg.horizon_steps;
  if (trace != nullptr) {
    trace->dec_steps.resize(static_cast<std::size_t>(steps));
    trace->dec_inputs.resize(static_cast<std::size_t>(steps));
    trace->displacements.resize(static_cast<std::size_t>(steps));
    trace->cumulative.resize(static_cast<std::size_t>(steps));
  }
  std::vector<Vec2> cumulative(static_cast<std::size_t>(steps));
  std::array<double, 2> input{0.0, 0.0};
  std::array<double, 2> emitted{0.0, 0.0};
  Vec2 running{0.0, 0.0};
  for (int t = 0; t < steps; ++t) {
    if (trace != nullptr) trace->dec_inputs[t] = input;
    lstm_step(params.decoder, std::span<const double>(input.data(), 2), h_dec, c_dec,
              trace != nullptr ? &trace->dec_steps[t] : nullptr);
    linear_forward(params.out, h_dec, emitted);
    const Vec2 d{emitted[0], emitted[1]};
    running = running + d;
    cumulative[t] = running;
    if (trace != nullptr) {
      trace->displacements[t] = d;
      trace->cumulative[t] = running;
    }
    input = emitted;
  }
  return cumulative;
}

std::vector<WorldPoint> predict(const ModelParams& params, const Sample& sample) {
  const std::vector<Vec2> normalized = forward_normalized(params, sample, nullptr);
  std::vector<WorldPoint> world;
  world.reserve(normalized.size());
  for (const Vec2& q : normalized) world.push_back(sample_to_world(sample, q));
  return world;
}

double trajectory_loss(std::span<const Vec2> predicted, std::span<const Vec2> truth) {
  if (predicted.size() != truth.size()) throw LengthMismatch("prediction and truth lengths differ");
  if (predicted.empty()) throw LengthMismatch("empty trajectories have no loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) acc += norm_sq(predicted[i] - truth[i]);
  return acc / static_cast<double>(predicted.size());
}

double sample_loss(const ModelParams& params, const Sample& sample) {
  check_sample(params.cfg, sample, true);
  const std::vector<Vec2> q = forward_normalized(params, sample, nullptr);
  return trajectory_loss(q, sample.future);
}

GradientResult gradient(const ModelParams& params, const Sample& sample) {
  const ModelConfig& cfg = params.cfg;
  check_sample(cfg, sample, true);

  ModelTrace trace;
  const std::vector<Vec2> q = forward_normalized(params, sample, &trace);

  GradientResult result;
  result.grads = ModelParams::zeros(cfg);
  result.loss = trajectory_loss(q, sample.future);

  const int steps = cfg.horizon_steps;
  const double scale = 2.0 / static_cast<double>(steps);

  // Gradient w.r.t. each emitted displacement: suffix sum over the
  // cumulative-position gradients.
  std::vector<Vec2> dd(static_cast<std::size_t>(steps));
  Vec2 suffix{0.0, 0.0};
  for (int t = steps - 1; t >= 0; --t) {
    const Vec2 dq = (q[t] - sample.future[t]) * scale;
    suffix = suffix + dq;
    dd[t] = suffix;
  }

  // Decoder, walked backwards. dh/dc carry state gradients between steps;
  // dx_next is the feedback path (input of step t+1 is the output of step t).
  const int hd = cfg.decoder_hidden();
  LstmGrad g_dec = LstmGrad::zeros_like(params.decoder);
  LinearGrad g_out = LinearGrad::zeros_like(params.out);
  std::vector<double> dh(static_cast<std::size_t>(hd), 0.0), dc(dh.size(), 0.0);
  std::vector<double> dh_prev(dh.size()), dc_prev(dh.size());
  std::array<double, 2> dx_next{0.0, 0.0};
  std::array<double, 2> dx{0.0, 0.0};
  for (int t = steps - 1; t >= 0; --t) {
    const std::array<double, 2> dy{dd[t].x + dx_next[0], dd[t].y + dx_next[1]};
    linear_backward(params.out, trace.dec_steps[t].h, dy, g_out, dh);
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    std::fill(dc_prev.begin(), dc_prev.end(), 0.0);
    dx = {0.0, 0.0};
    lstm_step_backward(params.decoder, trace.dec_steps[t], dh, dc, g_dec, dx, dh_prev, dc_prev);
    dh.swap(dh_prev);
    dc.swap(dc_prev);
    dx_next = dx;
  }

  // h_0 and c_0 are both the concatenated (ego, horizon, neighbor) embedding,
  // so the gradient into it is the sum of the two state gradients.
  for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += dc[i];
  const int he = cfg.hidden_ego();
  const int hs = cfg.hidden_stream();
  std::span<const double> de_ego(dh.data(), static_cast<std::size_t>(he));
  std::span<const double> de_h(dh.data() + he, static_cast<std::size_t>(hs));
  std::span<const double> de_n(dh.data() + he + hs, static_cast<std::size_t>(hs));

  // Streams: one recurrent step, then activation mask, then the convolution.
  const auto stream_backward = [&](const LstmCell& cell, const Conv2d& conv, const LstmStepCache& cache,
                                   const std::vector<double>& act, std::span<const double> grid, std::span<const double> de,
                                   LstmGrad& g_cell, Conv2dGrad& g_conv) {
    std::vector<double> zero_dc(static_cast<std::size_t>(hs), 0.0);
    std::vector<double> sink_h(static_cast<std::size_t>(hs), 0.0), sink_c(zero_dc);
    std::vector<double> dact(act.size(), 0.0);
    lstm_step_backward(cell, cache, de, zero_dc, g_cell, dact, sink_h, sink_c);
    for (std::size_t i = 0; i < dact.size(); ++i) dact[i] *= activation_grad(cfg.activation, act[i]);
    conv2d_backward(conv, grid, cfg.grid_rows, cfg.grid_cols, dact, g_conv);
  };
  LstmGrad g_cell_h = LstmGrad::zeros_like(params.cell_horizon);
  LstmGrad g_cell_n = LstmGrad::zeros_like(params.cell_neighbor);
  Conv2dGrad g_conv_h = Conv2dGrad::zeros_like(params.conv_horizon);
  Conv2dGrad g_conv_n = Conv2dGrad::zeros_like(params.conv_neighbor);
  stream_backward(params.cell_horizon, params.conv_horizon, trace.horizon_step, trace.act_horizon, sample.horizon_grid,
                  de_h, g_cell_h, g_conv_h);
  stream_backward(params.cell_neighbor, params.conv_neighbor, trace.neighbor_step, trace.act_neighbor,
                  sample.neighbor_grid, de_n, g_cell_n, g_conv_n);

  // Ego encoder, walked backwards. Inputs are data, so no dx is needed.
  LstmGrad g_ego = LstmGrad::zeros_like(params.ego);
  std::vector<double> dh_e(de_ego.begin(), de_ego.end());
  std::vector<double> dc_e(static_cast<std::size_t>(he), 0.0);
  std::vector<double> dh_e_prev(dh_e.size()), dc_e_prev(dh_e.size());
  for (int t = cfg.history_points - 2; t >= 0; --t) {
    std::fill(dh_e_prev.begin(), dh_e_prev.end(), 0.0);
    std::fill(dc_e_prev.begin(), dc_e_prev.end(), 0.0);
    lstm_step_backward(params.ego, trace.ego_steps[t], dh_e, dc_e, g_ego, {}, dh_e_prev, dc_e_prev);
    dh_e.swap(dh_e_prev);
    dc_e.swap(dc_e_prev);
  }

  result.grads.ego.w_ih = std::move(g_ego.w_ih);
  result.grads.ego.w_hh = std::move(g_ego.w_hh);
  result.grads.ego.b = std::move(g_ego.b);
  result.grads.conv_horizon.w = std::move(g_conv_h.w);
  result.grads.conv_horizon.b = std::move(g_conv_h.b);
  result.grads.cell_horizon.w_ih = std::move(g_cell_h.w_ih);
  result.grads.cell_horizon.w_hh = std::move(g_cell_h.w_hh);
  result.grads.cell_horizon.b = std::move(g_cell_h.b);
  result.grads.conv_neighbor.w = std::move(g_conv_n.w);
  result.grads.conv_neighbor.b = std::move(g_conv_n.b);
  result.grads.cell_neighbor.w_ih = std::move(g_cell_n.w_ih);
  result.grads.cell_neighbor.w_hh = std::move(g_cell_n.w_hh);
  result.grads.cell_neighbor.b = std::move(g_cell_n.b);
  result.grads.decoder.w_ih = std::move(g_dec.w_ih);
  result.grads.decoder.w_hh = std::move(g_dec.w_hh);
  result.grads.decoder.b = std::move(g_dec.b);
  result.grads.out.w = std::move(g_out.w);
  result.grads.out.b = std::move(g_out.b);
  return result;
}

}  // namespace trackpred
