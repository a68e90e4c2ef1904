// SPDX-License-Identifier: Apache-2.0
#include "trackpred/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "trackpred/errors.hpp"

namespace trackpred {
namespace {

constexpr char kCheckpointMagic[8] = {'T', 'P', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoFailure("unexpected end of checkpoint file");
  return v;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const ModelParams& params, const TrainConfig& train) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write checkpoint: " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));

  const ModelConfig& c = params.cfg;
  write_pod(out, static_cast<std::int32_t>(c.history_points));
  write_pod(out, static_cast<std::int32_t>(c.horizon_steps));
  write_pod(out, static_cast<std::int32_t>(c.grid_rows));
  write_pod(out, static_cast<std::int32_t>(c.grid_cols));
  write_pod(out, static_cast<std::int32_t>(c.grid_features));
  write_pod(out, static_cast<std::int32_t>(c.hidden_size));
  write_pod(out, static_cast<std::int32_t>(c.conv_channels));
  write_pod(out, static_cast<std::int32_t>(c.conv_kernel));
  write_pod(out, static_cast<std::uint8_t>(c.activation));

  write_pod(out, static_cast<std::int32_t>(train.epochs));
  write_pod(out, static_cast<std::int32_t>(train.batch_size));
  write_pod(out, train.learning_rate);
  write_pod(out, train.grad_clip);
  write_pod(out, train.seed);

  const std::vector<const std::vector<double>*> tensors = tensor_list(params);
  write_pod(out, static_cast<std::uint64_t>(tensors.size()));
  for (const std::vector<double>* t : tensors) {
    write_pod(out, static_cast<std::uint64_t>(t->size()));
    out.write(reinterpret_cast<const char*>(t->data()), static_cast<std::streamsize>(t->size() * sizeof(double)));
  }
  if (!out) throw IoFailure("failed writing checkpoint: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw IoFailure("not a checkpoint file: " + path.string());

  ModelConfig cfg;
  cfg.history_points = read_pod<std::int32_t>(in);
  cfg.horizon_steps = read_pod<std::int32_t>(in);
  cfg.grid_rows = read_pod<std::int32_t>(in);
  cfg.grid_cols = read_pod<std::int32_t>(in);
  cfg.grid_features = read_pod<std::int32_t>(in);
  cfg.hidden_size = read_pod<std::int32_t>(in);
  cfg.conv_channels = read_pod<std::int32_t>(in);
  cfg.conv_kernel = read_pod<std::int32_t>(in);
  const std::uint8_t act = read_pod<std::uint8_t>(in);
  if (act > 1) throw IoFailure("checkpoint holds an unknown activation tag");
  cfg.activation = static_cast<Activation>(act);
  cfg.validate();

  Checkpoint ck;
  ck.train.epochs = read_pod<std::int32_t>(in);
  ck.train.batch_size = read_pod<std::int32_t>(in);
  ck.train.learning_rate = read_pod<double>(in);
  ck.train.grad_clip = read_pod<double>(in);
  ck.train.seed = read_pod<std::uint64_t>(in);

  ck.params = ModelParams::zeros(cfg);
  const std::vector<std::vector<double>*> tensors = tensor_list(ck.params);
  const std::uint64_t n = read_pod<std::uint64_t>(in);
  if (n != tensors.size()) throw IoFailure("checkpoint tensor count does not match the model shape");
  for (std::vector<double>* t : tensors) {
    const std::uint64_t len = read_pod<std::uint64_t>(in);
    if (len != t->size()) throw IoFailure("checkpoint tensor size does not match the model shape");
    in.read(reinterpret_cast<char*>(t->data()), static_cast<std::streamsize>(t->size() * sizeof(double)));
    if (!in) throw IoFailure("unexpected end of checkpoint file");
  }
  return ck;
}

}  // namespace trackpred
