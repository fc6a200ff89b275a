// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hltv/autodiff.hpp"
#include "hltv/graph.hpp"
#include "hltv/synth_data.hpp"
#include "hltv/textio.hpp"

namespace hltv {

struct FieldSpec {
  std::string name;
  std::size_t cardinality = 0;
  bool has_default = false;  // extra row for ids never seen at training time
};

// Ordered embedded fields with one shared embedding width.
struct FieldSchema {
  std::vector<FieldSpec> fields;
  std::size_t dim = 8;
  std::size_t domain_field = 0;

  std::size_t count() const { return fields.size(); }
  std::size_t pairs() const { return count() * (count() - 1) / 2; }
  std::size_t index_of(const std::string& name) const;
  void validate() const;

  // user_id, age, gender, city_tier, pay_count, game_id, category, battle,
  // market, theme, domain.
  static FieldSchema standard(const DataConfig& cfg, std::size_t dim);
};

struct ModelOptions {
  std::size_t embedding_dim = 8;
  std::vector<std::size_t> hidden{64, 32};
  std::size_t epnet_hidden = 16;
  double gate_threshold = 0.05;   // AdaSparse inference cut-off
  double sparsity_weight = 1e-4;  // L1 weight on the gates
  double pn_momentum = 0.9;
  double pn_eps = 1e-5;
  std::size_t behavior_len = 20;
  bool use_grl = true;
  bool freeze_grl = false;
  double init_scale = 0.1;
  void validate() const;
};

// Per-domain running statistics of Partitioned Norm.
struct PnState {
  std::size_t domains = 0;
  std::size_t width = 0;
  std::vector<double> mean;  // domains x width
  std::vector<double> var;   // domains x width
  std::vector<std::size_t> updates;  // per domain
  std::size_t fallbacks = 0;         // train batches whose slice had < 2 rows
};

struct Model {
  FieldSchema schema;
  ModelOptions opts;
  ParamStore params;
  PnState pn;
};

// GRL embeddings, when given, seed the user_id and game_id tables.
Model init_model(const FieldSchema& schema, const ModelOptions& opts, std::uint64_t seed,
                 const NodeEmbeddings* grl = nullptr);

std::vector<std::string> frozen_params(const Model& m);

enum class Mode { Train, Infer };

// Column-major view of a batch: codes[f][b] is field f of sample b.
struct Batch {
  std::size_t size = 0;
  std::vector<std::int64_t> sample_ids;
  std::vector<std::vector<std::size_t>> codes;
  std::vector<std::size_t> domain;
  std::size_t seq_len = 0;                 // padded behavior length (>= 1)
  std::vector<std::size_t> behavior_game;  // size * seq_len, padded with 0
  std::vector<std::size_t> behavior_rank;  // 0-based recency bucket
  std::vector<double> behavior_valid;      // 1 for real items
  std::array<std::vector<double>, 3> y;    // y3, y7, y30
  std::size_t unseen_ids = 0;              // ids mapped to the default row
};

Batch make_batch(const FieldSchema& schema, const std::vector<const LtvSample*>& samples,
                 const std::vector<UserRecord>& users, const std::vector<GameRecord>& games,
                 std::size_t behavior_len);

// Blocks. Each reads its parameters from the tape by name.
std::vector<Var> embed_fields(Tape& t, const FieldSchema& schema, const Batch& b);

// r_ij <v_i, v_j> for i < j in row-major pair order -> B x pairs.
Var fwfm(Tape& t, const std::vector<Var>& fields, Var r);

// a = 2 sigmoid(W2 relu(W1 x_dom + b1) + b2); z = [v_1 * a, ..., v_c * a].
Var epnet_gate(Tape& t, Var x_dom, const std::string& prefix);
Var epnet_modulate(Tape& t, const std::vector<Var>& fields, Var gate);

// gamma * gamma_k * (z - mu_k) / sqrt(var_k + eps) + beta + beta_k.
// Train mode normalizes each domain slice with its batch statistics and folds
// them into `update` when given; slices with fewer than 2 rows and infer mode
// use the running statistics in `state`.
Var partitioned_norm(Tape& t, Var z, const std::vector<std::size_t>& domain, const PnState& state,
                     Mode mode, double momentum, double eps, const std::string& prefix,
                     PnState* update = nullptr);

// Target-attentive pooling of the behavior sequence plus an affine user path.
Var tin_encode(Tape& t, Var game_table, Var target, Var user_emb, const Batch& b,
               const std::string& prefix);

struct TowerOutput {
  Var hidden;
  Var gate_l1;       // sum of gate activations averaged over the batch
  double sparsity = 0.0;  // fraction of gate entries below the threshold
};

// Hidden layers relu(affine) masked by per-domain gates sigmoid(affine(x_dom)).
TowerOutput tower_forward(Tape& t, Var input, Var x_dom, std::size_t layers, Mode mode,
                          double threshold, const std::string& prefix);

struct HeadOutput {
  Var p_raw, mu, sigma_raw;  // B x 1 each
};

struct ModelOutput {
  std::array<HeadOutput, 3> heads;
  Var gate_l1;
  double sparsity = 0.0;
  std::size_t unseen_ids = 0;
};

// The tape must be bound to m.params. Train mode writes refreshed running
// statistics into `pn_update` when given.
ModelOutput forward_full(Tape& t, const Model& m, const Batch& b, Mode mode,
                         PnState* pn_update = nullptr);

// ZILN NLL of one horizon head (0, 1, 2) plus the gate penalty.
Var task_loss(Tape& t, const Model& m, const ModelOutput& out, const Batch& b, std::size_t task);

struct Prediction {
  std::array<std::vector<double>, 3> expected;      // per horizon
  std::array<std::vector<double>, 3> purchase_prob;
  double sparsity = 0.0;
};

// Inference in fixed-size chunks; never mutates the model.
Prediction predict(const Model& m, const std::vector<const LtvSample*>& samples,
                   const std::vector<UserRecord>& users, const std::vector<GameRecord>& games);

void write_model(const std::filesystem::path& p, const Model& m, const ArtifactMeta& meta,
                 const std::string& config_echo);
Model read_model(const std::filesystem::path& p);

}  // namespace hltv
