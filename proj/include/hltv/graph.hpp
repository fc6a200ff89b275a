// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hltv/autodiff.hpp"
#include "hltv/synth_data.hpp"
#include "hltv/textio.hpp"

namespace hltv {

enum class MetaPath { UserGameUser, GameUserGame };

const char* meta_path_name(MetaPath p);

// Homogeneous projection of the user-game purchase graph. Weights are
// common-neighbour counts; the diagonal is zero.
struct MetaPathGraph {
  MetaPath meta_path = MetaPath::UserGameUser;
  std::size_t n = 0;
  std::vector<double> adjacency;  // n x n, row-major, symmetric
  Tensor attributes;              // n x d_attr
  double weight(std::size_t i, std::size_t j) const { return adjacency[i * n + j]; }
};

// Purchases with day_index >= min_day contribute.
std::pair<MetaPathGraph, MetaPathGraph> build_meta_path_graphs(
    const std::vector<InteractionEvent>& events, std::size_t n_users, std::size_t n_games,
    std::int64_t min_day = 0);

// One-hot categorical attributes, concatenated per node.
Tensor user_attributes(const std::vector<UserRecord>& users, const DataConfig& cfg);
Tensor game_attributes(const std::vector<GameRecord>& games, const DataConfig& cfg);

struct MaskRates {
  double attributes = 0.3;
  double edges = 0.3;
};

struct MaskedEdge {
  std::size_t i = 0, j = 0;  // i < j
  double weight = 0.0;
};

struct MaskPlan {
  std::vector<std::size_t> masked_nodes;          // sorted
  std::vector<std::vector<double>> node_attributes;  // originals, aligned with masked_nodes
  std::vector<MaskedEdge> masked_edges;
};

// Masks floor(rate * count) nodes and edges without replacement.
std::pair<MetaPathGraph, MaskPlan> apply_mask(const MetaPathGraph& g, const MaskRates& rates,
                                              std::mt19937_64& rng);

MetaPathGraph restore_mask(const MetaPathGraph& masked, const MaskPlan& plan);

struct GrlOptions {
  std::size_t embedding_dim = 8;
  std::size_t hidden_dim = 16;
  std::size_t epochs = 60;
  double learning_rate = 0.01;
  double xi_edge = 2.0;
  double xi_attr = 2.0;
  double zeta = 0.5;
  MaskRates mask;
  void validate() const;
};

// Encoder/decoder parameters for both meta paths, prefixed "grl.user." and
// "grl.game.".
ParamStore init_grl_params(std::size_t user_attr_dim, std::size_t game_attr_dim,
                           const GrlOptions& opts, std::uint64_t seed);

struct GrlForward {
  Var embeddings;  // n x d_emb
  Var adj_hat;     // n x n, zero diagonal
  Var attr_hat;    // n x d_attr
};

GrlForward grl_forward(Tape& t, const MetaPathGraph& masked, const std::string& prefix);

// Reconstruction targets for one meta path.
struct ReconstructionTerm {
  Var adj_hat;
  Var attr_hat;
  const std::vector<double>* adj_true = nullptr;  // same layout as adj_hat
  const Tensor* attr_true = nullptr;              // n x d_attr
  std::vector<std::size_t> masked_nodes;
};

struct GrlLoss {
  Var total;
  Var edge;
  Var attr;
  std::size_t zero_rows = 0;  // rows compared with cos := 0
};

// attr + zeta * edge, where edge averages (1 - cos)^xi_edge over nodes then
// meta paths and attr averages (1 - cos)^xi_attr over all masked nodes.
GrlLoss grl_loss(Tape& t, const std::vector<ReconstructionTerm>& terms, double xi_edge,
                 double xi_attr, double zeta);

struct GrlTrainResult {
  ParamStore params;
  std::vector<double> loss_trace;
  std::size_t zero_row_events = 0;
};

GrlTrainResult train_grl(const MetaPathGraph& user_graph, const MetaPathGraph& game_graph,
                         const GrlOptions& opts, std::uint64_t seed);

// Embeddings of the unmasked graphs under trained parameters.
Tensor grl_embeddings(const ParamStore& params, const MetaPathGraph& g, const std::string& prefix);

struct NodeEmbeddings {
  Tensor users;  // n_users x d_emb
  Tensor games;  // n_games x d_emb
};

void write_embeddings(const std::filesystem::path& p, const NodeEmbeddings& e, const ArtifactMeta& meta);
NodeEmbeddings read_embeddings(const std::filesystem::path& p);

}  // namespace hltv
