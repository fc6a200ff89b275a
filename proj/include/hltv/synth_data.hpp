// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hltv/textio.hpp"

namespace hltv {

// Stage probabilities of the acquisition funnel. exposure applies to every
// trial; each later stage applies to survivors of the previous one.
struct FunnelRates {
  double exposure = 1.0;
  double click = 0.5;
  double registration = 0.4;
  double purchase = 0.01;
};

struct DataConfig {
  std::size_t n_users = 2000;
  std::size_t n_games = 60;
  std::size_t n_domains = 3;
  std::size_t n_clusters = 4;  // hidden taste/value tiers

  std::size_t age_card = 8;
  std::size_t gender_card = 3;
  std::size_t city_card = 5;
  std::size_t pay_card = 6;
  std::size_t category_card = 6;
  std::size_t battle_card = 3;
  std::size_t market_card = 4;
  std::size_t theme_card = 8;

  double user_value_mu = 0.0;
  double user_value_sigma = 0.8;
  double game_value_mu = 0.0;
  double game_value_sigma = 0.4;

  std::size_t trials_per_user = 20;
  FunnelRates rates;
  std::vector<double> domain_funnel_mult{1.0, 0.8, 1.2};
  std::vector<double> domain_buy_mult{1.0, 0.6, 1.5};
  std::vector<double> domain_spend_scale{1.0, 0.7, 1.4};

  double buy_rate = 0.08;
  double value_elasticity = 0.8;
  double affinity_boost = 2.5;  // same-tier preference in game choice and buying
  double first_pay_prob = 0.35;
  double daily_pay_prob = 0.25;
  double spend_sigma = 0.6;

  std::size_t history_days = 180;
  double history_rate = 5.0;  // expected past purchases at median value
  std::size_t grl_window_days = 180;
  std::size_t behavior_len = 20;
  std::array<double, 3> split{0.7, 0.2, 0.1};
  bool export_oracle = false;

  void validate() const;
};

struct UserRecord {
  std::int64_t user_id = 0;
  int age_bucket = 0;
  int gender = 0;
  int city_tier = 0;
  int pay_count_bucket = 0;
  double latent_value = 0.0;  // hidden
  int tier = 0;               // hidden
};

struct GameRecord {
  std::int64_t game_id = 0;
  int category = 0;
  int battle_type = 0;
  int market_type = 0;
  int theme = 0;
  double monetization = 0.0;  // hidden
  int tier = 0;               // hidden
};

struct InteractionEvent {
  std::int64_t user_id = 0;
  std::int64_t game_id = 0;
  std::int64_t day_index = 0;
  double spend = 0.0;
};

struct BehaviorItem {
  std::int64_t game_id = 0;
  int recency_rank = 1;  // 1 = most recent
  bool operator==(const BehaviorItem&) const = default;
};

enum class Split { Train = 0, Valid = 1, Test = 2 };

struct LtvSample {
  std::int64_t sample_id = 0;
  std::int64_t user_id = 0;
  std::int64_t game_id = 0;
  int domain_id = 0;
  std::vector<BehaviorItem> behavior;
  double y3 = 0.0;
  double y7 = 0.0;
  double y30 = 0.0;
  Split split = Split::Train;
  bool operator==(const LtvSample&) const = default;
};

// One (user, game, domain) acquisition attempt and how far it got.
struct FunnelTrial {
  std::int64_t user_id = 0;
  std::int64_t game_id = 0;
  int domain_id = 0;
  bool exposed = false;
  bool clicked = false;
  bool registered = false;
  bool purchased = false;
};

struct Catalog {
  std::vector<UserRecord> users;
  std::vector<GameRecord> games;
};

Catalog generate_catalog(const DataConfig& cfg, std::uint64_t seed);

// Past purchases in [0, history_days); sorted by (user, day, game).
std::vector<InteractionEvent> generate_history(const DataConfig& cfg, Catalog& catalog,
                                               std::uint64_t seed);

// Bernoulli thinning through the stages. Per-domain multipliers scale the click
// and registration rates (clamped to 1).
void run_funnel(std::vector<FunnelTrial>& trials, const FunnelRates& rates,
                const std::vector<double>& domain_mult, std::mt19937_64& rng);

std::vector<FunnelTrial> simulate_funnel(const DataConfig& cfg, const Catalog& catalog,
                                         std::uint64_t seed);

// Purchase probability used for labels.
double purchase_probability(const DataConfig& cfg, const UserRecord& u, const GameRecord& g,
                            int domain);

std::vector<LtvSample> generate_labels(const DataConfig& cfg, const Catalog& catalog,
                                       const std::vector<InteractionEvent>& history,
                                       const std::vector<FunnelTrial>& trials,
                                       std::uint64_t seed);

// Stratified on y30 > 0; assigns LtvSample::split in place.
void split_dataset(std::vector<LtvSample>& samples, const std::array<double, 3>& ratios,
                   std::uint64_t seed);

struct Dataset {
  Catalog catalog;
  std::vector<InteractionEvent> events;
  std::vector<FunnelTrial> trials;
  std::vector<LtvSample> samples;
};

Dataset generate_dataset(const DataConfig& cfg, std::uint64_t seed);

// Funnel stage counts per domain (CSV body, with header).
std::string funnel_report_csv(const std::vector<FunnelTrial>& trials, std::size_t n_domains);

// JSON Lines persistence. Readers reject malformed lines and unknown or
// missing fields, naming the line.
void write_users(const std::filesystem::path& p, const std::vector<UserRecord>& v,
                 const ArtifactMeta& meta, bool with_hidden);
void write_games(const std::filesystem::path& p, const std::vector<GameRecord>& v,
                 const ArtifactMeta& meta, bool with_hidden);
void write_events(const std::filesystem::path& p, const std::vector<InteractionEvent>& v,
                  const ArtifactMeta& meta);
void write_samples(const std::filesystem::path& p, const std::vector<LtvSample>& v,
                   const ArtifactMeta& meta);

std::vector<UserRecord> read_users(const std::filesystem::path& p);
std::vector<GameRecord> read_games(const std::filesystem::path& p);
std::vector<InteractionEvent> read_events(const std::filesystem::path& p);
std::vector<LtvSample> read_samples(const std::filesystem::path& p);

const char* split_name(Split s);

}  // namespace hltv
