// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hltv/autodiff.hpp"

namespace hltv {

inline constexpr double kSigmaFloor = 1e-6;

// Zero-inflated lognormal head output in unconstrained form:
//   pi    = sigmoid(p_raw)            probability of a zero outcome
//   sigma = softplus(sigma_raw) + 1e-6
struct ZilnParams {
  double p_raw = 0.0;
  double mu = 0.0;
  double sigma_raw = 0.0;

  double pi() const;
  double one_minus_pi() const;
  double sigma() const;
};

// Mass pi at y == 0, (1 - pi) times the lognormal(mu, sigma^2) density above.
double ziln_pdf(const ZilnParams& p, double y);

// -log(ziln_pdf), evaluated in log space.
double ziln_nll(const ZilnParams& p, double y);

struct ZilnPrediction {
  double expected_value = 0.0;  // (1 - pi) * exp(mu + sigma^2 / 2)
  double purchase_prob = 0.0;   // 1 - pi
};

ZilnPrediction ziln_predict(const ZilnParams& p);

// Batched forms on a tape. p_raw, mu and sigma_raw are B x 1 columns.
Var ziln_nll_loss(Tape& t, Var p_raw, Var mu, Var sigma_raw,
                  const std::vector<double>& y);
Var ziln_expected_value(Tape& t, Var p_raw, Var mu, Var sigma_raw);

}  // namespace hltv
