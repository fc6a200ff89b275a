// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/ziln.hpp"

#include <cmath>
#include <numbers>

#include "hltv/error.hpp"

namespace hltv {

namespace {

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

void check_label(double y) {
  if (!(y >= 0.0)) fail(ErrorKind::Invalid, "ZILN label must be >= 0, got " + std::to_string(y));
}

}  // namespace

double ZilnParams::pi() const { return sigmoid(p_raw); }
double ZilnParams::one_minus_pi() const { return sigmoid(-p_raw); }
double ZilnParams::sigma() const { return softplus(sigma_raw) + kSigmaFloor; }

double ziln_pdf(const ZilnParams& p, double y) {
  check_label(y);
  if (y == 0.0) return p.pi();
  const double s = p.sigma();
  const double z = (std::log(y) - p.mu) / s;
  return p.one_minus_pi() / (y * s * std::sqrt(2.0 * std::numbers::pi)) *
         std::exp(-0.5 * z * z);
}

double ziln_nll(const ZilnParams& p, double y) {
  check_label(y);
  if (y == 0.0) return softplus(-p.p_raw);
  const double s = p.sigma();
  const double ly = std::log(y);
  const double z = (ly - p.mu) / s;
  return softplus(p.p_raw) + ly + std::log(s) + kHalfLog2Pi + 0.5 * z * z;
}

ZilnPrediction ziln_predict(const ZilnParams& p) {
  const double s = p.sigma();
  const double keep = p.one_minus_pi();
  return {keep * std::exp(p.mu + 0.5 * s * s), keep};
}

Var ziln_nll_loss(Tape& t, Var p_raw, Var mu, Var sigma_raw,
                  const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (t.value(p_raw).rows() != n) {
    fail(ErrorKind::Invalid, "ziln_nll_loss: " + std::to_string(n) +
                                 " labels for " + std::to_string(t.value(p_raw).rows()) + " rows");
  }
  std::vector<double> zero_mask(n), pos_mask(n), log_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    check_label(y[i]);
    zero_mask[i] = y[i] == 0.0 ? 1.0 : 0.0;
    pos_mask[i] = 1.0 - zero_mask[i];
    log_y[i] = y[i] > 0.0 ? std::log(y[i]) : 0.0;
  }
  Var zm = t.constant(Tensor::matrix(n, 1, zero_mask));
  Var pm = t.constant(Tensor::matrix(n, 1, pos_mask));
  Var ly = t.constant(Tensor::matrix(n, 1, log_y));

  Var sigma = t.add_scalar(t.softplus(sigma_raw), kSigmaFloor);
  Var zero_term = t.softplus(t.scale(p_raw, -1.0));
  Var resid = t.div(t.sub(ly, mu), sigma);
  Var pos_term = t.add(t.add(t.softplus(p_raw), ly),
                       t.add_scalar(t.add(t.log(sigma), t.scale(t.square(resid), 0.5)),
                                    kHalfLog2Pi));
  Var per_row = t.add(t.mul(zm, zero_term), t.mul(pm, pos_term));
  return t.mean(per_row);
}

Var ziln_expected_value(Tape& t, Var p_raw, Var mu, Var sigma_raw) {
  Var sigma = t.add_scalar(t.softplus(sigma_raw), kSigmaFloor);
  Var keep = t.sigmoid(t.scale(p_raw, -1.0));
  return t.mul(keep, t.exp(t.add(mu, t.scale(t.square(sigma), 0.5))));
}

}  // namespace hltv
