// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/optim.hpp"

#include <cmath>

#include "hltv/error.hpp"

namespace hltv {

void Adam::step(ParamStore& params, const GradRecord& grads, const std::set<std::string>& frozen) {
  if (lr_ == 0.0) return;
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (const auto& [name, g] : grads.grads) {
    if (frozen.count(name)) continue;
    const Tensor& p = params.at(name);
    if (g.size() != p.size()) fail(ErrorKind::Invalid, "gradient size mismatch for " + name);
    auto& [m, v] = moments_[name];
    if (m.empty()) {
      m.assign(p.size(), 0.0);
      v.assign(p.size(), 0.0);
    }
    std::vector<double> next = p.values();
    const auto& gv = g.values();
    for (std::size_t i = 0; i < next.size(); ++i) {
      m[i] = b1_ * m[i] + (1.0 - b1_) * gv[i];
      v[i] = b2_ * v[i] + (1.0 - b2_) * gv[i] * gv[i];
      next[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
    params.set(name, Tensor(p.shape(), std::move(next)));
  }
}

}  // namespace hltv
