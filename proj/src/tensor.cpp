// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "hltv/error.hpp"

namespace hltv {

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  const std::size_t expected = std::accumulate(
      shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
  if (expected != values_.size()) {
    fail(ErrorKind::Invalid, "tensor shape " + shape_string(shape_) +
                                 " does not match " +
                                 std::to_string(values_.size()) + " values");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      fail(ErrorKind::Numeric, "non-finite tensor value at flat index " +
                                   std::to_string(i) + " (shape " +
                                   shape_string(shape_) + ")");
    }
  }
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols) {
  return Tensor({rows, cols}, std::vector<double>(rows * cols, 0.0));
}

Tensor Tensor::filled(std::size_t rows, std::size_t cols, double v) {
  return Tensor({rows, cols}, std::vector<double>(rows * cols, v));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::scalar(double v) { return Tensor({1, 1}, {v}); }

std::size_t Tensor::rows() const {
  if (shape_.size() < 2) return 1;
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.empty()) return 1;
  if (shape_.size() == 1) return shape_[0];
  std::size_t c = 1;
  for (std::size_t i = 1; i < shape_.size(); ++i) c *= shape_[i];
  return c;
}

double Tensor::item() const {
  if (values_.size() != 1) {
    fail(ErrorKind::Invalid,
         "item() on tensor of shape " + shape_string(shape_));
  }
  return values_[0];
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

void ParamStore::set(const std::string& name, Tensor value) {
  params_[name] = std::move(value);
}

bool ParamStore::contains(const std::string& name) const {
  return params_.count(name) != 0;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) fail(ErrorKind::Invalid, "unknown parameter " + name);
  return it->second;
}

std::size_t ParamStore::flat_size() const {
  std::size_t n = 0;
  for (const auto& [_, t] : params_) n += t.size();
  return n;
}

std::vector<double> ParamStore::flat() const {
  std::vector<double> out;
  out.reserve(flat_size());
  for (const auto& [_, t] : params_) {
    out.insert(out.end(), t.values().begin(), t.values().end());
  }
  return out;
}

void ParamStore::assign_flat(std::span<const double> flat) {
  if (flat.size() != flat_size()) {
    fail(ErrorKind::Invalid, "flat parameter vector has " +
                                 std::to_string(flat.size()) + " entries, expected " +
                                 std::to_string(flat_size()));
  }
  std::size_t off = 0;
  for (auto& [_, t] : params_) {
    std::vector<double> v(flat.begin() + off, flat.begin() + off + t.size());
    off += t.size();
    t = Tensor(t.shape(), std::move(v));
  }
}

std::vector<double> GradRecord::flat() const {
  std::vector<double> out;
  for (const auto& [_, t] : grads) {
    out.insert(out.end(), t.values().begin(), t.values().end());
  }
  return out;
}

}  // namespace hltv
