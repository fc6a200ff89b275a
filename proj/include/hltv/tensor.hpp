// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hltv {

// Dense row-major float64 array. Construction rejects non-finite values and
// shapes whose product disagrees with the value count.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor zeros(std::size_t rows, std::size_t cols);
  static Tensor filled(std::size_t rows, std::size_t cols, double v);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);
  static Tensor scalar(double v);

  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  // Matrix view: rank 0 is 1x1, rank 1 is 1xn, rank >= 2 folds trailing dims.
  std::size_t rows() const;
  std::size_t cols() const;

  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }
  double operator[](std::size_t i) const { return values_[i]; }
  double item() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

// Named parameters; iteration and the flat view follow name order.
class ParamStore {
 public:
  void set(const std::string& name, Tensor value);
  bool contains(const std::string& name) const;
  const Tensor& at(const std::string& name) const;
  const std::map<std::string, Tensor>& entries() const { return params_; }
  std::size_t size() const { return params_.size(); }

  std::size_t flat_size() const;
  std::vector<double> flat() const;
  // Replaces all values from a flat vector laid out as flat().
  void assign_flat(std::span<const double> flat);

  friend bool operator==(const ParamStore&, const ParamStore&) = default;

 private:
  std::map<std::string, Tensor> params_;
};

struct GradRecord {
  double loss = 0.0;
  std::map<std::string, Tensor> grads;

  std::vector<double> flat() const;
};

}  // namespace hltv
