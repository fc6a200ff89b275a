// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hltv/tensor.hpp"

namespace hltv {

class Tape;

// Handle to a node on a Tape. Only meaningful for the tape that issued it.
class Var {
 public:
  Var() = default;
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  explicit Var(std::size_t id) : id_(id) {}
  std::size_t id_ = static_cast<std::size_t>(-1);
};

// Reverse-mode evaluation over a closed set of matrix primitives. Every value
// is viewed as a rows x cols matrix. Binary elementwise ops broadcast along any
// dimension of size 1.
//
// A tape is single-use per forward evaluation; backward() may be called any
// number of times (for different scalar outputs) and is const.
class Tape {
 public:
  Tape();
  explicit Tape(const ParamStore& params);
  explicit Tape(ParamStore&&) = delete;  // the store must outlive the tape

  Var param(const std::string& name);
  Var constant(Tensor value);
  Var constant(double v) { return constant(Tensor::scalar(v)); }

  const Tensor& value(Var v) const;
  std::size_t node_count() const { return nodes_.size(); }

  // Affine and linear maps.
  Var matmul(Var a, Var b);
  Var affine(Var x, Var weight, Var bias);  // x * W + b (b broadcast by row)
  Var transpose(Var a);

  // Elementwise binary ops with broadcasting.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);

  // Elementwise unary ops.
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  Var relu(Var a);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var softplus(Var a);
  Var sqrt(Var a);
  Var square(Var a);
  Var pow(Var a, double p);  // requires a >= 0

  Var softmax_rows(Var a);

  // Reductions.
  Var sum(Var a);       // -> 1x1
  Var mean(Var a);      // -> 1x1
  Var sum_cols(Var a);  // reduce over rows -> 1 x cols
  Var sum_rows(Var a);  // reduce over cols -> rows x 1

  // Structural.
  Var concat_cols(const std::vector<Var>& parts);
  Var slice_cols(Var a, std::size_t start, std::size_t len);
  Var reshape(Var a, std::size_t rows, std::size_t cols);
  Var flatten(Var a);
  Var gather_rows(Var table, const std::vector<std::size_t>& rows);

  // Row-wise products (scaled dot product building blocks).
  Var row_dot(Var a, Var b);  // -> rows x 1
  // Row-wise cosine similarity clamped to [-1, 1]. Rows where either side has
  // zero norm yield 0 with zero gradient; their count is reported through
  // zero_rows when non-null.
  Var row_cosine(Var a, Var b, std::size_t* zero_rows = nullptr);

  // Gradients of a 1x1 node with respect to every parameter of the bound
  // ParamStore (zeros for parameters the graph never touched).
  GradRecord backward(Var loss) const;

 private:
  using GradBuf = std::vector<std::vector<double>>;
  using BackFn = std::function<void(const Tape&, const std::vector<double>&,
                                    GradBuf&)>;
  struct Node {
    Tensor value;
    bool needs_grad = false;
    std::string param_name;
    std::vector<std::size_t> parents;
    BackFn back;
  };

  Var push(Tensor value, std::vector<std::size_t> parents, BackFn back);
  const Node& node(Var v) const;
  bool needs(std::size_t id) const { return nodes_[id].needs_grad; }
  static std::vector<double>& acc(GradBuf& g, const Tape& t, std::size_t id);

  Var unary(Var a, const char* op, double (*f)(double),
            double (*df)(double));
  Var binary(Var a, Var b, int kind, const char* op);

  const ParamStore* params_ = nullptr;
  std::vector<Node> nodes_;
  std::map<std::string, std::size_t> param_nodes_;
};

// A block graph builds a scalar (1x1) output on the given tape, reading its
// parameters through Tape::param.
using BlockGraph = std::function<Var(Tape&)>;

Tensor forward(const BlockGraph& graph, const ParamStore& params);
GradRecord backward(const BlockGraph& graph, const ParamStore& params);

struct FiniteDiffReport {
  std::map<std::string, double> max_rel_error;
  double worst = 0.0;
  std::string worst_param;
  std::size_t coords_checked = 0;
  bool pass = false;
};

// Central differences per coordinate; relative error uses max(1, |analytic|)
// as the denominator. max_coords_per_param = 0 checks every coordinate,
// otherwise an evenly strided subset.
FiniteDiffReport finite_diff_check(const BlockGraph& graph,
                                   const ParamStore& params, double h,
                                   double tol,
                                   std::size_t max_coords_per_param = 0);

}  // namespace hltv
