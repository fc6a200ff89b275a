// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "hltv/error.hpp"

namespace hltv {

namespace {

enum BinaryKind { kAdd = 0, kSub = 1, kMul = 2, kDiv = 3 };

[[noreturn]] void shape_error(const char* op, const Tensor& a,
                              const Tensor* b = nullptr,
                              const std::string& extra = "") {
  std::string msg = std::string(op) + ": incompatible shapes " +
                    shape_string(a.shape());
  if (b) msg += " and " + shape_string(b->shape());
  if (!extra.empty()) msg += " (" + extra + ")";
  fail(ErrorKind::Invalid, msg);
}

Tensor mat(std::size_t r, std::size_t c, std::vector<double> v) {
  return Tensor({r, c}, std::move(v));
}

double sigmoid_fn(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus_fn(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

}  // namespace

Tape::Tape() = default;

Tape::Tape(const ParamStore& params) : params_(&params) {}

Var Tape::push(Tensor value, std::vector<std::size_t> parents, BackFn back) {
  Node n;
  n.value = std::move(value);
  for (std::size_t p : parents) n.needs_grad = n.needs_grad || nodes_[p].needs_grad;
  n.parents = std::move(parents);
  if (n.needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var(nodes_.size() - 1);
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id_ >= nodes_.size()) fail(ErrorKind::Invalid, "stale or foreign Var");
  return nodes_[v.id_];
}

const Tensor& Tape::value(Var v) const { return node(v).value; }

std::vector<double>& Tape::acc(GradBuf& g, const Tape& t, std::size_t id) {
  auto& slot = g[id];
  if (slot.empty()) slot.assign(t.nodes_[id].value.size(), 0.0);
  return slot;
}

Var Tape::param(const std::string& name) {
  if (!params_) fail(ErrorKind::Invalid, "tape has no parameter store");
  auto it = param_nodes_.find(name);
  if (it != param_nodes_.end()) return Var(it->second);
  Node n;
  n.value = params_->at(name);
  n.needs_grad = true;
  n.param_name = name;
  nodes_.push_back(std::move(n));
  param_nodes_[name] = nodes_.size() - 1;
  return Var(nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(nodes_.size() - 1);
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  const std::size_t n = A.rows(), k = A.cols(), m = B.cols();
  if (B.rows() != k) shape_error("matmul", A, &B);
  std::vector<double> out(n * m, 0.0);
  const auto& av = A.values();
  const auto& bv = B.values();
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = out.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double x = av[i * k + p];
      if (x == 0.0) continue;
      const double* brow = bv.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += x * brow[j];
    }
  }
  const std::size_t ia = a.id_, ib = b.id_;
  return push(mat(n, m, std::move(out)), {ia, ib},
              [ia, ib, n, k, m](const Tape& t, const std::vector<double>& go,
                                GradBuf& g) {
                const auto& av = t.nodes_[ia].value.values();
                const auto& bv = t.nodes_[ib].value.values();
                if (t.needs(ia)) {
                  auto& ga = acc(g, t, ia);
                  for (std::size_t i = 0; i < n; ++i) {
                    const double* grow = go.data() + i * m;
                    for (std::size_t p = 0; p < k; ++p) {
                      const double* brow = bv.data() + p * m;
                      double s = 0.0;
                      for (std::size_t j = 0; j < m; ++j) s += grow[j] * brow[j];
                      ga[i * k + p] += s;
                    }
                  }
                }
                if (t.needs(ib)) {
                  auto& gb = acc(g, t, ib);
                  for (std::size_t i = 0; i < n; ++i) {
                    const double* grow = go.data() + i * m;
                    for (std::size_t p = 0; p < k; ++p) {
                      const double x = av[i * k + p];
                      if (x == 0.0) continue;
                      double* gbrow = gb.data() + p * m;
                      for (std::size_t j = 0; j < m; ++j) gbrow[j] += x * grow[j];
                    }
                  }
                }
              });
}

Var Tape::affine(Var x, Var weight, Var bias) {
  return add(matmul(x, weight), bias);
}

Var Tape::transpose(Var a) {
  const Tensor& A = value(a);
  const std::size_t r = A.rows(), c = A.cols();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = A.values()[i * c + j];
  const std::size_t ia = a.id_;
  return push(mat(c, r, std::move(out)), {ia},
              [ia, r, c](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                auto& ga = acc(g, t, ia);
                for (std::size_t i = 0; i < r; ++i)
                  for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += go[j * r + i];
              });
}

Var Tape::binary(Var a, Var b, int kind, const char* op) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  const std::size_t ra = A.rows(), ca = A.cols(), rb = B.rows(), cb = B.cols();
  auto bdim = [&](std::size_t x, std::size_t y) -> std::size_t {
    if (x == y) return x;
    if (x == 1) return y;
    if (y == 1) return x;
    shape_error(op, A, &B);
  };
  const std::size_t r = bdim(ra, rb), c = bdim(ca, cb);
  std::vector<double> out(r * c);
  const auto& av = A.values();
  const auto& bv = B.values();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double x = av[(ra == 1 ? 0 : i) * ca + (ca == 1 ? 0 : j)];
      const double y = bv[(rb == 1 ? 0 : i) * cb + (cb == 1 ? 0 : j)];
      double v = 0.0;
      switch (kind) {
        case kAdd: v = x + y; break;
        case kSub: v = x - y; break;
        case kMul: v = x * y; break;
        default:
          if (y == 0.0) fail(ErrorKind::Numeric, std::string(op) + ": division by zero");
          v = x / y;
      }
      out[i * c + j] = v;
    }
  }
  const std::size_t ia = a.id_, ib = b.id_;
  return push(mat(r, c, std::move(out)), {ia, ib},
              [=](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                const auto& av = t.nodes_[ia].value.values();
                const auto& bv = t.nodes_[ib].value.values();
                std::vector<double>* ga = t.needs(ia) ? &acc(g, t, ia) : nullptr;
                std::vector<double>* gb = t.needs(ib) ? &acc(g, t, ib) : nullptr;
                for (std::size_t i = 0; i < r; ++i) {
                  for (std::size_t j = 0; j < c; ++j) {
                    const std::size_t xa = (ra == 1 ? 0 : i) * ca + (ca == 1 ? 0 : j);
                    const std::size_t xb = (rb == 1 ? 0 : i) * cb + (cb == 1 ? 0 : j);
                    const double gv = go[i * c + j];
                    const double x = av[xa], y = bv[xb];
                    double da = 0.0, db = 0.0;
                    switch (kind) {
                      case kAdd: da = 1.0; db = 1.0; break;
                      case kSub: da = 1.0; db = -1.0; break;
                      case kMul: da = y; db = x; break;
                      default: da = 1.0 / y; db = -x / (y * y);
                    }
                    if (ga) (*ga)[xa] += gv * da;
                    if (gb) (*gb)[xb] += gv * db;
                  }
                }
              });
}

Var Tape::add(Var a, Var b) { return binary(a, b, kAdd, "add"); }
Var Tape::sub(Var a, Var b) { return binary(a, b, kSub, "sub"); }
Var Tape::mul(Var a, Var b) { return binary(a, b, kMul, "mul"); }
Var Tape::div(Var a, Var b) { return binary(a, b, kDiv, "div"); }

Var Tape::unary(Var a, const char* op, double (*f)(double),
                double (*df)(double)) {
  const Tensor& A = value(a);
  std::vector<double> out(A.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = f(A.values()[i]);
    if (!std::isfinite(out[i])) {
      fail(ErrorKind::Numeric, std::string(op) + ": non-finite result for input " +
                                   std::to_string(A.values()[i]));
    }
  }
  const std::size_t ia = a.id_;
  const std::size_t r = A.rows(), c = A.cols();
  return push(mat(r, c, std::move(out)), {ia},
              [ia, df](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                const auto& x = t.nodes_[ia].value.values();
                auto& ga = acc(g, t, ia);
                for (std::size_t i = 0; i < go.size(); ++i) {
                  if (go[i] != 0.0) ga[i] += go[i] * df(x[i]);
                }
              });
}

Var Tape::scale(Var a, double s) {
  const Tensor& A = value(a);
  std::vector<double> out(A.values());
  for (double& v : out) v *= s;
  const std::size_t ia = a.id_;
  return push(mat(A.rows(), A.cols(), std::move(out)), {ia},
              [ia, s](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                auto& ga = acc(g, t, ia);
                for (std::size_t i = 0; i < go.size(); ++i) ga[i] += s * go[i];
              });
}

Var Tape::add_scalar(Var a, double s) {
  const Tensor& A = value(a);
  std::vector<double> out(A.values());
  for (double& v : out) v += s;
  const std::size_t ia = a.id_;
  return push(mat(A.rows(), A.cols(), std::move(out)), {ia},
              [ia](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                auto& ga = acc(g, t, ia);
                for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
              });
}

Var Tape::relu(Var a) {
  return unary(
      a, "relu", [](double x) { return x > 0 ? x : 0.0; },
      [](double x) { return x > 0 ? 1.0 : 0.0; });
}

Var Tape::sigmoid(Var a) {
  return unary(a, "sigmoid", sigmoid_fn, [](double x) {
    const double s = sigmoid_fn(x);
    return s * (1.0 - s);
  });
}

Var Tape::tanh(Var a) {
  return unary(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double x) {
        const double y = std::tanh(x);
        return 1.0 - y * y;
      });
}

Var Tape::exp(Var a) {
  return unary(
      a, "exp", [](double x) { return std::exp(x); },
      [](double x) { return std::exp(x); });
}

Var Tape::log(Var a) {
  for (double v : value(a).values()) {
    if (!(v > 0.0)) fail(ErrorKind::Numeric, "log: non-positive input " + std::to_string(v));
  }
  return unary(
      a, "log", [](double x) { return std::log(x); },
      [](double x) { return 1.0 / x; });
}

Var Tape::softplus(Var a) {
  return unary(a, "softplus", softplus_fn,
               [](double x) { return sigmoid_fn(x); });
}

Var Tape::sqrt(Var a) {
  for (double v : value(a).values()) {
    if (v < 0.0) fail(ErrorKind::Numeric, "sqrt: negative input " + std::to_string(v));
  }
  return unary(
      a, "sqrt", [](double x) { return std::sqrt(x); },
      [](double x) { return 0.5 / std::sqrt(x); });
}

Var Tape::square(Var a) {
  return unary(
      a, "square", [](double x) { return x * x; },
      [](double x) { return 2.0 * x; });
}

Var Tape::pow(Var a, double p) {
  const Tensor& A = value(a);
  std::vector<double> out(A.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = A.values()[i];
    if (x < 0.0) fail(ErrorKind::Numeric, "pow: negative base " + std::to_string(x));
    out[i] = std::pow(x, p);
  }
  const std::size_t ia = a.id_;
  return push(mat(A.rows(), A.cols(), std::move(out)), {ia},
              [ia, p](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                const auto& x = t.nodes_[ia].value.values();
                auto& ga = acc(g, t, ia);
                for (std::size_t i = 0; i < go.size(); ++i) {
                  if (go[i] == 0.0) continue;
                  double d;
                  if (p == 1.0) d = 1.0;
                  else if (x[i] == 0.0) d = p > 1.0 ? 0.0 : HUGE_VAL;
                  else d = p * std::pow(x[i], p - 1.0);
                  ga[i] += go[i] * d;
                }
              });
}

Var Tape::softmax_rows(Var a) {
  const Tensor& A = value(a);
  const std::size_t r = A.rows(), c = A.cols();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    const double* x = A.values().data() + i * c;
    double mx = x[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, x[j]);
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += (out[i * c + j] = std::exp(x[j] - mx));
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= s;
  }
  const std::size_t ia = a.id_;
  Var res = push(mat(r, c, std::move(out)), {ia}, nullptr);
  const std::size_t self = res.id_;
  if (nodes_[self].needs_grad) {
    nodes_[self].back = [ia, self, r, c](const Tape& t, const std::vector<double>& go,
                                         GradBuf& g) {
      const auto& y = t.nodes_[self].value.values();
      auto& ga = acc(g, t, ia);
      for (std::size_t i = 0; i < r; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += go[i * c + j] * y[i * c + j];
        for (std::size_t j = 0; j < c; ++j)
          ga[i * c + j] += y[i * c + j] * (go[i * c + j] - dot);
      }
    };
  }
  return res;
}

Var Tape::sum(Var a) {
  const Tensor& A = value(a);
  double s = 0.0;
  for (double v : A.values()) s += v;
  const std::size_t ia = a.id_;
  return push(Tensor::scalar(s), {ia},
              [ia](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                auto& ga = acc(g, t, ia);
                for (double& v : ga) v += go[0];
              });
}

Var Tape::mean(Var a) {
  const std::size_t n = value(a).size();
  if (n == 0) fail(ErrorKind::Invalid, "mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var Tape::sum_cols(Var a) {
  const Tensor& A = value(a);
  const std::size_t r = A.rows(), c = A.cols();
  std::vector<double> out(c, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j] += A.values()[i * c + j];
  const std::size_t ia = a.id_;
  return push(mat(1, c, std::move(out)), {ia},
              [ia, r, c](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                auto& ga = acc(g, t, ia);
                for (std::size_t i = 0; i < r; ++i)
                  for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += go[j];
              });
}

Var Tape::sum_rows(Var a) {
  const Tensor& A = value(a);
  const std::size_t r = A.rows(), c = A.cols();
  std::vector<double> out(r, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i] += A.values()[i * c + j];
  const std::size_t ia = a.id_;
  return push(mat(r, 1, std::move(out)), {ia},
              [ia, r, c](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                auto& ga = acc(g, t, ia);
                for (std::size_t i = 0; i < r; ++i)
                  for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += go[i];
              });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) fail(ErrorKind::Invalid, "concat_cols: no inputs");
  const std::size_t r = value(parts[0]).rows();
  std::size_t c = 0;
  std::vector<std::size_t> ids, widths;
  for (Var p : parts) {
    const Tensor& P = value(p);
    if (P.rows() != r) shape_error("concat_cols", value(parts[0]), &P);
    ids.push_back(p.id_);
    widths.push_back(P.cols());
    c += P.cols();
  }
  std::vector<double> out(r * c);
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& v = value(parts[k]).values();
    for (std::size_t i = 0; i < r; ++i)
      std::copy_n(v.data() + i * widths[k], widths[k], out.data() + i * c + off);
    off += widths[k];
  }
  return push(mat(r, c, std::move(out)), ids,
              [ids, widths, r, c](const Tape& t, const std::vector<double>& go,
                                  GradBuf& g) {
                std::size_t off = 0;
                for (std::size_t k = 0; k < ids.size(); ++k) {
                  if (t.needs(ids[k])) {
                    auto& gp = acc(g, t, ids[k]);
                    for (std::size_t i = 0; i < r; ++i)
                      for (std::size_t j = 0; j < widths[k]; ++j)
                        gp[i * widths[k] + j] += go[i * c + off + j];
                  }
                  off += widths[k];
                }
              });
}

Var Tape::slice_cols(Var a, std::size_t start, std::size_t len) {
  const Tensor& A = value(a);
  const std::size_t r = A.rows(), c = A.cols();
  if (start + len > c) {
    shape_error("slice_cols", A, nullptr,
                "columns [" + std::to_string(start) + "," + std::to_string(start + len) + ")");
  }
  std::vector<double> out(r * len);
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(A.values().data() + i * c + start, len, out.data() + i * len);
  const std::size_t ia = a.id_;
  return push(mat(r, len, std::move(out)), {ia},
              [ia, r, c, start, len](const Tape& t, const std::vector<double>& go,
                                     GradBuf& g) {
                auto& ga = acc(g, t, ia);
                for (std::size_t i = 0; i < r; ++i)
                  for (std::size_t j = 0; j < len; ++j)
                    ga[i * c + start + j] += go[i * len + j];
              });
}

Var Tape::reshape(Var a, std::size_t rows, std::size_t cols) {
  const Tensor& A = value(a);
  if (rows * cols != A.size()) {
    shape_error("reshape", A, nullptr,
                "target (" + std::to_string(rows) + "," + std::to_string(cols) + ")");
  }
  const std::size_t ia = a.id_;
  return push(mat(rows, cols, A.values()), {ia},
              [ia](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                auto& ga = acc(g, t, ia);
                for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
              });
}

Var Tape::flatten(Var a) { return reshape(a, 1, value(a).size()); }

Var Tape::gather_rows(Var table, const std::vector<std::size_t>& rows) {
  const Tensor& T = value(table);
  const std::size_t n = T.rows(), d = T.cols();
  std::vector<double> out(rows.size() * d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= n) {
      shape_error("gather_rows", T, nullptr, "row index " + std::to_string(rows[i]));
    }
    std::copy_n(T.values().data() + rows[i] * d, d, out.data() + i * d);
  }
  const std::size_t it = table.id_;
  return push(mat(rows.size(), d, std::move(out)), {it},
              [it, rows, d](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                auto& gt = acc(g, t, it);
                for (std::size_t i = 0; i < rows.size(); ++i)
                  for (std::size_t j = 0; j < d; ++j) gt[rows[i] * d + j] += go[i * d + j];
              });
}

Var Tape::row_dot(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.rows() != B.rows() || A.cols() != B.cols()) shape_error("row_dot", A, &B);
  const std::size_t r = A.rows(), c = A.cols();
  std::vector<double> out(r, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      out[i] += A.values()[i * c + j] * B.values()[i * c + j];
  const std::size_t ia = a.id_, ib = b.id_;
  return push(mat(r, 1, std::move(out)), {ia, ib},
              [ia, ib, r, c](const Tape& t, const std::vector<double>& go, GradBuf& g) {
                const auto& av = t.nodes_[ia].value.values();
                const auto& bv = t.nodes_[ib].value.values();
                if (t.needs(ia)) {
                  auto& ga = acc(g, t, ia);
                  for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += go[i] * bv[i * c + j];
                }
                if (t.needs(ib)) {
                  auto& gb = acc(g, t, ib);
                  for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < c; ++j) gb[i * c + j] += go[i] * av[i * c + j];
                }
              });
}

Var Tape::row_cosine(Var a, Var b, std::size_t* zero_rows) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.rows() != B.rows() || A.cols() != B.cols()) shape_error("row_cosine", A, &B);
  const std::size_t r = A.rows(), c = A.cols();
  std::vector<double> out(r, 0.0), na(r), nb(r);
  std::vector<char> valid(r, 0);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < r; ++i) {
    double dot = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double x = A.values()[i * c + j], y = B.values()[i * c + j];
      dot += x * y;
      sa += x * x;
      sb += y * y;
    }
    na[i] = std::sqrt(sa);
    nb[i] = std::sqrt(sb);
    if (na[i] == 0.0 || nb[i] == 0.0) {
      ++zeros;
      continue;
    }
    valid[i] = 1;
    out[i] = std::clamp(dot / (na[i] * nb[i]), -1.0, 1.0);
  }
  if (zero_rows) *zero_rows = zeros;
  const std::size_t ia = a.id_, ib = b.id_;
  Var res = push(mat(r, 1, out), {ia, ib}, nullptr);
  const std::size_t self = res.id_;
  if (nodes_[self].needs_grad) {
    nodes_[self].back = [ia, ib, self, r, c, na, nb, valid](
                            const Tape& t, const std::vector<double>& go, GradBuf& g) {
      const auto& av = t.nodes_[ia].value.values();
      const auto& bv = t.nodes_[ib].value.values();
      const auto& cs = t.nodes_[self].value.values();
      std::vector<double>* ga = t.needs(ia) ? &acc(g, t, ia) : nullptr;
      std::vector<double>* gb = t.needs(ib) ? &acc(g, t, ib) : nullptr;
      for (std::size_t i = 0; i < r; ++i) {
        if (!valid[i] || go[i] == 0.0) continue;
        const double inv = 1.0 / (na[i] * nb[i]);
        const double ka = cs[i] / (na[i] * na[i]);
        const double kb = cs[i] / (nb[i] * nb[i]);
        for (std::size_t j = 0; j < c; ++j) {
          const double x = av[i * c + j], y = bv[i * c + j];
          if (ga) (*ga)[i * c + j] += go[i] * (y * inv - ka * x);
          if (gb) (*gb)[i * c + j] += go[i] * (x * inv - kb * y);
        }
      }
    };
  }
  return res;
}

GradRecord Tape::backward(Var loss) const {
  const Node& ln = node(loss);
  if (ln.value.size() != 1) {
    fail(ErrorKind::Invalid,
         "backward: loss must be scalar, got shape " + shape_string(ln.value.shape()));
  }
  GradRecord rec;
  rec.loss = ln.value.item();
  GradBuf g(nodes_.size());
  g[loss.id_] = {1.0};
  for (std::size_t id = loss.id_ + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (g[id].empty() || !n.needs_grad || !n.back) continue;
    n.back(*this, g[id], g);
  }
  if (params_) {
    for (const auto& [name, t] : params_->entries()) {
      auto it = param_nodes_.find(name);
      if (it != param_nodes_.end() && !g[it->second].empty()) {
        rec.grads.emplace(name, Tensor(t.shape(), std::move(g[it->second])));
      } else {
        rec.grads.emplace(name, Tensor(t.shape(), std::vector<double>(t.size(), 0.0)));
      }
    }
  }
  return rec;
}

Tensor forward(const BlockGraph& graph, const ParamStore& params) {
  Tape tape(params);
  return tape.value(graph(tape));
}

GradRecord backward(const BlockGraph& graph, const ParamStore& params) {
  Tape tape(params);
  const Var out = graph(tape);
  return tape.backward(out);
}

FiniteDiffReport finite_diff_check(const BlockGraph& graph, const ParamStore& params,
                                   double h, double tol,
                                   std::size_t max_coords_per_param) {
  if (!(h > 0.0 && h <= 1e-3)) fail(ErrorKind::Invalid, "finite_diff_check: h must be in (0, 1e-3]");
  const GradRecord analytic = backward(graph, params);
  FiniteDiffReport rep;
  ParamStore probe = params;
  for (const auto& [name, t] : params.entries()) {
    const auto& ga = analytic.grads.at(name).values();
    const std::size_t n = t.size();
    std::size_t stride = 1;
    if (max_coords_per_param > 0 && n > max_coords_per_param) {
      stride = (n + max_coords_per_param - 1) / max_coords_per_param;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; i += stride) {
      std::vector<double> v = t.values();
      const double x0 = v[i];
      v[i] = x0 + h;
      probe.set(name, Tensor(t.shape(), v));
      const double fp = forward(graph, probe).item();
      v[i] = x0 - h;
      probe.set(name, Tensor(t.shape(), v));
      const double fm = forward(graph, probe).item();
      const double num = (fp - fm) / (2.0 * h);
      const double rel = std::abs(ga[i] - num) / std::max(1.0, std::abs(ga[i]));
      worst = std::max(worst, rel);
      ++rep.coords_checked;
    }
    probe.set(name, t);
    rep.max_rel_error[name] = worst;
    if (worst >= rep.worst) {
      rep.worst = worst;
      rep.worst_param = name;
    }
  }
  rep.pass = rep.worst <= tol;
  return rep;
}

}  // namespace hltv
