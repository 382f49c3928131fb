#include "peec/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace peec {

static std::string shape_str(int r, int c) {
  return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
}

int Tape::fresh(int rows, int cols) {
  Node n;
  n.rows = rows;
  n.cols = cols;
  n.val.assign(static_cast<size_t>(rows) * cols, 0.0);
  n.grad.assign(static_cast<size_t>(rows) * cols, 0.0);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Tape::Node& Tape::at(Tensor t) { return nodes_.at(t.node); }
const Tape::Node& Tape::at(Tensor t) const { return nodes_.at(t.node); }

void Tape::check_same_shape(const char* op, Tensor a, Tensor b) const {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.rows, a.cols) + " vs " +
                     shape_str(b.rows, b.cols));
  }
}

void Tape::check_finite(int node, const char* op) const {
#ifndef NDEBUG
  for (double v : nodes_[node].val) {
    if (!std::isfinite(v)) throw std::runtime_error(std::string(op) + ": non-finite value");
  }
#else
  (void)node;
  (void)op;
#endif
}

Tensor Tape::input(int rows, int cols, const double* data) {
  int id = fresh(rows, cols);
  std::copy(data, data + static_cast<size_t>(rows) * cols, nodes_[id].val.begin());
  check_finite(id, "input");
  return {id, rows, cols};
}

Tensor Tape::input(int rows, int cols, const std::vector<double>& data) {
  if (static_cast<size_t>(rows) * cols != data.size()) {
    throw ShapeError("input: " + shape_str(rows, cols) + " needs " +
                     std::to_string(static_cast<size_t>(rows) * cols) + " values, got " +
                     std::to_string(data.size()));
  }
  return input(rows, cols, data.data());
}

Tensor Tape::zeros(int rows, int cols) {
  int id = fresh(rows, cols);
  return {id, rows, cols};
}

Tensor Tape::fill(int rows, int cols, double v) {
  int id = fresh(rows, cols);
  std::fill(nodes_[id].val.begin(), nodes_[id].val.end(), v);
  return {id, rows, cols};
}

Tensor Tape::add(Tensor a, Tensor b) {
  bool bias = b.rows == 1 && a.rows > 1 && a.cols == b.cols;
  if (!bias) check_same_shape("add", a, b);
  int id = fresh(a.rows, a.cols);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  if (bias) {
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j) out[i * a.cols + j] = av[i * a.cols + j] + bv[j];
  } else {
    for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  }
  nodes_[id].back = [this, id, an = a.node, bn = b.node, bias, rows = a.rows, cols = a.cols]() {
    const auto& g = nodes_[id].grad;
    auto& ga = nodes_[an].grad;
    auto& gb = nodes_[bn].grad;
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    if (bias) {
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) gb[j] += g[i * cols + j];
    } else {
      for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
    }
  };
  check_finite(id, "add");
  return {id, a.rows, a.cols};
}

Tensor Tape::sub(Tensor a, Tensor b) {
  check_same_shape("sub", a, b);
  int id = fresh(a.rows, a.cols);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  nodes_[id].back = [this, id, an = a.node, bn = b.node]() {
    const auto& g = nodes_[id].grad;
    auto& ga = nodes_[an].grad;
    auto& gb = nodes_[bn].grad;
    for (size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] -= g[i];
    }
  };
  check_finite(id, "sub");
  return {id, a.rows, a.cols};
}

Tensor Tape::mul(Tensor a, Tensor b) {
  check_same_shape("mul", a, b);
  int id = fresh(a.rows, a.cols);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  nodes_[id].back = [this, id, an = a.node, bn = b.node]() {
    const auto& g = nodes_[id].grad;
    const auto& av = nodes_[an].val;
    const auto& bv = nodes_[bn].val;
    auto& ga = nodes_[an].grad;
    auto& gb = nodes_[bn].grad;
    for (size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * bv[i];
      gb[i] += g[i] * av[i];
    }
  };
  check_finite(id, "mul");
  return {id, a.rows, a.cols};
}

Tensor Tape::div(Tensor a, Tensor b) {
  check_same_shape("div", a, b);
  int id = fresh(a.rows, a.cols);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] / bv[i];
  nodes_[id].back = [this, id, an = a.node, bn = b.node]() {
    const auto& g = nodes_[id].grad;
    const auto& av = nodes_[an].val;
    const auto& bv = nodes_[bn].val;
    auto& ga = nodes_[an].grad;
    auto& gb = nodes_[bn].grad;
    for (size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] / bv[i];
      gb[i] -= g[i] * av[i] / (bv[i] * bv[i]);
    }
  };
  check_finite(id, "div");
  return {id, a.rows, a.cols};
}

Tensor Tape::scale(Tensor a, double s) {
  int id = fresh(a.rows, a.cols);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = s * av[i];
  nodes_[id].back = [this, id, an = a.node, s]() {
    const auto& g = nodes_[id].grad;
    auto& ga = nodes_[an].grad;
    for (size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  };
  check_finite(id, "scale");
  return {id, a.rows, a.cols};
}

Tensor Tape::add_scalar(Tensor a, double s) {
  int id = fresh(a.rows, a.cols);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] + s;
  nodes_[id].back = [this, id, an = a.node]() {
    const auto& g = nodes_[id].grad;
    auto& ga = nodes_[an].grad;
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  };
  check_finite(id, "add_scalar");
  return {id, a.rows, a.cols};
}

Tensor Tape::matmul(Tensor a, Tensor b) {
  if (a.cols != b.rows) {
    throw ShapeError("matmul: inner dims differ " + shape_str(a.rows, a.cols) + " vs " +
                     shape_str(b.rows, b.cols));
  }
  int m = a.rows, k = a.cols, n = b.cols;
  int id = fresh(m, n);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      double s = av[i * k + p];
      if (s == 0.0) continue;
      const double* brow = &bv[p * n];
      double* orow = &out[i * n];
      for (int j = 0; j < n; ++j) orow[j] += s * brow[j];
    }
  }
  nodes_[id].back = [this, id, an = a.node, bn = b.node, m, k, n]() {
    const auto& g = nodes_[id].grad;
    const auto& av = nodes_[an].val;
    const auto& bv = nodes_[bn].val;
    auto& ga = nodes_[an].grad;
    auto& gb = nodes_[bn].grad;
    for (int i = 0; i < m; ++i) {
      const double* grow = &g[i * n];
      for (int p = 0; p < k; ++p) {
        const double* brow = &bv[p * n];
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += grow[j] * brow[j];
        ga[i * k + p] += s;
      }
    }
    for (int i = 0; i < m; ++i) {
      const double* grow = &g[i * n];
      for (int p = 0; p < k; ++p) {
        double s = av[i * k + p];
        if (s == 0.0) continue;
        double* gbrow = &gb[p * n];
        for (int j = 0; j < n; ++j) gbrow[j] += s * grow[j];
      }
    }
  };
  check_finite(id, "matmul");
  return {id, m, n};
}

namespace {
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

Tensor Tape::tanh(Tensor x) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xv[i]);
  nodes_[id].back = [this, id, xn = x.node]() {
    const auto& g = nodes_[id].grad;
    const auto& y = nodes_[id].val;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
  };
  check_finite(id, "tanh");
  return {id, x.rows, x.cols};
}

Tensor Tape::logistic(Tensor x) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = sigmoid(xv[i]);
  nodes_[id].back = [this, id, xn = x.node]() {
    const auto& g = nodes_[id].grad;
    const auto& y = nodes_[id].val;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
  };
  check_finite(id, "logistic");
  return {id, x.rows, x.cols};
}

Tensor Tape::relu(Tensor x) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
  nodes_[id].back = [this, id, xn = x.node]() {
    const auto& g = nodes_[id].grad;
    const auto& xv = nodes_[xn].val;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < g.size(); ++i) gx[i] += xv[i] > 0.0 ? g[i] : 0.0;
  };
  check_finite(id, "relu");
  return {id, x.rows, x.cols};
}

Tensor Tape::softplus(Tensor x) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (size_t i = 0; i < out.size(); ++i) {
    double v = xv[i];
    out[i] = v > 30.0 ? v : std::log1p(std::exp(v));
  }
  nodes_[id].back = [this, id, xn = x.node]() {
    const auto& g = nodes_[id].grad;
    const auto& xv = nodes_[xn].val;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * sigmoid(xv[i]);
  };
  check_finite(id, "softplus");
  return {id, x.rows, x.cols};
}

Tensor Tape::exp(Tensor x) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::exp(xv[i]);
  nodes_[id].back = [this, id, xn = x.node]() {
    const auto& g = nodes_[id].grad;
    const auto& y = nodes_[id].val;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i];
  };
  check_finite(id, "exp");
  return {id, x.rows, x.cols};
}

Tensor Tape::log(Tensor x) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::log(xv[i]);
  nodes_[id].back = [this, id, xn = x.node]() {
    const auto& g = nodes_[id].grad;
    const auto& xv = nodes_[xn].val;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] / xv[i];
  };
  check_finite(id, "log");
  return {id, x.rows, x.cols};
}

Tensor Tape::sqrt(Tensor x) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(xv[i]);
  nodes_[id].back = [this, id, xn = x.node]() {
    const auto& g = nodes_[id].grad;
    const auto& y = nodes_[id].val;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] / (2.0 * std::max(y[i], 1e-12));
  };
  check_finite(id, "sqrt");
  return {id, x.rows, x.cols};
}

Tensor Tape::square(Tensor x) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * xv[i];
  nodes_[id].back = [this, id, xn = x.node]() {
    const auto& g = nodes_[id].grad;
    const auto& xv = nodes_[xn].val;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * 2.0 * xv[i];
  };
  check_finite(id, "square");
  return {id, x.rows, x.cols};
}

Tensor Tape::neg(Tensor x) { return scale(x, -1.0); }

Tensor Tape::concat(Tensor a, Tensor b) {
  if (a.rows != b.rows) {
    throw ShapeError("concat: row mismatch " + shape_str(a.rows, a.cols) + " vs " +
                     shape_str(b.rows, b.cols));
  }
  int rows = a.rows, ca = a.cols, cb = b.cols, cols = ca + cb;
  int id = fresh(rows, cols);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  for (int i = 0; i < rows; ++i) {
    std::copy(&av[i * ca], &av[i * ca] + ca, &out[i * cols]);
    std::copy(&bv[i * cb], &bv[i * cb] + cb, &out[i * cols + ca]);
  }
  nodes_[id].back = [this, id, an = a.node, bn = b.node, rows, ca, cb, cols]() {
    const auto& g = nodes_[id].grad;
    auto& ga = nodes_[an].grad;
    auto& gb = nodes_[bn].grad;
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < ca; ++j) ga[i * ca + j] += g[i * cols + j];
      for (int j = 0; j < cb; ++j) gb[i * cb + j] += g[i * cols + ca + j];
    }
  };
  check_finite(id, "concat");
  return {id, rows, cols};
}

Tensor Tape::slice(Tensor x, int c0, int c1) {
  if (c0 < 0 || c1 > x.cols || c0 >= c1) {
    throw ShapeError("slice: [" + std::to_string(c0) + ", " + std::to_string(c1) +
                     ") out of range for " + shape_str(x.rows, x.cols));
  }
  int rows = x.rows, cols = c1 - c0, xc = x.cols;
  int id = fresh(rows, cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (int i = 0; i < rows; ++i)
    std::copy(&xv[i * xc + c0], &xv[i * xc + c1], &out[i * cols]);
  nodes_[id].back = [this, id, xn = x.node, rows, cols, xc, c0]() {
    const auto& g = nodes_[id].grad;
    auto& gx = nodes_[xn].grad;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) gx[i * xc + c0 + j] += g[i * cols + j];
  };
  check_finite(id, "slice");
  return {id, rows, cols};
}

Tensor Tape::sum(Tensor x) {
  int id = fresh(1, 1);
  const auto& xv = at(x).val;
  double s = 0.0;
  for (double v : xv) s += v;
  nodes_[id].val[0] = s;
  nodes_[id].back = [this, id, xn = x.node]() {
    double g = nodes_[id].grad[0];
    auto& gx = nodes_[xn].grad;
    for (auto& v : gx) v += g;
  };
  check_finite(id, "sum");
  return {id, 1, 1};
}

Tensor Tape::mean(Tensor x) {
  int id = fresh(1, 1);
  const auto& xv = at(x).val;
  double s = 0.0;
  for (double v : xv) s += v;
  double n = static_cast<double>(xv.size());
  nodes_[id].val[0] = s / n;
  nodes_[id].back = [this, id, xn = x.node, n]() {
    double g = nodes_[id].grad[0] / n;
    auto& gx = nodes_[xn].grad;
    for (auto& v : gx) v += g;
  };
  check_finite(id, "mean");
  return {id, 1, 1};
}

Tensor Tape::row_sum(Tensor x) {
  int id = fresh(x.rows, 1);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (int i = 0; i < x.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < x.cols; ++j) s += xv[i * x.cols + j];
    out[i] = s;
  }
  nodes_[id].back = [this, id, xn = x.node, rows = x.rows, cols = x.cols]() {
    const auto& g = nodes_[id].grad;
    auto& gx = nodes_[xn].grad;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) gx[i * cols + j] += g[i];
  };
  check_finite(id, "row_sum");
  return {id, x.rows, 1};
}

Tensor Tape::minimum(Tensor a, Tensor b) {
  check_same_shape("minimum", a, b);
  int id = fresh(a.rows, a.cols);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] <= bv[i] ? av[i] : bv[i];
  nodes_[id].back = [this, id, an = a.node, bn = b.node]() {
    const auto& g = nodes_[id].grad;
    const auto& av = nodes_[an].val;
    const auto& bv = nodes_[bn].val;
    auto& ga = nodes_[an].grad;
    auto& gb = nodes_[bn].grad;
    for (size_t i = 0; i < g.size(); ++i) {
      if (av[i] <= bv[i])
        ga[i] += g[i];
      else
        gb[i] += g[i];
    }
  };
  check_finite(id, "minimum");
  return {id, a.rows, a.cols};
}

Tensor Tape::maximum(Tensor a, Tensor b) {
  check_same_shape("maximum", a, b);
  int id = fresh(a.rows, a.cols);
  auto& out = nodes_[id].val;
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] >= bv[i] ? av[i] : bv[i];
  nodes_[id].back = [this, id, an = a.node, bn = b.node]() {
    const auto& g = nodes_[id].grad;
    const auto& av = nodes_[an].val;
    const auto& bv = nodes_[bn].val;
    auto& ga = nodes_[an].grad;
    auto& gb = nodes_[bn].grad;
    for (size_t i = 0; i < g.size(); ++i) {
      if (av[i] >= bv[i])
        ga[i] += g[i];
      else
        gb[i] += g[i];
    }
  };
  check_finite(id, "maximum");
  return {id, a.rows, a.cols};
}

Tensor Tape::clamp(Tensor x, double lo, double hi) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(xv[i], lo, hi);
  nodes_[id].back = [this, id, xn = x.node, lo, hi]() {
    const auto& g = nodes_[id].grad;
    const auto& xv = nodes_[xn].val;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < g.size(); ++i) {
      if (xv[i] >= lo && xv[i] <= hi) gx[i] += g[i];
    }
  };
  check_finite(id, "clamp");
  return {id, x.rows, x.cols};
}

Tensor Tape::log_softmax(Tensor x) {
  int id = fresh(x.rows, x.cols);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (int i = 0; i < x.rows; ++i) {
    const double* row = &xv[i * x.cols];
    double mx = row[0];
    for (int j = 1; j < x.cols; ++j) mx = std::max(mx, row[j]);
    double se = 0.0;
    for (int j = 0; j < x.cols; ++j) se += std::exp(row[j] - mx);
    double lse = mx + std::log(se);
    for (int j = 0; j < x.cols; ++j) out[i * x.cols + j] = row[j] - lse;
  }
  nodes_[id].back = [this, id, xn = x.node, rows = x.rows, cols = x.cols]() {
    const auto& g = nodes_[id].grad;
    const auto& y = nodes_[id].val;
    auto& gx = nodes_[xn].grad;
    for (int i = 0; i < rows; ++i) {
      double gsum = 0.0;
      for (int j = 0; j < cols; ++j) gsum += g[i * cols + j];
      for (int j = 0; j < cols; ++j)
        gx[i * cols + j] += g[i * cols + j] - std::exp(y[i * cols + j]) * gsum;
    }
  };
  check_finite(id, "log_softmax");
  return {id, x.rows, x.cols};
}

Tensor Tape::take_per_row(Tensor x, const std::vector<int>& idx) {
  if (static_cast<int>(idx.size()) != x.rows) {
    throw ShapeError("take_per_row: " + std::to_string(idx.size()) + " indices for " +
                     shape_str(x.rows, x.cols));
  }
  for (int j : idx) {
    if (j < 0 || j >= x.cols) throw ShapeError("take_per_row: index out of range");
  }
  int id = fresh(x.rows, 1);
  auto& out = nodes_[id].val;
  const auto& xv = at(x).val;
  for (int i = 0; i < x.rows; ++i) out[i] = xv[i * x.cols + idx[i]];
  nodes_[id].back = [this, id, xn = x.node, idx, cols = x.cols]() {
    const auto& g = nodes_[id].grad;
    auto& gx = nodes_[xn].grad;
    for (size_t i = 0; i < idx.size(); ++i) gx[i * cols + idx[i]] += g[i];
  };
  check_finite(id, "take_per_row");
  return {id, x.rows, 1};
}

void Tape::backward(Tensor scalar_loss) {
  if (scalar_loss.rows != 1 || scalar_loss.cols != 1) {
    throw ShapeError("backward: loss must be [1x1], got " +
                     shape_str(scalar_loss.rows, scalar_loss.cols));
  }
  nodes_.at(scalar_loss.node).grad[0] = 1.0;
  for (int i = scalar_loss.node; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back();
  }
}

const std::vector<double>& Tape::val(Tensor t) const { return at(t).val; }
const std::vector<double>& Tape::grad(Tensor t) const { return at(t).grad; }

double Tape::scalar(Tensor t) const {
  if (t.rows != 1 || t.cols != 1) {
    throw ShapeError("scalar: tensor is " + shape_str(t.rows, t.cols));
  }
  return at(t).val[0];
}

void Tape::clear() { nodes_.clear(); }

}  // namespace peec
