#include "peec/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace peec {

int ParamStore::add(const std::string& name, int rows, int cols) {
  if (find(name) >= 0) throw std::invalid_argument("ParamStore: duplicate block " + name);
  ParamBlock b;
  b.name = name;
  b.rows = rows;
  b.cols = cols;
  b.value.assign(static_cast<size_t>(rows) * cols, 0.0);
  blocks_.push_back(std::move(b));
  return count() - 1;
}

int ParamStore::find(const std::string& name) const {
  for (int i = 0; i < count(); ++i) {
    if (blocks_[i].name == name) return i;
  }
  return -1;
}

size_t ParamStore::total_params() const {
  size_t n = 0;
  for (const auto& b : blocks_) n += b.value.size();
  return n;
}

std::vector<std::vector<double>> ParamStore::zero_grads() const {
  std::vector<std::vector<double>> g(blocks_.size());
  for (size_t i = 0; i < blocks_.size(); ++i) g[i].assign(blocks_[i].value.size(), 0.0);
  return g;
}

ParamLeaves::ParamLeaves(Tape& tape, const ParamStore& store) {
  leaves_.reserve(store.count());
  for (int i = 0; i < store.count(); ++i) {
    leaves_.push_back(tape.input(store[i].rows, store[i].cols, store[i].value));
  }
}

void ParamLeaves::accumulate_grads(const Tape& tape,
                                   std::vector<std::vector<double>>& grads) const {
  for (size_t i = 0; i < leaves_.size(); ++i) {
    const auto& g = tape.grad(leaves_[i]);
    auto& dst = grads.at(i);
    for (size_t j = 0; j < g.size(); ++j) dst[j] += g[j];
  }
}

void init_uniform_fanin(ParamBlock& block, int fan_in, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : block.value) v = rng.uniform(-bound, bound);
}

Dense Dense::create(ParamStore& store, const std::string& prefix, int in, int out, Rng& rng) {
  Dense d;
  d.in = in;
  d.out = out;
  d.W = store.add(prefix + ".W", in, out);
  d.b = store.add(prefix + ".b", 1, out);
  init_uniform_fanin(store[d.W], in, rng);
  return d;
}

Tensor Dense::forward(Tape& tape, const ParamLeaves& p, Tensor x) const {
  return tape.add(tape.matmul(x, p[W]), p[b]);
}

void Dense::infer(const ParamStore& store, const double* x, double* y) const {
  const auto& Wv = store[W].value;
  const auto& bv = store[b].value;
  for (int j = 0; j < out; ++j) y[j] = bv[j];
  for (int i = 0; i < in; ++i) {
    double s = x[i];
    if (s == 0.0) continue;
    const double* wrow = &Wv[static_cast<size_t>(i) * out];
    for (int j = 0; j < out; ++j) y[j] += s * wrow[j];
  }
}

Lstm Lstm::create(ParamStore& store, const std::string& prefix, int in, int hidden, Rng& rng) {
  Lstm l;
  l.in = in;
  l.hidden = hidden;
  l.Wx = store.add(prefix + ".Wx", in, 4 * hidden);
  l.Wh = store.add(prefix + ".Wh", hidden, 4 * hidden);
  l.b = store.add(prefix + ".b", 1, 4 * hidden);
  init_uniform_fanin(store[l.Wx], in, rng);
  init_uniform_fanin(store[l.Wh], hidden, rng);
  for (int j = hidden; j < 2 * hidden; ++j) store[l.b].value[j] = 1.0;
  return l;
}

std::pair<Tensor, Tensor> Lstm::step(Tape& tape, const ParamLeaves& p, Tensor x, Tensor h,
                                     Tensor c) const {
  Tensor z = tape.add(tape.add(tape.matmul(x, p[Wx]), tape.matmul(h, p[Wh])), p[b]);
  Tensor gi = tape.logistic(tape.slice(z, 0, hidden));
  Tensor gf = tape.logistic(tape.slice(z, hidden, 2 * hidden));
  Tensor gg = tape.tanh(tape.slice(z, 2 * hidden, 3 * hidden));
  Tensor go = tape.logistic(tape.slice(z, 3 * hidden, 4 * hidden));
  Tensor c_next = tape.add(tape.mul(gf, c), tape.mul(gi, gg));
  Tensor h_next = tape.mul(go, tape.tanh(c_next));
  return {h_next, c_next};
}

void Lstm::infer(const ParamStore& store, const double* x, std::vector<double>& h,
                 std::vector<double>& c) const {
  const auto& Wxv = store[Wx].value;
  const auto& Whv = store[Wh].value;
  const auto& bv = store[b].value;
  int n4 = 4 * hidden;
  std::vector<double> z(bv);
  for (int i = 0; i < in; ++i) {
    double s = x[i];
    if (s == 0.0) continue;
    const double* row = &Wxv[static_cast<size_t>(i) * n4];
    for (int j = 0; j < n4; ++j) z[j] += s * row[j];
  }
  for (int i = 0; i < hidden; ++i) {
    double s = h[i];
    if (s == 0.0) continue;
    const double* row = &Whv[static_cast<size_t>(i) * n4];
    for (int j = 0; j < n4; ++j) z[j] += s * row[j];
  }
  auto sigm = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  for (int j = 0; j < hidden; ++j) {
    double gi = sigm(z[j]);
    double gf = sigm(z[hidden + j]);
    double gg = std::tanh(z[2 * hidden + j]);
    double go = sigm(z[3 * hidden + j]);
    c[j] = gf * c[j] + gi * gg;
    h[j] = go * std::tanh(c[j]);
  }
}

RecurrentTrunk RecurrentTrunk::create(ParamStore& store, const std::string& prefix, int in,
                                      int hidden, Rng& rng) {
  RecurrentTrunk t;
  t.in = in;
  t.hidden = hidden;
  t.d1 = Dense::create(store, prefix + ".d1", in, hidden, rng);
  t.d2 = Dense::create(store, prefix + ".d2", hidden, hidden, rng);
  t.lstm = Lstm::create(store, prefix + ".lstm", hidden, hidden, rng);
  return t;
}

Tensor RecurrentTrunk::step(Tape& tape, const ParamLeaves& p, Tensor x, Tensor& h,
                            Tensor& c) const {
  Tensor y = tape.relu(d1.forward(tape, p, x));
  y = tape.relu(d2.forward(tape, p, y));
  auto [h2, c2] = lstm.step(tape, p, y, h, c);
  h = h2;
  c = c2;
  return h2;
}

void RecurrentTrunk::infer(const ParamStore& store, const double* x, std::vector<double>& h,
                           std::vector<double>& c, std::vector<double>& out) const {
  std::vector<double> y1(hidden), y2(hidden);
  d1.infer(store, x, y1.data());
  for (auto& v : y1) v = v > 0.0 ? v : 0.0;
  d2.infer(store, y1.data(), y2.data());
  for (auto& v : y2) v = v > 0.0 ? v : 0.0;
  lstm.infer(store, y2.data(), h, c);
  out = h;
}

std::vector<double> flatten(const ParamStore& store) {
  std::vector<double> theta;
  theta.reserve(store.total_params());
  for (int i = 0; i < store.count(); ++i) {
    theta.insert(theta.end(), store[i].value.begin(), store[i].value.end());
  }
  return theta;
}

void unflatten(ParamStore& store, const std::vector<double>& theta) {
  if (theta.size() != store.total_params()) {
    throw std::invalid_argument("unflatten: size mismatch");
  }
  size_t k = 0;
  for (int i = 0; i < store.count(); ++i) {
    for (auto& v : store[i].value) v = theta[k++];
  }
}

void Adam::init(const ParamStore& store) {
  t = 0;
  m = store.zero_grads();
  v = store.zero_grads();
}

void Adam::step(ParamStore& store, const std::vector<std::vector<double>>& grads) {
  if (static_cast<int>(grads.size()) != store.count() ||
      static_cast<int>(m.size()) != store.count()) {
    throw std::invalid_argument("Adam::step: store/gradient layout mismatch");
  }
  t += 1;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (int i = 0; i < store.count(); ++i) {
    auto& val = store[i].value;
    const auto& g = grads[i];
    auto& mi = m[i];
    auto& vi = v[i];
    for (size_t j = 0; j < val.size(); ++j) {
      mi[j] = beta1 * mi[j] + (1.0 - beta1) * g[j];
      vi[j] = beta2 * vi[j] + (1.0 - beta2) * g[j] * g[j];
      double mhat = mi[j] / bc1;
      double vhat = vi[j] / bc2;
      val[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

}  // namespace peec
