#pragma once
#include <string>
#include <vector>

#include "peec/rng.hpp"
#include "peec/tensor.hpp"

namespace peec {

struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<double> value;
  int size() const { return rows * cols; }
};

class ParamStore {
 public:
  int add(const std::string& name, int rows, int cols);
  ParamBlock& operator[](int i) { return blocks_.at(i); }
  const ParamBlock& operator[](int i) const { return blocks_.at(i); }
  int find(const std::string& name) const;  // -1 when absent
  int count() const { return static_cast<int>(blocks_.size()); }
  size_t total_params() const;
  std::vector<std::vector<double>> zero_grads() const;

 private:
  std::vector<ParamBlock> blocks_;
};

// Per-pass binding of every block in a store onto a tape.
class ParamLeaves {
 public:
  ParamLeaves(Tape& tape, const ParamStore& store);
  Tensor operator[](int i) const { return leaves_.at(i); }
  // grads[i] += d loss / d block i
  void accumulate_grads(const Tape& tape, std::vector<std::vector<double>>& grads) const;

 private:
  std::vector<Tensor> leaves_;
};

// U(-1/sqrt(fan_in), +1/sqrt(fan_in))
void init_uniform_fanin(ParamBlock& block, int fan_in, Rng& rng);

struct Dense {
  int W = -1, b = -1;
  int in = 0, out = 0;
  static Dense create(ParamStore& store, const std::string& prefix, int in, int out, Rng& rng);
  Tensor forward(Tape& tape, const ParamLeaves& p, Tensor x) const;
  void infer(const ParamStore& store, const double* x, double* y) const;  // one row
};

// Fused-gate LSTM cell, gate order [input, forget, candidate, output].
// Forget-gate bias starts at +1.
struct Lstm {
  int Wx = -1, Wh = -1, b = -1;
  int in = 0, hidden = 0;
  static Lstm create(ParamStore& store, const std::string& prefix, int in, int hidden, Rng& rng);
  // returns (h', c') for batch x [B x in], h/c [B x hidden]
  std::pair<Tensor, Tensor> step(Tape& tape, const ParamLeaves& p, Tensor x, Tensor h,
                                 Tensor c) const;
  void infer(const ParamStore& store, const double* x, std::vector<double>& h,
             std::vector<double>& c) const;
};

// dense -> relu -> dense -> relu -> lstm
struct RecurrentTrunk {
  Dense d1, d2;
  Lstm lstm;
  int in = 0, hidden = 0;
  static RecurrentTrunk create(ParamStore& store, const std::string& prefix, int in, int hidden,
                               Rng& rng);
  Tensor step(Tape& tape, const ParamLeaves& p, Tensor x, Tensor& h, Tensor& c) const;
  void infer(const ParamStore& store, const double* x, std::vector<double>& h,
             std::vector<double>& c, std::vector<double>& out) const;
};

struct RecurrentState {
  std::vector<double> h, c;
  void reset(int hidden) {
    h.assign(hidden, 0.0);
    c.assign(hidden, 0.0);
  }
};

// concatenated block values, in store order
std::vector<double> flatten(const ParamStore& store);
void unflatten(ParamStore& store, const std::vector<double>& theta);

struct Adam {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t t = 0;
  std::vector<std::vector<double>> m, v;

  void init(const ParamStore& store);
  void step(ParamStore& store, const std::vector<std::vector<double>>& grads);
};

}  // namespace peec
