#pragma once
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace peec {

// Handle into a Tape. All tensors are dense row-major [rows x cols]; batches
// live on rows, vectors are [1 x n], scalars [1 x 1].
struct Tensor {
  int node = -1;
  int rows = 0;
  int cols = 0;
  int size() const { return rows * cols; }
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reverse-mode tape. Nodes are recorded in program order, which is already a
// topological order, so backward() is a single reverse sweep with each node
// visited exactly once.
class Tape {
 public:
  Tensor input(int rows, int cols, const double* data);
  Tensor input(int rows, int cols, const std::vector<double>& data);
  Tensor zeros(int rows, int cols);
  Tensor fill(int rows, int cols, double v);

  Tensor add(Tensor a, Tensor b);  // same shape, or b = [1 x n] row bias
  Tensor sub(Tensor a, Tensor b);
  Tensor mul(Tensor a, Tensor b);  // elementwise
  Tensor div(Tensor a, Tensor b);  // elementwise
  Tensor scale(Tensor a, double s);
  Tensor add_scalar(Tensor a, double s);
  Tensor matmul(Tensor a, Tensor b);
  Tensor tanh(Tensor x);
  Tensor logistic(Tensor x);
  Tensor relu(Tensor x);
  Tensor softplus(Tensor x);
  Tensor exp(Tensor x);
  Tensor log(Tensor x);
  Tensor sqrt(Tensor x);
  Tensor square(Tensor x);
  Tensor neg(Tensor x);
  Tensor concat(Tensor a, Tensor b);            // along cols
  Tensor slice(Tensor x, int c0, int c1);       // cols [c0, c1)
  Tensor sum(Tensor x);                         // -> [1 x 1]
  Tensor mean(Tensor x);                        // -> [1 x 1]
  Tensor row_sum(Tensor x);                     // -> [rows x 1]
  Tensor minimum(Tensor a, Tensor b);           // ties take a's gradient
  Tensor maximum(Tensor a, Tensor b);
  Tensor clamp(Tensor x, double lo, double hi);
  Tensor log_softmax(Tensor x);                             // per row
  Tensor take_per_row(Tensor x, const std::vector<int>& idx);  // -> [rows x 1]

  void backward(Tensor scalar_loss);
  const std::vector<double>& val(Tensor t) const;
  const std::vector<double>& grad(Tensor t) const;
  double scalar(Tensor t) const;  // value of a [1 x 1] tensor

  size_t node_count() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    int rows, cols;
    std::vector<double> val;
    std::vector<double> grad;
    std::function<void()> back;
  };
  std::vector<Node> nodes_;

  int fresh(int rows, int cols);
  Node& at(Tensor t);
  const Node& at(Tensor t) const;
  void check_same_shape(const char* op, Tensor a, Tensor b) const;
  void check_finite(int node, const char* op) const;
};

}  // namespace peec
