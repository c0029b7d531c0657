#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace paramine {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A named dense parameter with its gradient and Adam moments.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m;
  Matrix v;

  Parameter(std::string name, int rows, int cols)
      : name(std::move(name)),
        value(Matrix::Zero(rows, cols)),
        grad(Matrix::Zero(rows, cols)),
        m(Matrix::Zero(rows, cols)),
        v(Matrix::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
};

/// Reverse-mode tape over dense matrices. Nodes are created in forward order;
/// backward() walks the tape in reverse and accumulates into parameter grads.
class Graph {
 public:
  using Id = int;

  Id input(Matrix value);            // constant, no gradient
  Id param(Parameter& p);            // leaf bound to a parameter

  Id add(Id a, Id b);                // same shape
  Id add_rowvec(Id a, Id row);       // row: 1 x d broadcast over rows of a
  Id matmul(Id a, Id b);
  Id scale(Id a, double s);
  Id cmul_const(Id a, Matrix mask);  // elementwise product with a constant
  Id relu(Id a);
  Id transpose(Id a);
  Id gather_rows(Id table, std::vector<int> rows);
  Id slice_cols(Id a, int begin, int len);
  Id concat_cols(const std::vector<Id>& parts);
  /// Row softmax of (a + mask); mask entries are 0 or -inf.
  Id softmax_rows(Id a, const Matrix* additive_mask = nullptr);
  Id layer_norm(Id x, Id gain, Id bias, double eps = 1e-5);
  /// Sum over rows of -log softmax(logits)[target]; returns a 1x1 node.
  Id cross_entropy_sum(Id logits, std::vector<int> targets);

  const Matrix& value(Id id) const { return nodes_[id].value; }
  void backward(Id scalar_node);
  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;  // empty until touched
    bool needs_grad = false;
    Parameter* bound = nullptr;
    std::function<void(Graph&, const Matrix&)> back;  // pulls this node's grad to parents
  };

  Id push(Node n);
  void accum(Id id, const Matrix& g);
  bool tracked(Id id) const { return nodes_[id].needs_grad; }

  std::vector<Node> nodes_;
};

}  // namespace paramine
