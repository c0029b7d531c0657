#include "paramine/graph.hpp"

#include "paramine/util.hpp"

#include <cmath>

namespace paramine {

Graph::Id Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

void Graph::accum(Id id, const Matrix& g) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0)
    n.grad = g;
  else
    n.grad += g;
}

Graph::Id Graph::input(Matrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Graph::Id Graph::param(Parameter& p) {
  Node n;
  n.value = p.value;
  n.needs_grad = true;
  n.bound = &p;
  return push(std::move(n));
}

Graph::Id Graph::add(Id a, Id b) {
  Node n;
  n.value = nodes_[a].value + nodes_[b].value;
  n.needs_grad = tracked(a) || tracked(b);
  n.back = [a, b](Graph& g, const Matrix& grad) {
    g.accum(a, grad);
    g.accum(b, grad);
  };
  return push(std::move(n));
}

Graph::Id Graph::add_rowvec(Id a, Id row) {
  Node n;
  n.value = nodes_[a].value.rowwise() + nodes_[row].value.row(0);
  n.needs_grad = tracked(a) || tracked(row);
  n.back = [a, row](Graph& g, const Matrix& grad) {
    g.accum(a, grad);
    g.accum(row, grad.colwise().sum());
  };
  return push(std::move(n));
}

Graph::Id Graph::matmul(Id a, Id b) {
  Node n;
  n.value = nodes_[a].value * nodes_[b].value;
  n.needs_grad = tracked(a) || tracked(b);
  n.back = [a, b](Graph& g, const Matrix& grad) {
    g.accum(a, grad * g.nodes_[b].value.transpose());
    g.accum(b, g.nodes_[a].value.transpose() * grad);
  };
  return push(std::move(n));
}

Graph::Id Graph::scale(Id a, double s) {
  Node n;
  n.value = nodes_[a].value * s;
  n.needs_grad = tracked(a);
  n.back = [a, s](Graph& g, const Matrix& grad) { g.accum(a, Matrix(grad * s)); };
  return push(std::move(n));
}

Graph::Id Graph::cmul_const(Id a, Matrix mask) {
  Node n;
  n.value = nodes_[a].value.cwiseProduct(mask);
  n.needs_grad = tracked(a);
  n.back = [a, mask](Graph& g, const Matrix& grad) { g.accum(a, grad.cwiseProduct(mask)); };
  return push(std::move(n));
}

Graph::Id Graph::relu(Id a) {
  Node n;
  n.value = nodes_[a].value.cwiseMax(0.0);
  n.needs_grad = tracked(a);
  n.back = [a](Graph& g, const Matrix& grad) {
    Matrix gate = (g.nodes_[a].value.array() > 0.0).cast<double>();
    g.accum(a, grad.cwiseProduct(gate));
  };
  return push(std::move(n));
}

Graph::Id Graph::transpose(Id a) {
  Node n;
  n.value = nodes_[a].value.transpose();
  n.needs_grad = tracked(a);
  n.back = [a](Graph& g, const Matrix& grad) { g.accum(a, grad.transpose()); };
  return push(std::move(n));
}

Graph::Id Graph::gather_rows(Id table, std::vector<int> rows) {
  const Matrix& t = nodes_[table].value;
  Node n;
  n.value.resize(static_cast<Eigen::Index>(rows.size()), t.cols());
  for (size_t i = 0; i < rows.size(); ++i) n.value.row(static_cast<Eigen::Index>(i)) = t.row(rows[i]);
  n.needs_grad = tracked(table);
  n.back = [table, rows = std::move(rows)](Graph& g, const Matrix& grad) {
    Matrix acc = Matrix::Zero(g.nodes_[table].value.rows(), g.nodes_[table].value.cols());
    for (size_t i = 0; i < rows.size(); ++i)
      acc.row(rows[i]) += grad.row(static_cast<Eigen::Index>(i));
    g.accum(table, acc);
  };
  return push(std::move(n));
}

Graph::Id Graph::slice_cols(Id a, int begin, int len) {
  Node n;
  n.value = nodes_[a].value.middleCols(begin, len);
  n.needs_grad = tracked(a);
  Eigen::Index rows = nodes_[a].value.rows(), cols = nodes_[a].value.cols();
  n.back = [a, begin, len, rows, cols](Graph& g, const Matrix& grad) {
    Matrix acc = Matrix::Zero(rows, cols);
    acc.middleCols(begin, len) = grad;
    g.accum(a, acc);
  };
  return push(std::move(n));
}

Graph::Id Graph::concat_cols(const std::vector<Id>& parts) {
  Eigen::Index rows = nodes_[parts[0]].value.rows();
  Eigen::Index total = 0;
  for (Id p : parts) total += nodes_[p].value.cols();
  Node n;
  n.value.resize(rows, total);
  Eigen::Index at = 0;
  for (Id p : parts) {
    n.value.middleCols(at, nodes_[p].value.cols()) = nodes_[p].value;
    at += nodes_[p].value.cols();
  }
  for (Id p : parts) n.needs_grad = n.needs_grad || tracked(p);
  std::vector<Eigen::Index> widths;
  for (Id p : parts) widths.push_back(nodes_[p].value.cols());
  n.back = [parts, widths](Graph& g, const Matrix& grad) {
    Eigen::Index at = 0;
    for (size_t i = 0; i < parts.size(); ++i) {
      g.accum(parts[i], grad.middleCols(at, widths[i]));
      at += widths[i];
    }
  };
  return push(std::move(n));
}

Graph::Id Graph::softmax_rows(Id a, const Matrix* additive_mask) {
  Matrix z = nodes_[a].value;
  if (additive_mask) z += *additive_mask;
  Matrix y(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    double mx = z.row(r).maxCoeff();
    Eigen::ArrayXd e = (z.row(r).array() - mx).exp();
    y.row(r) = (e / e.sum()).matrix();
  }
  Node n;
  n.value = std::move(y);
  n.needs_grad = tracked(a);
  Id id = push(std::move(n));
  nodes_[id].back = [a, id](Graph& g, const Matrix& grad) {
    const Matrix& y = g.nodes_[id].value;
    Matrix dx(y.rows(), y.cols());
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      double dot = grad.row(r).cwiseProduct(y.row(r)).sum();
      dx.row(r) = y.row(r).cwiseProduct((grad.row(r).array() - dot).matrix());
    }
    g.accum(a, dx);
  };
  return id;
}

Graph::Id Graph::layer_norm(Id x, Id gain, Id bias, double eps) {
  const Matrix& in = nodes_[x].value;
  Eigen::Index rows = in.rows(), cols = in.cols();
  Matrix xhat(rows, cols);
  Vector inv_std(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double mean = in.row(r).mean();
    Eigen::ArrayXd centered = in.row(r).array() - mean;
    double var = centered.square().mean();
    double is = 1.0 / std::sqrt(var + eps);
    inv_std(r) = is;
    xhat.row(r) = (centered * is).matrix();
  }
  Node n;
  n.value.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    n.value.row(r) = xhat.row(r).cwiseProduct(nodes_[gain].value.row(0)) + nodes_[bias].value.row(0);
  n.needs_grad = tracked(x) || tracked(gain) || tracked(bias);
  n.back = [x, gain, bias, xhat, inv_std](Graph& g, const Matrix& grad) {
    const Matrix& gn = g.nodes_[gain].value;
    Eigen::Index rows = grad.rows(), cols = grad.cols();
    g.accum(bias, grad.colwise().sum());
    g.accum(gain, (grad.cwiseProduct(xhat)).colwise().sum());
    if (!g.tracked(x)) return;
    Matrix dx(rows, cols);
    double d = static_cast<double>(cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      Eigen::RowVectorXd dy = grad.row(r).cwiseProduct(gn.row(0));
      double sum_dy = dy.sum();
      double sum_dy_xhat = dy.cwiseProduct(xhat.row(r)).sum();
      dx.row(r) = inv_std(r) / d *
                  (d * dy.array() - sum_dy - xhat.row(r).array() * sum_dy_xhat).matrix();
    }
    g.accum(x, dx);
  };
  return push(std::move(n));
}

Graph::Id Graph::cross_entropy_sum(Id logits, std::vector<int> targets) {
  const Matrix& z = nodes_[logits].value;
  if (static_cast<size_t>(z.rows()) != targets.size())
    throw NumericError("cross_entropy_sum: row/target mismatch");
  Matrix prob(z.rows(), z.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    double mx = z.row(r).maxCoeff();
    Eigen::ArrayXd e = (z.row(r).array() - mx).exp();
    double s = e.sum();
    prob.row(r) = (e / s).matrix();
    loss -= std::log(prob(r, targets[static_cast<size_t>(r)]));
  }
  Node n;
  n.value = Matrix::Constant(1, 1, loss);
  n.needs_grad = tracked(logits);
  n.back = [logits, prob, targets = std::move(targets)](Graph& g, const Matrix& grad) {
    Matrix dz = prob;
    for (Eigen::Index r = 0; r < dz.rows(); ++r)
      dz(r, targets[static_cast<size_t>(r)]) -= 1.0;
    g.accum(logits, Matrix(dz * grad(0, 0)));
  };
  return push(std::move(n));
}

void Graph::backward(Id scalar_node) {
  Node& top = nodes_[scalar_node];
  if (top.value.rows() != 1 || top.value.cols() != 1)
    throw NumericError("backward needs a scalar node");
  top.grad = Matrix::Constant(1, 1, 1.0);
  for (Id id = scalar_node; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.bound) {
      n.bound->grad += n.grad;
      continue;
    }
    if (n.back) n.back(*this, n.grad);
  }
}

}  // namespace paramine
