#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "paramine/graph.hpp"
#include "paramine/util.hpp"

#include <cmath>
#include <functional>
#include <vector>

using namespace paramine;

namespace {

Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m(r, c) = (static_cast<double>(rng() >> 11) / 9007199254740992.0) * 2.0 - 1.0;
  return m;
}

Parameter make_param(const std::string& name, Matrix value) {
  Parameter p(name, static_cast<int>(value.rows()), static_cast<int>(value.cols()));
  p.value = std::move(value);
  return p;
}

// Reduces any matrix node to a scalar with fixed random weights so every
// entry's gradient is exercised.
Graph::Id weighted_sum(Graph& g, Graph::Id node, Rng& rng) {
  const Matrix& v = g.value(node);
  Matrix left = random_matrix(rng, 1, static_cast<int>(v.rows()));
  Matrix right = random_matrix(rng, static_cast<int>(v.cols()), 1);
  return g.matmul(g.matmul(g.input(left), node), g.input(right));
}

// Worst relative error of analytic vs central-difference gradients for a
// scalar-valued builder over one parameter.
double check_param_grad(Parameter& p, const std::function<double(Graph&)>& build_scalar) {
  Matrix analytic_grad;
  {
    Graph g;
    build_scalar(g);  // builds the graph; backward filled p.grad
    analytic_grad = p.grad;  // snapshot before perturbed rebuilds overwrite it
  }
  double worst = 0.0;
  for (int r = 0; r < p.value.rows(); ++r) {
    for (int c = 0; c < p.value.cols(); ++c) {
      double keep = p.value(r, c);
      double h = 1e-5 * std::max(1.0, std::abs(keep));
      Graph gp;
      p.value(r, c) = keep + h;
      double up = build_scalar(gp);
      Graph gm;
      p.value(r, c) = keep - h;
      double down = build_scalar(gm);
      p.value(r, c) = keep;
      double numeric = (up - down) / (2.0 * h);
      double analytic = analytic_grad(r, c);
      double err = std::abs(analytic - numeric) /
                   std::max({1e-8, std::abs(analytic), std::abs(numeric)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

// Runs builder(g, param_node) -> non-scalar node, reduces it and returns the
// worst gradient error over the parameter entries.
double check_op(int rows, int cols, uint64_t seed,
                const std::function<Graph::Id(Graph&, Graph::Id)>& builder) {
  Rng init(seed);
  Parameter p = make_param("p", random_matrix(init, rows, cols));
  auto build_scalar = [&](Graph& g) {
    p.zero_grad();
    Rng reduce_rng(seed + 1);
    Graph::Id out = builder(g, g.param(p));
    Graph::Id s = weighted_sum(g, out, reduce_rng);
    g.backward(s);
    return g.value(s)(0, 0);
  };
  return check_param_grad(p, build_scalar);
}

}  // namespace

TEST_CASE("graph forward values") {
  Graph g;
  Matrix a(2, 2);
  a << 1, -2, 3, 0;
  auto id = g.input(a);
  CHECK(g.value(g.relu(id))(0, 1) == 0.0);
  CHECK(g.value(g.relu(id))(1, 0) == 3.0);
  CHECK(g.value(g.scale(id, 2.0))(0, 0) == 2.0);
  CHECK(g.value(g.transpose(id))(1, 0) == -2.0);

  auto sm = g.value(g.softmax_rows(id));
  CHECK(sm.row(0).sum() == doctest::Approx(1.0));
  CHECK(sm.row(1).sum() == doctest::Approx(1.0));

  auto gathered = g.value(g.gather_rows(id, {1, 1, 0}));
  CHECK(gathered.rows() == 3);
  CHECK(gathered(0, 0) == 3.0);
  CHECK(gathered(2, 1) == -2.0);

  auto sliced = g.value(g.slice_cols(id, 1, 1));
  CHECK(sliced.cols() == 1);
  CHECK(sliced(0, 0) == -2.0);
}

TEST_CASE("softmax additive mask zeroes banned columns") {
  Graph g;
  Matrix a = Matrix::Zero(1, 3);
  Matrix mask = Matrix::Zero(1, 3);
  mask(0, 2) = -std::numeric_limits<double>::infinity();
  auto sm = g.value(g.softmax_rows(g.input(a), &mask));
  CHECK(sm(0, 2) == 0.0);
  CHECK(sm(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("layer_norm normalizes rows") {
  Graph g;
  Rng rng(3);
  auto x = g.input(random_matrix(rng, 4, 8));
  auto gain = g.input(Matrix::Ones(1, 8));
  auto bias = g.input(Matrix::Zero(1, 8));
  Matrix out = g.value(g.layer_norm(x, gain, bias));
  for (int r = 0; r < out.rows(); ++r) {
    CHECK(out.row(r).mean() == doctest::Approx(0.0).epsilon(1e-9));
    double var = out.row(r).array().square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("elementwise and linear op gradients match finite differences") {
  CHECK(check_op(3, 4, 1, [](Graph& g, Graph::Id p) {
          return g.add(p, g.scale(p, 0.5));
        }) < 1e-5);
  CHECK(check_op(1, 4, 2, [](Graph& g, Graph::Id p) {
          Rng r(7);
          return g.add_rowvec(g.input(random_matrix(r, 5, 4)), p);
        }) < 1e-5);  // gradient into the broadcast row
  CHECK(check_op(5, 4, 16, [](Graph& g, Graph::Id p) {
          Rng r(17);
          return g.add_rowvec(p, g.input(random_matrix(r, 1, 4)));
        }) < 1e-5);
  CHECK(check_op(4, 4, 3, [](Graph& g, Graph::Id p) {
          Rng r(8);
          return g.matmul(p, g.add(p, g.input(random_matrix(r, 4, 4))));
        }) < 1e-5);  // same node twice: gradient accumulation
  CHECK(check_op(3, 5, 4, [](Graph& g, Graph::Id p) {
          Rng r(9);
          return g.cmul_const(p, random_matrix(r, 3, 5));
        }) < 1e-5);
  CHECK(check_op(3, 5, 5, [](Graph& g, Graph::Id p) { return g.transpose(p); }) < 1e-5);
  CHECK(check_op(2, 6, 6, [](Graph& g, Graph::Id p) { return g.slice_cols(p, 2, 3); }) <
        1e-5);
  CHECK(check_op(4, 3, 7, [](Graph& g, Graph::Id p) {
          return g.concat_cols({p, g.scale(p, -2.0), g.slice_cols(p, 0, 2)});
        }) < 1e-5);
  CHECK(check_op(5, 3, 8, [](Graph& g, Graph::Id p) {
          return g.gather_rows(p, {0, 2, 2, 4, 2});
        }) < 1e-5);  // repeated rows must accumulate
}

TEST_CASE("relu gradient away from the kink") {
  // keep entries off zero so the subgradient is unambiguous
  Rng init(10);
  Parameter p = make_param("p", random_matrix(init, 3, 4));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c)
      if (std::abs(p.value(r, c)) < 0.05) p.value(r, c) = 0.1;
  auto build = [&](Graph& g) {
    p.zero_grad();
    Rng reduce_rng(99);
    auto s = weighted_sum(g, g.relu(g.param(p)), reduce_rng);
    g.backward(s);
    return g.value(s)(0, 0);
  };
  CHECK(check_param_grad(p, build) < 1e-5);
}

TEST_CASE("softmax and layer_norm gradients match finite differences") {
  CHECK(check_op(3, 6, 11, [](Graph& g, Graph::Id p) { return g.softmax_rows(p); }) < 1e-5);
  Matrix mask = Matrix::Zero(3, 6);
  mask(0, 5) = mask(1, 4) = -std::numeric_limits<double>::infinity();
  CHECK(check_op(3, 6, 12, [mask](Graph& g, Graph::Id p) {
          return g.softmax_rows(p, &mask);
        }) < 1e-5);
  CHECK(check_op(4, 8, 13, [](Graph& g, Graph::Id p) {
          Rng r(21);
          return g.layer_norm(p, g.input(random_matrix(r, 1, 8)),
                              g.input(random_matrix(r, 1, 8)));
        }) < 1e-5);
  // gain and bias gradients
  CHECK(check_op(1, 8, 14, [](Graph& g, Graph::Id p) {
          Rng r(22);
          return g.layer_norm(g.input(random_matrix(r, 4, 8)), p,
                              g.input(random_matrix(r, 1, 8)));
        }) < 1e-5);
  CHECK(check_op(1, 8, 15, [](Graph& g, Graph::Id p) {
          Rng r(23);
          return g.layer_norm(g.input(random_matrix(r, 4, 8)),
                              g.input(random_matrix(r, 1, 8)), p);
        }) < 1e-5);
}

TEST_CASE("cross_entropy_sum gradient and value") {
  Rng init(30);
  Parameter p = make_param("logits", random_matrix(init, 4, 6));
  std::vector<int> targets = {1, 0, 5, 3};
  auto build = [&](Graph& g) {
    p.zero_grad();
    auto loss = g.cross_entropy_sum(g.param(p), targets);
    g.backward(loss);
    return g.value(loss)(0, 0);
  };
  CHECK(check_param_grad(p, build) < 1e-5);

  Graph g;
  Matrix certain = Matrix::Zero(1, 3);
  certain(0, 2) = 40.0;  // near-deterministic distribution
  double loss = g.value(g.cross_entropy_sum(g.input(certain), {2}))(0, 0);
  CHECK(loss == doctest::Approx(0.0).epsilon(1e-9));
}
