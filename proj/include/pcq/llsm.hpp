#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "pcq/pcm.hpp"

namespace pcq {

/// Sum over known off-diagonal (i, j) of (ln a_ij - x_i + x_j)^2, where x
/// holds log-weights. This is the logarithmic least squares objective.
template <typename Scalar, typename Derived>
Scalar llsm_objective(const BasicIncompleteMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  Scalar total{0};
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) {
      if (i == j || !m.known(i, j)) continue;
      const Scalar r = std::log(m.entries()(i, j)) - x(i) + x(j);
      total += r * r;
    }
  return total;
}

namespace detail {

/// Solves L x = r restricted to `members` with sum(x) = 0. L + J/k is
/// positive definite exactly when the induced subgraph is connected, so a
/// Cholesky factorization suffices.
template <typename Scalar>
VectorX<Scalar> solve_log_weights(const BasicIncompleteMatrix<Scalar>& m, const std::vector<int>& members) {
  const auto k = static_cast<Eigen::Index>(members.size());
  MatrixX<Scalar> lap = MatrixX<Scalar>::Constant(k, k, Scalar{1} / static_cast<Scalar>(k));
  VectorX<Scalar> rhs = VectorX<Scalar>::Zero(k);
  for (Eigen::Index p = 0; p < k; ++p)
    for (Eigen::Index q = 0; q < k; ++q) {
      const int i = members[p];
      const int j = members[q];
      if (i == j || !m.known(i, j)) continue;
      lap(p, p) += Scalar{1};
      lap(p, q) -= Scalar{1};
      rhs(p) += std::log(m.entries()(i, j));
    }
  VectorX<Scalar> x = lap.llt().solve(rhs);
  x.array() -= x.mean();
  return x;
}

}  // namespace detail

/// Log-weights x (sum zero) minimizing llsm_objective. Requires a connected
/// representing graph.
template <typename Scalar>
VectorX<Scalar> llsm_log_weights(const BasicIncompleteMatrix<Scalar>& m) {
  if (!is_connected(representing_graph(m)))
    throw Error("weight vector not unique; representing graph disconnected");
  std::vector<int> all(static_cast<std::size_t>(m.size()));
  for (int i = 0; i < m.size(); ++i) all[i] = i;
  return detail::solve_log_weights(m, all);
}

template <typename Derived>
VectorX<typename Derived::Scalar> normalized_exp(const Eigen::MatrixBase<Derived>& x) {
  VectorX<typename Derived::Scalar> w = x.array().exp().matrix();
  return w / w.sum();
}

template <typename Scalar>
BasicWeightVector<Scalar> llsm_weights(const BasicIncompleteMatrix<Scalar>& m) {
  return normalized_exp(llsm_log_weights(m));
}

template <typename Scalar>
BasicWeightVector<Scalar> llsm_weights(const BasicPairwiseComparisonMatrix<Scalar>& m) {
  return llsm_weights(BasicIncompleteMatrix<Scalar>(m));
}

/// LLSM for a fixed connected pattern applied to many matrices. The
/// gauge-fixed Laplacian depends only on the pattern, so its inverse is
/// formed once and each solve is a matrix-vector product.
template <typename Scalar>
class BasicPatternSolver {
 public:
  explicit BasicPatternSolver(const PatternGraph& g) : n_(g.vertex_count()) {
    if (!is_connected(g)) throw Error("weight vector not unique; representing graph disconnected");
    MatrixX<Scalar> lap = MatrixX<Scalar>::Constant(n_, n_, Scalar{1} / static_cast<Scalar>(n_));
    for (const Pair& p : g.edges()) {
      lap(p.first, p.first) += Scalar{1};
      lap(p.second, p.second) += Scalar{1};
      lap(p.first, p.second) -= Scalar{1};
      lap(p.second, p.first) -= Scalar{1};
      edges_.push_back(p);
    }
    inverse_ = lap.llt().solve(MatrixX<Scalar>::Identity(n_, n_));
  }

  int size() const { return n_; }

  /// `log_entries(i, j)` = ln a_ij; only entries on the pattern are read.
  template <typename Derived>
  VectorX<Scalar> log_weights(const Eigen::MatrixBase<Derived>& log_entries) const {
    VectorX<Scalar> rhs = VectorX<Scalar>::Zero(n_);
    for (const Pair& p : edges_) {
      const Scalar l = log_entries(p.first, p.second);
      rhs(p.first) += l;
      rhs(p.second) -= l;
    }
    VectorX<Scalar> x = inverse_ * rhs;
    x.array() -= x.mean();
    return x;
  }

  template <typename Derived>
  BasicWeightVector<Scalar> weights(const Eigen::MatrixBase<Derived>& log_entries) const {
    return normalized_exp(log_weights(log_entries));
  }

 private:
  int n_ = 0;
  std::vector<Pair> edges_;
  MatrixX<Scalar> inverse_;
};
using PatternSolver = BasicPatternSolver<double>;

/// Estimates for a possibly disconnected matrix: log-weights centred within
/// each connected component. Values in different components are not
/// comparable with each other.
template <typename Scalar>
struct PartialLogWeights {
  std::vector<int> component;
  VectorX<Scalar> log_weights;
  int component_count = 0;
};

template <typename Scalar>
PartialLogWeights<Scalar> llsm_partial_log_weights(const BasicIncompleteMatrix<Scalar>& m) {
  PartialLogWeights<Scalar> out;
  out.component = connected_components(representing_graph(m));
  out.log_weights = VectorX<Scalar>::Zero(m.size());
  for (int c : out.component) out.component_count = std::max(out.component_count, c + 1);
  for (int c = 0; c < out.component_count; ++c) {
    std::vector<int> members;
    for (int i = 0; i < m.size(); ++i)
      if (out.component[i] == c) members.push_back(i);
    const VectorX<Scalar> x = detail::solve_log_weights(m, members);
    for (std::size_t p = 0; p < members.size(); ++p) out.log_weights(members[p]) = x(static_cast<Eigen::Index>(p));
  }
  return out;
}

}  // namespace pcq
