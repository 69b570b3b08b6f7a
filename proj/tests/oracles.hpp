#pragma once

// Reference routines used only by tests. None of them call into the
// library's solver or metric code paths they are used to check.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "pcq/pcm.hpp"
#include "pcq/rng.hpp"

namespace pcq::oracle {

inline Eigen::VectorXd row_geometric_means(const PairwiseComparisonMatrix& m) {
  const int n = m.size();
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    double log_sum = 0;
    for (int j = 0; j < n; ++j) log_sum += std::log(m(i, j));
    g(i) = std::exp(log_sum / n);
  }
  return g / g.sum();
}

/// Gauss-Seidel on the stationarity conditions of the log least squares
/// objective, one coordinate at a time.
inline Eigen::VectorXd coordinate_descent_log_weights(const IncompleteMatrix& m, int sweeps = 20000) {
  const int n = m.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < sweeps; ++s) {
    double change = 0;
    for (int i = 0; i < n; ++i) {
      double num = 0;
      int deg = 0;
      for (int j = 0; j < n; ++j) {
        if (i == j || !m.known(i, j)) continue;
        num += std::log(*m.at(i, j)) + x(j);
        ++deg;
      }
      if (deg == 0) continue;
      const double xi = num / deg;
      change = std::max(change, std::abs(xi - x(i)));
      x(i) = xi;
    }
    if (change < 1e-15) break;
  }
  x.array() -= x.mean();
  return x;
}

inline Eigen::VectorXd normalized(const Eigen::VectorXd& log_weights) {
  Eigen::VectorXd w(log_weights.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::exp(log_weights(i));
  return w / w.sum();
}

inline double objective(const IncompleteMatrix& m, const Eigen::VectorXd& x) {
  double total = 0;
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j)
      if (i != j && m.known(i, j)) {
        const double r = std::log(*m.at(i, j)) - (x(i) - x(j));
        total += r * r;
      }
  return total;
}

/// Central finite-difference gradient of `objective`.
inline Eigen::VectorXd numeric_gradient(const IncompleteMatrix& m, const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (objective(m, xp) - objective(m, xm)) / (2 * h);
  }
  return g;
}

/// Concordant minus discordant pair count by direct enumeration.
inline int tau_balance(const std::vector<double>& u, const std::vector<double>& v) {
  int balance = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (i >= j) continue;
      const bool up_u = u[i] > u[j], down_u = u[i] < u[j];
      const bool up_v = v[i] > v[j], down_v = v[i] < v[j];
      if ((up_u && up_v) || (down_u && down_v)) ++balance;
      if ((up_u && down_v) || (down_u && up_v)) --balance;
    }
  return balance;
}

inline Eigen::VectorXd random_weights(Rng& rng, int n, double spread = 9.0) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = std::exp(rng.uniform(0.0, std::log(spread)));
  return w / w.sum();
}

inline PairwiseComparisonMatrix random_pcm(Rng& rng, int n) {
  Eigen::MatrixXd upper = Eigen::MatrixXd::Ones(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) upper(i, j) = std::exp(rng.uniform(-2.5, 2.5));
  return PairwiseComparisonMatrix::from_upper(upper);
}

/// Random labeled spanning tree: vertex k attaches to a random earlier vertex
/// of a shuffled order.
inline PatternGraph random_spanning_tree(Rng& rng, int n) {
  const auto order = rng.permutation(n);
  PatternGraph g(n);
  for (int k = 1; k < n; ++k) g.add_edge(order[k], order[rng.below(k)]);
  return g;
}

inline PatternGraph random_connected_graph(Rng& rng, int n) {
  PatternGraph g = random_spanning_tree(rng, n);
  for (const Pair& p : g.non_edges())
    if (rng.uniform01() < 0.4) g.add_edge(p.first, p.second);
  return g;
}

}  // namespace pcq::oracle
