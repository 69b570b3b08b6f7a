#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "pcq/error.hpp"

namespace pcq {

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar euclidean_distance(const Eigen::MatrixBase<DerivedA>& u,
                                             const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size()) throw Error("weight vectors have different lengths");
  return (u - v).norm();
}

/// Kendall's tau with the fixed denominator n(n-1)/2. Tied pairs count as
/// neither concordant nor discordant.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar kendall_tau(const Eigen::MatrixBase<DerivedA>& u,
                                      const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) throw Error("weight vectors have different lengths");
  const Eigen::Index n = u.size();
  if (n < 2) throw Error("Kendall's tau needs at least two components");
  long balance = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar s = (u(i) - u(j)) * (v(i) - v(j));
      if (s > Scalar{0}) ++balance;
      else if (s < Scalar{0}) --balance;
    }
  return static_cast<Scalar>(balance) / static_cast<Scalar>(n * (n - 1) / 2);
}

}  // namespace pcq
