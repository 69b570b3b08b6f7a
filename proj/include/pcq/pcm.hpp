#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcq/error.hpp"
#include "pcq/graph.hpp"
#include "pcq/rng.hpp"

namespace pcq {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Positive weights summing to one.
template <typename Scalar>
using BasicWeightVector = VectorX<Scalar>;
using WeightVector = BasicWeightVector<double>;

enum class Category { Equal, Slight, Moderate, Large };
enum class Direction { FirstPreferred, SecondPreferred };

std::string_view to_string(Category c);
std::string_view to_string(Direction d);
Category parse_category(std::string_view token);
Direction parse_direction(std::string_view token);

/// Numerical values of the verbal categories. EQUAL is always 1.
template <typename Scalar>
struct BasicScale {
  Scalar slight{1.5};
  Scalar moderate{1.7};
  Scalar large{2.0};

  void validate() const {
    if (!(Scalar{1} < slight && slight <= moderate && moderate <= large))
      throw Error("scale must satisfy 1 < S <= M <= L");
  }

  Scalar value(Category c) const {
    switch (c) {
      case Category::Equal: return Scalar{1};
      case Category::Slight: return slight;
      case Category::Moderate: return moderate;
      case Category::Large: return large;
    }
    return Scalar{1};
  }

  /// {1, S, M, L} and reciprocals, ascending.
  std::vector<Scalar> value_set() const {
    return {Scalar{1} / large, Scalar{1} / moderate, Scalar{1} / slight, Scalar{1},
            slight, moderate, large};
  }

  friend bool operator==(const BasicScale&, const BasicScale&) = default;
};
using Scale = BasicScale<double>;

/// Parses `S=1.5,M=1.7,L=2`. Omitted keys keep their defaults.
Scale parse_scale(std::string_view text);
std::string to_string(const Scale& s);

/// One answered comparison between alternatives `first` and `second`.
struct VerbalJudgment {
  int first = 0;
  int second = 1;
  Category category = Category::Equal;
  Direction direction = Direction::FirstPreferred;

  Pair pair() const { return {first, second}; }
  friend bool operator==(const VerbalJudgment&, const VerbalJudgment&) = default;
};

/// Positive reciprocal n x n matrix with unit diagonal.
template <typename Scalar>
class BasicPairwiseComparisonMatrix {
 public:
  using Matrix = MatrixX<Scalar>;

  BasicPairwiseComparisonMatrix() = default;

  /// Validates positivity, unit diagonal and reciprocity (relative `tol`).
  explicit BasicPairwiseComparisonMatrix(Matrix entries, Scalar tol = Scalar(1e-12))
      : a_(std::move(entries)) {
    if (a_.rows() != a_.cols()) throw Error("comparison matrix must be square");
    if (a_.rows() < 1) throw Error("comparison matrix must be non-empty");
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      for (Eigen::Index j = 0; j < a_.cols(); ++j) {
        const Scalar x = a_(i, j);
        if (!(x > Scalar{0}) || !std::isfinite(static_cast<double>(x)))
          throw Error(where(i, j) + " is not a positive finite number");
        if (i == j && std::abs(x - Scalar{1}) > tol)
          throw Error(where(i, j) + " diagonal entry must be 1");
        if (i < j && std::abs(x * a_(j, i) - Scalar{1}) > tol)
          throw Error("entries " + where(i, j) + " and " + where(j, i) + " are not reciprocal");
      }
    }
  }

  /// Builds the matrix from the strict upper triangle; the lower triangle
  /// is set to exact reciprocals.
  static BasicPairwiseComparisonMatrix from_upper(const Matrix& upper) {
    const Eigen::Index n = upper.rows();
    Matrix a = Matrix::Ones(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        a(i, j) = upper(i, j);
        a(j, i) = Scalar{1} / upper(i, j);
      }
    return BasicPairwiseComparisonMatrix(std::move(a));
  }

  /// Consistent matrix a[i][j] = w_i / w_j.
  template <typename Derived>
  static BasicPairwiseComparisonMatrix from_weights(const Eigen::MatrixBase<Derived>& w) {
    const Eigen::Index n = w.size();
    Matrix upper = Matrix::Ones(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) upper(i, j) = w(i) / w(j);
    return from_upper(upper);
  }

  int size() const { return static_cast<int>(a_.rows()); }
  Scalar operator()(int i, int j) const { return a_(i, j); }
  const Matrix& entries() const { return a_; }

  friend bool operator==(const BasicPairwiseComparisonMatrix& x,
                         const BasicPairwiseComparisonMatrix& y) {
    return x.a_.rows() == y.a_.rows() && x.a_ == y.a_;
  }

 private:
  static std::string where(Eigen::Index i, Eigen::Index j) {
    return "a[" + std::to_string(i) + "][" + std::to_string(j) + "]";
  }

  Matrix a_;
};
using PairwiseComparisonMatrix = BasicPairwiseComparisonMatrix<double>;

/// Reciprocal matrix with symmetric missingness. The diagonal is always
/// known and equal to one.
template <typename Scalar>
class BasicIncompleteMatrix {
 public:
  using Matrix = MatrixX<Scalar>;
  using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

  BasicIncompleteMatrix() = default;

  explicit BasicIncompleteMatrix(int n)
      : a_(Matrix::Identity(n, n)), known_(Mask::Identity(n, n)) {
    if (n < 1) throw Error("matrix size must be at least 1");
  }

  explicit BasicIncompleteMatrix(const BasicPairwiseComparisonMatrix<Scalar>& m)
      : a_(m.entries()), known_(Mask::Constant(m.size(), m.size(), true)) {}

  int size() const { return static_cast<int>(a_.rows()); }

  bool known(int i, int j) const { return known_(i, j); }

  std::optional<Scalar> at(int i, int j) const {
    if (!known_(i, j)) return std::nullopt;
    return a_(i, j);
  }

  /// Stores a[i][j] = value and a[j][i] = 1 / value.
  void set(int i, int j, Scalar value) {
    check(i, j);
    if (i == j) throw Error("diagonal entries are fixed to 1");
    if (!(value > Scalar{0}) || !std::isfinite(static_cast<double>(value)))
      throw Error("comparison value must be positive and finite");
    a_(i, j) = value;
    a_(j, i) = Scalar{1} / value;
    known_(i, j) = known_(j, i) = true;
  }

  /// Sets both entries as given; they must be reciprocal to 1e-12.
  void set(int i, int j, Scalar value, Scalar reciprocal) {
    set(i, j, value);
    using std::abs;
    if (!(abs(value * reciprocal - Scalar{1}) <= Scalar{1e-12}))
      throw Error("entries (" + std::to_string(i) + "," + std::to_string(j) + ") and (" + std::to_string(j) +
                  "," + std::to_string(i) + ") are not reciprocal");
    a_(j, i) = reciprocal;
  }

  void erase(int i, int j) {
    check(i, j);
    if (i == j) throw Error("diagonal entries are fixed to 1");
    a_(i, j) = a_(j, i) = Scalar{0};
    known_(i, j) = known_(j, i) = false;
  }

  int known_pair_count() const {
    int count = 0;
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j) count += known_(i, j) ? 1 : 0;
    return count;
  }

  bool is_complete() const { return known_pair_count() == pair_count(size()); }

  BasicPairwiseComparisonMatrix<Scalar> to_complete() const {
    if (!is_complete()) throw Error("matrix has missing entries");
    return BasicPairwiseComparisonMatrix<Scalar>(a_);
  }

  /// Raw storage; missing cells hold 0.
  const Matrix& entries() const { return a_; }
  const Mask& mask() const { return known_; }

  friend bool operator==(const BasicIncompleteMatrix& x, const BasicIncompleteMatrix& y) {
    if (x.size() != y.size() || x.known_ != y.known_) return false;
    for (int i = 0; i < x.size(); ++i)
      for (int j = 0; j < x.size(); ++j)
        if (x.known_(i, j) && x.a_(i, j) != y.a_(i, j)) return false;
    return true;
  }

 private:
  void check(int i, int j) const {
    if (i < 0 || j < 0 || i >= size() || j >= size())
      throw Error("index (" + std::to_string(i) + "," + std::to_string(j) +
                  ") out of range for n=" + std::to_string(size()));
  }

  Matrix a_;
  Mask known_;
};
using IncompleteMatrix = BasicIncompleteMatrix<double>;

/// Converts verbal answers to numbers with `scale`; unanswered pairs stay
/// missing. Rejects repeated pairs and out-of-range indices.
template <typename Scalar>
BasicIncompleteMatrix<Scalar> from_verbal(const std::vector<VerbalJudgment>& judgments,
                                          const BasicScale<Scalar>& scale, int n) {
  scale.validate();
  BasicIncompleteMatrix<Scalar> m(n);
  for (const VerbalJudgment& j : judgments) {
    const std::string name = "(" + std::to_string(j.first) + "," + std::to_string(j.second) + ")";
    if (j.first < 0 || j.second < 0 || j.first >= n || j.second >= n)
      throw Error("judgment pair " + name + " out of range for n=" + std::to_string(n));
    if (j.first == j.second) throw Error("judgment pair " + name + " compares an alternative with itself");
    if (m.known(j.first, j.second)) throw Error("duplicate judgment for pair " + name);
    const Scalar v = scale.value(j.category);
    const bool first = j.category == Category::Equal || j.direction == Direction::FirstPreferred;
    m.set(j.first, j.second, first ? v : Scalar{1} / v);
  }
  return m;
}

/// True iff |a_ik - a_ij a_jk| <= tol * a_ik for every triple.
template <typename Scalar>
bool is_consistent(const BasicPairwiseComparisonMatrix<Scalar>& m, Scalar tol = Scalar(1e-9)) {
  const int n = m.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (std::abs(m(i, k) - m(i, j) * m(j, k)) > tol * m(i, k)) return false;
  return true;
}

template <typename Scalar>
PatternGraph representing_graph(const BasicIncompleteMatrix<Scalar>& m) {
  PatternGraph g(m.size());
  for (int i = 0; i < m.size(); ++i)
    for (int j = i + 1; j < m.size(); ++j)
      if (m.known(i, j)) g.add_edge(i, j);
  return g;
}

/// Keeps the entries on the edges of `g`; every other off-diagonal entry
/// becomes missing.
template <typename Scalar>
BasicIncompleteMatrix<Scalar> restrict(const BasicPairwiseComparisonMatrix<Scalar>& m,
                                       const PatternGraph& g) {
  if (g.vertex_count() != m.size())
    throw Error("pattern has " + std::to_string(g.vertex_count()) + " vertices, matrix has size " +
                std::to_string(m.size()));
  BasicIncompleteMatrix<Scalar> out(m.size());
  for (const Pair& p : g.edges()) out.set(p.first, p.second, m(p.first, p.second), m(p.second, p.first));
  return out;
}

/// Simultaneous row/column permutation: result(i, j) = m(perm[i], perm[j]).
template <typename Scalar>
BasicPairwiseComparisonMatrix<Scalar> permute(const BasicPairwiseComparisonMatrix<Scalar>& m,
                                              const std::vector<int>& perm) {
  const int n = m.size();
  if (static_cast<int>(perm.size()) != n) throw Error("permutation length mismatch");
  MatrixX<Scalar> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = m(perm[i], perm[j]);
  return BasicPairwiseComparisonMatrix<Scalar>(std::move(a));
}

/// Permutation drawn uniformly from S_n by `Rng(seed)`.
inline std::vector<int> random_permutation(int n, std::uint64_t seed) {
  Rng rng(seed);
  return rng.permutation(n);
}

template <typename Scalar>
BasicPairwiseComparisonMatrix<Scalar> random_permute(const BasicPairwiseComparisonMatrix<Scalar>& m,
                                                     std::uint64_t seed) {
  return permute(m, random_permutation(m.size(), seed));
}

}  // namespace pcq
