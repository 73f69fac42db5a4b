#pragma once

// Small dense linear algebra used throughout: signature-aware inner
// products, orthonormalization, clustered symmetric eigendecomposition.
// Dimensions are desk scale (at most 64).

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "thirdform/error.hpp"

namespace thirdform {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

inline constexpr int kMaxDimension = 64;

/// Flat inner product on R^N with a diagonal signature. Euclidean space is
/// all +1; Lorentz space carries a single -1 on the first axis.
class InnerProduct {
 public:
  explicit InnerProduct(std::vector<int> signature);

  static InnerProduct euclidean(int dim);
  static InnerProduct lorentz(int dim);

  int dim() const { return static_cast<int>(signature_.size()); }
  std::span<const int> signature() const { return signature_; }
  bool is_lorentz() const;

  double operator()(const Vec& a, const Vec& b) const;
  /// a^T S b for column blocks a, b.
  Mat gram(const Mat& a, const Mat& b) const;
  /// S v, i.e. the covector of v.
  Vec lower(const Vec& v) const;

 private:
  std::vector<int> signature_;
};

enum class Causality { SpacelikeOnly, Any };

/// Orthonormal columns plus the self-product sign of each (+1 or -1).
struct Frame {
  Mat vectors;
  std::vector<int> signs;

  int size() const { return static_cast<int>(vectors.cols()); }
};

/// Modified Gram-Schmidt with one re-orthogonalization pass over the columns
/// of `vectors`. Throws RankDeficient when a column is dependent on the ones
/// before it (relative tolerance `rank_tol`), NullVector when a column has a
/// self-product that is nonpositive (SpacelikeOnly) or numerically null.
Frame gram_schmidt(const Mat& vectors, const InnerProduct& ip,
                   Causality causality = Causality::SpacelikeOnly, double rank_tol = 1e-10);

/// Dense symmetric operator. Construction validates the symmetry defect
/// max|M - M^T| <= 1e-12 max|M|.
class SymOp {
 public:
  SymOp() = default;
  explicit SymOp(Mat m);

  /// Averages m with its transpose; for operators built from products whose
  /// asymmetry is pure rounding.
  static SymOp symmetrized(const Mat& m);
  static SymOp zero(int n) { return SymOp(Mat::Zero(n, n)); }
  static SymOp identity(int n) { return SymOp(Mat::Identity(n, n)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Largest |eigenvalue|.
  double spectral_radius() const;

 private:
  Mat m_;
};

struct EigenCluster {
  double value = 0.0;  // multiplicity-weighted mean of the merged eigenvalues
  Mat basis;           // orthonormal columns spanning the eigenspace

  int dim() const { return static_cast<int>(basis.cols()); }
  Mat projector() const { return basis * basis.transpose(); }
};

struct EigenClustering {
  std::vector<EigenCluster> clusters;  // ascending by value
  double cluster_tol = 0.0;

  int size() const { return static_cast<int>(clusters.size()); }
};

double default_cluster_tol(const SymOp& op, double relative = 1e-6);

/// Eigendecomposition with consecutive eigenvalues closer than cluster_tol
/// merged into one cluster. A negative cluster_tol selects the default.
EigenClustering eig_sym(const SymOp& op, double cluster_tol = -1.0);

/// Frobenius norm of ab - ba.
double commutator_norm(const SymOp& a, const SymOp& b);

/// Haar-distributed rotation (det = +1).
Mat random_rotation(int n, std::mt19937_64& rng);

/// Uniform double in [0, 1) from the raw 64-bit engine output; stable across
/// standard library implementations.
double unit_uniform(std::mt19937_64& rng);

/// Standard normal draw (Box-Muller over unit_uniform).
double standard_normal(std::mt19937_64& rng);

/// Radical inverse of `index` in `base` (Halton coordinate).
double radical_inverse(std::uint64_t index, int base);

}  // namespace thirdform
