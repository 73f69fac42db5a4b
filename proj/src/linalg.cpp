#include "thirdform/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace thirdform {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NullVector: return "NullVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotBilinear: return "NotBilinear";
    case ErrorCode::DegenerateFamily: return "DegenerateFamily";
    case ErrorCode::NotUmbilicalThirdForm: return "NotUmbilicalThirdForm";
    case ErrorCode::AdaptednessViolated: return "AdaptednessViolated";
    case ErrorCode::UnequalHalfDimensions: return "UnequalHalfDimensions";
    case ErrorCode::NonConstantRho: return "NonConstantRho";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NotFlat: return "NotFlat";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::MissingRicci: return "MissingRicci";
    case ErrorCode::NotOnQuadric: return "NotOnQuadric";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::CurvatureSumZero: return "CurvatureSumZero";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::BadCurvature: return "BadCurvature";
    case ErrorCode::CodimensionUnsupported: return "CodimensionUnsupported";
    case ErrorCode::SamplingFailed: return "SamplingFailed";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// InnerProduct

InnerProduct::InnerProduct(std::vector<int> signature) : signature_(std::move(signature)) {
  if (signature_.empty() || dim() > kMaxDimension) {
    throw Error(ErrorCode::DimensionMismatch, "inner product dimension out of range");
  }
  int negatives = 0;
  for (int s : signature_) {
    if (s != 1 && s != -1) throw Error(ErrorCode::SignatureMismatch, "signature entries must be +-1");
    if (s < 0) ++negatives;
  }
  if (negatives > 1) throw Error(ErrorCode::SignatureMismatch, "at most one negative axis supported");
}

InnerProduct InnerProduct::euclidean(int dim) { return InnerProduct(std::vector<int>(dim, 1)); }

InnerProduct InnerProduct::lorentz(int dim) {
  std::vector<int> s(dim, 1);
  s.at(0) = -1;
  return InnerProduct(std::move(s));
}

bool InnerProduct::is_lorentz() const {
  return std::find(signature_.begin(), signature_.end(), -1) != signature_.end();
}

double InnerProduct::operator()(const Vec& a, const Vec& b) const {
  double sum = 0.0;
  for (int i = 0; i < dim(); ++i) sum += signature_[i] * a[i] * b[i];
  return sum;
}

Mat InnerProduct::gram(const Mat& a, const Mat& b) const {
  Mat sb = b;
  for (int i = 0; i < dim(); ++i) sb.row(i) *= signature_[i];
  return a.transpose() * sb;
}

Vec InnerProduct::lower(const Vec& v) const {
  Vec out = v;
  for (int i = 0; i < dim(); ++i) out[i] *= signature_[i];
  return out;
}

// ---------------------------------------------------------------------------
// Gram-Schmidt

Frame gram_schmidt(const Mat& vectors, const InnerProduct& ip, Causality causality, double rank_tol) {
  if (vectors.rows() != ip.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "vectors do not live in the inner product space");
  }
  Frame frame;
  frame.vectors.resize(vectors.rows(), vectors.cols());
  frame.signs.reserve(vectors.cols());

  for (int j = 0; j < vectors.cols(); ++j) {
    Vec v = vectors.col(j);
    const double original = v.norm();
    if (original == 0.0) throw Error(ErrorCode::RankDeficient, "zero vector at column " + std::to_string(j));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        const Vec& q = frame.vectors.col(i);
        v -= frame.signs[i] * ip(v, q) * q;
      }
    }
    if (v.norm() <= rank_tol * original) {
      throw Error(ErrorCode::RankDeficient, "column " + std::to_string(j) + " depends on earlier columns");
    }
    const double self = ip(v, v);
    if (std::abs(self) <= rank_tol * v.squaredNorm()) {
      throw Error(ErrorCode::NullVector, "column " + std::to_string(j) + " is numerically null");
    }
    if (causality == Causality::SpacelikeOnly && self <= 0.0) {
      throw Error(ErrorCode::NullVector, "column " + std::to_string(j) + " is not spacelike");
    }
    frame.vectors.col(j) = v / std::sqrt(std::abs(self));
    frame.signs.push_back(self > 0.0 ? 1 : -1);
  }
  return frame;
}

// ---------------------------------------------------------------------------
// SymOp

SymOp::SymOp(Mat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw Error(ErrorCode::DimensionMismatch, "operator is not square");
  if (m_.rows() > kMaxDimension) throw Error(ErrorCode::DimensionMismatch, "operator dimension exceeds 64");
  if (!m_.allFinite()) throw Error(ErrorCode::NotSymmetric, "operator has non-finite entries");
  const double scale = m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0;
  const double defect = m_.size() ? (m_ - m_.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (defect > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "symmetry defect " << defect << " exceeds 1e-12 * " << scale;
    throw Error(ErrorCode::NotSymmetric, msg.str());
  }
}

SymOp SymOp::symmetrized(const Mat& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "operator is not square");
  return SymOp(Mat(0.5 * (m + m.transpose())));
}

double SymOp::spectral_radius() const {
  if (m_.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> solver(m_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Eigen-clustering

double default_cluster_tol(const SymOp& op, double relative) {
  return relative * (1.0 + op.spectral_radius());
}

EigenClustering eig_sym(const SymOp& op, double cluster_tol) {
  EigenClustering out;
  out.cluster_tol = cluster_tol < 0.0 ? default_cluster_tol(op) : cluster_tol;
  const int n = op.dim();
  if (n == 0) return out;

  Eigen::SelfAdjointEigenSolver<Mat> solver(op.matrix());
  const Vec& values = solver.eigenvalues();  // ascending
  const Mat& vectors = solver.eigenvectors();

  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || values[i] - values[i - 1] > out.cluster_tol) {
      EigenCluster cluster;
      cluster.value = values.segment(start, i - start).mean();
      cluster.basis = vectors.middleCols(start, i - start);
      out.clusters.push_back(std::move(cluster));
      start = i;
    }
  }
  return out;
}

double commutator_norm(const SymOp& a, const SymOp& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "commutator of operators of different size");
  return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm();
}

// ---------------------------------------------------------------------------
// Random helpers

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box-Muller on the raw engine keeps draws identical across toolchains.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Mat random_rotation(int n, std::mt19937_64& rng) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = standard_normal(rng);
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace thirdform
