#include "thirdform/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace thirdform {

namespace {

std::string fmt_residual(const char* what, double value, double bound) {
  std::ostringstream msg;
  msg.precision(3);
  msg << what << " residual " << std::scientific << value << " exceeds " << bound;
  return msg.str();
}

Mat sym_product(const Mat& a, const Mat& b) { return 0.5 * (a * b + b * a); }

// Splits the columns of `basis` by the eigen-clusters of basis^T g basis.
std::vector<Mat> split_by(const Mat& basis, const Mat& g, double cluster_tol) {
  const SymOp restricted = SymOp::symmetrized(basis.transpose() * g * basis);
  const EigenClustering cl = eig_sym(restricted, cluster_tol);
  std::vector<Mat> parts;
  parts.reserve(cl.clusters.size());
  for (const auto& c : cl.clusters) parts.push_back(basis * c.basis);
  return parts;
}

double min_gap(const EigenClustering& cl) {
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 1; i < cl.size(); ++i) gap = std::min(gap, cl.clusters[i].value - cl.clusters[i - 1].value);
  return gap;
}

}  // namespace

// ---------------------------------------------------------------------------
// BilinearForm2

BilinearForm2::BilinearForm2(SymOp a1, SymOp a2) : a1_(std::move(a1)), a2_(std::move(a2)) {
  if (a1_.dim() != a2_.dim()) throw Error(ErrorCode::DimensionMismatch, "shape operators differ in size");
}

Vec2 BilinearForm2::value(const Vec& x, const Vec& y) const {
  return {x.dot(a1_.matrix() * y), x.dot(a2_.matrix() * y)};
}

double BilinearForm2::scale() const { return 1.0 + std::max(a1_.spectral_radius(), a2_.spectral_radius()); }

BilinearForm2 BilinearForm2::restricted(const Mat& basis) const {
  return {SymOp::symmetrized(basis.transpose() * a1_.matrix() * basis),
          SymOp::symmetrized(basis.transpose() * a2_.matrix() * basis)};
}

BilinearForm2 BilinearForm2::rotated_normals(double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {SymOp::symmetrized(c * a1_.matrix() + s * a2_.matrix()),
          SymOp::symmetrized(-s * a1_.matrix() + c * a2_.matrix())};
}

BilinearForm2 BilinearForm2::conjugated(const Mat& q) const {
  return {SymOp::symmetrized(q * a1_.matrix() * q.transpose()),
          SymOp::symmetrized(q * a2_.matrix() * q.transpose())};
}

// ---------------------------------------------------------------------------
// Third form and umbilicity

double ThirdForm::umbilic_residual() const {
  return (components - mean() * Mat::Identity(dim(), dim())).norm();
}

ThirdForm third_form(const BilinearForm2& f) {
  const Mat& a1 = f.a1().matrix();
  const Mat& a2 = f.a2().matrix();
  const Mat iii = a1 * a1 + a2 * a2;
  return {0.5 * (iii + iii.transpose())};
}

std::optional<Vec> is_umbilical_form(std::span<const Mat> phi, double tol) {
  if (phi.empty()) throw Error(ErrorCode::NotBilinear, "no component matrices");
  const Eigen::Index n = phi.front().rows();
  if (n == 0) throw Error(ErrorCode::NotBilinear, "empty domain");
  double magnitude = 0.0;
  for (const Mat& m : phi) {
    if (m.rows() != n || m.cols() != n) throw Error(ErrorCode::NotBilinear, "component matrices must be n x n");
    if (!m.allFinite()) throw Error(ErrorCode::NotBilinear, "non-finite component");
    magnitude = std::max(magnitude, m.cwiseAbs().maxCoeff());
  }
  const double bound = tol * (1.0 + magnitude);

  // phi(X_i, X_j) = 0 for i != j, and phi_ii - phi_kk = 2 phi((X_i+X_k)/sqrt2, (X_i-X_k)/sqrt2) = 0.
  Vec xi(static_cast<Eigen::Index>(phi.size()));
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const Mat& m = phi[k];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j && std::abs(m(i, j)) > bound) return std::nullopt;
      }
      if (std::abs(m(i, i) - m(0, 0)) > bound) return std::nullopt;
    }
    xi[static_cast<Eigen::Index>(k)] = m.diagonal().mean();
  }
  return xi;
}

std::optional<double> homothety_factor(const ThirdForm& iii, double tol) {
  const double mu = iii.mean();
  if (mu <= tol) return std::nullopt;
  if (iii.umbilic_residual() > tol * (1.0 + mu)) return std::nullopt;
  return 1.0 / mu;
}

// ---------------------------------------------------------------------------
// Generic normal

GenericNormal generic_normal(const BilinearForm2& f, std::uint64_t seed, double cluster_rel) {
  std::mt19937_64 rng(seed);
  const double shift = unit_uniform(rng);

  GenericNormal best;
  int best_count = 0;
  double best_gap = -1.0;
  double best_spread = 0.0;
  for (std::uint64_t i = 1; i <= 64; ++i) {
    double t = radical_inverse(i, 2) + shift;
    t -= std::floor(t);
    const Vec2 xi(std::cos(M_PI * t), std::sin(M_PI * t));
    const Mat a = f.shape(xi);
    const SymOp square = SymOp::symmetrized(a * a);
    const double tol = default_cluster_tol(square, cluster_rel);
    const EigenClustering cl = eig_sym(square, tol);
    const double gap = min_gap(cl);
    if (cl.size() > best_count || (cl.size() == best_count && gap > best_gap)) {
      best_count = cl.size();
      best_gap = gap;
      best.xi = xi;
      best.cluster_tol = tol;
      best.eigenvalues.clear();
      for (const auto& c : cl.clusters) best.eigenvalues.push_back(c.value);
      Eigen::SelfAdjointEigenSolver<Mat> solver(square.matrix(), Eigen::EigenvaluesOnly);
      best_spread = solver.eigenvalues().size() ? solver.eigenvalues().maxCoeff() - solver.eigenvalues().minCoeff() : 0.0;
    }
  }
  // A single cluster that chains together eigenvalues spread wider than the
  // tolerance has no consistent eigenspace decomposition.
  if (best_count == 1 && best_spread > 2.0 * best.cluster_tol) {
    throw Error(ErrorCode::DegenerateFamily, fmt_residual("chained eigenvalue spread", best_spread, 2.0 * best.cluster_tol));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Adapted decomposition

AdaptedDecomposition decompose(const BilinearForm2& f, const FormTolerances& tol, std::uint64_t seed) {
  const int n = f.dim();
  const ThirdForm iii = third_form(f);
  const double mu = iii.mean();

  AdaptedDecomposition out;
  out.umbilic_residual = iii.umbilic_residual();
  if (out.umbilic_residual > tol.certificate * (1.0 + mu)) {
    throw Error(ErrorCode::NotUmbilicalThirdForm,
                fmt_residual("third form umbilicity", out.umbilic_residual, tol.certificate * (1.0 + mu)));
  }
  if (mu > tol.certificate) out.homothety_r2 = 1.0 / mu;

  const double scale = f.scale();
  const GenericNormal generic = generic_normal(f, seed, tol.cluster);
  out.generic_xi = generic.xi;

  const Mat& a1 = f.a1().matrix();
  const Mat& a2 = f.a2().matrix();

  // Bootstrap from the eigenspaces of A_xi^2 at the generic normal.
  std::vector<Mat> parts;
  {
    const Mat a = f.shape(generic.xi);
    parts = split_by(Mat::Identity(n, n), a * a, generic.cluster_tol);
  }

  // Refine against the generators A1^2, A2^2, A1A2 + A2A1 of {A_xi^2}; their
  // common eigenspaces are the blocks.
  const std::vector<Mat> generators{a1 * a1, a2 * a2, 2.0 * sym_product(a1, a2)};
  for (bool changed = true; changed;) {
    changed = false;
    for (const Mat& g : generators) {
      const double gtol = tol.cluster * (1.0 + SymOp::symmetrized(g).spectral_radius());
      std::vector<Mat> next;
      for (const Mat& basis : parts) {
        auto split = split_by(basis, g, gtol);
        if (split.size() > 1) changed = true;
        for (auto& s : split) next.push_back(std::move(s));
      }
      parts = std::move(next);
    }
  }

  const Mat identity = Mat::Identity(n, n);
  for (const Mat& basis : parts) {
    const int d = static_cast<int>(basis.cols());
    const Mat complement = identity - basis * basis.transpose();
    double residual = std::max((complement * a1 * basis).norm(), (complement * a2 * basis).norm());

    Block block;
    block.basis = basis;
    const Mat s1 = basis.transpose() * a1 * a1 * basis;
    const Mat s2 = basis.transpose() * a2 * a2 * basis;
    const double l1 = std::max(0.0, s1.trace() / d);
    const double l2 = std::max(0.0, s2.trace() / d);
    block.lambda = Vec2(std::sqrt(l1), std::sqrt(l2));
    residual = std::max(residual, (s1 - l1 * Mat::Identity(d, d)).norm() / scale);
    residual = std::max(residual, (s2 - l2 * Mat::Identity(d, d)).norm() / scale);
    out.adaptedness_residual = std::max(out.adaptedness_residual, residual);
    out.blocks.push_back(std::move(block));
  }
  if (out.adaptedness_residual > tol.certificate * scale) {
    throw Error(ErrorCode::AdaptednessViolated,
                fmt_residual("adaptedness", out.adaptedness_residual, tol.certificate * scale));
  }

  std::sort(out.blocks.begin(), out.blocks.end(), [](const Block& x, const Block& y) {
    if (x.lambda[0] != y.lambda[0]) return x.lambda[0] < y.lambda[0];
    if (x.lambda[1] != y.lambda[1]) return x.lambda[1] < y.lambda[1];
    return x.dim() < y.dim();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Block structure

double BlockStructure::max_residual() const {
  return std::max({a_star_a_residual, a_a_star_residual, rho_sigma_residual, trace_residual, rho_residual});
}

namespace {

// Splits the eigenvectors of a symmetric operator by eigenvalue sign.
std::pair<Mat, Mat> sign_split(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (a + a.transpose()));
  const Vec& values = solver.eigenvalues();
  const Mat& vectors = solver.eigenvectors();
  std::vector<int> plus;
  std::vector<int> minus;
  for (int i = 0; i < values.size(); ++i) (values[i] > 0.0 ? plus : minus).push_back(i);
  Mat e_plus(a.rows(), static_cast<Eigen::Index>(plus.size()));
  Mat e_minus(a.rows(), static_cast<Eigen::Index>(minus.size()));
  for (std::size_t i = 0; i < plus.size(); ++i) e_plus.col(static_cast<Eigen::Index>(i)) = vectors.col(plus[i]);
  for (std::size_t i = 0; i < minus.size(); ++i) e_minus.col(static_cast<Eigen::Index>(i)) = vectors.col(minus[i]);
  return {e_plus, e_minus};
}

}  // namespace

BlockAnalysis block_structure(const BilinearForm2& block, double tol) {
  const int m = block.dim();
  if (m == 0) throw Error(ErrorCode::InvalidParams, "empty block");
  const Mat& a1 = block.a1().matrix();
  const Mat& a2 = block.a2().matrix();
  const double scale = block.scale();

  // lambda(xi)^2 = xi^T Q xi on a block where every A_xi^2 is scalar.
  Eigen::Matrix2d q;
  q(0, 0) = (a1 * a1).trace() / m;
  q(1, 1) = (a2 * a2).trace() / m;
  q(0, 1) = q(1, 0) = (a1 * a2).trace() / m;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> qsolver(q);
  const double q_min = qsolver.eigenvalues()[0];
  const double q_max = qsolver.eigenvalues()[1];

  if (q_min <= tol * (1.0 + q_max)) {
    DegenerateBlock degenerate;
    degenerate.kernel_normal = qsolver.eigenvectors().col(0);
    degenerate.active_normal = qsolver.eigenvectors().col(1);
    degenerate.lambda_active = std::sqrt(std::max(0.0, q_max));
    if (degenerate.lambda_active <= tol * scale) {
      degenerate.e_plus = Mat::Identity(m, m);
      degenerate.e_minus = Mat(m, 0);
    } else {
      std::tie(degenerate.e_plus, degenerate.e_minus) = sign_split(block.shape(degenerate.active_normal));
    }
    return degenerate;
  }

  BlockStructure bs;
  bs.lambda1 = std::sqrt(q(0, 0));
  bs.lambda2 = std::sqrt(q(1, 1));
  std::tie(bs.e_plus, bs.e_minus) = sign_split(a1);
  if (bs.e_plus.cols() != bs.e_minus.cols()) {
    std::ostringstream msg;
    msg << "dim E+ = " << bs.e_plus.cols() << " but dim E- = " << bs.e_minus.cols();
    throw Error(ErrorCode::UnequalHalfDimensions, msg.str());
  }
  const int h = bs.half_dim();
  const Mat ih = Mat::Identity(h, h);

  const Mat m_plus = bs.e_plus.transpose() * a2 * bs.e_plus;
  bs.rho = m_plus.trace() / h;
  bs.rho_residual = (m_plus - bs.rho * ih).norm();
  if (bs.rho_residual > tol * scale) {
    throw Error(ErrorCode::NonConstantRho, fmt_residual("rho", bs.rho_residual, tol * scale));
  }

  bs.a_map = bs.e_minus.transpose() * a2 * bs.e_plus;
  const Mat ata = bs.a_map.transpose() * bs.a_map;
  const Mat aat = bs.a_map * bs.a_map.transpose();
  bs.sigma = std::sqrt(std::max(0.0, ata.trace() / h));
  const double s2 = bs.sigma * bs.sigma;
  bs.a_star_a_residual = (ata - s2 * ih).norm();
  bs.a_a_star_residual = (aat - s2 * ih).norm();
  bs.rho_sigma_residual = std::abs(bs.rho * bs.rho + s2 - bs.lambda2 * bs.lambda2);
  bs.trace_residual = std::max(std::abs(a1.trace()), std::abs(a2.trace()));
  return bs;
}

double UmbilicalResiduals::max() const { return std::max({plus, minus, alpha_a, alpha_a_star}); }

UmbilicalResiduals umbilical_subforms_check(const BlockStructure& bs, const BilinearForm2& block) {
  const Mat& a1 = block.a1().matrix();
  const Mat& a2 = block.a2().matrix();
  const Mat& p = bs.e_plus;
  const Mat& m = bs.e_minus;
  const Mat& a = bs.a_map;
  const int h = bs.half_dim();
  const Mat ih = Mat::Identity(h, h);
  const double s2 = bs.sigma * bs.sigma;

  auto pair_norm = [](const Mat& x, const Mat& y) { return std::sqrt(x.squaredNorm() + y.squaredNorm()); };

  UmbilicalResiduals r;
  r.plus = pair_norm(p.transpose() * a1 * p - bs.lambda1 * ih, p.transpose() * a2 * p - bs.rho * ih);
  r.minus = pair_norm(m.transpose() * a1 * m + bs.lambda1 * ih, m.transpose() * a2 * m + bs.rho * ih);
  r.alpha_a = pair_norm(p.transpose() * a1 * m * a, p.transpose() * a2 * m * a - s2 * ih);
  r.alpha_a_star = pair_norm(m.transpose() * a1 * p * a.transpose(), m.transpose() * a2 * p * a.transpose() - s2 * ih);
  return r;
}

// ---------------------------------------------------------------------------
// Synthesis

BilinearForm2 synth_block(double lambda1, double rho, double sigma, int half_dim, std::uint64_t seed) {
  if (!(lambda1 > 0.0) || !(sigma >= 0.0) || half_dim < 1 || !std::isfinite(rho) || !std::isfinite(lambda1) ||
      !std::isfinite(sigma) || 2 * half_dim > kMaxDimension) {
    throw Error(ErrorCode::InvalidParams, "need lambda1 > 0, sigma >= 0, half_dim >= 1");
  }
  std::mt19937_64 rng(seed);
  const Mat q = random_rotation(half_dim, rng);
  const int h = half_dim;
  Mat a1 = Mat::Zero(2 * h, 2 * h);
  Mat a2 = Mat::Zero(2 * h, 2 * h);
  a1.topLeftCorner(h, h) = lambda1 * Mat::Identity(h, h);
  a1.bottomRightCorner(h, h) = -lambda1 * Mat::Identity(h, h);
  a2.topLeftCorner(h, h) = rho * Mat::Identity(h, h);
  a2.bottomRightCorner(h, h) = -rho * Mat::Identity(h, h);
  a2.bottomLeftCorner(h, h) = sigma * q;
  a2.topRightCorner(h, h) = sigma * q.transpose();
  return {SymOp(a1), SymOp(a2)};
}

BilinearForm2 synth_form(std::span<const BlockParams> blocks, std::uint64_t seed, bool rotate) {
  int n = 0;
  for (const auto& b : blocks) n += b.dim();
  if (n == 0 || n > kMaxDimension) throw Error(ErrorCode::InvalidParams, "total dimension out of range");
  Mat a1 = Mat::Zero(n, n);
  Mat a2 = Mat::Zero(n, n);
  int offset = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (b.line) {
      a1(offset, offset) = b.eta[0];
      a2(offset, offset) = b.eta[1];
    } else {
      const BilinearForm2 part = synth_block(b.lambda1, b.rho, b.sigma, b.half_dim, seed * 1000003ULL + i + 1);
      a1.block(offset, offset, b.dim(), b.dim()) = part.a1().matrix();
      a2.block(offset, offset, b.dim(), b.dim()) = part.a2().matrix();
    }
    offset += b.dim();
  }
  BilinearForm2 form{SymOp(a1), SymOp(a2)};
  if (!rotate) return form;
  std::mt19937_64 rng(seed);
  return form.conjugated(random_rotation(n, rng));
}

// ---------------------------------------------------------------------------
// Principal normals

PrincipalNormals principal_normals(std::span<const SymOp> shape, double tol, std::uint64_t seed) {
  if (shape.empty()) throw Error(ErrorCode::InvalidParams, "no shape operators");
  const int n = shape.front().dim();
  const int q = static_cast<int>(shape.size());
  for (const auto& a : shape) {
    if (a.dim() != n) throw Error(ErrorCode::DimensionMismatch, "shape operators differ in size");
  }
  std::vector<double> norms;
  for (const auto& a : shape) norms.push_back(a.spectral_radius());
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      const double c = commutator_norm(shape[i], shape[j]);
      const double bound = tol * (1.0 + norms[i] * norms[j]);
      if (c > bound) throw Error(ErrorCode::NotFlat, fmt_residual("commutator", c, bound));
    }
  }

  std::mt19937_64 rng(seed);
  EigenClustering best;
  double best_gap = -1.0;
  for (int trial = 0; trial < 64; ++trial) {
    Vec xi(q);
    for (int k = 0; k < q; ++k) xi[k] = standard_normal(rng);
    xi.normalize();
    Mat a = Mat::Zero(n, n);
    for (int k = 0; k < q; ++k) a += xi[k] * shape[k].matrix();
    const EigenClustering cl = eig_sym(SymOp::symmetrized(a));
    const double gap = min_gap(cl);
    if (cl.size() > best.size() || (cl.size() == best.size() && gap > best_gap)) {
      best = cl;
      best_gap = gap;
    }
  }

  PrincipalNormals out;
  double max_norm = *std::max_element(norms.begin(), norms.end());
  for (const auto& c : best.clusters) {
    Vec eta(q);
    for (int k = 0; k < q; ++k) eta[k] = (c.basis.transpose() * shape[k].matrix() * c.basis).trace() / c.dim();
    bool merged = false;
    for (std::size_t i = 0; i < out.normals.size(); ++i) {
      if ((out.normals[i] - eta).norm() <= tol * (1.0 + max_norm)) {
        Mat joined(n, out.bases[i].cols() + c.dim());
        joined << out.bases[i], c.basis;
        out.bases[i] = joined;
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.normals.push_back(eta);
      out.bases.push_back(c.basis);
    }
  }
  return out;
}

PrincipalNormals principal_normals(const BilinearForm2& f, double tol) {
  const std::vector<SymOp> shape{f.a1(), f.a2()};
  return principal_normals(shape, tol);
}

}  // namespace thirdform
