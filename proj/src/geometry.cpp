#include "thirdform/geometry.hpp"

#include <cmath>
#include <sstream>

namespace thirdform {

// ---------------------------------------------------------------------------
// ChartBox / Immersion

bool ChartBox::contains(const Vec& u) const {
  if (u.size() != lower.size()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!(u[i] >= lower[i] && u[i] <= upper[i])) return false;
  }
  return true;
}

ChartBox ChartBox::shrunk(double fraction) const {
  const Vec margin = fraction * (upper - lower);
  return {lower + margin, upper - margin};
}

double ChartBox::scale() const { return (upper - lower).maxCoeff(); }

Vec ChartBox::at(const Vec& unit) const { return lower + unit.cwiseProduct(upper - lower); }

Jet2 Immersion::evaluate(const Vec& u) const {
  if (!domain.contains(u)) {
    std::ostringstream msg;
    msg << "chart point (" << u.transpose() << ") outside the domain";
    throw Error(ErrorCode::OutOfDomain, msg.str());
  }
  Jet2 jet_u = jet(u);
  const int big_n = ambient_dim();
  if (jet_u.position.size() != big_n || jet_u.first.rows() != big_n || jet_u.first.cols() != n ||
      static_cast<int>(jet_u.second.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "jet callback returned wrong shapes");
  }
  return jet_u;
}

// ---------------------------------------------------------------------------
// Frames

namespace {

// Completes the orthonormal columns of `frame` by `count` vectors drawn from
// the ambient standard basis, taking at each step the candidate with the
// largest |self-product| after projection.
Frame complete_frame(const Frame& frame, const InnerProduct& ip, int count) {
  const int big_n = ip.dim();
  Mat vectors = frame.vectors;
  std::vector<int> signs = frame.signs;
  Frame added;
  added.vectors.resize(big_n, count);

  std::vector<bool> used(big_n, false);
  for (int step = 0; step < count; ++step) {
    int best = -1;
    double best_self = 0.0;
    Vec best_residual;
    for (int k = 0; k < big_n; ++k) {
      if (used[k]) continue;
      Vec r = Vec::Unit(big_n, k);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < vectors.cols(); ++i) r -= signs[i] * ip(r, vectors.col(i)) * vectors.col(i);
      }
      const double self = std::abs(ip(r, r));
      if (self > best_self) {
        best = k;
        best_self = self;
        best_residual = r;
      }
    }
    if (best < 0 || best_self < 1e-12) throw Error(ErrorCode::RankDeficient, "cannot complete the normal frame");
    used[best] = true;
    const double self = ip(best_residual, best_residual);
    const Vec unit = best_residual / std::sqrt(std::abs(self));
    vectors.conservativeResize(Eigen::NoChange, vectors.cols() + 1);
    vectors.col(vectors.cols() - 1) = unit;
    signs.push_back(self > 0.0 ? 1 : -1);
    added.vectors.col(step) = unit;
    added.signs.push_back(signs.back());
  }
  return added;
}

std::vector<SymOp> shape_operators(const Mat& hessian, const Frame& normals, const InnerProduct& ip, int n) {
  std::vector<SymOp> out;
  out.reserve(normals.size());
  for (int k = 0; k < normals.size(); ++k) {
    const Vec lowered = ip.lower(normals.vectors.col(k));
    const Vec flat = hessian.transpose() * lowered;
    out.push_back(SymOp::symmetrized(Eigen::Map<const Mat>(flat.data(), n, n)));
  }
  return out;
}

Vec mean_curvature_of(const std::vector<SymOp>& shape, int n) {
  Vec h(static_cast<Eigen::Index>(shape.size()));
  for (std::size_t k = 0; k < shape.size(); ++k) h[static_cast<Eigen::Index>(k)] = shape[k].matrix().trace() / n;
  return h;
}

}  // namespace

double default_ricci_step(const Immersion& imm) { return 1e-3 * imm.domain.scale(); }

double PointData::mean_curvature_norm() const {
  double sum = 0.0;
  for (int k = 0; k < codim(); ++k) sum += normal_signs[k] * mean_curvature[k] * mean_curvature[k];
  return std::sqrt(std::abs(sum));
}

PointData point_data(const Immersion& imm, const Vec& u, const GeometryOptions& options) {
  const Jet2 jet = imm.evaluate(u);
  const InnerProduct& ip = imm.ambient;
  const int n = imm.n;

  PointData pd;
  pd.u = u;
  pd.position = jet.position;
  pd.ambient = ip;
  pd.metric = ip.gram(jet.first, jet.first);

  Eigen::SelfAdjointEigenSolver<Mat> metric_eigen(pd.metric, Eigen::EigenvaluesOnly);
  const double g_min = metric_eigen.eigenvalues().minCoeff();
  const double g_max = metric_eigen.eigenvalues().maxCoeff();
  if (!(g_min > 0.0) || g_max / g_min > 1e8) {
    throw Error(ErrorCode::RankDeficient, "induced metric is degenerate or ill-conditioned");
  }

  const Frame tangent = gram_schmidt(jet.first, ip, Causality::SpacelikeOnly);
  pd.tangent = tangent.vectors;
  pd.frame_change = ip.gram(pd.tangent, jet.first);
  const Frame normal = complete_frame(tangent, ip, imm.codim());
  pd.normal = normal.vectors;
  pd.normal_signs = normal.signs;

  const Mat rinv = pd.frame_change.inverse();
  pd.hessian = Mat::Zero(imm.ambient_dim(), n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec acc = Vec::Zero(imm.ambient_dim());
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) acc += rinv(a, i) * rinv(b, j) * jet.second[a].col(b);
      }
      pd.hessian.col(i * n + j) = acc;
    }
  }
  pd.shape = shape_operators(pd.hessian, normal, ip, n);
  pd.mean_curvature = mean_curvature_of(pd.shape, n);

  if (options.ricci == RicciMode::Compute) {
    const double h = options.ricci_step > 0.0 ? options.ricci_step : default_ricci_step(imm);
    pd.ricci = ricci_intrinsic(imm, u, h);
  }
  return pd;
}

// ---------------------------------------------------------------------------
// Third form, both routes

ThirdForm third_form_direct(const PointData& pd) {
  const int n = pd.n();
  Mat iii = Mat::Zero(n, n);
  for (int k = 0; k < pd.codim(); ++k) iii += pd.normal_signs[k] * pd.shape[k].matrix() * pd.shape[k].matrix();
  return {0.5 * (iii + iii.transpose())};
}

ThirdForm third_form_direct(const SpaceFormData& sf) {
  const int n = sf.point.n();
  Mat iii = Mat::Zero(n, n);
  for (const auto& a : sf.shape) iii += a.matrix() * a.matrix();
  return {0.5 * (iii + iii.transpose())};
}

namespace {

Mat ricci_coordinates(const std::function<Mat(const Vec&)>& metric, const Vec& u, double h) {
  const int n = static_cast<int>(u.size());
  auto shifted = [&](int c, double sc, int d, double sd) {
    Vec v = u;
    v[c] += sc * h;
    if (d >= 0) v[d] += sd * h;
    return metric(v);
  };

  const Mat g0 = metric(u);
  const Mat ginv = g0.inverse();
  std::vector<Mat> dg(n);
  std::vector<std::vector<Mat>> ddg(n, std::vector<Mat>(n));
  for (int c = 0; c < n; ++c) {
    const Mat gp = shifted(c, 1.0, -1, 0.0);
    const Mat gm = shifted(c, -1.0, -1, 0.0);
    dg[c] = (gp - gm) / (2.0 * h);
    ddg[c][c] = (gp - 2.0 * g0 + gm) / (h * h);
  }
  for (int c = 0; c < n; ++c) {
    for (int d = c + 1; d < n; ++d) {
      ddg[c][d] = (shifted(c, 1, d, 1) - shifted(c, 1, d, -1) - shifted(c, -1, d, 1) + shifted(c, -1, d, -1)) /
                  (4.0 * h * h);
      ddg[d][c] = ddg[c][d];
    }
  }

  // Christoffel symbols of the second kind, gamma[m](b, c) = Gamma^m_bc.
  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int m = 0; m < n; ++m) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        double sum = 0.0;
        for (int e = 0; e < n; ++e) sum += ginv(m, e) * 0.5 * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
        gamma[m](b, c) = sum;
      }
    }
  }

  auto riemann = [&](int i, int k, int l, int m) {
    double r = 0.5 * (ddg[k][l](i, m) + ddg[i][m](k, l) - ddg[k][m](i, l) - ddg[i][l](k, m));
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) r += g0(p, q) * (gamma[p](k, l) * gamma[q](i, m) - gamma[p](k, m) * gamma[q](i, l));
    }
    return r;
  };

  Mat ric = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int m = k; m < n; ++m) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) sum += ginv(i, l) * riemann(i, k, l, m);
      }
      ric(k, m) = ric(m, k) = sum;
    }
  }
  return ric;
}

}  // namespace

Mat ricci_intrinsic(const Immersion& imm, const Vec& u, double h) {
  const int n = imm.n;
  if (n == 1) return Mat::Zero(1, 1);
  const InnerProduct& ip = imm.ambient;
  auto metric = [&](const Vec& v) {
    const Jet2 j = imm.jet(v);
    return Mat(ip.gram(j.first, j.first));
  };
  const Mat coarse = ricci_coordinates(metric, u, h);
  const Mat fine = ricci_coordinates(metric, u, 0.5 * h);
  const double disagreement = (coarse - fine).norm();
  if (disagreement > 1e-4 * (1.0 + fine.norm())) {
    std::ostringstream msg;
    msg << "Richardson pair disagrees by " << disagreement << " at step " << h;
    throw Error(ErrorCode::StepTooLarge, msg.str());
  }
  const Mat coordinate = (4.0 * fine - coarse) / 3.0;

  const Jet2 jet = imm.evaluate(u);
  const Frame tangent = gram_schmidt(jet.first, ip, Causality::SpacelikeOnly);
  const Mat rinv = ip.gram(tangent.vectors, jet.first).inverse();
  const Mat ortho = rinv.transpose() * coordinate * rinv;
  return 0.5 * (ortho + ortho.transpose());
}

ThirdForm third_form_invariant(const PointData& pd, const Mat& ricci) {
  const int n = pd.n();
  if (ricci.rows() != n || ricci.cols() != n) throw Error(ErrorCode::MissingRicci, "Ricci tensor absent or malformed");
  Mat iii = -ricci;
  for (int k = 0; k < pd.codim(); ++k) iii += n * pd.normal_signs[k] * pd.mean_curvature[k] * pd.shape[k].matrix();
  return {0.5 * (iii + iii.transpose())};
}

ThirdForm third_form_invariant(const PointData& pd) {
  if (!pd.ricci) throw Error(ErrorCode::MissingRicci, "point data computed without Ricci");
  return third_form_invariant(pd, *pd.ricci);
}

ThirdForm third_form_invariant(const SpaceFormData& sf, const Mat& ricci) {
  const int n = sf.point.n();
  if (ricci.rows() != n || ricci.cols() != n) throw Error(ErrorCode::MissingRicci, "Ricci tensor absent or malformed");
  Mat iii = -ricci + (n - 1) * sf.c * Mat::Identity(n, n);
  for (int k = 0; k < sf.codim(); ++k) iii += n * sf.mean_curvature[k] * sf.shape[k].matrix();
  return {0.5 * (iii + iii.transpose())};
}

ThirdForm third_form_invariant(const SpaceFormData& sf) {
  if (!sf.point.ricci) throw Error(ErrorCode::MissingRicci, "point data computed without Ricci");
  return third_form_invariant(sf, *sf.point.ricci);
}

// ---------------------------------------------------------------------------
// Space-form reduction

SpaceFormData reduce_to_space_form(const PointData& pd, const Immersion& imm) {
  if (!imm.curvature || *imm.curvature == 0.0) {
    throw Error(ErrorCode::NotOnQuadric, "immersion carries no nonzero space-form curvature");
  }
  const double c = *imm.curvature;
  const InnerProduct& ip = pd.ambient;
  const double norm2 = ip(pd.position, pd.position);
  if (std::abs(norm2 - 1.0 / c) > 1e-10 * (1.0 + std::abs(1.0 / c))) {
    std::ostringstream msg;
    msg << "<f, f> = " << norm2 << " but 1/c = " << 1.0 / c;
    throw Error(ErrorCode::NotOnQuadric, msg.str());
  }

  SpaceFormData sf;
  sf.point = pd;
  sf.c = c;
  sf.radial = std::sqrt(std::abs(c)) * pd.position;

  Frame known;
  known.vectors.resize(ip.dim(), pd.n() + 1);
  known.vectors << pd.tangent, sf.radial;
  known.signs.assign(pd.n(), 1);
  known.signs.push_back(c > 0.0 ? 1 : -1);
  const Frame normal = complete_frame(known, ip, pd.codim() - 1);
  for (int s : normal.signs) {
    if (s != 1) throw Error(ErrorCode::SignatureMismatch, "normal frame inside Q_c is not spacelike");
  }
  sf.normal = normal.vectors;
  sf.shape = shape_operators(pd.hessian, normal, ip, pd.n());
  sf.mean_curvature = mean_curvature_of(sf.shape, pd.n());
  return sf;
}

double gauss_consistency(const Immersion& imm, const Vec& u) {
  const PointData pd = point_data(imm, u);
  double residual = (third_form_direct(pd).components - third_form_invariant(pd).components).norm();
  if (imm.curvature && *imm.curvature != 0.0) {
    const SpaceFormData sf = reduce_to_space_form(pd, imm);
    residual = std::max(residual, (third_form_direct(sf).components - third_form_invariant(sf).components).norm());
  }
  return residual;
}

}  // namespace thirdform
