#include "thirdform/classify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SVD>

namespace thirdform {

// ---------------------------------------------------------------------------
// Enum names

namespace {

constexpr std::array<std::pair<VerdictKind, std::string_view>, 6> kKindNames{{
    {VerdictKind::TotallyGeodesic, "TotallyGeodesic"},
    {VerdictKind::RoundSphere, "RoundSphere"},
    {VerdictKind::SphereProduct, "SphereProduct"},
    {VerdictKind::VeroneseLike, "VeroneseLike"},
    {VerdictKind::NotHomothetic, "NotHomothetic"},
    {VerdictKind::Inconclusive, "Inconclusive"},
}};

constexpr std::array<std::pair<AnalysisFrame, std::string_view>, 3> kFrameNames{{
    {AnalysisFrame::Auto, "auto"},
    {AnalysisFrame::Euclidean, "euclidean"},
    {AnalysisFrame::SpaceForm, "space_form"},
}};

}  // namespace

std::string_view to_string(VerdictKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::string_view to_string(AnalysisFrame frame) {
  for (const auto& [f, name] : kFrameNames) {
    if (f == frame) return name;
  }
  return "?";
}

std::optional<VerdictKind> parse_verdict_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::optional<AnalysisFrame> parse_analysis_frame(std::string_view text) {
  for (const auto& [f, name] : kFrameNames) {
    if (name == text) return f;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sampling

AnalysisFrame resolve_frame(const Immersion& imm, AnalysisFrame requested) {
  const bool has_c = imm.curvature && *imm.curvature != 0.0;
  switch (requested) {
    case AnalysisFrame::Euclidean:
      if (imm.ambient.is_lorentz()) throw Error(ErrorCode::SignatureMismatch, "Lorentz ambient has no Euclidean frame");
      return AnalysisFrame::Euclidean;
    case AnalysisFrame::SpaceForm:
      if (!has_c) throw Error(ErrorCode::BadCurvature, "immersion does not lie in a curved space form");
      return AnalysisFrame::SpaceForm;
    case AnalysisFrame::Auto:
      break;
  }
  if (imm.ambient.is_lorentz()) {
    if (!has_c) throw Error(ErrorCode::BadCurvature, "Lorentz ambient without space-form curvature");
    return AnalysisFrame::SpaceForm;
  }
  if (imm.codim() <= 2 || !has_c) return AnalysisFrame::Euclidean;
  return AnalysisFrame::SpaceForm;
}

namespace {

int nth_prime(int k) {
  static std::vector<int> primes{2};
  for (int p = primes.back() + 1; static_cast<int>(primes.size()) <= k; ++p) {
    bool prime = true;
    for (int q : primes) {
      if (q * q > p) break;
      if (p % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(p);
  }
  return primes[k];
}

}  // namespace

std::vector<Vec> sample_points(const ChartBox& box, int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::SamplingFailed, "sample count must be at least 1");
  const int n = box.dim();
  std::mt19937_64 rng(seed);
  Vec shift(n);
  for (int d = 0; d < n; ++d) shift[d] = unit_uniform(rng);
  const ChartBox inner = box.shrunk(0.01);
  std::vector<Vec> points;
  points.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vec unit(n);
    for (int d = 0; d < n; ++d) {
      const double x = radical_inverse(static_cast<std::uint64_t>(i) + 1, nth_prime(d)) + shift[d];
      unit[d] = x - std::floor(x);
    }
    points.push_back(inner.at(unit));
  }
  return points;
}

// ---------------------------------------------------------------------------
// Certificates

FlatnessCertificate flatness_certificate(std::span<const SymOp> shape, double tol) {
  FlatnessCertificate cert;
  cert.flat = true;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    for (std::size_t j = i + 1; j < shape.size(); ++j) {
      const double comm = commutator_norm(shape[i], shape[j]);
      const double bound = tol * (1.0 + shape[i].matrix().norm() * shape[j].matrix().norm());
      cert.max_commutator = std::max(cert.max_commutator, comm);
      cert.bound = std::max(cert.bound, bound);
      if (comm > bound) cert.flat = false;
    }
  }
  if (cert.bound == 0.0) cert.bound = tol;
  return cert;
}

FlatnessCertificate flatness_certificate(const PointData& pd, double tol) { return flatness_certificate(pd.shape, tol); }

FlatnessCertificate flatness_certificate(const SpaceFormData& sf, double tol) {
  return flatness_certificate(sf.shape, tol);
}

MinimalityCertificate minimality_certificate(std::span<const SampleRow> rows, double tol) {
  MinimalityCertificate cert;
  for (const auto& r : rows) {
    cert.max_mean_curvature = std::max(cert.max_mean_curvature, r.mean_curvature_norm);
    cert.max_block_trace = std::max(cert.max_block_trace, r.block_trace);
  }
  cert.minimal = !rows.empty() && cert.max_mean_curvature <= tol;
  return cert;
}

namespace {

EinsteinCertificate einstein_from(std::span<const Mat> riccis, double tol) {
  EinsteinCertificate cert;
  if (riccis.empty()) return cert;
  const int n = static_cast<int>(riccis.front().rows());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double defect = 0.0;
  double sum = 0.0;
  for (const Mat& ric : riccis) {
    // In dimension two trace/2 is the Gaussian curvature.
    const double mu = ric.trace() / n;
    lo = std::min(lo, mu);
    hi = std::max(hi, mu);
    sum += mu;
    if (n >= 3) defect = std::max(defect, (ric - mu * Mat::Identity(n, n)).norm());
  }
  cert.mu = sum / static_cast<double>(riccis.size());
  cert.spread = std::max(hi - lo, defect);
  cert.einstein = cert.spread <= tol * (1.0 + std::abs(cert.mu));
  return cert;
}

}  // namespace

EinsteinCertificate einstein_certificate(const Immersion& imm, std::span<const Vec> points, double tol) {
  if (imm.n < 2) throw Error(ErrorCode::InvalidParams, "Einstein certificate needs n >= 2");
  std::vector<Mat> riccis;
  riccis.reserve(points.size());
  for (const Vec& u : points) riccis.push_back(ricci_intrinsic(imm, u, default_ricci_step(imm)));
  return einstein_from(riccis, tol);
}

VerdictKind decide(const DecisionInputs& in) {
  if (!in.homothetic) return VerdictKind::NotHomothetic;
  if (in.totally_geodesic) return VerdictKind::TotallyGeodesic;
  if (in.n == 1) return in.planar ? VerdictKind::RoundSphere : VerdictKind::Inconclusive;
  if (in.flat) {
    if (in.k == 1) return VerdictKind::RoundSphere;
    if (in.k >= 2 && in.equal_norms) return VerdictKind::SphereProduct;
    return VerdictKind::Inconclusive;
  }
  if (in.n == 2 && in.c && *in.c > 0.0 && in.minimal && in.curvature_matches) return VerdictKind::VeroneseLike;
  return VerdictKind::Inconclusive;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

struct PointForms {
  std::vector<SymOp> shape;
  ThirdForm direct;
  std::optional<ThirdForm> invariant;
  double mean_curvature_norm = 0.0;
};

PointForms forms_at(const Immersion& imm, const PointData& pd, AnalysisFrame frame) {
  PointForms out;
  if (frame == AnalysisFrame::SpaceForm) {
    const SpaceFormData sf = reduce_to_space_form(pd, imm);
    out.shape = sf.shape;
    out.direct = third_form_direct(sf);
    if (pd.ricci) out.invariant = third_form_invariant(sf);
    out.mean_curvature_norm = sf.mean_curvature_norm();
  } else {
    out.shape = pd.shape;
    out.direct = third_form_direct(pd);
    if (pd.ricci) out.invariant = third_form_invariant(pd);
    out.mean_curvature_norm = pd.mean_curvature_norm();
  }
  return out;
}

void fill_blocks(SampleRow& row, const BilinearForm2& form, const SamplingConfig& cfg) {
  const Tolerances& tol = cfg.tol;
  AdaptedDecomposition dec;
  try {
    dec = decompose(form, {tol.cluster, tol.certificate}, cfg.seed);
  } catch (const Error&) {
    row.block_residual = std::numeric_limits<double>::infinity();
    return;
  }
  for (const Block& b : dec.blocks) {
    row.lambdas.push_back(b.lambda);
    row.block_dims.push_back(b.dim());
    const BilinearForm2 restricted = form.restricted(b.basis);
    try {
      const BlockAnalysis analysis = block_structure(restricted, tol.certificate);
      if (const auto* bs = std::get_if<BlockStructure>(&analysis)) {
        const double subforms = umbilical_subforms_check(*bs, restricted).max();
        row.block_residual = std::max({row.block_residual, bs->max_residual(), subforms});
        row.block_trace = std::max(row.block_trace, bs->trace_residual);
      }
    } catch (const Error&) {
      row.block_residual = std::numeric_limits<double>::infinity();
    }
  }
  row.k = dec.k();
}

SampleRow analyze_point(const Immersion& imm, const Vec& u, int index, AnalysisFrame frame,
                        const SamplingConfig& cfg) {
  const Tolerances& tol = cfg.tol;
  const int n = imm.n;
  const PointData pd = point_data(imm, u, {n >= 2 ? RicciMode::Compute : RicciMode::Skip});
  PointForms pf = forms_at(imm, pd, frame);

  SampleRow row;
  row.index = index;
  row.u = u;
  row.position = pd.position;
  row.mean_curvature_norm = pf.mean_curvature_norm;

  const ThirdForm& iii = pf.direct;
  row.iii_mean = iii.mean();
  row.homothety_residual = iii.umbilic_residual();
  row.umbilic = row.homothety_residual <= tol.homothety * (1.0 + std::abs(row.iii_mean));
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Mat>(iii.components, Eigen::EigenvaluesOnly).eigenvalues();
  row.iii_spread = eig.maxCoeff() - eig.minCoeff();
  if (pf.invariant) row.gauss_residual = (iii.components - pf.invariant->components).norm();
  if (pd.ricci) {
    const Mat& ric = *pd.ricci;
    row.ricci_mean = ric.trace() / n;
    row.ricci_residual = (ric - *row.ricci_mean * Mat::Identity(n, n)).norm();
    if (n == 2) row.gauss_curvature = ric.trace() / 2.0;
  }

  const std::size_t q = pf.shape.size();
  if (q == 0) throw Error(ErrorCode::CodimensionUnsupported, "no normal directions to analyze");
  const FlatnessCertificate flat = flatness_certificate(pf.shape, tol.certificate);
  row.commutator = flat.max_commutator;
  row.commutator_bound = flat.bound;
  if (q > 2 && !flat.flat) {
    throw Error(ErrorCode::CodimensionUnsupported,
                "normal bundle of rank " + std::to_string(q) + " is not flat");
  }

  if (n == 1) {
    row.k = 1;
    row.block_dims = {1};
    return row;
  }
  if (q <= 2 && row.umbilic) {
    const SymOp a2 = q == 2 ? pf.shape[1] : SymOp::zero(n);
    fill_blocks(row, BilinearForm2(pf.shape[0], a2), cfg);
  }
  if (flat.flat) {
    const PrincipalNormals pn = principal_normals(pf.shape, tol.certificate, cfg.seed);
    row.k = pn.size();
    row.block_dims.clear();
    for (int i = 0; i < pn.size(); ++i) {
      row.principal_norms.push_back(pn.normals[i].norm());
      row.block_dims.push_back(static_cast<int>(pn.bases[i].cols()));
    }
  }
  return row;
}

Aggregate aggregate(const std::string& name, const std::vector<double>& values) {
  Aggregate a;
  a.name = name;
  if (values.empty()) return a;
  a.min = *std::min_element(values.begin(), values.end());
  a.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  return a;
}

std::vector<Aggregate> aggregates_of(const std::vector<SampleRow>& rows) {
  auto collect = [&](auto field) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(field(r));
    return v;
  };
  std::vector<Aggregate> out{
      aggregate("iii_mean", collect([](const SampleRow& r) { return r.iii_mean; })),
      aggregate("iii_spread", collect([](const SampleRow& r) { return r.iii_spread; })),
      aggregate("homothety_residual", collect([](const SampleRow& r) { return r.homothety_residual; })),
      aggregate("commutator", collect([](const SampleRow& r) { return r.commutator; })),
      aggregate("mean_curvature_norm", collect([](const SampleRow& r) { return r.mean_curvature_norm; })),
      aggregate("gauss_residual", collect([](const SampleRow& r) { return r.gauss_residual; })),
      aggregate("block_residual", collect([](const SampleRow& r) { return r.block_residual; })),
  };
  if (!rows.empty() && rows.front().gauss_curvature) {
    out.push_back(aggregate("gauss_curvature", collect([](const SampleRow& r) { return r.gauss_curvature.value_or(0.0); })));
  }
  return out;
}

bool is_planar(const std::vector<SampleRow>& rows, double tol) {
  if (rows.size() < 4) return true;
  const int dim = static_cast<int>(rows.front().position.size());
  Mat pts(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = rows[i].position;
  const Vec centre = pts.rowwise().mean();
  pts.colwise() -= centre;
  const Eigen::JacobiSVD<Mat> svd(pts);
  const Vec s = svd.singularValues();
  return s.size() < 3 || s[2] <= tol * (1.0 + s[0]);
}

}  // namespace

Analysis analyze(const Immersion& imm, const SamplingConfig& config) {
  if (imm.n < 1) throw Error(ErrorCode::InvalidParams, "intrinsic dimension must be positive");
  if (!(config.tol.cluster > 0.0 && config.tol.certificate > 0.0 && config.tol.homothety > 0.0 &&
        config.tol.curvature > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "tolerances must be positive");
  }
  const Tolerances& tol = config.tol;
  const AnalysisFrame frame = resolve_frame(imm, config.frame);
  const std::vector<Vec> points = sample_points(imm.domain, config.samples, config.seed);

  Analysis out;
  auto& rows = out.report.rows;
  for (std::size_t i = 0; i < points.size(); ++i) rows.push_back(analyze_point(imm, points[i], static_cast<int>(i), frame, config));
  out.report.aggregates = aggregates_of(rows);

  Verdict& v = out.verdict;
  v.frame = frame;
  v.n = imm.n;
  v.codim = static_cast<int>(frame == AnalysisFrame::SpaceForm ? imm.codim() - 1 : imm.codim());
  if (imm.curvature && *imm.curvature != 0.0) v.c = imm.curvature;

  double mu_lo = std::numeric_limits<double>::infinity();
  double mu_hi = -mu_lo;
  double mu_sum = 0.0;
  bool all_umbilic = true;
  bool all_flat = true;
  v.principal_norm_min = std::numeric_limits<double>::infinity();
  v.principal_norm_max = 0.0;
  bool any_norms = false;
  for (const auto& r : rows) {
    mu_lo = std::min(mu_lo, r.iii_mean);
    mu_hi = std::max(mu_hi, r.iii_mean);
    mu_sum += r.iii_mean;
    all_umbilic = all_umbilic && r.umbilic;
    all_flat = all_flat && r.commutator <= r.commutator_bound;
    v.max_homothety_residual = std::max(v.max_homothety_residual, r.homothety_residual);
    v.max_commutator = std::max(v.max_commutator, r.commutator);
    v.max_block_residual = std::max(v.max_block_residual, r.block_residual);
    v.max_gauss_residual = std::max(v.max_gauss_residual, r.gauss_residual);
    for (double norm : r.principal_norms) {
      any_norms = true;
      v.principal_norm_min = std::min(v.principal_norm_min, norm);
      v.principal_norm_max = std::max(v.principal_norm_max, norm);
    }
  }
  if (!any_norms) v.principal_norm_min = 0.0;
  v.iii_mean = mu_sum / static_cast<double>(rows.size());
  v.iii_mean_spread = mu_hi - mu_lo;
  v.homothetic = all_umbilic && v.iii_mean_spread <= tol.homothety * (1.0 + std::abs(mu_hi));
  const bool totally_geodesic = v.homothetic && std::abs(v.iii_mean) <= tol.homothety;
  if (v.homothetic && !totally_geodesic) v.homothety_r2 = 1.0 / v.iii_mean;

  v.flat = all_flat;
  v.k = rows.front().k;
  for (const auto& r : rows) v.k_consistent = v.k_consistent && r.k == v.k;
  v.equal_norms = any_norms && v.principal_norm_max - v.principal_norm_min <= tol.certificate * (1.0 + v.principal_norm_max);

  const MinimalityCertificate minimal = minimality_certificate(rows, tol.certificate);
  v.minimal = minimal.minimal;
  v.max_mean_curvature = minimal.max_mean_curvature;

  if (imm.n >= 2) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double defect = 0.0;
    double sum = 0.0;
    for (const auto& r : rows) {
      lo = std::min(lo, *r.ricci_mean);
      hi = std::max(hi, *r.ricci_mean);
      sum += *r.ricci_mean;
      if (imm.n >= 3) defect = std::max(defect, *r.ricci_residual);
    }
    const double mu = sum / static_cast<double>(rows.size());
    v.einstein_spread = std::max(hi - lo, defect);
    v.einstein = v.einstein_spread <= tol.curvature * (1.0 + std::abs(mu));
    if (imm.n == 2) {
      v.gauss_curvature = mu;
      if (v.c && *v.c > 0.0) {
        v.curvature_matches = std::abs(mu - *v.c / 3.0) <= tol.curvature * (1.0 + std::abs(*v.c)) && *v.einstein;
      }
    }
  } else {
    v.planar = is_planar(rows, tol.certificate);
  }

  DecisionInputs in;
  in.n = imm.n;
  in.homothetic = v.homothetic;
  in.totally_geodesic = totally_geodesic;
  in.flat = v.flat;
  in.k = v.k_consistent ? v.k : 0;
  in.equal_norms = v.equal_norms;
  in.minimal = v.minimal;
  in.c = v.c;
  in.curvature_matches = v.curvature_matches.value_or(false);
  in.planar = v.planar.value_or(true);
  v.kind = decide(in);
  return out;
}

}  // namespace thirdform
