#include "thirdform/catalog.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace thirdform {

namespace {

// Derivatives of an outer map g: R^m -> R^N at one point; hessians[k] is the
// m x m Hessian of component k.
struct OuterJet {
  Vec value;
  Mat jacobian;
  std::vector<Mat> hessians;
};

Jet2 compose(const OuterJet& outer, const Jet2& inner) {
  const int n = static_cast<int>(inner.first.cols());
  const int big_n = static_cast<int>(outer.value.size());
  Jet2 out;
  out.position = outer.value;
  out.first = outer.jacobian * inner.first;
  out.second.assign(n, Mat::Zero(big_n, n));
  for (int a = 0; a < n; ++a) {
    out.second[a] = outer.jacobian * inner.second[a];
    for (int b = 0; b < n; ++b) {
      for (int k = 0; k < big_n; ++k) {
        out.second[a](k, b) += inner.first.col(a).dot(outer.hessians[k] * inner.first.col(b));
      }
    }
  }
  return out;
}

Jet2 circle_jet(double t, double r) {
  Jet2 jet;
  jet.position = Vec2(r * std::cos(t), r * std::sin(t));
  jet.first = Vec2(-r * std::sin(t), r * std::cos(t));
  jet.second = {Mat(Vec2(-r * std::cos(t), -r * std::sin(t)))};
  return jet;
}

// Inverse stereographic projection from the north pole onto S^m(r) in R^{m+1}.
Jet2 stereographic_jet(const Vec& u, double r) {
  const int m = static_cast<int>(u.size());
  const double w = 1.0 / (1.0 + u.squaredNorm());
  const Vec dw = -2.0 * w * w * u;
  const Mat ddw = -2.0 * w * w * Mat::Identity(m, m) + 8.0 * w * w * w * u * u.transpose();

  Jet2 jet;
  jet.position.resize(m + 1);
  jet.position.head(m) = 2.0 * r * w * u;
  jet.position[m] = r * (1.0 - 2.0 * w);
  jet.first = Mat::Zero(m + 1, m);
  jet.second.assign(m, Mat::Zero(m + 1, m));
  for (int a = 0; a < m; ++a) {
    for (int i = 0; i < m; ++i) jet.first(i, a) = 2.0 * r * ((i == a ? w : 0.0) + u[i] * dw[a]);
    jet.first(m, a) = -2.0 * r * dw[a];
    for (int b = 0; b < m; ++b) {
      for (int i = 0; i < m; ++i) {
        jet.second[a](i, b) = 2.0 * r * ((i == a ? dw[b] : 0.0) + (i == b ? dw[a] : 0.0) + u[i] * ddw(a, b));
      }
      jet.second[a](m, b) = -2.0 * r * ddw(a, b);
    }
  }
  return jet;
}

Jet2 product_jet(const std::vector<Jet2>& parts) {
  int big_n = 0;
  int n = 0;
  for (const auto& p : parts) {
    big_n += static_cast<int>(p.position.size());
    n += static_cast<int>(p.first.cols());
  }
  Jet2 out;
  out.position.resize(big_n);
  out.first = Mat::Zero(big_n, n);
  out.second.assign(n, Mat::Zero(big_n, n));
  int row = 0;
  int col = 0;
  for (const auto& p : parts) {
    const int pn = static_cast<int>(p.position.size());
    const int pm = static_cast<int>(p.first.cols());
    out.position.segment(row, pn) = p.position;
    out.first.block(row, col, pn, pm) = p.first;
    for (int a = 0; a < pm; ++a) out.second[col + a].block(row, col, pn, pm) = p.second[a];
    row += pn;
    col += pm;
  }
  return out;
}

ChartBox cube(int n, double lo, double hi) { return {Vec::Constant(n, lo), Vec::Constant(n, hi)}; }

ChartBox product_box(const std::vector<Immersion>& factors) {
  int n = 0;
  for (const auto& f : factors) n += f.n;
  ChartBox box{Vec(n), Vec(n)};
  int at = 0;
  for (const auto& f : factors) {
    box.lower.segment(at, f.n) = f.domain.lower;
    box.upper.segment(at, f.n) = f.domain.upper;
    at += f.n;
  }
  return box;
}

JetFn product_jet_fn(const std::vector<Immersion>& factors) {
  return [factors](const Vec& u) {
    std::vector<Jet2> parts;
    int at = 0;
    for (const auto& f : factors) {
      parts.push_back(f.jet(u.segment(at, f.n)));
      at += f.n;
    }
    return product_jet(parts);
  };
}

// Tracks which parameters were read so leftovers can be rejected.
class ParamReader {
 public:
  ParamReader(const std::string& entry, const Params& params) : entry_(entry), params_(params) {}

  double get(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }
  bool has(const std::string& key) {
    used_.insert(key);
    return params_.count(key) > 0;
  }
  int get_int(const std::string& key, int fallback, int lo, int hi) {
    const double v = get(key, fallback);
    if (v != std::floor(v) || v < lo || v > hi) fail(key + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
  }
  double positive(const std::string& key, double fallback) {
    const double v = get(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) fail(key + " must be positive");
    return v;
  }
  void finish() const {
    for (const auto& [key, value] : params_) {
      if (!used_.count(key)) fail("unknown parameter '" + key + "'");
      if (!std::isfinite(value)) fail("parameter '" + key + "' is not finite");
    }
  }
  [[noreturn]] void fail(const std::string& what) const { throw Error(ErrorCode::BadParams, entry_ + ": " + what); }

 private:
  std::string entry_;
  const Params& params_;
  std::set<std::string> used_;
};

ExpectedVerdict expect(VerdictKind kind) {
  ExpectedVerdict e;
  e.kind = kind;
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Factors

Immersion sphere_factor(int m, double c) {
  if (m < 1 || m >= kMaxDimension) throw Error(ErrorCode::BadParams, "sphere dimension out of range");
  if (!(c > 0.0)) throw Error(ErrorCode::BadCurvature, "sphere curvature must be positive");
  const double r = 1.0 / std::sqrt(c);
  Immersion imm;
  imm.n = m;
  imm.ambient = InnerProduct::euclidean(m + 1);
  imm.curvature = c;
  if (m == 1) {
    imm.domain = cube(1, 0.0, 2.0 * M_PI);
    imm.jet = [r](const Vec& u) { return circle_jet(u[0], r); };
  } else {
    imm.domain = cube(m, -2.0, 2.0);
    imm.jet = [r](const Vec& u) { return stereographic_jet(u, r); };
  }
  return imm;
}

Immersion hyperbolic_factor(int m, double c) {
  if (m < 1 || m >= kMaxDimension) throw Error(ErrorCode::BadParams, "hyperbolic dimension out of range");
  if (!(c < 0.0)) throw Error(ErrorCode::BadCurvature, "hyperbolic curvature must be negative");
  const double r2 = -1.0 / c;
  Immersion imm;
  imm.n = m;
  imm.ambient = InnerProduct::lorentz(m + 1);
  imm.curvature = c;
  imm.domain = cube(m, -1.0, 1.0);
  imm.jet = [m, r2](const Vec& u) {
    const double x0 = std::sqrt(r2 + u.squaredNorm());
    Jet2 jet;
    jet.position.resize(m + 1);
    jet.position[0] = x0;
    jet.position.tail(m) = u;
    jet.first = Mat::Zero(m + 1, m);
    jet.first.row(0) = u.transpose() / x0;
    jet.first.bottomRows(m) = Mat::Identity(m, m);
    jet.second.assign(m, Mat::Zero(m + 1, m));
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) jet.second[a](0, b) = (a == b ? 1.0 / x0 : 0.0) - u[a] * u[b] / (x0 * x0 * x0);
    }
    return jet;
  };
  return imm;
}

Immersion padded(const Immersion& imm, int extra) {
  if (imm.ambient.is_lorentz()) throw Error(ErrorCode::SignatureMismatch, "padding is for Euclidean ambients");
  Immersion out = imm;
  const int big_n = imm.ambient_dim() + extra;
  out.ambient = InnerProduct::euclidean(big_n);
  out.jet = [inner = imm.jet, big_n](const Vec& u) {
    Jet2 j = inner(u);
    const auto old_n = j.position.size();
    j.position.conservativeResize(big_n);
    j.position.tail(big_n - old_n).setZero();
    j.first.conservativeResize(big_n, Eigen::NoChange);
    j.first.bottomRows(big_n - old_n).setZero();
    for (auto& s : j.second) {
      s.conservativeResize(big_n, Eigen::NoChange);
      s.bottomRows(big_n - old_n).setZero();
    }
    return j;
  };
  return out;
}

// ---------------------------------------------------------------------------
// Products

CatalogEntry extrinsic_product(const ProductSpec& spec) {
  if (spec.factors.empty()) throw Error(ErrorCode::BadParams, "extrinsic product needs at least one factor");
  double inverse_sum = 0.0;
  double magnitude = 0.0;
  std::vector<int> signature;
  for (std::size_t i = 0; i < spec.factors.size(); ++i) {
    const Immersion& f = spec.factors[i];
    if (!f.curvature || *f.curvature == 0.0) {
      throw Error(ErrorCode::BadCurvature, "factor " + std::to_string(i) + " does not lie in a space form");
    }
    const double ci = *f.curvature;
    if (f.ambient.is_lorentz()) {
      if (i != 0) throw Error(ErrorCode::SignatureMismatch, "only the zeroth factor may be hyperbolic");
      if (ci > 0.0) throw Error(ErrorCode::SignatureMismatch, "Lorentz factor must have negative curvature");
    } else if (ci < 0.0) {
      throw Error(ErrorCode::SignatureMismatch, "negative-curvature factor needs a Lorentz ambient");
    }
    inverse_sum += 1.0 / ci;
    magnitude += std::abs(1.0 / ci);
    for (int s : f.ambient.signature()) signature.push_back(s);
  }
  if (std::abs(inverse_sum) <= 1e-12 * magnitude) {
    throw Error(ErrorCode::CurvatureSumZero, "sum of 1/c_i vanishes");
  }
  const double c = 1.0 / inverse_sum;
  if (spec.factors.front().ambient.is_lorentz() && c > 0.0) {
    throw Error(ErrorCode::SignatureMismatch, "Lorentz product with positive total curvature is not a space form");
  }

  CatalogEntry entry;
  entry.name = "extrinsic_product";
  Immersion& imm = entry.immersion;
  for (const auto& f : spec.factors) imm.n += f.n;
  imm.ambient = InnerProduct(signature);
  imm.domain = product_box(spec.factors);
  imm.jet = product_jet_fn(spec.factors);
  imm.curvature = c;
  return entry;
}

namespace {

OuterJet horosphere_jet(const Vec& y, double radius) {
  const int m = static_cast<int>(y.size());
  const double s = y.squaredNorm();
  OuterJet o;
  o.value.resize(m + 2);
  o.value[0] = radius + s / (2.0 * radius);
  o.value.segment(1, m) = y;
  o.value[m + 1] = s / (2.0 * radius);
  o.jacobian = Mat::Zero(m + 2, m);
  o.jacobian.row(0) = y.transpose() / radius;
  o.jacobian.block(1, 0, m, m) = Mat::Identity(m, m);
  o.jacobian.row(m + 1) = y.transpose() / radius;
  o.hessians.assign(m + 2, Mat::Zero(m, m));
  o.hessians[0] = Mat::Identity(m, m) / radius;
  o.hessians[m + 1] = Mat::Identity(m, m) / radius;
  return o;
}

}  // namespace

CatalogEntry umbilical_inclusion_product(const std::vector<Immersion>& factors, double c) {
  if (!(c < 0.0)) throw Error(ErrorCode::BadCurvature, "umbilical inclusion needs c < 0");
  if (factors.empty()) throw Error(ErrorCode::BadParams, "need at least one factor");
  int m = 0;
  for (const auto& f : factors) {
    if (f.ambient.is_lorentz()) throw Error(ErrorCode::SignatureMismatch, "factors must be Euclidean immersions");
    m += f.ambient_dim();
  }
  const double radius = 1.0 / std::sqrt(-c);

  CatalogEntry entry;
  entry.name = "umbilical_inclusion_product";
  Immersion& imm = entry.immersion;
  for (const auto& f : factors) imm.n += f.n;
  imm.ambient = InnerProduct::lorentz(m + 2);
  imm.domain = product_box(factors);
  imm.curvature = c;
  imm.jet = [inner = product_jet_fn(factors), radius](const Vec& u) {
    const Jet2 base = inner(u);
    return compose(horosphere_jet(base.position, radius), base);
  };
  return entry;
}

UmbilicityCertificate horosphere_umbilicity(int dim, double c, const Vec& y) {
  if (!(c < 0.0)) throw Error(ErrorCode::BadCurvature, "horosphere needs c < 0");
  const double radius = 1.0 / std::sqrt(-c);
  Immersion j;
  j.n = dim;
  j.ambient = InnerProduct::lorentz(dim + 2);
  j.domain = cube(dim, -1e6, 1e6);
  j.curvature = c;
  j.jet = [dim, radius](const Vec& u) {
    Jet2 identity{u, Mat::Identity(dim, dim), std::vector<Mat>(dim, Mat::Zero(dim, dim))};
    return compose(horosphere_jet(u, radius), identity);
  };
  const SpaceFormData sf = reduce_to_space_form(point_data(j, y, {RicciMode::Skip}), j);
  const Mat& a = sf.shape.front().matrix();
  UmbilicityCertificate cert;
  cert.principal = std::abs(a.trace()) / dim;
  cert.residual = (a - (a.trace() / dim) * Mat::Identity(dim, dim)).norm();
  return cert;
}

// ---------------------------------------------------------------------------
// Named entries

const std::vector<std::string>& entry_names() {
  static const std::vector<std::string> names{"plane",         "circle",       "helix",
                                              "round_sphere",  "sphere_product", "clifford_torus",
                                              "veronese",      "graph_custom", "hyperbolic_product",
                                              "horosphere_product"};
  return names;
}

namespace {

CatalogEntry make_plane(ParamReader& p) {
  const int n = p.get_int("n", 2, 1, kMaxDimension - 2);
  CatalogEntry e;
  Immersion& imm = e.immersion;
  imm.n = n;
  imm.ambient = InnerProduct::euclidean(n + 2);
  imm.domain = cube(n, -1.0, 1.0);
  imm.jet = [n](const Vec& u) {
    Jet2 j;
    j.position = Vec::Zero(n + 2);
    j.position.head(n) = u;
    j.first = Mat::Zero(n + 2, n);
    j.first.topRows(n) = Mat::Identity(n, n);
    j.second.assign(n, Mat::Zero(n + 2, n));
    return j;
  };
  ExpectedVerdict x = expect(VerdictKind::TotallyGeodesic);
  x.flat = true;
  x.minimal = true;
  e.expected = x;
  return e;
}

CatalogEntry make_round_sphere(int n, double r) {
  CatalogEntry e;
  e.immersion = padded(sphere_factor(n, 1.0 / (r * r)), 1);
  ExpectedVerdict x = expect(VerdictKind::RoundSphere);
  x.r2 = r * r;
  x.flat = true;
  x.blocks = 1;
  x.minimal = false;
  e.expected = x;
  return e;
}

CatalogEntry make_helix(ParamReader& p) {
  const double a = p.positive("a", 1.0);
  const double b = p.get("b", 1.0);
  if (!std::isfinite(b)) p.fail("b must be finite");
  const double w = std::sqrt(a * a + b * b);
  CatalogEntry e;
  Immersion& imm = e.immersion;
  imm.n = 1;
  imm.ambient = InnerProduct::euclidean(3);
  imm.domain = cube(1, -5.0, 5.0);
  imm.jet = [a, b, w](const Vec& u) {
    const double t = u[0] / w;
    Jet2 j;
    j.position = Eigen::Vector3d(a * std::cos(t), a * std::sin(t), b * t);
    j.first = Eigen::Vector3d(-a * std::sin(t) / w, a * std::cos(t) / w, b / w);
    j.second = {Mat(Eigen::Vector3d(-a * std::cos(t) / (w * w), -a * std::sin(t) / (w * w), 0.0))};
    return j;
  };
  // Constant curvature a / w^2 but not planar unless b = 0.
  e.expected = expect(b == 0.0 ? VerdictKind::RoundSphere : VerdictKind::Inconclusive);
  if (b == 0.0) e.expected->r2 = a * a;
  return e;
}

CatalogEntry make_sphere_product(ParamReader& p) {
  int m1 = p.get_int("m1", 1, 1, 30);
  int m2 = p.get_int("m2", 1, 1, 30);
  if (p.has("m")) m1 = p.get_int("m", 1, 1, 30);
  if (p.has("n")) {
    m2 = p.get_int("n", 2, 2, 60) - m1;
    if (m2 < 1) p.fail("n must exceed m");
  }
  const double r = p.positive("r", 1.0);
  const double r1 = p.positive("r1", r);
  const double r2 = p.positive("r2", r);
  CatalogEntry e = extrinsic_product({{sphere_factor(m1, 1.0 / (r1 * r1)), sphere_factor(m2, 1.0 / (r2 * r2))}});
  if (r1 == r2) {
    ExpectedVerdict x = expect(VerdictKind::SphereProduct);
    x.r2 = r1 * r1;
    x.flat = true;
    x.blocks = 2;
    x.minimal = false;
    e.expected = x;
  } else {
    e.expected = expect(VerdictKind::NotHomothetic);
  }
  return e;
}

CatalogEntry make_veronese(ParamReader& p) {
  const double c = p.positive("c", 1.0);
  const double s3 = std::sqrt(3.0);
  // Degree-two harmonic polynomials on S^2, normalized so |V(p)| = |p|^2.
  std::vector<Eigen::Matrix3d> quad(5, Eigen::Matrix3d::Zero());
  quad[0](1, 2) = quad[0](2, 1) = s3 / 2.0;
  quad[1](0, 2) = quad[1](2, 0) = s3 / 2.0;
  quad[2](0, 1) = quad[2](1, 0) = s3 / 2.0;
  quad[3](0, 0) = s3 / 2.0;
  quad[3](1, 1) = -s3 / 2.0;
  quad[4].diagonal() << 0.5, 0.5, -1.0;
  const double scale = 1.0 / std::sqrt(c);
  for (auto& q : quad) q *= scale;

  CatalogEntry e;
  Immersion& imm = e.immersion;
  imm.n = 2;
  imm.ambient = InnerProduct::euclidean(5);
  imm.domain = cube(2, -2.0, 2.0);
  imm.curvature = c;
  imm.jet = [quad](const Vec& u) {
    const Jet2 sphere = stereographic_jet(u, 1.0);
    const Vec& x = sphere.position;
    OuterJet o;
    o.value.resize(5);
    o.jacobian.resize(5, 3);
    for (int k = 0; k < 5; ++k) {
      const Mat q = quad[k];
      o.value[k] = x.dot(q * x);
      o.jacobian.row(k) = 2.0 * (q * x).transpose();
      o.hessians.push_back(2.0 * q);
    }
    return compose(o, sphere);
  };
  ExpectedVerdict x = expect(VerdictKind::VeroneseLike);
  x.r2 = 1.5 / c;
  x.flat = false;
  x.blocks = 1;
  x.minimal = true;
  x.frame = AnalysisFrame::SpaceForm;
  e.expected = x;
  return e;
}

CatalogEntry make_graph(ParamReader& p) {
  Eigen::Matrix2d qa;
  Eigen::Matrix2d qb;
  qa << p.get("a11", 1.0), p.get("a12", 0.0), p.get("a12", 0.0), p.get("a22", 0.0);
  qb << p.get("b11", 0.0), p.get("b12", 0.0), p.get("b12", 0.0), p.get("b22", 1.0);
  CatalogEntry e;
  Immersion& imm = e.immersion;
  imm.n = 2;
  imm.ambient = InnerProduct::euclidean(4);
  imm.domain = cube(2, -1.0, 1.0);
  imm.jet = [qa, qb](const Vec& u) {
    const Eigen::Vector2d x = u;
    Jet2 j;
    j.position = Eigen::Vector4d(x[0], x[1], 0.5 * x.dot(qa * x), 0.5 * x.dot(qb * x));
    j.first = Mat::Zero(4, 2);
    j.first.topRows(2) = Mat::Identity(2, 2);
    j.first.row(2) = (qa * x).transpose();
    j.first.row(3) = (qb * x).transpose();
    j.second.assign(2, Mat::Zero(4, 2));
    for (int a = 0; a < 2; ++a) {
      j.second[a].row(2) = qa.row(a);
      j.second[a].row(3) = qb.row(a);
    }
    return j;
  };
  const bool flat_graph = qa.isZero(0.0) && qb.isZero(0.0);
  e.expected = expect(flat_graph ? VerdictKind::TotallyGeodesic : VerdictKind::NotHomothetic);
  return e;
}

}  // namespace

CatalogEntry make(const std::string& name, const Params& params) {
  ParamReader p(name, params);
  CatalogEntry e;
  if (name == "plane") {
    e = make_plane(p);
  } else if (name == "circle") {
    e = make_round_sphere(1, p.positive("r", 1.0));
  } else if (name == "helix") {
    e = make_helix(p);
  } else if (name == "round_sphere") {
    const int n = p.get_int("n", 2, 1, kMaxDimension - 2);
    e = make_round_sphere(n, p.positive("r", 1.0));
  } else if (name == "sphere_product") {
    e = make_sphere_product(p);
  } else if (name == "clifford_torus") {
    const double c = p.positive("c", 1.0);
    const double r = 1.0 / std::sqrt(2.0 * c);
    e = extrinsic_product({{sphere_factor(1, 1.0 / (r * r)), sphere_factor(1, 1.0 / (r * r))}});
    ExpectedVerdict x = expect(VerdictKind::SphereProduct);
    x.r2 = r * r;
    x.flat = true;
    x.blocks = 2;
    x.minimal = false;
    e.expected = x;
  } else if (name == "veronese") {
    e = make_veronese(p);
  } else if (name == "graph_custom") {
    e = make_graph(p);
  } else if (name == "hyperbolic_product") {
    const double c0 = p.get("c0", -0.5);
    const double c1 = p.get("c1", 1.0);
    if (!(c0 < 0.0)) p.fail("c0 must be negative");
    if (!(c1 > 0.0)) p.fail("c1 must be positive");
    e = extrinsic_product({{hyperbolic_factor(2, c0), sphere_factor(1, c1)}});
    ExpectedVerdict x = expect(VerdictKind::NotHomothetic);
    x.frame = AnalysisFrame::SpaceForm;
    e.expected = x;
  } else if (name == "horosphere_product") {
    const double c = p.get("c", -1.0);
    if (!(c < 0.0)) p.fail("c must be negative");
    const double r1 = p.positive("r1", 1.0);
    const double r2 = p.positive("r2", 1.0);
    e = umbilical_inclusion_product({sphere_factor(1, 1.0 / (r1 * r1)), sphere_factor(1, 1.0 / (r2 * r2))}, c);
    if (r1 == r2) {
      ExpectedVerdict x = expect(VerdictKind::SphereProduct);
      x.r2 = 1.0 / (1.0 / (r1 * r1) - c);
      x.flat = true;
      x.blocks = 2;
      x.frame = AnalysisFrame::SpaceForm;
      e.expected = x;
    } else {
      ExpectedVerdict x = expect(VerdictKind::NotHomothetic);
      x.frame = AnalysisFrame::SpaceForm;
      e.expected = x;
    }
  } else {
    throw Error(ErrorCode::UnknownName, "no catalog entry named '" + name + "'");
  }
  p.finish();
  e.name = name;
  e.params = params;
  return e;
}

}  // namespace thirdform
