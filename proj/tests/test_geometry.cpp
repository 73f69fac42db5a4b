#include <doctest.h>

#include <cmath>
#include <random>

#include "thirdform/catalog.hpp"
#include "thirdform/classify.hpp"
#include "thirdform/geometry.hpp"

using namespace thirdform;

namespace {

Vec point(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Gaussian curvature from the first fundamental form alone (Brioschi), with
// fourth-order difference stencils; shares no code with ricci_intrinsic.
double brioschi_curvature(const Immersion& imm, const Vec& u, double h) {
  auto efg = [&](double du, double dv) {
    Vec v = u;
    v[0] += du;
    v[1] += dv;
    const Jet2 j = imm.jet(v);
    const Vec fu = j.first.col(0);
    const Vec fv = j.first.col(1);
    return Eigen::Vector3d(fu.dot(fu), fu.dot(fv), fv.dot(fv));
  };
  auto d1 = [&](int axis, double du, double dv) {
    auto at = [&](double s) { return axis == 0 ? efg(du + s, dv) : efg(du, dv + s); };
    return Eigen::Vector3d((-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h));
  };
  auto d2 = [&](int axis) {
    auto at = [&](double s) { return axis == 0 ? efg(s, 0) : efg(0, s); };
    return Eigen::Vector3d((-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) / (12 * h * h));
  };
  const Eigen::Vector3d g = efg(0, 0);
  const Eigen::Vector3d gu = d1(0, 0, 0);
  const Eigen::Vector3d gv = d1(1, 0, 0);
  const Eigen::Vector3d guu = d2(0);
  const Eigen::Vector3d gvv = d2(1);
  const Eigen::Vector3d guv = (-d1(1, 2 * h, 0) + 8 * d1(1, h, 0) - 8 * d1(1, -h, 0) + d1(1, -2 * h, 0)) / (12 * h);
  const double e = g[0], f = g[1], gg = g[2];
  Eigen::Matrix3d m1;
  m1 << -0.5 * gvv[0] + guv[1] - 0.5 * guu[2], 0.5 * gu[0], gu[1] - 0.5 * gv[0],
      gv[1] - 0.5 * gu[2], e, f,
      0.5 * gv[2], f, gg;
  Eigen::Matrix3d m2;
  m2 << 0.0, 0.5 * gv[0], 0.5 * gu[2],
      0.5 * gv[0], e, f,
      0.5 * gu[2], f, gg;
  const double det = e * gg - f * f;
  return (m1.determinant() - m2.determinant()) / (det * det);
}

std::vector<Vec> random_points(const ChartBox& box, int count, std::mt19937_64& rng) {
  const ChartBox inner = box.shrunk(0.01);
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    Vec unit(box.dim());
    for (int d = 0; d < box.dim(); ++d) unit[d] = unit_uniform(rng);
    pts.push_back(inner.at(unit));
  }
  return pts;
}

}  // namespace

TEST_CASE("plane is totally geodesic") {
  const CatalogEntry plane = make("plane");
  const PointData pd = point_data(plane.immersion, point({0.3, -0.2}));
  for (const auto& a : pd.shape) CHECK(a.matrix().norm() == 0.0);
  CHECK(pd.mean_curvature_norm() == 0.0);
  CHECK(third_form_direct(pd).components.norm() == 0.0);
  CHECK(pd.ricci->norm() < 1e-12);
  CHECK(gauss_consistency(plane.immersion, point({0.1, 0.1})) < 1e-12);
}

TEST_CASE("sphere of radius 2") {
  const Immersion s = make("round_sphere", {{"n", 2}, {"r", 2}}).immersion;
  const Vec u = point({0.4, -1.3});
  const PointData pd = point_data(s, u);
  REQUIRE(pd.codim() == 2);
  // One normal carries A = +-(1/2) I, the padding normal carries nothing.
  double umbilic = 0.0;
  for (const auto& a : pd.shape) umbilic = std::max(umbilic, a.spectral_radius());
  CHECK(umbilic == doctest::Approx(0.5).epsilon(1e-12));
  for (const auto& a : pd.shape) {
    const double t = a.matrix().trace() / 2.0;
    CHECK((a.matrix() - t * Mat::Identity(2, 2)).norm() < 1e-12);
  }
  CHECK(pd.mean_curvature_norm() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK((third_form_direct(pd).components - 0.25 * Mat::Identity(2, 2)).norm() < 1e-12);
  CHECK((*pd.ricci - 0.25 * Mat::Identity(2, 2)).norm() < 1e-9);
  CHECK((third_form_invariant(pd).components - 0.25 * Mat::Identity(2, 2)).norm() < 1e-9);
  CHECK(gauss_consistency(s, u) <= 1e-9);
  CHECK(brioschi_curvature(s, u, 1e-2) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("helix curvature against the Frenet formula") {
  const Immersion h = make("helix").immersion;
  for (double s : {-3.0, -0.4, 0.0, 2.2}) {
    const Jet2 j = h.jet(point({s}));
    const Eigen::Vector3d d1 = j.first.col(0);
    const Eigen::Vector3d d2 = j.second[0].col(0);
    const double kappa = d1.cross(d2).norm() / std::pow(d1.norm(), 3);
    CHECK(kappa == doctest::Approx(0.5).epsilon(1e-14));
    const PointData pd = point_data(h, point({s}));
    CHECK(third_form_direct(pd).components(0, 0) == doctest::Approx(kappa * kappa).epsilon(1e-12));
  }
}

TEST_CASE("product of unit circles") {
  const Immersion t = make("sphere_product").immersion;
  const PointData pd = point_data(t, point({1.0, 4.0}));
  CHECK((third_form_direct(pd).components - Mat::Identity(2, 2)).norm() < 1e-12);
  CHECK(pd.ricci->norm() < 1e-9);
}

TEST_CASE("Veronese surface in the unit sphere") {
  const Immersion v = make("veronese", {{"c", 1}}).immersion;
  std::mt19937_64 rng(4);
  for (const Vec& u : random_points(v.domain, 10, rng)) {
    const PointData pd = point_data(v, u);
    CHECK(std::abs(pd.position.squaredNorm() - 1.0) < 1e-12);
    const SpaceFormData sf = reduce_to_space_form(pd, v);
    CHECK(sf.mean_curvature_norm() <= 1e-9);
    CHECK((third_form_direct(pd).components - (5.0 / 3.0) * Mat::Identity(2, 2)).norm() < 1e-10);
    CHECK((third_form_direct(sf).components - (2.0 / 3.0) * Mat::Identity(2, 2)).norm() < 1e-10);
    CHECK((third_form_invariant(pd).components - (5.0 / 3.0) * Mat::Identity(2, 2)).norm() < 1e-6);
    CHECK((third_form_invariant(sf).components - (2.0 / 3.0) * Mat::Identity(2, 2)).norm() < 1e-6);
    const double k_oracle = brioschi_curvature(v, u, 1e-2);
    CHECK(k_oracle == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK((*pd.ricci - k_oracle * Mat::Identity(2, 2)).norm() < 1e-6);
    CHECK(gauss_consistency(v, u) <= 1e-5);

    // Minimal in the sphere: the Euclidean A_H is a multiple of the identity.
    Mat a_h = Mat::Zero(2, 2);
    for (int k = 0; k < pd.codim(); ++k) a_h += pd.mean_curvature[k] * pd.shape[k].matrix();
    CHECK((a_h - 0.5 * a_h.trace() * Mat::Identity(2, 2)).norm() < 1e-8);
    CHECK(commutator_norm(sf.shape[0], sf.shape[1]) > 0.1);
  }
}

TEST_CASE("space-form reduction") {
  SUBCASE("great sphere in S^3") {
    const Immersion great = padded(sphere_factor(2, 1.0), 1);
    const PointData pd = point_data(great, point({0.2, 0.7}));
    const SpaceFormData sf = reduce_to_space_form(pd, great);
    REQUIRE(sf.codim() == 1);
    CHECK(sf.shape[0].matrix().norm() < 1e-12);
    CHECK(std::abs(sf.normal.col(0).dot(pd.position)) < 1e-12);
  }
  SUBCASE("Clifford torus in the unit S^3") {
    const Immersion t = make("clifford_torus", {{"c", 1}}).immersion;
    const PointData pd = point_data(t, point({0.9, 2.5}));
    const SpaceFormData sf = reduce_to_space_form(pd, t);
    REQUIRE(sf.codim() == 1);
    const EigenClustering cl = eig_sym(sf.shape[0]);
    REQUIRE(cl.size() == 2);
    CHECK(cl.clusters[0].value == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(cl.clusters[1].value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((third_form_direct(sf).components - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK(sf.mean_curvature_norm() <= 1e-9);
  }
  SUBCASE("position off the quadric") {
    Immersion wrong = sphere_factor(2, 1.0);
    wrong.curvature = 0.5;
    try {
      reduce_to_space_form(point_data(wrong, point({0.1, 0.1}), {RicciMode::Skip}), wrong);
      FAIL("expected NotOnQuadric");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotOnQuadric);
    }
  }
}

TEST_CASE("radial splitting identity on catalog entries") {
  const std::vector<std::pair<std::string, Params>> entries{
      {"round_sphere", {{"n", 3}, {"r", 1.5}}}, {"sphere_product", {{"r", 2}}}, {"clifford_torus", {{"c", 2}}},
      {"veronese", {{"c", 0.5}}},             {"hyperbolic_product", {}},      {"horosphere_product", {}}};
  std::mt19937_64 rng(12);
  for (const auto& [name, params] : entries) {
    CAPTURE(name);
    const Immersion imm = make(name, params).immersion;
    REQUIRE(imm.curvature);
    const double c = *imm.curvature;
    for (const Vec& u : random_points(imm.domain, 50, rng)) {
      const PointData pd = point_data(imm, u, {RicciMode::Skip});
      const SpaceFormData sf = reduce_to_space_form(pd, imm);
      const Mat diff = third_form_direct(pd).components - third_form_direct(sf).components - c * Mat::Identity(imm.n, imm.n);
      CHECK(diff.norm() < 1e-8);
    }
  }
}

TEST_CASE("third form is covariant under re-framing") {
  const Immersion v = make("veronese").immersion;
  const PointData pd = point_data(v, point({0.3, 0.8}), {RicciMode::Skip});
  const Mat iii = third_form_direct(pd).components;
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat q = random_rotation(pd.n(), rng);
    const Mat o = random_rotation(pd.codim(), rng);
    PointData moved = pd;
    for (int k = 0; k < pd.codim(); ++k) {
      Mat a = Mat::Zero(pd.n(), pd.n());
      for (int l = 0; l < pd.codim(); ++l) a += o(k, l) * q.transpose() * pd.shape[l].matrix() * q;
      moved.shape[k] = SymOp::symmetrized(a);
    }
    CHECK((third_form_direct(moved).components - q.transpose() * iii * q).norm() < 1e-10);
  }
}

TEST_CASE("geometry errors") {
  const Immersion s = make("round_sphere").immersion;
  try {
    point_data(s, point({5.0, 0.0}));
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
  const PointData bare = point_data(s, point({0.1, 0.2}), {RicciMode::Skip});
  try {
    third_form_invariant(bare);
    FAIL("expected MissingRicci");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingRicci);
  }
  try {
    ricci_intrinsic(s, point({0.1, 0.2}), 0.5);
    FAIL("expected StepTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepTooLarge);
  }

  Immersion folded;
  folded.n = 2;
  folded.ambient = InnerProduct::euclidean(3);
  folded.domain = {Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)};
  folded.jet = [](const Vec& u) {
    Jet2 j;
    j.position = Eigen::Vector3d(u[0], u[0], 0.0);
    j.first = Mat::Zero(3, 2);
    j.first(0, 0) = j.first(1, 0) = 1.0;
    j.second.assign(2, Mat::Zero(3, 2));
    return j;
  };
  try {
    point_data(folded, point({0.0, 0.0}));
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("Lorentz ambient frames") {
  const Immersion hp = make("hyperbolic_product").immersion;
  const PointData pd = point_data(hp, point({0.3, -0.5, 1.0}));
  CHECK(hp.ambient(pd.position, pd.position) == doctest::Approx(-1.0).epsilon(1e-12));
  const Mat gram = hp.ambient.gram(pd.tangent, pd.tangent);
  CHECK((gram - Mat::Identity(3, 3)).norm() < 1e-12);
  const SpaceFormData sf = reduce_to_space_form(pd, hp);
  CHECK(hp.ambient(sf.radial, sf.radial) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(gauss_consistency(hp, point({0.3, -0.5, 1.0})) <= 1e-5);
}
