#include <doctest.h>

#include <cmath>
#include <functional>

#include "thirdform/catalog.hpp"
#include "thirdform/classify.hpp"

using namespace thirdform;

namespace {

Vec point(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Tensor grid with `per_axis` points per axis, at most `cap` points in total.
std::vector<Vec> grid(const ChartBox& box, int per_axis, int cap) {
  const ChartBox inner = box.shrunk(0.01);
  const int n = box.dim();
  std::vector<Vec> pts;
  std::vector<int> idx(n, 0);
  const long total = static_cast<long>(std::pow(per_axis, n));
  const long stride = std::max(1L, total / cap);
  for (long flat = 0; flat < total && static_cast<int>(pts.size()) < cap; flat += stride) {
    long rest = flat;
    Vec unit(n);
    for (int d = 0; d < n; ++d) {
      unit[d] = (static_cast<double>(rest % per_axis) + 0.5) / per_axis;
      rest /= per_axis;
    }
    pts.push_back(inner.at(unit));
  }
  return pts;
}

// Central differences of the position against the first-derivative callback,
// and of the first derivatives against the second.
double jet_defect(const Immersion& imm, const Vec& u) {
  const double h = 1e-5;
  const Jet2 j = imm.jet(u);
  double worst = 0.0;
  for (int a = 0; a < imm.n; ++a) {
    Vec up = u;
    Vec dn = u;
    up[a] += h;
    dn[a] -= h;
    const Jet2 jp = imm.jet(up);
    const Jet2 jm = imm.jet(dn);
    worst = std::max(worst, ((jp.position - jm.position) / (2 * h) - j.first.col(a)).norm() / (1.0 + j.first.norm()));
    worst = std::max(worst, ((jp.first - jm.first) / (2 * h) - j.second[a]).norm() / (1.0 + j.second[a].norm()));
  }
  return worst;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("names and parameter validation") {
  CHECK(entry_names().size() >= 8);
  CHECK(code_of([] { make("torus_knot"); }) == ErrorCode::UnknownName);
  CHECK(code_of([] { make("round_sphere", {{"r", -1}}); }) == ErrorCode::BadParams);
  CHECK(code_of([] { make("round_sphere", {{"radius", 1}}); }) == ErrorCode::BadParams);
  CHECK(code_of([] { make("round_sphere", {{"n", 2.5}}); }) == ErrorCode::BadParams);
  CHECK(code_of([] { make("veronese", {{"c", 0}}); }) == ErrorCode::BadParams);
  CHECK(code_of([] { make("hyperbolic_product", {{"c0", 1}}); }) == ErrorCode::BadParams);
  for (const auto& name : entry_names()) {
    const CatalogEntry e = make(name);
    CHECK(e.name == name);
    CHECK(e.expected.has_value());
  }
}

TEST_CASE("immersion invariants on a grid") {
  for (const auto& name : entry_names()) {
    CAPTURE(name);
    const Immersion imm = make(name).immersion;
    for (const Vec& u : grid(imm.domain, 20, 400)) {
      const PointData pd = point_data(imm, u, {RicciMode::Skip});
      CHECK(pd.tangent.cols() == imm.n);
      if (imm.curvature) {
        const double norm2 = imm.ambient(pd.position, pd.position);
        CHECK(std::abs(norm2 - 1.0 / *imm.curvature) <= 1e-10 * (1.0 + std::abs(1.0 / *imm.curvature)));
      }
    }
    for (const Vec& u : grid(imm.domain, 3, 9)) CHECK(jet_defect(imm, u) < 1e-7);
  }
}

TEST_CASE("round and product spheres") {
  const Immersion s = make("round_sphere", {{"n", 2}, {"r", 2}}).immersion;
  for (const Vec& u : grid(s.domain, 5, 25)) {
    CHECK((third_form_direct(point_data(s, u, {RicciMode::Skip})).components - 0.25 * Mat::Identity(2, 2)).norm() < 1e-12);
  }
  const Immersion p = make("sphere_product", {{"m", 1}, {"n", 2}, {"r", 1}}).immersion;
  CHECK(p.n == 2);
  for (const Vec& u : grid(p.domain, 5, 25)) {
    const PointData pd = point_data(p, u, {RicciMode::Skip});
    CHECK((third_form_direct(pd).components - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK(flatness_certificate(pd, 1e-9).flat);
  }
}

TEST_CASE("principal normals of sphere products") {
  for (double r : {0.5, 1.0, 3.0}) {
    const Immersion p = make("sphere_product", {{"m1", 1}, {"m2", 2}, {"r", r}}).immersion;
    const PointData pd = point_data(p, point({1.0, 0.3, -0.6}), {RicciMode::Skip});
    const PrincipalNormals pn = principal_normals(pd.shape);
    REQUIRE(pn.size() == 2);
    for (const Vec& eta : pn.normals) CHECK(eta.norm() == doctest::Approx(1.0 / r).epsilon(1e-10));
  }
  const Immersion q = make("sphere_product", {{"r1", 1}, {"r2", 2}}).immersion;
  CHECK_FALSE(homothety_factor(third_form_direct(point_data(q, point({1.0, 2.0}), {RicciMode::Skip})), 1e-8));
}

TEST_CASE("Veronese property triple") {
  for (double c : {0.5, 1.0, 2.0}) {
    const Immersion v = make("veronese", {{"c", c}}).immersion;
    for (const Vec& u : grid(v.domain, 4, 16)) {
      const PointData pd = point_data(v, u);
      CHECK(pd.position.squaredNorm() == doctest::Approx(1.0 / c).epsilon(1e-12));
      const SpaceFormData sf = reduce_to_space_form(pd, v);
      CHECK(sf.mean_curvature_norm() <= 1e-9);
      CHECK(0.5 * pd.ricci->trace() == doctest::Approx(c / 3.0).epsilon(1e-7));
      CHECK((third_form_direct(sf).components - (2.0 * c / 3.0) * Mat::Identity(2, 2)).norm() < 1e-10);
      CHECK(commutator_norm(sf.shape[0], sf.shape[1]) >= 0.1 * c);
      CHECK(gauss_consistency(v, u) <= 1e-5);
    }
  }
}

TEST_CASE("extrinsic products") {
  SUBCASE("two circles of radius 1/sqrt2 are the Clifford torus") {
    const double r = 1.0 / std::sqrt(2.0);
    const CatalogEntry prod = extrinsic_product({{sphere_factor(1, 1.0 / (r * r)), sphere_factor(1, 1.0 / (r * r))}});
    const Immersion torus = make("clifford_torus", {{"c", 1}}).immersion;
    REQUIRE(prod.immersion.curvature);
    CHECK(*prod.immersion.curvature == doctest::Approx(1.0));
    for (const Vec& u : grid(torus.domain, 6, 36)) {
      CHECK(prod.immersion.jet(u).position.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((prod.immersion.jet(u).position - torus.jet(u).position).norm() <= 1e-12);
    }
  }
  SUBCASE("curvature of two c = 2 circles") {
    const CatalogEntry prod = extrinsic_product({{sphere_factor(1, 2.0), sphere_factor(1, 2.0)}});
    CHECK(*prod.immersion.curvature == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("hyperbolic plane times a circle") {
    const CatalogEntry prod = extrinsic_product({{hyperbolic_factor(2, -0.5), sphere_factor(1, 1.0)}});
    CHECK(*prod.immersion.curvature == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(prod.immersion.ambient.is_lorentz());
    for (const Vec& u : grid(prod.immersion.domain, 5, 125)) {
      const Vec x = prod.immersion.jet(u).position;
      CHECK(prod.immersion.ambient(x, x) == doctest::Approx(-1.0).epsilon(1e-12));
    }
  }
  SUBCASE("errors") {
    CHECK(code_of([] { extrinsic_product({{hyperbolic_factor(2, -1.0), sphere_factor(1, 1.0)}}); }) ==
          ErrorCode::CurvatureSumZero);
    CHECK(code_of([] { extrinsic_product({{sphere_factor(1, 1.0), hyperbolic_factor(2, -1.0)}}); }) ==
          ErrorCode::SignatureMismatch);
    CHECK(code_of([] { extrinsic_product({{hyperbolic_factor(1, -1.0), sphere_factor(1, 0.5)}}); }) ==
          ErrorCode::SignatureMismatch);
    CHECK(code_of([] { sphere_factor(2, -1.0); }) == ErrorCode::BadCurvature);
  }
}

TEST_CASE("umbilical inclusion into hyperbolic space") {
  SUBCASE("horosphere base point and umbilicity") {
    for (double c : {-1.0, -0.25, -4.0}) {
      const UmbilicityCertificate cert = horosphere_umbilicity(3, c, point({0.0, 0.0, 0.0}));
      CHECK(cert.residual < 1e-12);
      CHECK(std::abs(cert.principal) == doctest::Approx(std::sqrt(-c)).epsilon(1e-12));
      const UmbilicityCertificate far = horosphere_umbilicity(2, c, point({1.5, -0.7}));
      CHECK(far.residual < 1e-10);
    }
    CHECK(code_of([] { horosphere_umbilicity(2, 1.0, point({0.0, 0.0})); }) == ErrorCode::BadCurvature);
  }
  SUBCASE("a straight line becomes a horocycle") {
    Immersion line;
    line.n = 1;
    line.ambient = InnerProduct::euclidean(2);
    line.domain = {Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)};
    line.jet = [](const Vec& u) {
      Jet2 j;
      j.position = Eigen::Vector2d(u[0], 0.0);
      j.first = Eigen::Vector2d(1.0, 0.0);
      j.second = {Mat::Zero(2, 1)};
      return j;
    };
    const CatalogEntry inc = umbilical_inclusion_product({line}, -1.0);
    const Immersion& imm = inc.immersion;
    const PointData pd = point_data(imm, point({0.4}), {RicciMode::Skip});
    CHECK(imm.ambient(pd.position, pd.position) == doctest::Approx(-1.0).epsilon(1e-12));
    const SpaceFormData sf = reduce_to_space_form(pd, imm);
    CHECK(flatness_certificate(sf, 1e-9).flat);
    // The line is totally geodesic in R^2, so only the horosphere bends it.
    CHECK(third_form_direct(sf).components(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("torus through the horosphere") {
    const Immersion imm = make("horosphere_product").immersion;
    REQUIRE(imm.curvature);
    const PointData pd = point_data(imm, point({0.5, 2.0}), {RicciMode::Skip});
    const SpaceFormData sf = reduce_to_space_form(pd, imm);
    CHECK(flatness_certificate(sf, 1e-9).flat);
    CHECK((third_form_direct(sf).components - 2.0 * Mat::Identity(2, 2)).norm() < 1e-12);
  }
}
