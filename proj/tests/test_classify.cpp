#include <doctest.h>

#include <cmath>
#include <functional>

#include "thirdform/catalog.hpp"
#include "thirdform/classify.hpp"

using namespace thirdform;

namespace {

Analysis run(const std::string& name, const Params& params = {}, AnalysisFrame frame = AnalysisFrame::Auto,
             int samples = 25) {
  SamplingConfig cfg;
  cfg.samples = samples;
  cfg.frame = frame;
  return analyze(make(name, params).immersion, cfg);
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

// f o phi for phi(s) = (s1 + 0.1 s2^2, s2 (1 + 0.05 s1)), a non-isometric
// diffeomorphism of [-1.5, 1.5]^2 into the original chart.
Immersion reparametrized(const Immersion& imm) {
  Immersion out = imm;
  out.domain = {Vec::Constant(2, -1.5), Vec::Constant(2, 1.5)};
  out.jet = [base = imm.jet](const Vec& s) {
    Vec u(2);
    u << s[0] + 0.1 * s[1] * s[1], s[1] * (1.0 + 0.05 * s[0]);
    Mat d(2, 2);  // d(i, a) = d_a phi^i
    d << 1.0, 0.2 * s[1], 0.05 * s[1], 1.0 + 0.05 * s[0];
    // dd[a](i, b) = d_a d_b phi^i
    std::vector<Mat> dd(2, Mat::Zero(2, 2));
    dd[1](0, 1) = 0.2;
    dd[0](1, 1) = 0.05;
    dd[1](1, 0) = 0.05;
    const Jet2 j = base(u);
    Jet2 r;
    r.position = j.position;
    r.first = j.first * d;
    r.second.assign(2, Mat::Zero(j.position.size(), 2));
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        Vec v = Vec::Zero(j.position.size());
        for (int i = 0; i < 2; ++i) {
          for (int k = 0; k < 2; ++k) v += j.second[i].col(k) * d(i, a) * d(k, b);
          v += j.first.col(i) * dd[a](i, b);
        }
        r.second[a].col(b) = v;
      }
    }
    return r;
  };
  return out;
}

}  // namespace

TEST_CASE("verdict names round trip") {
  for (VerdictKind k : {VerdictKind::TotallyGeodesic, VerdictKind::RoundSphere, VerdictKind::SphereProduct,
                        VerdictKind::VeroneseLike, VerdictKind::NotHomothetic, VerdictKind::Inconclusive}) {
    CHECK(parse_verdict_kind(to_string(k)) == k);
  }
  for (AnalysisFrame f : {AnalysisFrame::Auto, AnalysisFrame::Euclidean, AnalysisFrame::SpaceForm}) {
    CHECK(parse_analysis_frame(to_string(f)) == f);
  }
  CHECK_FALSE(parse_verdict_kind("Sphere"));
  CHECK_FALSE(parse_analysis_frame("hyperbolic"));
}

TEST_CASE("decision table is total and respects its premises") {
  int count = 0;
  for (int n : {1, 2, 3}) {
    for (int mask = 0; mask < 64; ++mask) {
      for (int k : {0, 1, 2, 3}) {
        for (int cc : {0, 1, 2}) {
          DecisionInputs in;
          in.n = n;
          in.homothetic = mask & 1;
          in.totally_geodesic = mask & 2;
          in.flat = mask & 4;
          in.equal_norms = mask & 8;
          in.minimal = mask & 16;
          in.curvature_matches = mask & 32;
          in.planar = (mask + k) % 2 == 0;
          in.k = k;
          if (cc == 1) in.c = 1.0;
          if (cc == 2) in.c = -1.0;
          VerdictKind v{};
          REQUIRE_NOTHROW(v = decide(in));
          ++count;
          if (!in.homothetic) CHECK(v == VerdictKind::NotHomothetic);
          if (v == VerdictKind::VeroneseLike) {
            CHECK(in.n == 2);
            CHECK_FALSE(in.flat);
            CHECK(in.minimal);
            CHECK(in.curvature_matches);
            CHECK(*in.c > 0.0);
          }
          if (v == VerdictKind::SphereProduct) {
            CHECK(in.flat);
            CHECK(in.k >= 2);
            CHECK(in.equal_norms);
          }
          if (v == VerdictKind::RoundSphere) CHECK_FALSE(in.totally_geodesic);
          if (in.homothetic && in.totally_geodesic) CHECK(v == VerdictKind::TotallyGeodesic);
        }
      }
    }
  }
  CHECK(count == 3 * 64 * 4 * 3);
}

TEST_CASE("worked examples") {
  SUBCASE("round sphere of radius 2") {
    const Verdict v = run("round_sphere", {{"n", 2}, {"r", 2}}).verdict;
    CHECK(v.kind == VerdictKind::RoundSphere);
    REQUIRE(v.homothety_r2);
    CHECK(*v.homothety_r2 == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(v.flat);
    CHECK(v.k == 1);
    REQUIRE(v.einstein);
    CHECK(*v.einstein);
  }
  SUBCASE("product of unit circles") {
    const Verdict v = run("sphere_product", {{"m1", 1}, {"m2", 1}, {"r", 1}}).verdict;
    CHECK(v.kind == VerdictKind::SphereProduct);
    CHECK(v.k == 2);
    CHECK(v.equal_norms);
    CHECK(v.principal_norm_min == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*v.homothety_r2 == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("Veronese surface") {
    for (double c : {0.5, 1.0, 2.0}) {
      const Verdict v = run("veronese", {{"c", c}}).verdict;
      CHECK(v.kind == VerdictKind::VeroneseLike);
      CHECK(v.frame == AnalysisFrame::SpaceForm);
      CHECK(*v.homothety_r2 == doctest::Approx(1.5 / c).epsilon(1e-8));
      CHECK_FALSE(v.flat);
      CHECK(v.minimal);
      CHECK(*v.gauss_curvature == doctest::Approx(c / 3.0).epsilon(1e-6));
    }
  }
  SUBCASE("unequal radii") {
    const Verdict v = run("sphere_product", {{"r1", 1}, {"r2", 2}}).verdict;
    CHECK(v.kind == VerdictKind::NotHomothetic);
    CHECK_FALSE(v.homothetic);
  }
  SUBCASE("flat plane") {
    CHECK(run("plane").verdict.kind == VerdictKind::TotallyGeodesic);
  }
  SUBCASE("circle is planar") {
    const Verdict v = run("circle", {{"r", 3}}).verdict;
    CHECK(v.kind == VerdictKind::RoundSphere);
    CHECK(*v.planar);
    CHECK(*v.homothety_r2 == doctest::Approx(9.0).epsilon(1e-9));
  }
  SUBCASE("torus in hyperbolic space through the horosphere") {
    const Verdict v = run("horosphere_product").verdict;
    CHECK(v.frame == AnalysisFrame::SpaceForm);
    CHECK(v.kind == VerdictKind::SphereProduct);
    CHECK(*v.homothety_r2 == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("every catalog entry meets its expected verdict") {
  for (const auto& name : entry_names()) {
    CAPTURE(name);
    const CatalogEntry e = make(name);
    REQUIRE(e.expected);
    SamplingConfig cfg;
    cfg.frame = e.expected->frame;
    const Verdict v = analyze(e.immersion, cfg).verdict;
    CHECK(v.kind == e.expected->kind);
    // Only the Veronese surface is classified as Veronese-like.
    CHECK((v.kind == VerdictKind::VeroneseLike) == (name == "veronese"));
    if (e.expected->r2) CHECK(*v.homothety_r2 == doctest::Approx(*e.expected->r2).epsilon(1e-8));
    if (e.expected->flat) CHECK(v.flat == *e.expected->flat);
    if (e.expected->minimal) CHECK(v.minimal == *e.expected->minimal);
  }
}

TEST_CASE("flatness certificate") {
  Mat a(2, 2);
  a << 1, 0, 0, -1;
  Mat b(2, 2);
  b << 0, 1, 1, 0;
  const std::vector<SymOp> twisted{SymOp(a), SymOp(b)};
  const FlatnessCertificate t = flatness_certificate(twisted, 1e-8);
  CHECK_FALSE(t.flat);
  CHECK(t.max_commutator == doctest::Approx(2.0 * std::sqrt(2.0)));
  const std::vector<SymOp> diagonal{SymOp(a), SymOp(Mat::Identity(2, 2))};
  CHECK(flatness_certificate(diagonal, 1e-8).flat);

  const Immersion torus = make("clifford_torus").immersion;
  for (const Vec& u : sample_points(torus.domain, 10, 3)) {
    const PointData pd = point_data(torus, u, {RicciMode::Skip});
    CHECK(flatness_certificate(pd, 1e-8).flat);
    CHECK(flatness_certificate(reduce_to_space_form(pd, torus), 1e-8).flat);
  }
}

TEST_CASE("minimality certificate") {
  SamplingConfig cfg;
  cfg.frame = AnalysisFrame::SpaceForm;
  const Analysis v = analyze(make("veronese").immersion, cfg);
  const MinimalityCertificate mv = minimality_certificate(v.report.rows, 1e-9);
  CHECK(mv.minimal);
  CHECK(mv.max_mean_curvature <= 1e-9);

  const Analysis s = run("round_sphere");
  const MinimalityCertificate ms = minimality_certificate(s.report.rows, 1e-9);
  CHECK_FALSE(ms.minimal);
  CHECK(ms.max_mean_curvature == doctest::Approx(1.0).epsilon(1e-9));

  const Analysis t = analyze(make("clifford_torus").immersion, cfg);
  CHECK(minimality_certificate(t.report.rows, 1e-9).minimal);
}

TEST_CASE("Einstein certificate") {
  for (double r : {0.5, 2.0}) {
    const Immersion s2 = make("round_sphere", {{"n", 2}, {"r", r}}).immersion;
    const EinsteinCertificate e = einstein_certificate(s2, sample_points(s2.domain, 12, 1), 1e-5);
    CHECK(e.einstein);
    CHECK(e.mu == doctest::Approx(1.0 / (r * r)).epsilon(1e-7));
  }
  const Immersion s3 = make("round_sphere", {{"n", 3}, {"r", 2}}).immersion;
  const EinsteinCertificate e3 = einstein_certificate(s3, sample_points(s3.domain, 8, 1), 1e-5);
  CHECK(e3.einstein);
  CHECK(e3.mu == doctest::Approx(0.5).epsilon(1e-6));

  const Immersion p = make("sphere_product", {{"m1", 1}, {"m2", 2}, {"r1", 1}, {"r2", 2}}).immersion;
  CHECK_FALSE(einstein_certificate(p, sample_points(p.domain, 8, 1), 1e-5).einstein);

  const Immersion curve = make("circle").immersion;
  CHECK(code_of([&] { einstein_certificate(curve, sample_points(curve.domain, 2, 0), 1e-5); }) ==
        ErrorCode::InvalidParams);
}

TEST_CASE("minimal in a space form: homothetic iff Einstein") {
  struct Case {
    std::string name;
    Params params;
  };
  const std::vector<Case> cases{
      {"veronese", {{"c", 1}}},
      {"clifford_torus", {{"c", 2}}},
      {"sphere_product", {{"m1", 1}, {"m2", 1}, {"r", 1}}},
      {"sphere_product", {{"m1", 1}, {"m2", 2}, {"r1", 1}, {"r2", std::sqrt(2.0)}}},
  };
  for (const Case& c : cases) {
    CAPTURE(c.name);
    const Verdict v = run(c.name, c.params, AnalysisFrame::SpaceForm).verdict;
    REQUIRE(v.minimal);
    REQUIRE(v.einstein);
    CHECK(v.homothetic == *v.einstein);
  }
}

TEST_CASE("verdict is invariant under reparametrization") {
  const Immersion base = make("veronese").immersion;
  const Immersion moved = reparametrized(base);
  SamplingConfig cfg;
  cfg.samples = 30;
  const Verdict a = analyze(base, cfg).verdict;
  const Verdict b = analyze(moved, cfg).verdict;
  CHECK(b.kind == a.kind);
  CHECK(b.kind == VerdictKind::VeroneseLike);
  CHECK(*b.homothety_r2 == doctest::Approx(*a.homothety_r2).epsilon(1e-8));
  CHECK(*b.gauss_curvature == doctest::Approx(*a.gauss_curvature).epsilon(1e-6));
  CHECK(b.max_gauss_residual <= 1e-5);

  const Immersion torus = reparametrized(make("sphere_product", {{"r", 1}}).immersion);
  const Verdict t = analyze(torus, cfg).verdict;
  CHECK(t.kind == VerdictKind::SphereProduct);
  CHECK(*t.homothety_r2 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("sample_points") {
  const ChartBox box{Vec::Constant(3, -1.0), Vec::Constant(3, 2.0)};
  const auto a = sample_points(box, 40, 9);
  const auto b = sample_points(box, 40, 9);
  const auto c = sample_points(box, 40, 10);
  REQUIRE(a.size() == 40);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(box.shrunk(0.01).contains(a[i]));
    differs = differs || (a[i] - c[i]).norm() > 0.0;
  }
  CHECK(differs);
  CHECK(code_of([&] { sample_points(box, 0, 0); }) == ErrorCode::SamplingFailed);
}

TEST_CASE("frames and unsupported codimension") {
  CHECK(resolve_frame(make("round_sphere").immersion, AnalysisFrame::Auto) == AnalysisFrame::Euclidean);
  CHECK(resolve_frame(make("veronese").immersion, AnalysisFrame::Auto) == AnalysisFrame::SpaceForm);
  CHECK(resolve_frame(make("hyperbolic_product").immersion, AnalysisFrame::Auto) == AnalysisFrame::SpaceForm);
  CHECK(code_of([] { resolve_frame(make("hyperbolic_product").immersion, AnalysisFrame::Euclidean); }) ==
        ErrorCode::SignatureMismatch);
  CHECK(code_of([] { resolve_frame(make("plane").immersion, AnalysisFrame::SpaceForm); }) == ErrorCode::BadCurvature);
  CHECK(code_of([] { run("veronese", {}, AnalysisFrame::Euclidean); }) == ErrorCode::CodimensionUnsupported);
}

TEST_CASE("analysis is deterministic") {
  const Analysis a = run("veronese", {}, AnalysisFrame::Auto, 12);
  const Analysis b = run("veronese", {}, AnalysisFrame::Auto, 12);
  REQUIRE(a.report.rows.size() == b.report.rows.size());
  for (std::size_t i = 0; i < a.report.rows.size(); ++i) {
    CHECK(a.report.rows[i].u == b.report.rows[i].u);
    CHECK(a.report.rows[i].iii_mean == b.report.rows[i].iii_mean);
    CHECK(a.report.rows[i].gauss_residual == b.report.rows[i].gauss_residual);
  }
}
