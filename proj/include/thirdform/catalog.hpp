#pragma once

// Closed-form immersions: round spheres, sphere products, the Clifford torus,
// the Veronese surface, curves, graphs, and the extrinsic-product
// constructions in spherical and hyperbolic space forms.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thirdform/geometry.hpp"
#include "thirdform/verdict.hpp"

namespace thirdform {

using Params = std::map<std::string, double>;

/// What the classifier must report for an entry.
struct ExpectedVerdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::optional<double> r2;
  std::optional<bool> flat;
  std::optional<int> blocks;
  std::optional<bool> minimal;
  AnalysisFrame frame = AnalysisFrame::Auto;
};

struct CatalogEntry {
  std::string name;
  Params params;
  Immersion immersion;
  std::optional<ExpectedVerdict> expected;
};

/// Names accepted by make().
const std::vector<std::string>& entry_names();

/// Builds a named entry. Unknown names throw UnknownName; unknown parameter
/// keys or out-of-range values throw BadParams.
///
///   plane               n=2                     R^n in R^{n+2}
///   circle              r=1                     S^1(r) in R^2 in R^3
///   helix               a=1 b=1                 (a cos, a sin, b t) by arc length
///   round_sphere        n=2 r=1                 S^n(r) in R^{n+1} in R^{n+2}
///   sphere_product      m1=1 m2=1 r=1 [r1 r2]   S^m1(r1) x S^m2(r2) (aliases m, n = m1 + m2)
///   clifford_torus      c=1                     S^1 x S^1 in S^3_c
///   veronese            c=1                     RP^2 -> S^4_c in R^5
///   graph_custom        a11 a12 a22 b11 b12 b22 (u, v, q_a(u,v)/2, q_b(u,v)/2)
///   hyperbolic_product  c0=-0.5 c1=1            H^2_{c0} x S^1_{c1} in Q_c, c = (1/c0 + 1/c1)^-1
///   horosphere_product  c=-1 r1=1 r2=1          j o (S^1(r1) x S^1(r2)), j: R^4 -> H^5_c horosphere
CatalogEntry make(const std::string& name, const Params& params = {});

/// Identity immersion of S^m_c = S^m(1/sqrt c) into R^{m+1}; angle chart for
/// m = 1, stereographic chart from the north pole otherwise.
Immersion sphere_factor(int m, double c);

/// Identity immersion of H^m_c into the upper sheet of L^{m+1}.
Immersion hyperbolic_factor(int m, double c);

/// f -> (f, 0, ..., 0) in R^{N + extra}.
Immersion padded(const Immersion& imm, int extra);

struct ProductSpec {
  /// Each factor lies in its own Q_{c_i}; at most one factor is hyperbolic
  /// (Lorentz ambient), and it must come first.
  std::vector<Immersion> factors;
};

/// Product immersion into Q_c with c = (sum 1/c_i)^-1. Throws
/// CurvatureSumZero or SignatureMismatch.
CatalogEntry extrinsic_product(const ProductSpec& spec);

/// j o (f_1 x ... x f_k) with j: R^M -> H^{M+1}_c the horosphere through
/// (R, 0, ..., 0), R = 1/sqrt(-c), in L^{M+2}. Throws BadCurvature for c >= 0.
CatalogEntry umbilical_inclusion_product(const std::vector<Immersion>& factors, double c);

struct UmbilicityCertificate {
  double residual = 0.0;   // |A_nu - (trace/M) I|
  double principal = 0.0;  // trace/M, equals sqrt(-c)
};

/// Shape operator of the horosphere j itself inside H^{M+1}_c at y.
UmbilicityCertificate horosphere_umbilicity(int dim, double c, const Vec& y);

}  // namespace thirdform
