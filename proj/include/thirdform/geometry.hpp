#pragma once

// Pointwise extrinsic geometry of a parametrized immersion f: U ⊂ R^n -> E^N
// (Euclidean or Lorentz ambient). Derivatives of f come from exact callbacks;
// only the intrinsic Ricci tensor is computed by finite differences of the
// induced metric, which keeps the two third-form routes independent.

#include <functional>
#include <optional>
#include <vector>

#include "thirdform/forms.hpp"
#include "thirdform/linalg.hpp"

namespace thirdform {

/// Value and first two derivatives of a map R^n -> R^N at one point.
struct Jet2 {
  Vec position;             // N
  Mat first;                // N x n, column a = d_a f
  std::vector<Mat> second;  // n entries of N x n, second[a].col(b) = d_a d_b f
};

using JetFn = std::function<Jet2(const Vec&)>;

struct ChartBox {
  Vec lower;
  Vec upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vec& u) const;
  /// Box shrunk by `fraction` of its width on every side.
  ChartBox shrunk(double fraction) const;
  /// Largest side length.
  double scale() const;
  /// Maps a point of the unit cube into the box.
  Vec at(const Vec& unit) const;
};

struct Immersion {
  int n = 0;
  InnerProduct ambient = InnerProduct::euclidean(1);
  ChartBox domain;
  JetFn jet;
  /// Set when f maps into Q_c = {<X, X> = 1/c}.
  std::optional<double> curvature;

  int ambient_dim() const { return ambient.dim(); }
  int codim() const { return ambient_dim() - n; }
  /// Evaluates the jet and checks shapes; throws OutOfDomain.
  Jet2 evaluate(const Vec& u) const;
};

enum class RicciMode { Skip, Compute };

/// Everything at one chart point, expressed in orthonormal frames.
struct PointData {
  Vec u;
  Vec position;
  InnerProduct ambient = InnerProduct::euclidean(1);
  Mat tangent;                    // N x n, orthonormal
  Mat normal;                     // N x (N - n), orthonormal
  std::vector<int> normal_signs;  // <nu, nu> per normal column
  Mat metric;                     // coordinate metric g_ab
  Mat frame_change;               // R with d_a f = tangent * R.col(a)
  Mat hessian;                    // N x n^2, column i*n+j = second derivative along (t_i, t_j)
  std::vector<SymOp> shape;       // A_nu per normal column, orthonormal tangent frame
  Vec mean_curvature;             // H^nu = trace(A_nu)/n; H = sum sign_nu H^nu nu
  std::optional<Mat> ricci;       // orthonormal tangent frame

  int n() const { return static_cast<int>(tangent.cols()); }
  int codim() const { return static_cast<int>(normal.cols()); }
  double mean_curvature_norm() const;
};

/// The same point regarded inside Q_c: the radial direction is removed from
/// the normal frame and alpha loses its radial component.
struct SpaceFormData {
  PointData point;
  double c = 0.0;
  Vec radial;                     // sqrt|c| f, unit
  Mat normal;                     // normal frame of f inside Q_c
  std::vector<SymOp> shape;       // shape operators of alpha_qc
  Vec mean_curvature;             // H_qc components

  int codim() const { return static_cast<int>(normal.cols()); }
  double mean_curvature_norm() const { return mean_curvature.norm(); }
};

struct GeometryOptions {
  RicciMode ricci = RicciMode::Compute;
  /// Finite-difference step; nonpositive selects default_ricci_step().
  double ricci_step = -1.0;
};

PointData point_data(const Immersion& imm, const Vec& u, const GeometryOptions& options = {});

/// Sum over the normal frame of sign * A^2.
ThirdForm third_form_direct(const PointData& pd);
ThirdForm third_form_direct(const SpaceFormData& sf);

/// 1e-3 * domain scale. Richardson extrapolation removes the h^2 term, so the
/// remaining error is rounding (eps / h^2) against h^4, balanced near here.
double default_ricci_step(const Immersion& imm);

/// Ricci tensor in the orthonormal tangent frame from central differences of
/// the induced metric with step h and h/2, Richardson-combined. Throws
/// StepTooLarge when the two steps disagree by more than 1e-4 (relative).
Mat ricci_intrinsic(const Immersion& imm, const Vec& u, double h);

/// III = n <alpha, H> - Ric in a flat ambient.
ThirdForm third_form_invariant(const PointData& pd, const Mat& ricci);
ThirdForm third_form_invariant(const PointData& pd);
/// III_qc = n <alpha_qc, H_qc> - Ric + (n - 1) c g.
ThirdForm third_form_invariant(const SpaceFormData& sf, const Mat& ricci);
ThirdForm third_form_invariant(const SpaceFormData& sf);

/// Throws NotOnQuadric when <f, f> differs from 1/c by more than 1e-10 (relative).
SpaceFormData reduce_to_space_form(const PointData& pd, const Immersion& imm);

/// |III_direct - III_invariant| (Frobenius), the larger of the flat-ambient
/// and, when the immersion lies in some Q_c, the space-form residuals.
double gauss_consistency(const Immersion& imm, const Vec& u);

}  // namespace thirdform
