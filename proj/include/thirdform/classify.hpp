#pragma once

// Sampling pipeline that turns an immersion into a verdict: third form at
// every sample point, homothety, adapted decomposition, normal flatness,
// minimality and intrinsic curvature, then a fixed decision table.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thirdform/geometry.hpp"
#include "thirdform/verdict.hpp"

namespace thirdform {

struct Tolerances {
  double cluster = 1e-6;
  double certificate = 1e-8;
  double homothety = 1e-8;
  double curvature = 1e-5;
};

struct SamplingConfig {
  int samples = 25;
  std::uint64_t seed = 0;
  Tolerances tol;
  AnalysisFrame frame = AnalysisFrame::Auto;
};

/// Frame actually used for `requested`. Auto picks Euclidean for Euclidean
/// ambients of codimension at most two and the space form otherwise.
/// Throws BadCurvature when SpaceForm is requested for a flat target.
AnalysisFrame resolve_frame(const Immersion& imm, AnalysisFrame requested);

/// Low-discrepancy interior points of the chart (1% margin), shifted by seed.
std::vector<Vec> sample_points(const ChartBox& box, int count, std::uint64_t seed);

struct SampleRow {
  int index = 0;
  Vec u;
  Vec position;
  double iii_mean = 0.0;            // trace(III)/n
  double iii_spread = 0.0;          // largest minus smallest eigenvalue of III
  double homothety_residual = 0.0;  // |III - mean I|
  bool umbilic = false;
  double commutator = 0.0;          // max |[A_i, A_j]|
  double commutator_bound = 0.0;    // flatness threshold at this point
  double mean_curvature_norm = 0.0;
  double gauss_residual = 0.0;      // |III_direct - III_invariant|
  std::optional<double> gauss_curvature;  // n = 2
  std::optional<double> ricci_residual;   // |Ric - (trace/n) I|, n >= 2
  std::optional<double> ricci_mean;       // trace(Ric)/n
  std::vector<Vec2> lambdas;        // per block of the adapted decomposition
  std::vector<int> block_dims;
  double block_residual = 0.0;      // worst block-structure and subform residual
  double block_trace = 0.0;         // worst |trace A_i| over non-degenerate blocks
  std::vector<double> principal_norms;  // |eta_i| when the normal bundle is flat
  int k = 0;
};

struct Aggregate {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct SampleReport {
  std::vector<SampleRow> rows;
  std::vector<Aggregate> aggregates;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  AnalysisFrame frame = AnalysisFrame::Euclidean;
  int n = 0;
  int codim = 0;
  std::optional<double> c;

  bool homothetic = false;
  std::optional<double> homothety_r2;
  double iii_mean = 0.0;
  double iii_mean_spread = 0.0;     // across points
  double max_homothety_residual = 0.0;

  bool flat = false;
  double max_commutator = 0.0;
  int k = 0;
  bool k_consistent = true;
  double principal_norm_min = 0.0;
  double principal_norm_max = 0.0;
  bool equal_norms = false;
  double max_block_residual = 0.0;

  bool minimal = false;
  double max_mean_curvature = 0.0;

  std::optional<bool> einstein;
  double einstein_spread = 0.0;
  std::optional<double> gauss_curvature;  // mean over points, n = 2
  std::optional<bool> curvature_matches;  // K = c/3 (n = 2, c > 0)
  std::optional<bool> planar;             // n = 1
  double max_gauss_residual = 0.0;
};

struct FlatnessCertificate {
  bool flat = false;
  double max_commutator = 0.0;
  double bound = 0.0;
};

/// flat iff every |[A_i, A_j]| <= tol (1 + |A_i| |A_j|).
FlatnessCertificate flatness_certificate(std::span<const SymOp> shape, double tol);
FlatnessCertificate flatness_certificate(const PointData& pd, double tol);
FlatnessCertificate flatness_certificate(const SpaceFormData& sf, double tol);

struct MinimalityCertificate {
  bool minimal = false;
  double max_mean_curvature = 0.0;
  double max_block_trace = 0.0;
};

MinimalityCertificate minimality_certificate(std::span<const SampleRow> rows, double tol);

struct EinsteinCertificate {
  bool einstein = false;
  double spread = 0.0;  // spread of K (n = 2) or of Ric/g plus pointwise defect
  double mu = 0.0;      // mean K or Ric/g
};

/// Throws InvalidParams for n < 2; Ricci errors propagate.
EinsteinCertificate einstein_certificate(const Immersion& imm, std::span<const Vec> points, double tol);

struct DecisionInputs {
  int n = 2;
  bool homothetic = false;
  bool totally_geodesic = false;
  bool flat = false;
  int k = 0;
  bool equal_norms = false;
  bool minimal = false;
  std::optional<double> c;
  bool curvature_matches = false;  // K = c/3
  bool planar = true;              // curves only
};

VerdictKind decide(const DecisionInputs& in);

struct Analysis {
  Verdict verdict;
  SampleReport report;
};

/// Throws CodimensionUnsupported for a non-flat normal bundle of rank above
/// two, SamplingFailed for an empty sample set.
Analysis analyze(const Immersion& imm, const SamplingConfig& config = {});

}  // namespace thirdform
