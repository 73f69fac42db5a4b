#pragma once

// Algebra of a symmetric bilinear form alpha: V x V -> W with dim W = 2.
//
// The form is carried by its two shape operators (A1, A2) with respect to an
// orthonormal basis (xi1, xi2) of W, so that <alpha(X, Y), xi_i> = <A_i X, Y>.
// When the associated third fundamental form A1^2 + A2^2 is a multiple of the
// identity, V splits orthogonally into blocks E_j on which every A_xi^2 acts
// as lambda_j(xi)^2, and each block with lambda > 0 carries the (rho, sigma, A)
// normal form computed by block_structure().

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "thirdform/linalg.hpp"

namespace thirdform {

/// Tolerances are relative to 1 + operator norm of the form.
struct FormTolerances {
  double cluster = 1e-6;
  double certificate = 1e-8;
};

class BilinearForm2 {
 public:
  BilinearForm2(SymOp a1, SymOp a2);

  int dim() const { return a1_.dim(); }
  const SymOp& a1() const { return a1_; }
  const SymOp& a2() const { return a2_; }

  /// A_xi = xi_1 A1 + xi_2 A2.
  Mat shape(const Vec2& xi) const { return xi[0] * a1_.matrix() + xi[1] * a2_.matrix(); }
  /// Components of alpha(x, y) in the basis (xi1, xi2).
  Vec2 value(const Vec& x, const Vec& y) const;
  /// 1 + max spectral radius of the two operators.
  double scale() const;

  /// The form restricted to span(basis) expressed in those (orthonormal) columns.
  BilinearForm2 restricted(const Mat& basis) const;
  /// Same alpha written in the normal basis rotated by `angle`.
  BilinearForm2 rotated_normals(double angle) const;
  /// Same alpha after the isometry x -> q x of V.
  BilinearForm2 conjugated(const Mat& q) const;

 private:
  SymOp a1_;
  SymOp a2_;
};

/// III components in the orthonormal basis of V: A1^2 + A2^2.
struct ThirdForm {
  Mat components;

  int dim() const { return static_cast<int>(components.rows()); }
  double mean() const { return components.trace() / dim(); }
  /// Frobenius distance from mean() * I.
  double umbilic_residual() const;
};

ThirdForm third_form(const BilinearForm2& f);

/// phi given as one n x n matrix per axis of W. Returns xi with
/// phi(X, Y) = <X, Y> xi when the orthonormal-basis criterion holds to tol
/// (relative to 1 + max |phi_ij|). Throws NotBilinear on malformed input.
std::optional<Vec> is_umbilical_form(std::span<const Mat> phi, double tol);

/// r^2 with III = (1/r^2) I, or nothing when III is not umbilical or its
/// multiple does not exceed tol (totally geodesic case).
std::optional<double> homothety_factor(const ThirdForm& iii, double tol);

struct GenericNormal {
  Vec2 xi;
  std::vector<double> eigenvalues;  // clustered spectrum of A_xi^2, ascending
  double cluster_tol = 0.0;
};

/// Unit normal whose A_xi^2 has the most distinct eigenvalues among 64
/// Halton directions on the half circle (shifted by `seed`).
GenericNormal generic_normal(const BilinearForm2& f, std::uint64_t seed, double cluster_rel = 1e-6);

struct Block {
  Mat basis;    // orthonormal columns in V
  Vec2 lambda;  // (lambda(xi1), lambda(xi2)), both >= 0

  int dim() const { return static_cast<int>(basis.cols()); }
  Mat projector() const { return basis * basis.transpose(); }
};

struct AdaptedDecomposition {
  std::vector<Block> blocks;  // sorted by (lambda(xi1), lambda(xi2))
  std::optional<double> homothety_r2;
  Vec2 generic_xi = Vec2::UnitX();
  double umbilic_residual = 0.0;
  double adaptedness_residual = 0.0;

  int k() const { return static_cast<int>(blocks.size()); }
};

AdaptedDecomposition decompose(const BilinearForm2& f, const FormTolerances& tol = {},
                               std::uint64_t seed = 0);

struct BlockStructure {
  double lambda1 = 0.0;  // lambda(xi1) > 0
  double lambda2 = 0.0;  // lambda(xi2)
  double rho = 0.0;
  double sigma = 0.0;    // >= 0
  Mat e_plus;            // eigenspace of A1 for +lambda1, block coordinates
  Mat e_minus;           // eigenspace of A1 for -lambda1
  Mat a_map;             // A: E+ -> E-, coordinates of e_plus to e_minus

  // Certificate residuals (Frobenius / absolute).
  double a_star_a_residual = 0.0;   // |A^T A - sigma^2 I|
  double a_a_star_residual = 0.0;   // |A A^T - sigma^2 I|
  double rho_sigma_residual = 0.0;  // |rho^2 + sigma^2 - lambda2^2|
  double trace_residual = 0.0;      // max |trace A_i|
  double rho_residual = 0.0;        // |pi+ A2 pi+ - rho I|

  int half_dim() const { return static_cast<int>(e_plus.cols()); }
  double max_residual() const;
};

/// Block on which lambda(xi) vanishes for some xi != 0: A_kernel = 0 and
/// A_active has eigenvalues +-lambda_active with possibly unequal
/// multiplicities.
struct DegenerateBlock {
  Vec2 kernel_normal;
  Vec2 active_normal;
  double lambda_active = 0.0;
  Mat e_plus;
  Mat e_minus;
};

using BlockAnalysis = std::variant<BlockStructure, DegenerateBlock>;

/// Normal form of the restriction of alpha to one block of the adapted
/// decomposition. Throws UnequalHalfDimensions or NonConstantRho.
BlockAnalysis block_structure(const BilinearForm2& block, double tol = 1e-8);

struct UmbilicalResiduals {
  double plus = 0.0;          // alpha|E+xE+ - <,>(lambda xi1 + rho xi2)
  double minus = 0.0;         // alpha|E-xE- + <,>(lambda xi1 + rho xi2)
  double alpha_a = 0.0;       // alpha(X, AY) - <,> sigma^2 xi2
  double alpha_a_star = 0.0;  // alpha(X, A*Y) - <,> sigma^2 xi2

  double max() const;
};

UmbilicalResiduals umbilical_subforms_check(const BlockStructure& bs, const BilinearForm2& block);

/// Inverse of block_structure: A1 = lambda1 (pi+ - pi-) and
/// A2 = (rho + A) pi+ + (-rho + A*) pi- with A = sigma Q, Q a random rotation.
/// E+ occupies the first half_dim coordinates.
BilinearForm2 synth_block(double lambda1, double rho, double sigma, int half_dim, std::uint64_t seed);

/// One summand of synth_form: either a synth_block block, or a 1-dimensional
/// block with alpha(X, X) = |X|^2 eta.
struct BlockParams {
  double lambda1 = 1.0;
  double rho = 0.0;
  double sigma = 1.0;
  int half_dim = 1;
  bool line = false;
  Vec2 eta = Vec2::Zero();

  static BlockParams paired(double lambda1, double rho, double sigma, int half_dim) {
    return {lambda1, rho, sigma, half_dim, false, Vec2::Zero()};
  }
  static BlockParams umbilic_line(const Vec2& eta) { return {0.0, 0.0, 0.0, 0, true, eta}; }

  int dim() const { return line ? 1 : 2 * half_dim; }
};

/// Orthogonal direct sum of synthesized blocks, optionally conjugated by a
/// random rotation of V.
BilinearForm2 synth_form(std::span<const BlockParams> blocks, std::uint64_t seed, bool rotate = true);

struct PrincipalNormals {
  std::vector<Vec> normals;  // eta_i, components in the normal basis
  std::vector<Mat> bases;    // common eigenspace per eta_i

  int size() const { return static_cast<int>(normals.size()); }
};

/// Simultaneous eigendecomposition of commuting shape operators; any number
/// of normal directions. Throws NotFlat when some commutator exceeds
/// tol * (1 + |A_i| |A_j|).
PrincipalNormals principal_normals(std::span<const SymOp> shape, double tol = 1e-8, std::uint64_t seed = 0);
PrincipalNormals principal_normals(const BilinearForm2& f, double tol = 1e-8);

}  // namespace thirdform
