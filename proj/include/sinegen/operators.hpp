#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "sinegen/funcspace.hpp"

namespace sinegen::operators {

/// Symbolic description of a linear operator on the truncated Fourier basis.
/// Immutable expression tree; leaves are the differentiation, translation,
/// reflection and identity operators, inner nodes scale or combine them.
class OperatorKind {
 public:
  enum class Tag {
    Differentiation,
    Translation,
    Reflection,
    Identity,
    Scaled,
    Sum,
    Compose,
    Difference,
  };

  static OperatorKind differentiation();
  static OperatorKind translation(double shift);
  static OperatorKind reflection();
  static OperatorKind identity();
  static OperatorKind scaled(OperatorKind inner, double factor);
  static OperatorKind sum(OperatorKind lhs, OperatorKind rhs);
  /// compose(outer, inner): apply inner first, outer second.
  static OperatorKind compose(OperatorKind outer, OperatorKind inner);
  static OperatorKind difference(OperatorKind lhs, OperatorKind rhs);

  Tag tag() const { return tag_; }
  double shift() const;   // Translation only
  double factor() const;  // Scaled only
  const OperatorKind& lhs() const;  // Scaled/Sum/Compose/Difference
  const OperatorKind& rhs() const;  // Sum/Compose/Difference

 private:
  OperatorKind(Tag tag, double param, std::shared_ptr<const OperatorKind> lhs,
               std::shared_ptr<const OperatorKind> rhs);

  Tag tag_;
  double param_;
  std::shared_ptr<const OperatorKind> lhs_;
  std::shared_ptr<const OperatorKind> rhs_;
};

/// Dense matrix of an operator on the basis of modes k = -K..K
/// (row/column index k + K).
struct OperatorMatrix {
  double basis_period;
  int max_mode;
  Eigen::MatrixXcd entries;  // (2K+1) x (2K+1)
};

struct NullspaceResult {
  double smallest_singular_value;
  /// Unit-norm right singular direction realized as a real-valued function.
  /// Within a degenerate smallest-singular cluster the odd direction is
  /// preferred so that odd kernels are reported directly.
  funcspace::FourierRepresentation vector;
  double next_singular_value;
};

struct ScanPoint {
  double a;
  double sigma_min;
};

struct EigenPair {
  std::complex<double> eigenvalue;
  funcspace::FourierRepresentation vector;
};

/// Result of restricting an operator to the real-valued functions of one
/// parity class and taking its SVD there.
struct ParityNullspace {
  double smallest_singular_value;
  double next_singular_value;
  funcspace::FourierRepresentation vector;  // real-valued, requested parity
};

/// Materialize the operator matrix on the basis with the given period and
/// truncation.  Differentiation and translation are diagonal, reflection is
/// the k -> -k permutation.
OperatorMatrix build(const OperatorKind& kind, double period, int max_mode);

/// Matrix-vector product on the coefficient vector.  Checks that period and
/// max_mode match, asserts that conjugate symmetry survives (every buildable
/// kind commutes with the real structure) and re-enforces it exactly.
funcspace::FourierRepresentation apply(const OperatorMatrix& op,
                                       const funcspace::FourierRepresentation& r);

/// Smallest singular pair of the operator restricted to real-valued
/// functions (same singular spectrum as the complex matrix).
NullspaceResult nullspace(const OperatorMatrix& op);

/// Same as nullspace but restricted to one parity class.
ParityNullspace parity_restricted_nullspace(const OperatorMatrix& op, Parity parity);

/// sigma_min of D - T_a on the period-4a basis, per requested a, in input
/// order.  Deterministic.
std::vector<ScanPoint> residual_scan(const std::vector<double>& a_values, int max_mode);

/// Eigenpairs of the pencil (op_a, op_b) restricted to the subspace where
/// op_b is invertible (for op_b = differentiation the k = 0 mode drops out).
/// For parity != Any, eigenvalue clusters are projected onto the requested
/// parity subspace and only surviving directions are returned; vectors of
/// real eigenvalues are realized as real-valued functions.  Every returned
/// pair satisfies |A v - lambda B v| <= 1e-10 for unit v.
std::vector<EigenPair> generalized_eigs(const OperatorMatrix& op_a,
                                        const OperatorMatrix& op_b, Parity parity);

/// Declares a nontrivial coincidence subspace (kernel) below this threshold.
inline constexpr double kKernelSigmaThreshold = 1e-8;

}  // namespace sinegen::operators
