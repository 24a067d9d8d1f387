#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "sinegen/funcspace.hpp"

namespace sinegen::kernel {

/// Numeric failure distinct from bad input: non-convergence, missing
/// eigenvalues, detector conflicts.  Maps to CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The two coincidence detectors (singular-value scan vs characteristic
/// roots) produced different shift sets.
struct DetectorDisagreement : NumericError {
  DetectorDisagreement(std::string message, std::vector<double> scan_shifts,
                       std::vector<double> root_shifts);
  std::vector<double> scan_shifts;
  std::vector<double> root_shifts;
};

struct BoundaryConditions {
  double f_at_zero = 0.0;
  double fprime_at_zero = 1.0;
  Parity parity = Parity::Odd;
};

/// Shifted:        f'(x) = f(x + a)
/// ScaledShifted:  lambda * f'(x) = f(x + a), lambda = f(a) (the maximum)
enum class EquationForm { Shifted, ScaledShifted };

struct SolveDiagnostics {
  /// Shifted: smallest singular value of D - T_a on the parity class.
  /// ScaledShifted: residual |A v - lambda B v| of the chosen eigenpair.
  double smallest_singular_value;
  double next_singular_value;
  double gap;  // next / smallest, guarded against division by zero
  int max_mode;
  bool no_exact_kernel;  // smallest_singular_value > 1e-8
};

struct KernelSolution {
  funcspace::FourierRepresentation f;
  funcspace::FourierRepresentation g;  // differentiate(f)
  double a;
  double lambda;  // 1 for Shifted, f(a) for ScaledShifted
  EquationForm equation_form;
  SolveDiagnostics diagnostics;
};

struct CharacteristicRoot {
  std::complex<double> s;
  double residual;      // |s - exp(s*a)|
  int branch_index;     // position in the |Im|-sorted output
  bool imaginary;       // |Re s| <= 1e-10
};

struct HarmonicTrajectory {
  funcspace::GridSpec grid;  // x0 = 0, spacing = step, last point = x_end
  std::vector<double> f_values;
  std::vector<double> g_values;
  double step;       // actual step used (requested step rounded down so the
                     // grid lands on x_end with at least 8 subintervals)
  int method_order;  // 4
};

struct SinCos {
  double sin_value;
  double cos_value;
};

/// Solve f'(x) = f(x + a) on the period-4a basis: nullspace of D - T_a
/// restricted to the requested parity, normalized to the boundary data.
/// When no kernel exists at this a the least-squares direction is returned
/// with diagnostics.no_exact_kernel set.
KernelSolution solve_shifted(double a, int max_mode, const BoundaryConditions& bc = {});

/// Solve lambda f'(x) = f(x + a) as the generalized eigenproblem
/// T_a v = lambda D v on the odd subspace; picks the real positive lambda
/// whose eigenvector has the largest mode-1 weight and checks lambda = f(a).
KernelSolution solve_scaled_shifted(double a, int max_mode,
                                    const BoundaryConditions& bc = {});

/// Classical fixed-step RK4 on f' = g, g' = -f from (f(0), g(0)) given by bc.
/// No trigonometric calls anywhere in the integrator.
HarmonicTrajectory integrate_harmonic(double x_end, double step,
                                      const BoundaryConditions& bc = {});

/// Alternating Taylor series for (sin x, cos x) with term recurrence,
/// stopping when the next term drops below 1e-17 * (|partial| + 1).
/// Reference implementation for tests; solvers never call it.  |x| <= 100.
SinCos taylor_oracle(double x);

/// Roots of s = exp(s*a) by damped-free Newton from a deterministic start
/// grid, deduplicated, conjugate-closed, sorted by |Im s| then Im then Re,
/// truncated to `count` conjugate classes.  Purely imaginary roots
/// (|Re s| <= 1e-10) are flagged.
std::vector<CharacteristicRoot> characteristic_roots(double a, int count);

/// Shifts a in [a_min, a_max] where D - T_a has a kernel.  Two independent
/// detectors must agree: the singular-value scan (golden-section refined)
/// and the characteristic-root real-part sign change (bisection refined).
/// Throws DetectorDisagreement when they do not.
std::vector<double> detect_coincidence_shifts(double a_min, double a_max, int samples);

}  // namespace sinegen::kernel
