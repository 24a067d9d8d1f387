#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sinegen/funcspace.hpp"
#include "sinegen/kernel.hpp"

namespace sinegen::props {

/// The zero-crossing and autocorrelation period estimates differ by more
/// than the agreement tolerance.
struct PeriodDisagreement : kernel::NumericError {
  PeriodDisagreement(std::string message, double zero_crossing, double autocorrelation);
  double zero_crossing;
  double autocorrelation;
};

struct ToleranceConfig {
  double sup_tol = 1e-10;            // sup-norm identity residuals
  double constancy_tol = 1e-10;      // conserved-quantity drift
  double period_rel_tol = 1e-8;      // relative period agreement
  double independence_floor = 1e-3;  // minimum Wronskian magnitude / LS residual

  void validate() const;  // all entries strictly positive
};

/// Outcome of one identity check.  `residuals` holds named sup-norm style
/// values, each of which must stay at or below tolerance_used for the check
/// to pass; `info` carries non-gating diagnostics (reference constants, raw
/// independence measures).
struct PropositionReport {
  int proposition_id;  // 1..8
  std::vector<std::pair<std::string, double>> residuals;
  std::vector<std::pair<std::string, double>> info;
  double tolerance_used;
  bool pass;
  int grid_points;
  bool scaled;  // residuals evaluated in the lambda-scaled form
};

enum class PeriodMethod { ZeroCrossing, Autocorrelation };

struct PeriodEstimate {
  double period;
  PeriodMethod method;
  double agreement;  // relative spread between the two estimates
};

/// Identity checks for a candidate pair (f, g), g playing the role of f'.
///
///   1  periodicity:        f(x) = -f(x - 2a) and f(x) = f(x - 4a)
///   2  derivative shift:   g'(x) = g(x + a)
///   3  harmonic reduction: g'(x) = -f(x) and f''(x) = -f(x)
///   4  energy constancy:   f^2 + g^2 constant (reference at x = 0)
///   5  independence:       Wronskian f g' - f' g constant and bounded away
///                          from zero; least-squares dependence residual
///   6  derivative closure: g''(x) = -g(x)
///   7  addition formula:   f(x+y) = g(y) f(x) + f(y) g(x)  (64 x 64 grid)
///   8  scaled shift:       f(a) g(x) = f(x + a)
///
/// 1-D residuals use >= 256 grid points per period, doubling until stable.
PropositionReport check(int proposition_id, const funcspace::FourierRepresentation& f,
                        const funcspace::FourierRepresentation& g, double a,
                        const ToleranceConfig& tol = {});

/// Same checks in the lambda-scaled form (lambda g' = g(x+a),
/// lambda^2 g' = -f, f^2 + lambda^2 g^2 constant, ...).  lambda = 1 and
/// scaled = false reduces to check().  full_grid widens the addition-formula
/// grid from 64 x 64 to 256 x 256.
PropositionReport check_form(int proposition_id, const funcspace::FourierRepresentation& f,
                             const funcspace::FourierRepresentation& g, double a,
                             double lambda, bool scaled, const ToleranceConfig& tol = {},
                             bool full_grid = false);

/// f(x) g'(x) - f'(x) g(x).
double wronskian(const funcspace::FourierRepresentation& f,
                 const funcspace::FourierRepresentation& g, double x);

/// Best real c minimizing ||f - c g|| over the coefficient inner product;
/// returns ||f - c g|| / ||f|| clamped to [0, 1].  Requires ||f|| > 0.
double linear_dependence_test(const funcspace::FourierRepresentation& f,
                              const funcspace::FourierRepresentation& g);

/// Fundamental period by two independent estimators (ascending zero-crossing
/// spacing for odd-dominant input, autocorrelation peak for all input) that
/// must agree to 1e-6 relative, then sharpened on the translation residual
/// sup|f(x+T) - f(x)|.  Throws on constant input or estimator disagreement.
PeriodEstimate detect_period(const funcspace::FourierRepresentation& f);

struct VerificationCertificate {
  std::vector<PropositionReport> reports;  // ids 1..8 in order
  PeriodEstimate period;
  double period_vs_4a_rel_error;
  double wronskian_at_zero;
  double dependence_residual;
  bool overall_pass;  // every report passes and period == 4a within tolerance
};

/// All eight checks against a solved pair, with the period and independence
/// annexes.  ScaledShifted solutions are checked in the scaled form.
/// Failures are recorded in the certificate, not thrown.
VerificationCertificate verify_all(const kernel::KernelSolution& solution,
                                   const ToleranceConfig& tol = {});

}  // namespace sinegen::props
