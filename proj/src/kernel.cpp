#include "sinegen/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "sinegen/operators.hpp"

namespace sinegen::kernel {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

double sup_on_grid(const funcspace::FourierRepresentation& r, int n) {
  double m = 0.0;
  for (int j = 0; j < n; ++j)
    m = std::max(m, std::abs(funcspace::evaluate(r, j * r.period() / n)));
  return m;
}

// result(x) = lhs(x) - rhs(x)
funcspace::FourierRepresentation repr_diff(const funcspace::FourierRepresentation& lhs,
                                           const funcspace::FourierRepresentation& rhs) {
  return funcspace::sum_of(lhs, funcspace::scaled(rhs, -1.0));
}

// Scale the nullspace/eigen direction to the requested boundary data, then
// cross-check the condition the scaling could not impose.
std::pair<funcspace::FourierRepresentation, funcspace::FourierRepresentation> normalize_to_bc(
    const funcspace::FourierRepresentation& v, const BoundaryConditions& bc) {
  const funcspace::FourierRepresentation dv = funcspace::differentiate(v);
  double scale = 0.0;
  if (bc.parity == Parity::Even) {
    const double v0 = funcspace::evaluate(v, 0.0);
    if (std::abs(v0) <= 1e-10 * (1.0 + v.coefficient_norm()))
      throw NumericError("solve: solution direction vanishes at 0, cannot normalize");
    scale = bc.f_at_zero / v0;
  } else {
    const double d0 = funcspace::evaluate(dv, 0.0);
    if (std::abs(d0) <= 1e-10 * (1.0 + dv.coefficient_norm()))
      throw NumericError("solve: solution derivative vanishes at 0, cannot normalize");
    scale = bc.fprime_at_zero / d0;
  }
  funcspace::FourierRepresentation f = funcspace::scaled(v, scale);
  funcspace::FourierRepresentation g = funcspace::differentiate(f);
  const double ref = 1.0 + std::abs(scale) * v.coefficient_abs_sum();
  if (std::abs(funcspace::evaluate(f, 0.0) - bc.f_at_zero) > 1e-9 * ref ||
      std::abs(funcspace::evaluate(g, 0.0) - bc.fprime_at_zero) > 1e-9 * ref)
    throw NumericError("solve: boundary conditions are inconsistent with the solution shape");
  return {std::move(f), std::move(g)};
}

void check_bc(const BoundaryConditions& bc) {
  require(std::isfinite(bc.f_at_zero) && std::isfinite(bc.fprime_at_zero),
          "solve: boundary values must be finite");
  if (bc.parity == Parity::Odd)
    require(bc.f_at_zero == 0.0, "solve: odd parity forces f(0) = 0");
}

double root_residual(double a, std::complex<double> s) { return std::abs(s - std::exp(a * s)); }

struct NewtonOut {
  std::complex<double> s;
  bool converged = false;
};

// Damping-free Newton iteration on F(s) = s - exp(s a).
NewtonOut newton_root(double a, std::complex<double> s0) {
  std::complex<double> s = s0;
  for (int it = 0; it < 60; ++it) {
    const std::complex<double> e = std::exp(a * s);
    const std::complex<double> den = 1.0 - a * e;
    if (std::abs(den) < 1e-14 * (1.0 + std::abs(a * e))) {
      s += std::complex<double>(1e-3, 1e-3);  // step off the critical point
      continue;
    }
    const std::complex<double> d = (s - e) / den;
    s -= d;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || std::abs(s) > 1e8)
      return {s, false};
    // Relative criterion keeps far-out branches (large |s|) reachable where
    // an absolute 1e-14 step is below rounding.
    if (std::abs(d) <= 1e-14 ||
        std::abs(d) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(s))
      return {s, true};
  }
  return {s, false};
}

// Root of the characteristic equation continued from s = i; used to track
// the sign of the real part across a coincidence shift.
std::complex<double> branch_root_near_i(double a) {
  const std::complex<double> starts[] = {{0.0, 1.0}, {0.3, 1.3}, {-0.3, 1.3},
                                         {0.0, 0.7}, {0.0, 1.4}};
  bool found = false;
  std::complex<double> best;
  for (const auto& s0 : starts) {
    const NewtonOut n = newton_root(a, s0);
    if (!n.converged || root_residual(a, n.s) > 1e-12) continue;
    if (!found || std::abs(n.s - std::complex<double>(0.0, 1.0)) <
                      std::abs(best - std::complex<double>(0.0, 1.0))) {
      best = n.s;
      found = true;
    }
  }
  if (!found) throw NumericError("coincidence detection: root tracking near +i failed");
  return best;
}

double sigma_at(double a, int max_mode) {
  return operators::residual_scan({a}, max_mode).front().sigma_min;
}

// Golden-section minimizer; fn must be unimodal on [lo, hi].
std::pair<double, double> golden_min(const std::function<double(double)>& fn, double lo,
                                     double hi, int iterations) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  for (int it = 0; it < iterations; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = fn(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = fn(x2);
    }
  }
  return (f1 <= f2) ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

DetectorDisagreement::DetectorDisagreement(std::string message, std::vector<double> scan,
                                           std::vector<double> roots)
    : NumericError(std::move(message)), scan_shifts(std::move(scan)),
      root_shifts(std::move(roots)) {}

KernelSolution solve_shifted(double a, int max_mode, const BoundaryConditions& bc) {
  require(std::isfinite(a) && a > 0.0, "solve_shifted: shift must be positive and finite");
  require(max_mode >= 1, "solve_shifted: max_mode must be >= 1");
  check_bc(bc);

  const double period = 4.0 * a;
  const operators::OperatorMatrix op =
      operators::build(operators::OperatorKind::difference(
                           operators::OperatorKind::differentiation(),
                           operators::OperatorKind::translation(a)),
                       period, max_mode);
  const operators::ParityNullspace ns = operators::parity_restricted_nullspace(op, bc.parity);

  SolveDiagnostics diag{};
  diag.smallest_singular_value = ns.smallest_singular_value;
  diag.next_singular_value = ns.next_singular_value;
  diag.gap = ns.next_singular_value /
             std::max(ns.smallest_singular_value, std::numeric_limits<double>::min());
  diag.max_mode = max_mode;
  diag.no_exact_kernel = ns.smallest_singular_value > operators::kKernelSigmaThreshold;

  auto [f, g] = normalize_to_bc(ns.vector, bc);
  if (!diag.no_exact_kernel) {
    const double res = sup_on_grid(repr_diff(g, funcspace::translate(f, a)), 1024);
    if (res > 1e-10)
      throw NumericError("solve_shifted: kernel solution violates the residual bound");
  }
  return KernelSolution{std::move(f), std::move(g), a, 1.0, EquationForm::Shifted, diag};
}

KernelSolution solve_scaled_shifted(double a, int max_mode, const BoundaryConditions& bc) {
  require(std::isfinite(a) && a > 0.0, "solve_scaled_shifted: shift must be positive and finite");
  require(max_mode >= 1, "solve_scaled_shifted: max_mode must be >= 1");
  check_bc(bc);

  const double period = 4.0 * a;
  const operators::OperatorMatrix t =
      operators::build(operators::OperatorKind::translation(a), period, max_mode);
  const operators::OperatorMatrix d =
      operators::build(operators::OperatorKind::differentiation(), period, max_mode);
  const std::vector<operators::EigenPair> pairs = operators::generalized_eigs(t, d, bc.parity);

  struct Candidate {
    double lambda;
    double mode1_weight;
    const funcspace::FourierRepresentation* vector;
  };
  std::vector<Candidate> candidates;
  for (const operators::EigenPair& p : pairs) {
    if (std::abs(p.eigenvalue.imag()) > 1e-10 * (1.0 + std::abs(p.eigenvalue))) continue;
    if (p.eigenvalue.real() <= 0.0) continue;
    const double norm = p.vector.coefficient_norm();
    if (norm <= 0.0) continue;
    candidates.push_back(
        Candidate{p.eigenvalue.real(), std::abs(p.vector.coefficient(1)) / norm, &p.vector});
  }
  if (candidates.empty())
    throw NumericError(
        "solve_scaled_shifted: no real positive eigenvalue on the requested parity subspace");
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.mode1_weight != y.mode1_weight) return x.mode1_weight > y.mode1_weight;
    return x.lambda > y.lambda;
  });
  const Candidate chosen = candidates.front();
  const double lambda = chosen.lambda;

  auto residual_of = [&](const funcspace::FourierRepresentation& v, double lam) {
    const int n = 2 * max_mode + 1;
    Eigen::VectorXcd x(n);
    for (int i = 0; i < n; ++i) x(i) = v.coefficients()[static_cast<size_t>(i)];
    x /= x.norm();
    return (t.entries * x - lam * (d.entries * x)).norm();
  };

  SolveDiagnostics diag{};
  diag.smallest_singular_value = residual_of(*chosen.vector, lambda);
  diag.next_singular_value = candidates.size() > 1
                                 ? residual_of(*candidates[1].vector, candidates[1].lambda)
                                 : diag.smallest_singular_value;
  diag.gap = diag.next_singular_value /
             std::max(diag.smallest_singular_value, std::numeric_limits<double>::min());
  diag.max_mode = max_mode;
  diag.no_exact_kernel = diag.smallest_singular_value > operators::kKernelSigmaThreshold;

  auto [f, g] = normalize_to_bc(*chosen.vector, bc);
  if (std::abs(lambda - funcspace::evaluate(f, a)) > 1e-10)
    throw NumericError("solve_scaled_shifted: eigenvalue does not equal f at the shift");
  const double res =
      sup_on_grid(repr_diff(funcspace::scaled(g, lambda), funcspace::translate(f, a)), 1024);
  if (res > 1e-10)
    throw NumericError("solve_scaled_shifted: solution violates the residual bound");
  return KernelSolution{std::move(f), std::move(g), a, lambda, EquationForm::ScaledShifted, diag};
}

HarmonicTrajectory integrate_harmonic(double x_end, double step, const BoundaryConditions& bc) {
  require(std::isfinite(x_end) && x_end > 0.0, "integrate_harmonic: x_end must be positive");
  require(std::isfinite(step) && step > 0.0, "integrate_harmonic: step must be positive");
  require(step <= x_end, "integrate_harmonic: step must not exceed x_end");
  check_bc(bc);

  long long n_steps = static_cast<long long>(std::ceil(x_end / step - 1e-9));
  if (n_steps < 1) n_steps = 1;
  n_steps = ((n_steps + 7) / 8) * 8;  // grid divides into quarters and halves
  require(n_steps <= 200'000'000, "integrate_harmonic: step too small for the requested span");
  const double h = x_end / static_cast<double>(n_steps);

  std::vector<double> fv(static_cast<size_t>(n_steps) + 1);
  std::vector<double> gv(static_cast<size_t>(n_steps) + 1);
  double f = bc.f_at_zero;
  double g = bc.fprime_at_zero;
  fv[0] = f;
  gv[0] = g;
  for (long long i = 1; i <= n_steps; ++i) {
    // Classical 4th-order step on f' = g, g' = -f.
    const double k1f = g, k1g = -f;
    const double k2f = g + 0.5 * h * k1g, k2g = -(f + 0.5 * h * k1f);
    const double k3f = g + 0.5 * h * k2g, k3g = -(f + 0.5 * h * k2f);
    const double k4f = g + h * k3g, k4g = -(f + h * k3f);
    f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    fv[static_cast<size_t>(i)] = f;
    gv[static_cast<size_t>(i)] = g;
  }
  const int n_points = static_cast<int>(n_steps) + 1;
  funcspace::GridSpec grid(0.0, h * n_points, n_points);
  return HarmonicTrajectory{grid, std::move(fv), std::move(gv), h, 4};
}

SinCos taylor_oracle(double x) {
  require(std::isfinite(x) && std::abs(x) <= 100.0, "taylor_oracle: |x| must be <= 100");

  // Quadrant reduction with a two-part representation of the quarter period,
  // so the reduced argument keeps ~1e-17 absolute accuracy up to |x| = 100.
  const double pio2_hi = 1.57079632673412561417e+00;
  const double pio2_t1 = 6.07710050650619224932e-11;
  const double q = std::nearbyint(x / (pio2_hi + pio2_t1));
  const double r = (x - q * pio2_hi) - q * pio2_t1;
  const long long quadrant = ((static_cast<long long>(q) % 4) + 4) % 4;

  const double r2 = r * r;
  double sin_r = r;
  {
    double term = r;
    int m = 1;
    while (true) {
      term *= -r2 / static_cast<double>((2 * m) * (2 * m + 1));
      if (std::abs(term) < 1e-17 * (std::abs(sin_r) + 1.0)) break;
      sin_r += term;
      ++m;
    }
  }
  double cos_r = 1.0;
  {
    double term = 1.0;
    int m = 1;
    while (true) {
      term *= -r2 / static_cast<double>((2 * m - 1) * (2 * m));
      if (std::abs(term) < 1e-17 * (std::abs(cos_r) + 1.0)) break;
      cos_r += term;
      ++m;
    }
  }

  switch (quadrant) {
    case 0: return SinCos{sin_r, cos_r};
    case 1: return SinCos{cos_r, -sin_r};
    case 2: return SinCos{-sin_r, -cos_r};
    default: return SinCos{-cos_r, sin_r};
  }
}

std::vector<CharacteristicRoot> characteristic_roots(double a, int count) {
  require(std::isfinite(a), "characteristic_roots: shift must be finite");
  require(a >= 1e-6 && a <= 1e3,
          "characteristic_roots: shift outside the conditioned range [1e-6, 1e3]");
  require(count >= 1, "characteristic_roots: count must be >= 1");

  std::vector<std::complex<double>> roots;
  auto try_add = [&](std::complex<double> s) {
    if (root_residual(a, s) > 1e-12) return;
    for (const auto& r : roots)
      if (std::abs(r - s) <= 1e-9) return;
    roots.push_back(s);
  };

  for (int re_i = -2; re_i <= 2; ++re_i) {
    for (int m = -4 * count; m <= 4 * count; ++m) {
      const std::complex<double> s0(re_i / a, m * kPi / (2.0 * a));
      const NewtonOut n = newton_root(a, s0);
      if (n.converged) try_add(n.s);
    }
  }
  // Conjugate closure: the equation has real coefficients, so polishing the
  // conjugate of any found root must land on a root as well.
  const std::vector<std::complex<double>> snapshot = roots;
  for (const auto& r : snapshot) {
    if (std::abs(r.imag()) <= 1e-12) continue;
    const NewtonOut n = newton_root(a, std::conj(r));
    if (n.converged) try_add(n.s);
  }

  auto before = [](const std::complex<double>& x, const std::complex<double>& y) {
    const double ax = std::abs(x.imag()), ay = std::abs(y.imag());
    if (ax != ay) return ax < ay;
    if (x.imag() != y.imag()) return x.imag() < y.imag();
    return x.real() < y.real();
  };
  std::sort(roots.begin(), roots.end(), before);

  // Keep the first `count` conjugate classes in |Im| order.
  std::vector<std::complex<double>> kept;
  int classes = 0;
  for (const auto& r : roots) {
    bool attached = false;
    for (const auto& k : kept) {
      if (std::abs(std::conj(r) - k) <= 1e-9 || std::abs(r - k) <= 1e-9) {
        attached = true;
        break;
      }
    }
    if (!attached) {
      if (classes == count) continue;
      ++classes;
    }
    kept.push_back(r);
  }
  std::sort(kept.begin(), kept.end(), before);

  std::vector<CharacteristicRoot> out;
  out.reserve(kept.size());
  for (size_t i = 0; i < kept.size(); ++i) {
    out.push_back(CharacteristicRoot{kept[i], root_residual(a, kept[i]),
                                     static_cast<int>(i),
                                     std::abs(kept[i].real()) <= 1e-10});
  }
  return out;
}

std::vector<double> detect_coincidence_shifts(double a_min, double a_max, int samples) {
  require(std::isfinite(a_min) && std::isfinite(a_max), "detect: range must be finite");
  require(a_min > 0.0 && a_min < a_max, "detect: need 0 < a_min < a_max");
  require(a_min >= 1e-6 && a_max <= 1e3, "detect: range outside [1e-6, 1e3]");
  require(samples >= 2, "detect: need at least 2 samples");

  const int max_mode = std::max(16, static_cast<int>(a_max) + 8);
  std::vector<double> grid(static_cast<size_t>(samples));
  for (int j = 0; j < samples; ++j)
    grid[static_cast<size_t>(j)] = a_min + j * (a_max - a_min) / (samples - 1);

  const std::vector<operators::ScanPoint> scan = operators::residual_scan(grid, max_mode);

  // Detector 1: local minima of the smallest singular value, refined by
  // golden-section search, kept only when the refined value is a kernel.
  std::vector<double> from_scan;
  auto sigma_fn = [&](double a) { return sigma_at(a, max_mode); };
  auto consider = [&](double lo, double hi) {
    const auto [a_star, s_star] = golden_min(sigma_fn, lo, hi, 90);
    if (s_star > operators::kKernelSigmaThreshold) return;
    for (double prev : from_scan)
      if (std::abs(prev - a_star) <= 1e-6 * std::max(1.0, a_star)) return;
    from_scan.push_back(a_star);
  };
  for (int j = 0; j < samples; ++j) {
    const double s = scan[static_cast<size_t>(j)].sigma_min;
    const bool left_ok = (j == 0) || scan[static_cast<size_t>(j - 1)].sigma_min >= s;
    const bool right_ok = (j == samples - 1) || scan[static_cast<size_t>(j + 1)].sigma_min > s;
    if (!(left_ok && right_ok)) continue;
    const double lo = grid[static_cast<size_t>(std::max(0, j - 1))];
    const double hi = grid[static_cast<size_t>(std::min(samples - 1, j + 1))];
    if (lo < hi) consider(lo, hi);
  }

  // Detector 2: sign change of the real part of the characteristic root
  // tracked near +i, refined by bisection and confirmed by a flagged
  // imaginary root at the refined shift.
  std::vector<double> from_roots;
  std::vector<double> re_track(static_cast<size_t>(samples));
  for (int j = 0; j < samples; ++j)
    re_track[static_cast<size_t>(j)] = branch_root_near_i(grid[static_cast<size_t>(j)]).real();
  auto refine_and_keep = [&](double lo, double hi) {
    double flo = branch_root_near_i(lo).real();
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = branch_root_near_i(mid).real();
      if ((flo <= 0.0) == (fmid <= 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
    }
    const double a_star = 0.5 * (lo + hi);
    const std::vector<CharacteristicRoot> confirm = characteristic_roots(a_star, 8);
    bool has_imag = false;
    for (const auto& r : confirm) has_imag = has_imag || r.imaginary;
    if (!has_imag) return;
    for (double prev : from_roots)
      if (std::abs(prev - a_star) <= 1e-6 * std::max(1.0, a_star)) return;
    from_roots.push_back(a_star);
  };
  for (int j = 0; j + 1 < samples; ++j) {
    const double h0 = re_track[static_cast<size_t>(j)];
    const double h1 = re_track[static_cast<size_t>(j + 1)];
    if (std::abs(h0) <= 1e-12) {
      refine_and_keep(grid[static_cast<size_t>(j)],
                      grid[static_cast<size_t>(std::min(samples - 1, j + 1))]);
    } else if (h0 * h1 < 0.0) {
      refine_and_keep(grid[static_cast<size_t>(j)], grid[static_cast<size_t>(j + 1)]);
    }
  }

  std::sort(from_scan.begin(), from_scan.end());
  std::sort(from_roots.begin(), from_roots.end());
  bool agree = from_scan.size() == from_roots.size();
  if (agree) {
    for (size_t i = 0; i < from_scan.size(); ++i)
      agree = agree && std::abs(from_scan[i] - from_roots[i]) <=
                           1e-6 * std::max(1.0, from_roots[i]);
  }
  if (!agree) {
    throw DetectorDisagreement(
        "detect: singular-value scan and characteristic-root detectors disagree on the "
        "coincidence shifts",
        from_scan, from_roots);
  }
  return from_roots;
}

}  // namespace sinegen::kernel
