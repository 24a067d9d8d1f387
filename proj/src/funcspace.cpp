#include "sinegen/funcspace.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sinegen::funcspace {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

bool finite(double v) { return std::isfinite(v); }
bool finite(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// Angular frequency of mode k on period P.
double omega(int k, double period) { return kTwoPi * k / period; }

}  // namespace

GridSpec::GridSpec(double x0_, double length_, int n_) : x0(x0_), length(length_), n(n_) {
  require(finite(x0) && finite(length), "GridSpec: non-finite bound");
  require(length > 0.0, "GridSpec: length must be positive");
  require(n >= 2, "GridSpec: need at least 2 points");
}

FourierRepresentation::FourierRepresentation(double period, int max_mode)
    : FourierRepresentation(period, max_mode,
                            std::vector<std::complex<double>>(2 * max_mode + 1)) {}

FourierRepresentation::FourierRepresentation(double period, int max_mode,
                                             std::vector<std::complex<double>> coefficients)
    : period_(period), max_mode_(max_mode), coeffs_(std::move(coefficients)) {
  require(finite(period_) && period_ > 0.0, "FourierRepresentation: period must be positive");
  require(max_mode_ >= 1, "FourierRepresentation: max_mode must be >= 1");
  require(coeffs_.size() == static_cast<size_t>(2 * max_mode_ + 1),
          "FourierRepresentation: coefficient count must be 2*max_mode+1");
  for (const auto& c : coeffs_)
    require(finite(c), "FourierRepresentation: non-finite coefficient");
}

std::complex<double> FourierRepresentation::coefficient(int k) const {
  require(k >= -max_mode_ && k <= max_mode_, "coefficient: mode out of range");
  return coeffs_[static_cast<size_t>(k + max_mode_)];
}

double FourierRepresentation::coefficient_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

double FourierRepresentation::coefficient_abs_sum() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::abs(c);
  return s;
}

bool FourierRepresentation::is_conjugate_symmetric(double tol) const {
  const int K = max_mode_;
  for (int k = 0; k <= K; ++k) {
    const std::complex<double> a = coeffs_[static_cast<size_t>(K + k)];
    const std::complex<double> b = coeffs_[static_cast<size_t>(K - k)];
    if (std::abs(b - std::conj(a)) > tol) return false;
  }
  return true;
}

SampledFunction::SampledFunction(GridSpec grid_, std::vector<double> values_)
    : grid(grid_), values(std::move(values_)) {
  require(values.size() == static_cast<size_t>(grid.n),
          "SampledFunction: value count must equal grid.n");
  for (double v : values) require(finite(v), "SampledFunction: non-finite sample");
}

FourierRepresentation fit(const SampledFunction& samples, int max_mode) {
  require(max_mode >= 1, "fit: max_mode must be >= 1");
  const int n = samples.grid.n;
  require(n >= 8, "fit: need at least 8 samples per period");
  require(n >= 2 * max_mode + 1, "fit: grid too coarse for requested max_mode (aliasing)");

  const double period = samples.grid.length;
  const int K = max_mode;
  std::vector<std::complex<double>> coeffs(static_cast<size_t>(2 * K + 1));

  // c_k = (1/n) sum_j v_j exp(-i w_k x_j); the k < 0 half mirrors by
  // conjugation so real input yields exact conjugate symmetry.
  for (int k = 0; k <= K; ++k) {
    std::complex<double> acc(0.0, 0.0);
    const double w = omega(k, period);
    for (int j = 0; j < n; ++j) {
      acc += samples.values[static_cast<size_t>(j)] *
             std::polar(1.0, -w * samples.grid.point(j));
    }
    acc /= static_cast<double>(n);
    if (k == 0) acc = std::complex<double>(acc.real(), 0.0);
    coeffs[static_cast<size_t>(K + k)] = acc;
    coeffs[static_cast<size_t>(K - k)] = std::conj(acc);
  }
  return FourierRepresentation(period, K, std::move(coeffs));
}

double evaluate(const FourierRepresentation& r, double x) {
  require(finite(x), "evaluate: x must be finite");
  const int K = r.max_mode();
  std::complex<double> acc(0.0, 0.0);
  for (int k = -K; k <= K; ++k) {
    acc += r.coefficient(k) * std::polar(1.0, omega(k, r.period()) * x);
  }
  const double scale = r.coefficient_abs_sum();
  if (std::abs(acc.imag()) > 1e-12 * scale) {
    throw std::runtime_error("evaluate: series sum is not real (non-symmetric coefficients)");
  }
  return acc.real();
}

FourierRepresentation differentiate(const FourierRepresentation& r) {
  const int K = r.max_mode();
  std::vector<std::complex<double>> coeffs(static_cast<size_t>(2 * K + 1));
  coeffs[static_cast<size_t>(K)] = std::complex<double>(0.0, 0.0);
  for (int k = 1; k <= K; ++k) {
    const std::complex<double> factor(0.0, omega(k, r.period()));
    coeffs[static_cast<size_t>(K + k)] = r.coefficient(k) * factor;
    coeffs[static_cast<size_t>(K - k)] = r.coefficient(-k) * std::conj(factor);
  }
  return FourierRepresentation(r.period(), K, std::move(coeffs));
}

FourierRepresentation translate(const FourierRepresentation& r, double shift) {
  require(finite(shift), "translate: shift must be finite");
  const int K = r.max_mode();
  std::vector<std::complex<double>> coeffs(static_cast<size_t>(2 * K + 1));
  coeffs[static_cast<size_t>(K)] = r.coefficient(0);
  for (int k = 1; k <= K; ++k) {
    const std::complex<double> phase = std::polar(1.0, omega(k, r.period()) * shift);
    coeffs[static_cast<size_t>(K + k)] = r.coefficient(k) * phase;
    coeffs[static_cast<size_t>(K - k)] = r.coefficient(-k) * std::conj(phase);
  }
  return FourierRepresentation(r.period(), K, std::move(coeffs));
}

FourierRepresentation reflect(const FourierRepresentation& r) {
  const int K = r.max_mode();
  std::vector<std::complex<double>> coeffs(static_cast<size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k)
    coeffs[static_cast<size_t>(K + k)] = r.coefficient(-k);
  return FourierRepresentation(r.period(), K, std::move(coeffs));
}

ParityDecomposition parity_split(const FourierRepresentation& r) {
  const int K = r.max_mode();
  std::vector<std::complex<double>> odd(static_cast<size_t>(2 * K + 1));
  std::vector<std::complex<double>> even(static_cast<size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k) {
    const std::complex<double> c = r.coefficient(k);
    const std::complex<double> m = r.coefficient(-k);
    odd[static_cast<size_t>(K + k)] = 0.5 * (c - m);
    even[static_cast<size_t>(K + k)] = 0.5 * (c + m);
  }
  ParityDecomposition d{FourierRepresentation(r.period(), K, std::move(odd)),
                        FourierRepresentation(r.period(), K, std::move(even)), 0.0, 0.0};
  const double on = d.odd_part.coefficient_norm();
  const double en = d.even_part.coefficient_norm();
  d.odd_energy = on * on;
  d.even_energy = en * en;
  return d;
}

SampledFunction sample(const FourierRepresentation& r, const GridSpec& grid) {
  std::vector<double> values(static_cast<size_t>(grid.n));
  for (int j = 0; j < grid.n; ++j)
    values[static_cast<size_t>(j)] = evaluate(r, grid.point(j));
  return SampledFunction(grid, std::move(values));
}

FourierRepresentation scaled(const FourierRepresentation& r, double factor) {
  require(finite(factor), "scaled: factor must be finite");
  const int K = r.max_mode();
  std::vector<std::complex<double>> coeffs(static_cast<size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k)
    coeffs[static_cast<size_t>(K + k)] = r.coefficient(k) * factor;
  return FourierRepresentation(r.period(), K, std::move(coeffs));
}

FourierRepresentation sum_of(const FourierRepresentation& a, const FourierRepresentation& b) {
  require(a.period() == b.period() && a.max_mode() == b.max_mode(),
          "sum_of: mismatched representations");
  const int K = a.max_mode();
  std::vector<std::complex<double>> coeffs(static_cast<size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k)
    coeffs[static_cast<size_t>(K + k)] = a.coefficient(k) + b.coefficient(k);
  return FourierRepresentation(a.period(), K, std::move(coeffs));
}

}  // namespace sinegen::funcspace
