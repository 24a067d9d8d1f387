#pragma once

#include <complex>
#include <vector>

namespace sinegen {

/// Parity of a real-valued periodic function about x = 0.
enum class Parity { Odd, Even, Any };

namespace funcspace {

/// Uniform, left-closed right-open sampling grid: points x0 + j*length/n
/// for j = 0..n-1.  The grid covers [x0, x0 + length).
struct GridSpec {
  double x0;
  double length;
  int n;

  GridSpec(double x0, double length, int n);

  double spacing() const { return length / n; }
  double point(int j) const { return x0 + (static_cast<double>(j) * length) / n; }
};

/// Truncated complex-exponential basis on a fixed period P.
///
/// Stores coefficients c_k of exp(i*2*pi*k*x/P) for k = -K..K, index k+K.
/// Real-valued functions satisfy c_{-k} = conj(c_k); every funcspace
/// operation preserves that symmetry exactly by mirroring the k >= 0 half.
/// Instances are immutable after construction.
class FourierRepresentation {
 public:
  FourierRepresentation(double period, int max_mode);
  FourierRepresentation(double period, int max_mode,
                        std::vector<std::complex<double>> coefficients);

  double period() const { return period_; }
  int max_mode() const { return max_mode_; }

  /// Coefficient of mode k, k in [-max_mode, max_mode].
  std::complex<double> coefficient(int k) const;
  const std::vector<std::complex<double>>& coefficients() const { return coeffs_; }

  /// 2-norm of the coefficient vector.
  double coefficient_norm() const;
  /// Sum of |c_k|; scale reference for residue bounds.
  double coefficient_abs_sum() const;

  /// max_k |c_{-k} - conj(c_k)| <= tol (absolute).
  bool is_conjugate_symmetric(double tol = 1e-14) const;

 private:
  double period_;
  int max_mode_;
  std::vector<std::complex<double>> coeffs_;
};

struct SampledFunction {
  GridSpec grid;
  std::vector<double> values;  // values[j] at grid.point(j); all finite

  SampledFunction(GridSpec grid, std::vector<double> values);
};

struct ParityDecomposition {
  FourierRepresentation odd_part;
  FourierRepresentation even_part;
  double odd_energy;   // squared coefficient 2-norm of odd_part
  double even_energy;  // squared coefficient 2-norm of even_part
};

/// Least-squares/DFT fit of uniform samples covering exactly one period.
/// Requires grid.n >= max(8, 2*max_mode + 1); band-limited inputs are
/// reproduced on the grid to rounding.  The result is conjugate-symmetric
/// by construction.
FourierRepresentation fit(const SampledFunction& samples, int max_mode);

/// Real part of the truncated series at x.  Throws if the imaginary residue
/// of the sum exceeds 1e-12 * sum|c_k| (non-real coefficient data) or if x
/// is not finite.
double evaluate(const FourierRepresentation& r, double x);

/// c_k -> i*(2*pi*k/P)*c_k.
FourierRepresentation differentiate(const FourierRepresentation& r);

/// c_k -> exp(i*2*pi*k*shift/P)*c_k, so result(x) = input(x + shift).
FourierRepresentation translate(const FourierRepresentation& r, double shift);

/// c_k -> c_{-k}, i.e. result(x) = input(-x).  Exact involution.
FourierRepresentation reflect(const FourierRepresentation& r);

/// Odd/even split: odd = (r - reflect(r))/2, even = (r + reflect(r))/2.
ParityDecomposition parity_split(const FourierRepresentation& r);

/// Pointwise evaluation on a grid.
SampledFunction sample(const FourierRepresentation& r, const GridSpec& grid);

/// Coefficient-wise real scaling.
FourierRepresentation scaled(const FourierRepresentation& r, double factor);

/// Coefficient-wise sum; periods and mode counts must match.
FourierRepresentation sum_of(const FourierRepresentation& a,
                             const FourierRepresentation& b);

}  // namespace funcspace
}  // namespace sinegen
