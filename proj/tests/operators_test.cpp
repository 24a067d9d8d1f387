#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "sinegen/funcspace.hpp"
#include "sinegen/operators.hpp"
#include "test_support.hpp"

using namespace sinegen;
using namespace sinegen::funcspace;
using namespace sinegen::operators;

namespace {

constexpr double kPi = std::numbers::pi;

double coefficient_distance(const FourierRepresentation& a, const FourierRepresentation& b) {
  double worst = 0.0;
  for (int k = -a.max_mode(); k <= a.max_mode(); ++k)
    worst = std::max(worst, std::abs(a.coefficient(k) - b.coefficient(k)));
  return worst;
}

}  // namespace

TEST_CASE("differentiation matrix is diagonal with the mode frequencies") {
  const double period = 3.0;
  const OperatorMatrix op = build(OperatorKind::differentiation(), period, 4);
  REQUIRE(op.entries.rows() == 9);
  for (int k = -4; k <= 4; ++k) {
    for (int l = -4; l <= 4; ++l) {
      const std::complex<double> want =
          (k == l) ? std::complex<double>(0.0, 2.0 * kPi * k / period)
                   : std::complex<double>(0.0, 0.0);
      CHECK(std::abs(op.entries(k + 4, l + 4) - want) <= 1e-15);
    }
  }
}

TEST_CASE("translation matrix carries the mode phases") {
  const double period = 2.0 * kPi;
  const double shift = 0.7;
  const OperatorMatrix op = build(OperatorKind::translation(shift), period, 3);
  for (int k = -3; k <= 3; ++k) {
    const std::complex<double> want = std::exp(std::complex<double>(0.0, k * shift));
    CHECK(std::abs(op.entries(k + 3, k + 3) - want) <= 1e-15);
  }
}

TEST_CASE("kernel difference matrix matches the closed-form symbol") {
  // On the period-4a basis the translation phase is i^k regardless of a.
  for (double a : {0.6, 1.0, 2.5}) {
    const OperatorMatrix op = build(
        OperatorKind::difference(OperatorKind::differentiation(), OperatorKind::translation(a)),
        4.0 * a, 6);
    for (int k = -6; k <= 6; ++k) {
      const std::complex<double> want =
          std::complex<double>(0.0, kPi * k / (2.0 * a)) - testsupport::i_pow(k);
      CHECK(std::abs(op.entries(k + 6, k + 6) - want) <= 1e-13);
    }
  }
}

TEST_CASE("apply reproduces the funcspace operations") {
  std::mt19937_64 rng(41);
  const double period = 5.0;
  const FourierRepresentation f = testsupport::random_real(rng, period, 6);

  const FourierRepresentation d1 = apply(build(OperatorKind::differentiation(), period, 6), f);
  CHECK(coefficient_distance(d1, differentiate(f)) <= 1e-13);

  const FourierRepresentation t1 = apply(build(OperatorKind::translation(1.2), period, 6), f);
  CHECK(coefficient_distance(t1, translate(f, 1.2)) <= 1e-13);

  const FourierRepresentation r1 = apply(build(OperatorKind::reflection(), period, 6), f);
  CHECK(coefficient_distance(r1, reflect(f)) <= 1e-13);
}

TEST_CASE("operator algebra composes as expected") {
  std::mt19937_64 rng(42);
  const double period = 2.0 * kPi;
  const FourierRepresentation f = testsupport::random_real(rng, period, 5);

  const OperatorKind second =
      OperatorKind::compose(OperatorKind::differentiation(), OperatorKind::differentiation());
  const FourierRepresentation ddf = apply(build(second, period, 5), f);
  CHECK(coefficient_distance(ddf, differentiate(differentiate(f))) <= 1e-12);

  const OperatorKind three = OperatorKind::sum(
      OperatorKind::identity(), OperatorKind::scaled(OperatorKind::identity(), 2.0));
  const FourierRepresentation tripled = apply(build(three, period, 5), f);
  CHECK(coefficient_distance(tripled, scaled(f, 3.0)) <= 1e-14);

  const OperatorKind diff = OperatorKind::difference(OperatorKind::differentiation(),
                                                     OperatorKind::translation(0.9));
  const FourierRepresentation lhs = apply(build(diff, period, 5), f);
  const FourierRepresentation rhs = sum_of(differentiate(f), scaled(translate(f, 0.9), -1.0));
  CHECK(coefficient_distance(lhs, rhs) <= 1e-13);
}

TEST_CASE("apply rejects shape mismatches") {
  const OperatorMatrix op = build(OperatorKind::identity(), 2.0, 3);
  const FourierRepresentation wrong_period(3.0, 3);
  const FourierRepresentation wrong_modes(2.0, 4);
  CHECK_THROWS_AS(apply(op, wrong_period), std::invalid_argument);
  CHECK_THROWS_AS(apply(op, wrong_modes), std::invalid_argument);
}

TEST_CASE("nullspace at the quarter-period shift is two dimensional and odd first") {
  // At a = pi/2 both the odd and the even directions are annihilated; the
  // reported vector must be the odd one.
  const double a = kPi / 2.0;
  const OperatorMatrix op = build(
      OperatorKind::difference(OperatorKind::differentiation(), OperatorKind::translation(a)),
      4.0 * a, 8);
  const NullspaceResult ns = nullspace(op);
  CHECK(ns.smallest_singular_value <= 1e-13);
  CHECK(ns.next_singular_value <= 1e-13);

  const ParityDecomposition parts = parity_split(ns.vector);
  CHECK(parts.even_energy <= 1e-20);
  CHECK(evaluate(ns.vector, 0.0) == 0.0);

  // Kernel membership, checked pointwise.
  const FourierRepresentation residue =
      sum_of(differentiate(ns.vector), scaled(translate(ns.vector, a), -1.0));
  for (int j = 0; j < 64; ++j)
    CHECK(std::abs(evaluate(residue, j * 4.0 * a / 64.0)) <= 1e-12);
}

TEST_CASE("parity restriction separates the two kernel directions") {
  const double a = kPi / 2.0;
  const OperatorMatrix op = build(
      OperatorKind::difference(OperatorKind::differentiation(), OperatorKind::translation(a)),
      4.0 * a, 8);

  const ParityNullspace odd = parity_restricted_nullspace(op, Parity::Odd);
  CHECK(odd.smallest_singular_value <= 1e-13);
  // Next odd singular value is |2i + 1| = sqrt(5) from the k = 2 mode.
  CHECK(odd.next_singular_value == doctest::Approx(2.23606797749979).epsilon(1e-12));
  CHECK(parity_split(odd.vector).even_energy <= 1e-20);

  const ParityNullspace even = parity_restricted_nullspace(op, Parity::Even);
  CHECK(even.smallest_singular_value <= 1e-13);
  // Next even singular value is the k = 0 entry |0 - 1| = 1.
  CHECK(even.next_singular_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(parity_split(even.vector).odd_energy <= 1e-20);
}

TEST_CASE("no kernel away from the coincidence shifts") {
  const OperatorMatrix op = build(
      OperatorKind::difference(OperatorKind::differentiation(), OperatorKind::translation(1.0)),
      4.0, 12);
  const ParityNullspace odd = parity_restricted_nullspace(op, Parity::Odd);
  // Smallest odd singular value is |i pi/2 - i| = pi/2 - 1.
  CHECK(odd.smallest_singular_value == doctest::Approx(kPi / 2.0 - 1.0).epsilon(1e-12));
  const NullspaceResult full = nullspace(op);
  CHECK(full.smallest_singular_value == doctest::Approx(kPi / 2.0 - 1.0).epsilon(1e-12));
}

TEST_CASE("residual scan matches the closed-form singular value") {
  const std::vector<double> shifts = {0.3, 0.7, 1.0, 1.3, 2.0, 2.5, kPi / 2.0, 3.9, 7.0};
  const std::vector<ScanPoint> scan = residual_scan(shifts, 12);
  REQUIRE(scan.size() == shifts.size());
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    CHECK(scan[i].a == shifts[i]);
    CHECK(scan[i].sigma_min ==
          doctest::Approx(testsupport::sigma_oracle(shifts[i], 12)).epsilon(1e-10));
  }
}

TEST_CASE("residual scan validation") {
  CHECK_THROWS_AS(residual_scan({}, 8), std::invalid_argument);
  CHECK_THROWS_AS(residual_scan({1.0, -2.0}, 8), std::invalid_argument);
  CHECK_THROWS_AS(residual_scan({1.0}, 0), std::invalid_argument);
}

TEST_CASE("pencil eigenvalues on the odd subspace hit the known branches") {
  const double a = 1.0;
  const OperatorMatrix top = build(OperatorKind::translation(a), 4.0 * a, 12);
  const OperatorMatrix dop = build(OperatorKind::differentiation(), 4.0 * a, 12);
  const std::vector<EigenPair> pairs = generalized_eigs(top, dop, Parity::Odd);
  REQUIRE(!pairs.empty());

  // Odd-subspace eigenvalues are i^{k-1}/w_k for odd k: 2a/(pi k) with
  // alternating sign.  Even-k branches are imaginary and parity-projected out.
  bool found_main = false, found_third = false;
  for (const EigenPair& p : pairs) {
    if (std::abs(p.eigenvalue - std::complex<double>(2.0 / kPi, 0.0)) <= 1e-10)
      found_main = true;
    if (std::abs(p.eigenvalue - std::complex<double>(-2.0 / (3.0 * kPi), 0.0)) <= 1e-10)
      found_third = true;
    CHECK(std::abs(p.eigenvalue - std::complex<double>(a / kPi, 0.0)) > 1e-6);
  }
  CHECK(found_main);
  CHECK(found_third);

  // Residual contract: |A v - lambda B v| <= 1e-10 for every returned pair.
  for (const EigenPair& p : pairs) {
    const FourierRepresentation av = apply(top, p.vector);
    const FourierRepresentation bv = apply(dop, p.vector);
    double worst = 0.0;
    for (int k = -12; k <= 12; ++k)
      worst = std::max(worst, std::abs(av.coefficient(k) - p.eigenvalue * bv.coefficient(k)));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("pencil eigenvector of the principal branch is mode-1 dominated") {
  const OperatorMatrix top = build(OperatorKind::translation(1.0), 4.0, 10);
  const OperatorMatrix dop = build(OperatorKind::differentiation(), 4.0, 10);
  for (const EigenPair& p : generalized_eigs(top, dop, Parity::Odd)) {
    if (std::abs(p.eigenvalue - std::complex<double>(2.0 / kPi, 0.0)) > 1e-10) continue;
    double rest = 0.0;
    for (int k = 2; k <= 10; ++k) rest = std::max(rest, std::abs(p.vector.coefficient(k)));
    CHECK(std::abs(p.vector.coefficient(1)) > 0.5);
    CHECK(rest <= 1e-8);
    return;
  }
  FAIL("principal eigenvalue missing");
}
