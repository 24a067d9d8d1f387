#include "sinegen/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace sinegen::operators {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrtHalf = std::sqrt(0.5);

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

double omega(int k, double period) { return kTwoPi * k / period; }

Eigen::MatrixXcd build_rec(const OperatorKind& kind, double period, int max_mode) {
  const int n = 2 * max_mode + 1;
  using Tag = OperatorKind::Tag;
  switch (kind.tag()) {
    case Tag::Identity:
      return Eigen::MatrixXcd::Identity(n, n);
    case Tag::Differentiation: {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
      for (int k = -max_mode; k <= max_mode; ++k)
        m(k + max_mode, k + max_mode) = std::complex<double>(0.0, omega(k, period));
      return m;
    }
    case Tag::Translation: {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
      for (int k = -max_mode; k <= max_mode; ++k)
        m(k + max_mode, k + max_mode) = std::polar(1.0, omega(k, period) * kind.shift());
      return m;
    }
    case Tag::Reflection: {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
      for (int k = -max_mode; k <= max_mode; ++k) m(-k + max_mode, k + max_mode) = 1.0;
      return m;
    }
    case Tag::Scaled:
      return kind.factor() * build_rec(kind.lhs(), period, max_mode);
    case Tag::Sum:
      return build_rec(kind.lhs(), period, max_mode) + build_rec(kind.rhs(), period, max_mode);
    case Tag::Difference:
      return build_rec(kind.lhs(), period, max_mode) - build_rec(kind.rhs(), period, max_mode);
    case Tag::Compose:
      return build_rec(kind.lhs(), period, max_mode) * build_rec(kind.rhs(), period, max_mode);
  }
  throw std::logic_error("build: unhandled operator tag");
}

// One real parameter of a real-valued coefficient vector: the constant mode,
// or the cosine/sine combination of the +-k pair.
struct BasisColumn {
  int k;     // >= 0
  bool odd;  // sine-type; k == 0 is always even
};

std::vector<BasisColumn> make_columns(int max_mode, Parity parity) {
  std::vector<BasisColumn> cols;
  if (parity != Parity::Odd) cols.push_back({0, false});
  for (int k = 1; k <= max_mode; ++k) {
    if (parity != Parity::Odd) cols.push_back({k, false});
    if (parity != Parity::Even) cols.push_back({k, true});
  }
  return cols;
}

// Complex coefficient vector of one basis column; exactly conjugate-symmetric.
Eigen::VectorXcd column_vector(const BasisColumn& col, int max_mode) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * max_mode + 1);
  if (col.k == 0) {
    v(max_mode) = std::complex<double>(1.0, 0.0);
  } else if (!col.odd) {
    v(max_mode + col.k) = std::complex<double>(kSqrtHalf, 0.0);
    v(max_mode - col.k) = std::complex<double>(kSqrtHalf, 0.0);
  } else {
    v(max_mode + col.k) = std::complex<double>(0.0, -kSqrtHalf);
    v(max_mode - col.k) = std::complex<double>(0.0, kSqrtHalf);
  }
  return v;
}

// Real parameters -> complex coefficients, built so that c_{-k} is bitwise
// conj(c_k) (real-valued function by construction).
std::vector<std::complex<double>> coeffs_from_parameters(
    const std::vector<BasisColumn>& cols, const Eigen::VectorXd& beta, int max_mode) {
  std::vector<std::complex<double>> c(static_cast<size_t>(2 * max_mode + 1));
  for (size_t j = 0; j < cols.size(); ++j) {
    const double b = beta(static_cast<Eigen::Index>(j));
    const BasisColumn& col = cols[j];
    if (col.k == 0) {
      c[static_cast<size_t>(max_mode)] += std::complex<double>(b, 0.0);
    } else if (!col.odd) {
      const double t = b * kSqrtHalf;
      c[static_cast<size_t>(max_mode + col.k)] += std::complex<double>(t, 0.0);
      c[static_cast<size_t>(max_mode - col.k)] += std::complex<double>(t, 0.0);
    } else {
      const double t = b * kSqrtHalf;
      c[static_cast<size_t>(max_mode + col.k)] += std::complex<double>(0.0, -t);
      c[static_cast<size_t>(max_mode - col.k)] += std::complex<double>(0.0, t);
    }
  }
  return c;
}

struct RealRestrictedSvd {
  std::vector<BasisColumn> cols;
  Eigen::VectorXd sigma;  // descending, size = cols.size()
  Eigen::MatrixXd v;      // right singular vectors, columns match sigma
};

// SVD of the operator as a real-linear map: parameters of a real-valued
// function (restricted to `parity`) -> stacked real and imaginary parts of
// the output coefficients.  The singular values agree with those of the
// complex matrix whenever the operator commutes with conjugation.
RealRestrictedSvd real_restricted_svd(const OperatorMatrix& op, Parity parity) {
  const int K = op.max_mode;
  const int n = 2 * K + 1;
  RealRestrictedSvd out;
  out.cols = make_columns(K, parity);
  const int m = static_cast<int>(out.cols.size());
  Eigen::MatrixXd g(2 * n, m);
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXcd mu = op.entries * column_vector(out.cols[static_cast<size_t>(j)], K);
    g.col(j).head(n) = mu.real();
    g.col(j).tail(n) = mu.imag();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullV);
  out.sigma = svd.singularValues();
  out.v = svd.matrixV();
  return out;
}

// Deterministic sign: the largest-magnitude parameter is made positive.
void fix_sign(Eigen::VectorXd& beta) {
  Eigen::Index imax = 0;
  beta.cwiseAbs().maxCoeff(&imax);
  if (beta(imax) < 0.0) beta = -beta;
}

funcspace::FourierRepresentation parameters_to_function(
    const std::vector<BasisColumn>& cols, const Eigen::VectorXd& beta,
    const OperatorMatrix& op) {
  return funcspace::FourierRepresentation(op.basis_period, op.max_mode,
                                          coeffs_from_parameters(cols, beta, op.max_mode));
}

void check_valid(const OperatorMatrix& op) {
  require(op.max_mode >= 1, "operator matrix: max_mode must be >= 1");
  require(std::isfinite(op.basis_period) && op.basis_period > 0.0,
          "operator matrix: period must be positive");
  const int n = 2 * op.max_mode + 1;
  require(op.entries.rows() == n && op.entries.cols() == n,
          "operator matrix: entries dimension must be (2K+1)x(2K+1)");
}

// (Cv)_k = conj(v_{-k}); commutes with every buildable operator kind.
Eigen::VectorXcd conjugation(const Eigen::VectorXcd& v, int max_mode) {
  Eigen::VectorXcd out(v.size());
  for (int k = -max_mode; k <= max_mode; ++k)
    out(k + max_mode) = std::conj(v(-k + max_mode));
  return out;
}

// Orthogonal projector onto the coefficient subspace of one parity.
Eigen::VectorXcd parity_project(const Eigen::VectorXcd& v, int max_mode, Parity parity) {
  if (parity == Parity::Any) return v;
  Eigen::VectorXcd out(v.size());
  const double sign = (parity == Parity::Odd) ? -1.0 : 1.0;
  for (int k = -max_mode; k <= max_mode; ++k)
    out(k + max_mode) = 0.5 * (v(k + max_mode) + sign * v(-k + max_mode));
  return out;
}

}  // namespace

OperatorKind::OperatorKind(Tag tag, double param, std::shared_ptr<const OperatorKind> lhs,
                           std::shared_ptr<const OperatorKind> rhs)
    : tag_(tag), param_(param), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}

OperatorKind OperatorKind::differentiation() {
  return OperatorKind(Tag::Differentiation, 0.0, nullptr, nullptr);
}

OperatorKind OperatorKind::translation(double shift) {
  require(std::isfinite(shift), "translation: shift must be finite");
  return OperatorKind(Tag::Translation, shift, nullptr, nullptr);
}

OperatorKind OperatorKind::reflection() { return OperatorKind(Tag::Reflection, 0.0, nullptr, nullptr); }

OperatorKind OperatorKind::identity() { return OperatorKind(Tag::Identity, 0.0, nullptr, nullptr); }

OperatorKind OperatorKind::scaled(OperatorKind inner, double factor) {
  require(std::isfinite(factor) && factor != 0.0, "scaled: factor must be finite and nonzero");
  return OperatorKind(Tag::Scaled, factor,
                      std::make_shared<const OperatorKind>(std::move(inner)), nullptr);
}

OperatorKind OperatorKind::sum(OperatorKind lhs, OperatorKind rhs) {
  return OperatorKind(Tag::Sum, 0.0, std::make_shared<const OperatorKind>(std::move(lhs)),
                      std::make_shared<const OperatorKind>(std::move(rhs)));
}

OperatorKind OperatorKind::compose(OperatorKind outer, OperatorKind inner) {
  return OperatorKind(Tag::Compose, 0.0, std::make_shared<const OperatorKind>(std::move(outer)),
                      std::make_shared<const OperatorKind>(std::move(inner)));
}

OperatorKind OperatorKind::difference(OperatorKind lhs, OperatorKind rhs) {
  return OperatorKind(Tag::Difference, 0.0, std::make_shared<const OperatorKind>(std::move(lhs)),
                      std::make_shared<const OperatorKind>(std::move(rhs)));
}

double OperatorKind::shift() const {
  if (tag_ != Tag::Translation) throw std::logic_error("shift(): not a translation");
  return param_;
}

double OperatorKind::factor() const {
  if (tag_ != Tag::Scaled) throw std::logic_error("factor(): not a scaled operator");
  return param_;
}

const OperatorKind& OperatorKind::lhs() const {
  if (!lhs_) throw std::logic_error("lhs(): leaf operator");
  return *lhs_;
}

const OperatorKind& OperatorKind::rhs() const {
  if (!rhs_) throw std::logic_error("rhs(): no second operand");
  return *rhs_;
}

OperatorMatrix build(const OperatorKind& kind, double period, int max_mode) {
  require(std::isfinite(period) && period > 0.0, "build: period must be positive");
  require(max_mode >= 1, "build: max_mode must be >= 1");
  return OperatorMatrix{period, max_mode, build_rec(kind, period, max_mode)};
}

funcspace::FourierRepresentation apply(const OperatorMatrix& op,
                                       const funcspace::FourierRepresentation& r) {
  check_valid(op);
  require(r.period() == op.basis_period && r.max_mode() == op.max_mode,
          "apply: representation does not match the operator basis");
  const int K = op.max_mode;
  const int n = 2 * K + 1;
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x(i) = r.coefficients()[static_cast<size_t>(i)];
  Eigen::VectorXcd y = op.entries * x;

  double in_scale = 0.0;
  for (int i = 0; i < n; ++i) in_scale = std::max(in_scale, std::abs(x(i)));
  const bool real_input = r.is_conjugate_symmetric(1e-12 * (1.0 + in_scale));
  std::vector<std::complex<double>> out(static_cast<size_t>(n));
  if (real_input) {
    double out_scale = 0.0;
    for (int i = 0; i < n; ++i) out_scale = std::max(out_scale, std::abs(y(i)));
    for (int k = 0; k <= K; ++k) {
      if (std::abs(y(K - k) - std::conj(y(K + k))) > 1e-11 * (1.0 + out_scale))
        throw std::runtime_error("apply: operator does not preserve real-valuedness");
    }
    out[static_cast<size_t>(K)] = std::complex<double>(y(K).real(), 0.0);
    for (int k = 1; k <= K; ++k) {
      const std::complex<double> avg = 0.5 * (y(K + k) + std::conj(y(K - k)));
      out[static_cast<size_t>(K + k)] = avg;
      out[static_cast<size_t>(K - k)] = std::conj(avg);
    }
  } else {
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = y(i);
  }
  return funcspace::FourierRepresentation(op.basis_period, K, std::move(out));
}

NullspaceResult nullspace(const OperatorMatrix& op) {
  check_valid(op);
  RealRestrictedSvd svd = real_restricted_svd(op, Parity::Any);
  const int m = static_cast<int>(svd.cols.size());
  const double sigma_min = svd.sigma(m - 1);
  const double sigma_next = (m >= 2) ? svd.sigma(m - 2) : sigma_min;

  // Within a degenerate smallest cluster, prefer the odd direction so that
  // odd kernels (the sine) come out directly instead of a random mix.
  const double cluster_tol = std::max(1e-6 * sigma_min, 1e-13 * svd.sigma(0));
  int cluster_start = m - 1;
  while (cluster_start > 0 && svd.sigma(cluster_start - 1) <= sigma_min + cluster_tol)
    --cluster_start;
  Eigen::VectorXd beta = svd.v.col(m - 1);
  const int cluster_size = m - cluster_start;
  if (cluster_size > 1) {
    std::vector<int> odd_rows;
    for (int j = 0; j < m; ++j)
      if (svd.cols[static_cast<size_t>(j)].odd) odd_rows.push_back(j);
    if (!odd_rows.empty()) {
      Eigen::MatrixXd odd_block(static_cast<Eigen::Index>(odd_rows.size()), cluster_size);
      for (size_t i = 0; i < odd_rows.size(); ++i)
        for (int c = 0; c < cluster_size; ++c)
          odd_block(static_cast<Eigen::Index>(i), c) = svd.v(odd_rows[i], cluster_start + c);
      Eigen::JacobiSVD<Eigen::MatrixXd> small(odd_block,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
      if (small.singularValues()(0) > 1e-8) {
        const Eigen::VectorXd y = small.matrixV().col(0);
        beta = svd.v.middleCols(cluster_start, cluster_size) * y;
      }
    }
  }
  fix_sign(beta);
  return NullspaceResult{sigma_min, parameters_to_function(svd.cols, beta, op), sigma_next};
}

ParityNullspace parity_restricted_nullspace(const OperatorMatrix& op, Parity parity) {
  check_valid(op);
  RealRestrictedSvd svd = real_restricted_svd(op, parity);
  const int m = static_cast<int>(svd.cols.size());
  require(m >= 1, "parity_restricted_nullspace: empty parity subspace");
  const double sigma_min = svd.sigma(m - 1);
  const double sigma_next = (m >= 2) ? svd.sigma(m - 2) : sigma_min;
  Eigen::VectorXd beta = svd.v.col(m - 1);
  fix_sign(beta);
  return ParityNullspace{sigma_min, sigma_next, parameters_to_function(svd.cols, beta, op)};
}

std::vector<ScanPoint> residual_scan(const std::vector<double>& a_values, int max_mode) {
  require(!a_values.empty(), "residual_scan: empty shift list");
  require(max_mode >= 1, "residual_scan: max_mode must be >= 1");
  std::vector<ScanPoint> out;
  out.reserve(a_values.size());
  const OperatorKind d = OperatorKind::differentiation();
  for (double a : a_values) {
    require(std::isfinite(a) && a > 0.0, "residual_scan: shifts must be positive and finite");
    const OperatorKind diff = OperatorKind::difference(d, OperatorKind::translation(a));
    const OperatorMatrix op = build(diff, 4.0 * a, max_mode);
    out.push_back(ScanPoint{a, nullspace(op).smallest_singular_value});
  }
  return out;
}

std::vector<EigenPair> generalized_eigs(const OperatorMatrix& op_a,
                                        const OperatorMatrix& op_b, Parity parity) {
  check_valid(op_a);
  check_valid(op_b);
  require(op_a.basis_period == op_b.basis_period && op_a.max_mode == op_b.max_mode,
          "generalized_eigs: mismatched operator bases");
  const int K = op_a.max_mode;
  const int n = 2 * K + 1;

  // Reduce to the subspace where op_b acts invertibly (for differentiation
  // this drops exactly the constant mode), then solve the ordinary
  // eigenproblem of inv(Sigma) U* A V there.
  Eigen::JacobiSVD<Eigen::MatrixXcd> bsvd(op_b.entries,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd bs = bsvd.singularValues();
  const double bmax = bs(0);
  int rank = 0;
  while (rank < n && bs(rank) > 1e-12 * std::max(bmax, 1e-300)) ++rank;
  if (rank == 0)
    throw std::runtime_error("generalized_eigs: singular pencil (second operator is zero)");
  const Eigen::MatrixXcd u_r = bsvd.matrixU().leftCols(rank);
  const Eigen::MatrixXcd v_r = bsvd.matrixV().leftCols(rank);
  Eigen::MatrixXcd reduced = u_r.adjoint() * (op_a.entries * v_r);
  for (int i = 0; i < rank; ++i) reduced.row(i) /= bs(i);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(reduced);
  if (ces.info() != Eigen::Success)
    throw std::runtime_error("generalized_eigs: eigensolver failed to converge");

  struct Raw {
    std::complex<double> lambda;
    Eigen::VectorXcd v;
  };
  std::vector<Raw> raw;
  for (int i = 0; i < rank; ++i) {
    const std::complex<double> lambda = ces.eigenvalues()(i);
    Eigen::VectorXcd v = v_r * ces.eigenvectors().col(i);
    v /= v.norm();
    const double rho = (op_a.entries * v - lambda * (op_b.entries * v)).norm();
    if (rho <= 1e-10) raw.push_back(Raw{lambda, std::move(v)});
  }

  std::sort(raw.begin(), raw.end(), [](const Raw& x, const Raw& y) {
    if (x.lambda.real() != y.lambda.real()) return x.lambda.real() > y.lambda.real();
    return x.lambda.imag() < y.lambda.imag();
  });

  // Group equal eigenvalues so that degenerate eigenspaces can be
  // intersected with the requested parity subspace as a whole.
  std::vector<EigenPair> out;
  size_t i = 0;
  while (i < raw.size()) {
    size_t j = i + 1;
    const std::complex<double> lambda = raw[i].lambda;
    while (j < raw.size() &&
           std::abs(raw[j].lambda - lambda) <= 1e-8 * (1.0 + std::abs(lambda)))
      ++j;
    const int csize = static_cast<int>(j - i);

    Eigen::MatrixXcd basis(n, csize);
    for (int c = 0; c < csize; ++c) basis.col(c) = raw[i + static_cast<size_t>(c)].v;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(basis);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, csize);

    std::vector<Eigen::VectorXcd> directions;
    if (parity == Parity::Any) {
      for (int c = 0; c < csize; ++c) directions.push_back(q.col(c));
    } else {
      // Directions of the eigenspace lying inside the parity subspace:
      // null vectors of (I - P) restricted to the cluster span.
      Eigen::MatrixXcd defect(n, csize);
      for (int c = 0; c < csize; ++c)
        defect.col(c) = q.col(c) - parity_project(q.col(c), K, parity);
      Eigen::JacobiSVD<Eigen::MatrixXcd> dsvd(defect,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
      for (int c = csize - 1; c >= 0; --c) {
        if (dsvd.singularValues()(c) <= 1e-8) {
          Eigen::VectorXcd v = q * dsvd.matrixV().col(c);
          v = parity_project(v, K, parity);
          const double nv = v.norm();
          if (nv > 1e-8) directions.push_back(v / nv);
        }
      }
    }

    for (Eigen::VectorXcd& v : directions) {
      // Real eigenvalue: the conjugation image is an eigenvector too, so the
      // eigenvector can be chosen real-valued.
      if (std::abs(lambda.imag()) <= 1e-10 * (1.0 + std::abs(lambda))) {
        Eigen::VectorXcd sym = 0.5 * (v + conjugation(v, K));
        if (sym.norm() < 1e-6) sym = 0.5 * (v * std::complex<double>(0, 1) +
                                            conjugation(v * std::complex<double>(0, 1), K));
        if (sym.norm() > 1e-6) v = sym / sym.norm();
      }
      const double rho = (op_a.entries * v - lambda * (op_b.entries * v)).norm();
      if (rho > 1e-10) continue;
      std::vector<std::complex<double>> coeffs(static_cast<size_t>(n));
      for (int c = 0; c < n; ++c) coeffs[static_cast<size_t>(c)] = v(c);
      out.push_back(EigenPair{
          lambda, funcspace::FourierRepresentation(op_a.basis_period, K, std::move(coeffs))});
    }
    i = j;
  }
  return out;
}

}  // namespace sinegen::operators
