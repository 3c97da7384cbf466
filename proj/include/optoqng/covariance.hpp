#ifndef OPTOQNG_COVARIANCE_HPP
#define OPTOQNG_COVARIANCE_HPP

#include "optoqng/errors.hpp"
#include "optoqng/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>

namespace optoqng {

/// Symplectic form for n modes in (X1, P1, X2, P2, ...) ordering.
inline Eigen::MatrixXd symplectic_form(Eigen::Index modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (Eigen::Index i = 0; i < modes; ++i) {
    omega(2 * i, 2 * i + 1) = 1.0;
    omega(2 * i + 1, 2 * i) = -1.0;
  }
  return omega;
}

/**
 * Covariance matrix of a zero-mean Gaussian state in the [X,P] = 2i
 * convention, so the vacuum is the identity. Quadratures are ordered
 * (X1, P1, X2, P2, ...).
 */
class CovMatrix {
public:
  static constexpr double symmetry_tolerance = 1e-12;

  CovMatrix() = default;

  explicit CovMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    detail::require(entries_.rows() == entries_.cols(), "covariance matrix must be square");
    detail::require(entries_.rows() % 2 == 0 && entries_.rows() > 0,
                    "covariance matrix dimension must be a positive even number");
    detail::require(entries_.allFinite(), "covariance matrix has non-finite entries");
    detail::require(symmetry_defect(entries_) <= symmetry_tolerance,
                    "covariance matrix is not symmetric");
    entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
  }

  static CovMatrix identity(Eigen::Index modes) {
    return CovMatrix(Eigen::MatrixXd::Identity(2 * modes, 2 * modes));
  }

  /// (2n + 1) * I for a single thermal mode.
  static CovMatrix thermal(double occupation) {
    detail::require(occupation >= 0.0, "thermal occupation must be non-negative");
    return CovMatrix((2.0 * occupation + 1.0) * Eigen::MatrixXd::Identity(2, 2));
  }

  Eigen::Index modes() const { return entries_.rows() / 2; }
  Eigen::Index dimension() const { return entries_.rows(); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// 2x2 block coupling modes a and b.
  Eigen::Matrix2d block(Eigen::Index a, Eigen::Index b) const {
    return entries_.block<2, 2>(2 * a, 2 * b);
  }

  /// Smallest eigenvalue of V + i*Omega; non-negative for physical states.
  double uncertainty_margin() const {
    using Complex = std::complex<double>;
    const Eigen::MatrixXcd m =
        entries_.cast<Complex>() + Complex(0.0, 1.0) * symplectic_form(modes()).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

  bool is_physical(double tolerance = 1e-9) const { return uncertainty_margin() >= -tolerance; }

private:
  Eigen::MatrixXd entries_;
};

/// Mean occupation n of a phase-insensitive single-mode block (2n + 1) * I.
inline double occupation_of(const Eigen::Matrix2d& block) {
  return 0.5 * (0.5 * block.trace() - 1.0);
}

}  // namespace optoqng

#endif  // OPTOQNG_COVARIANCE_HPP
