#ifndef OPTOQNG_TESTS_ORACLES_HPP
#define OPTOQNG_TESTS_ORACLES_HPP

// Independent reference computations used only by the tests. None of these
// call into the library's numerical kernels.

#include "optoqng/gaussian_dynamics.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

/// exp(A) by a 60-term Taylor series at a scaled argument, then squaring.
inline Eigen::MatrixXd taylor_expm(const Eigen::MatrixXd& a, int terms = 60) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::ldexp(1.0, s) > 0.5) ++s;
  const Eigen::MatrixXd x = a / std::ldexp(1.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd sum = term;
  for (int n = 1; n < terms; ++n) {
    term = (term * x / static_cast<double>(n)).eval();
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = (sum * sum).eval();
  return sum;
}

/// Lower ladder operator on a truncated Fock space.
inline Eigen::MatrixXd ladder(int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Eigen::MatrixXd thermal_density(double n, int dim) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) rho(k, k) = std::pow(n, k) / std::pow(n + 1.0, k + 1);
  return rho;
}

/// Diagonal of a^dag rho_th a (added = true) or a rho_th a^dag, normalized.
inline std::vector<double> ideal_heralded(double n0, bool added, int dim) {
  const Eigen::MatrixXd a = ladder(dim);
  const Eigen::MatrixXd rho = thermal_density(n0, dim);
  const Eigen::MatrixXd out = added ? Eigen::MatrixXd(a.transpose() * rho * a) : Eigen::MatrixXd(a * rho * a.transpose());
  std::vector<double> p(static_cast<std::size_t>(dim));
  double tr = out.trace();
  for (int k = 0; k < dim; ++k) p[static_cast<std::size_t>(k)] = out(k, k) / tr;
  return p;
}

inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::max(p.size(), q.size()); ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    s += std::abs(a - b);
  }
  return 0.5 * s;
}

struct LindbladMoments {
  double mech_occupation;
  double cavity_occupation;
  double trace;
};

/**
 * Mechanics (cutoff cm) and cavity (cutoff cc) evolved under the Lindblad
 * equation with RK4. Blue: H = g (a b + a^dag b^dag); red: H = g (a^dag b + a b^dag).
 * Cavity loss 2 kappa D[a]; mechanical bath gamma (n_th + 1) D[b] + gamma n_th D[b^dag].
 */
inline LindbladMoments lindblad_pulse(const optoqng::SystemParams& p, double tau, double n0, int cm = 12,
                                      int cc = 4, double kappa_dt = 0.2) {
  using Sparse = Eigen::SparseMatrix<Complex>;
  const int dim = cm * cc;
  auto kron = [&](const Eigen::MatrixXd& m, const Eigen::MatrixXd& c) {
    Sparse out(dim, dim);
    std::vector<Eigen::Triplet<Complex>> t;
    for (int i = 0; i < cm; ++i)
      for (int j = 0; j < cm; ++j)
        for (int k = 0; k < cc; ++k)
          for (int l = 0; l < cc; ++l) {
            const double v = m(i, j) * c(k, l);
            if (v != 0.0) t.emplace_back(i * cc + k, j * cc + l, v);
          }
    out.setFromTriplets(t.begin(), t.end());
    return out;
  };
  const Sparse b = kron(ladder(cm), Eigen::MatrixXd::Identity(cc, cc));
  const Sparse a = kron(Eigen::MatrixXd::Identity(cm, cm), ladder(cc));
  const Sparse bd = Sparse(b.adjoint());
  const Sparse ad = Sparse(a.adjoint());
  const bool blue = p.detuning == optoqng::Detuning::blue;
  const Sparse h = blue ? Sparse(p.g * (a * b + ad * bd)) : Sparse(p.g * (ad * b + a * bd));
  struct Channel {
    Sparse l, ld, ldl;
    double rate;
  };
  std::vector<Channel> channels;
  auto add = [&](const Sparse& l, double rate) {
    if (rate <= 0.0) return;
    const Sparse ld = Sparse(l.adjoint());
    channels.push_back({l, ld, Sparse(ld * l), rate});
  };
  add(a, 2.0 * p.kappa);
  add(b, p.gamma * (p.n_th + 1.0));
  add(bd, p.gamma * p.n_th);

  const Complex i1(0.0, 1.0);
  auto rhs = [&](const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd d = -i1 * (h * rho - (h.adjoint() * rho.adjoint()).adjoint());
    for (const auto& c : channels) {
      const Eigen::MatrixXcd lr = c.l * rho;
      d += c.rate * ((c.l * lr.adjoint()).adjoint() - 0.5 * (c.ldl * rho) -
                     0.5 * (c.ldl * rho.adjoint()).adjoint());
    }
    return d;
  };

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (int m = 0; m < cm; ++m) rho(m * cc, m * cc) = std::pow(n0, m) / std::pow(n0 + 1.0, m + 1);
  rho /= rho.trace();

  const double rate = 2.0 * p.kappa + p.gamma * (2.0 * p.n_th + 1.0) * cm + 4.0 * p.g;
  const int steps = std::max(1, static_cast<int>(std::ceil(tau * rate / kappa_dt)));
  const double dt = tau / steps;
  for (int s = 0; s < steps; ++s) {
    const Eigen::MatrixXcd k1 = rhs(rho);
    const Eigen::MatrixXcd k2 = rhs(rho + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = rhs(rho + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = rhs(rho + dt * k3);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const Sparse nb = Sparse(bd * b);
  const Sparse na = Sparse(ad * a);
  return {(nb * rho).trace().real(), (na * rho).trace().real(), rho.trace().real()};
}

/**
 * Covariance of (X_m, P_m, X_L, P_L) for the flat filter f = tau^{-1/2} from
 * the Heisenberg solution z(t) = M(t) z(0) + int M(t - s) B xi(s) ds:
 * each output quadrature is a kernel over the initial state and the white
 * noises, with int_0^T M(u) du = A^{-1} (M(T) - I). The noise integral is done
 * by composite Simpson on a grid graded towards the end of the pulse.
 */
inline Eigen::Matrix4d flat_filter_covariance(const optoqng::SystemParams& p, double tau, double sigma_m) {
  const Eigen::Matrix4d a = optoqng::build_drift_matrix(p).a;
  const Eigen::Matrix4d a_inv = a.inverse();
  const double f = 1.0 / std::sqrt(tau);
  const double s2k = std::sqrt(2.0 * p.kappa);
  Eigen::Matrix4d bmat = Eigen::Matrix4d::Zero();
  bmat(0, 0) = bmat(1, 1) = std::sqrt(p.gamma);
  bmat(2, 2) = bmat(3, 3) = s2k;
  const Eigen::Vector4d q(2.0 * p.n_th + 1.0, 2.0 * p.n_th + 1.0, 1.0, 1.0);

  // Output row r of the full state (X_m, P_m, X_L, P_L) as a linear functional.
  // Mechanics: row of M(tau). Detector: f sqrt(2 kappa) e_c^T int_0^tau M(t) dt.
  auto m_of = [&](double t) { return Eigen::Matrix4d(taylor_expm(a * t)); };
  const Eigen::Matrix4d m_tau = m_of(tau);
  const Eigen::Matrix4d int_m = a_inv * (m_tau - Eigen::Matrix4d::Identity());
  Eigen::Matrix4d k0;  // rows: X_m, P_m, X_L, P_L acting on z(0)
  k0.row(0) = m_tau.row(0);
  k0.row(1) = m_tau.row(1);
  k0.row(2) = f * s2k * int_m.row(2);
  k0.row(3) = f * s2k * int_m.row(3);
  Eigen::Matrix4d v0 = Eigen::Matrix4d::Identity();
  v0(0, 0) = v0(1, 1) = sigma_m;
  Eigen::Matrix4d cov = k0 * v0 * k0.transpose();

  // Noise kernel at time s (u = tau - s is the remaining time).
  auto kernel = [&](double u) {
    const Eigen::Matrix4d mu = m_of(u);
    const Eigen::Matrix4d iu = a_inv * (mu - Eigen::Matrix4d::Identity());
    Eigen::Matrix4d k;
    k.row(0) = mu.row(0) * bmat;
    k.row(1) = mu.row(1) * bmat;
    k.row(2) = f * s2k * iu.row(2) * bmat;
    k.row(3) = f * s2k * iu.row(3) * bmat;
    k(2, 2) -= f;  // direct feed-through of the input noise, -a_in
    k(3, 3) -= f;
    return k;
  };
  auto simpson = [&](double lo, double hi, int n) {
    Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
    const double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const Eigen::Matrix4d k = kernel(lo + i * h);
      acc += w * k * q.asDiagonal() * k.transpose();
    }
    return Eigen::Matrix4d(acc * h / 3.0);
  };
  const double layer = std::min(tau, 40.0 / p.kappa);
  cov += simpson(0.0, layer, 4000);
  if (layer < tau) cov += simpson(layer, tau, 4000);
  return cov;
}

/// L_n(x) from the explicit sum sum_k C(n, k) (-x)^k / k!.
inline double laguerre_sum(int n, double alpha, double x) {
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double log_binom = std::lgamma(n + alpha + 1.0) - std::lgamma(n - k + 1.0) - std::lgamma(alpha + k + 1.0);
    s += std::exp(log_binom - std::lgamma(k + 1.0)) * std::pow(-x, k);
  }
  return s;
}

/// |<n|D(sqrt(N))|m>|^2 for n < dim_out from a truncated matrix exponential.
inline std::vector<double> displaced_row_expm(int m, double n_c, int dim_out, int padding = 60) {
  const int dim = dim_out + padding;
  const Eigen::MatrixXd a = ladder(dim);
  const Eigen::MatrixXd d = taylor_expm(std::sqrt(n_c) * (a.transpose() - a));
  std::vector<double> row(static_cast<std::size_t>(dim_out));
  for (int n = 0; n < dim_out; ++n) row[static_cast<std::size_t>(n)] = d(n, m) * d(n, m);
  return row;
}

/// Photon statistics of a thermal state (n0) displaced by sqrt(N).
inline double displaced_thermal(double n0, double n_c, int n) {
  const double x = -n_c / (n0 * (1.0 + n0));
  return std::pow(n0, n) / std::pow(1.0 + n0, n + 1) * std::exp(-n_c / (1.0 + n0)) * laguerre_sum(n, 0.0, x);
}

/// Radial Wigner function of |n> in the vacuum-variance-one convention.
inline double fock_wigner(int n, double r) {
  const double x = r * r;
  return (n % 2 ? -1.0 : 1.0) * std::exp(-0.5 * x) * laguerre_sum(n, 0.0, x) / (2.0 * M_PI);
}

}  // namespace oracle

#endif  // OPTOQNG_TESTS_ORACLES_HPP
