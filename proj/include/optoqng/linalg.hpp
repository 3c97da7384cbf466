#ifndef OPTOQNG_LINALG_HPP
#define OPTOQNG_LINALG_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace optoqng {

namespace detail {

template <typename Matrix>
void pade_terms(const Matrix& a, int degree, Matrix& u, Matrix& v) {
  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  switch (degree) {
    case 3: {
      constexpr std::array<double, 4> b{120., 60., 12., 1.};
      u = a * (b[3] * a2 + b[1] * ident);
      v = b[2] * a2 + b[0] * ident;
      return;
    }
    case 5: {
      constexpr std::array<double, 6> b{30240., 15120., 3360., 420., 30., 1.};
      const Matrix a4 = a2 * a2;
      u = a * (b[5] * a4 + b[3] * a2 + b[1] * ident);
      v = b[4] * a4 + b[2] * a2 + b[0] * ident;
      return;
    }
    case 7: {
      constexpr std::array<double, 8> b{17297280., 8648640., 1995840., 277200.,
                                        25200.,    1512.,    56.,      1.};
      const Matrix a4 = a2 * a2;
      const Matrix a6 = a4 * a2;
      u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
      v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
      return;
    }
    case 9: {
      constexpr std::array<double, 10> b{17643225600., 8821612800., 2075673600., 302702400.,
                                         30270240.,    2162160.,    110880.,     3960.,
                                         90.,          1.};
      const Matrix a4 = a2 * a2;
      const Matrix a6 = a4 * a2;
      const Matrix a8 = a6 * a2;
      u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
      v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
      return;
    }
    default: {
      constexpr std::array<double, 14> b{
          64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
          129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
          1323241920.,        40840800.,          960960.,           16380.,
          182.,               1.};
      const Matrix a4 = a2 * a2;
      const Matrix a6 = a4 * a2;
      u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
               b[3] * a2 + b[1] * ident);
      v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
          b[0] * ident;
      return;
    }
  }
}

}  // namespace detail

/**
 * Matrix exponential by scaling and squaring with a diagonal Padé approximant
 * (Higham 2005 degree selection). Accurate to a few units of roundoff for
 * the well-conditioned generators used here.
 */
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& input) {
  using Matrix = typename Derived::PlainObject;
  const Matrix a = input;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();

  constexpr std::array<double, 4> theta{1.495585217958292e-2, 2.539398330063230e-1,
                                        9.504178996162932e-1, 2.097847961257068e0};
  constexpr std::array<int, 4> degree{3, 5, 7, 9};
  Matrix u, v;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (norm1 <= theta[i]) {
      detail::pade_terms(a, degree[i], u, v);
      return (v - u).partialPivLu().solve(v + u);
    }
  }

  constexpr double theta13 = 5.371920351148152;
  int squarings = 0;
  if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);
  detail::pade_terms(scaled, 13, u, v);
  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// Relative symmetry defect max|A - A^T| / max(1, max|A|).
template <typename Derived>
double symmetry_defect(const Eigen::MatrixBase<Derived>& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace optoqng

#endif  // OPTOQNG_LINALG_HPP
