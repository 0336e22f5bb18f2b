#pragma once

// Spin-j operator matrices and the small dense complex linear-algebra kernel
// (matrix exponential, Hermitian eigendecomposition, norm checks) that the
// rest of the library is built on. Matrices are tiny (dimension 2j+1), so
// everything is dynamic-size Eigen and nothing is cached globally.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <string>

#include "geomphase/error.hpp"

namespace geomphase {

using complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr complex I{0.0, 1.0};

/// Spin quantum number stored as the integer 2j so that half-integer spins
/// index the |j m> basis exactly.
class SpinJ {
 public:
  explicit SpinJ(int two_j) : two_j_(two_j) {
    if (two_j < 1) {
      throw invalid_spec_error("spin requires 2j >= 1, got " +
                               std::to_string(two_j));
    }
  }

  static SpinJ half() { return SpinJ(1); }
  static SpinJ one() { return SpinJ(2); }
  static SpinJ three_halves() { return SpinJ(3); }

  int two_j() const noexcept { return two_j_; }
  double value() const noexcept { return 0.5 * two_j_; }
  Eigen::Index dim() const noexcept { return two_j_ + 1; }

  /// Magnetic quantum number of basis index i (m ascending from -j).
  double m(Eigen::Index i) const noexcept {
    return static_cast<double>(i) - value();
  }

  friend bool operator==(SpinJ a, SpinJ b) { return a.two_j_ == b.two_j_; }

 private:
  int two_j_;
};

struct SpinOperatorSet {
  SpinJ j;
  ComplexMatrix jx, jy, jz, jplus, jminus;
};

/// Operators in the |j m> basis ordered m = -j, ..., +j.
inline SpinOperatorSet build_spin_operators(SpinJ j) {
  const Eigen::Index d = j.dim();
  const double jv = j.value();
  ComplexMatrix jplus = ComplexMatrix::Zero(d, d);
  ComplexMatrix jz = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double m = j.m(i);
    jz(i, i) = m;
    if (i + 1 < d) jplus(i + 1, i) = std::sqrt((jv - m) * (jv + m + 1.0));
  }
  ComplexMatrix jminus = jplus.adjoint();
  ComplexMatrix jx = 0.5 * (jplus + jminus);
  ComplexMatrix jy = (jplus - jminus) / (2.0 * I);
  return {j, std::move(jx), std::move(jy), std::move(jz), std::move(jplus),
          std::move(jminus)};
}

inline double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double hermiticity_error(const ComplexMatrix& a) {
  return max_abs(a - a.adjoint());
}

inline double anti_hermiticity_error(const ComplexMatrix& a) {
  return max_abs(a + a.adjoint());
}

/// max |U^dagger U - 1|
inline double unitarity_error(const ComplexMatrix& u) {
  return max_abs(u.adjoint() * u -
                 ComplexMatrix::Identity(u.rows(), u.cols()));
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

struct EigenDecomposition {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // columns are eigenvectors; unitary
};

inline EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) {
    throw invalid_spec_error("eigendecomposition requires a square matrix");
  }
  if (!h.allFinite()) {
    throw numerical_error("eigendecomposition of non-finite matrix");
  }
  if (hermiticity_error(h) >= 1e-10) {
    throw numerical_error("eigendecomposition input is not Hermitian");
  }
  // Symmetrise so that rounding-level asymmetry does not leak into the result.
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// f(H) = V f(lambda) V^dagger for Hermitian H.
template <class F>
ComplexMatrix hermitian_function(const EigenDecomposition& eig, F&& f) {
  const Eigen::Index d = eig.values.size();
  Eigen::VectorXcd fl(d);
  for (Eigen::Index i = 0; i < d; ++i) fl(i) = f(eig.values(i));
  return eig.vectors * fl.asDiagonal() * eig.vectors.adjoint();
}

/// exp(a). Anti-Hermitian arguments go through the eigendecomposition of
/// -i a, which keeps the result unitary to rounding; anything else uses
/// Pade scaling and squaring.
inline ComplexMatrix matrix_exponential(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw invalid_spec_error("matrix exponential requires a square matrix");
  }
  if (!a.allFinite()) {
    throw numerical_error("matrix exponential of non-finite matrix");
  }
  const double scale = std::max(1.0, max_abs(a));
  if (anti_hermiticity_error(a) <= 1e-13 * scale) {
    const ComplexMatrix h = -I * a;
    const auto eig = hermitian_eigendecomposition(h);
    return hermitian_function(eig, [](double l) { return std::exp(I * l); });
  }
  return a.exp();
}

}  // namespace geomphase
