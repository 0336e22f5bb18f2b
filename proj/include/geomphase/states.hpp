#pragma once

// Thermal spin states and the unitary families acting on them: coherent
// displacement D, one-axis twisting S (and its transport-compensated form
// S~), and two-axis counter-twisting K.

#include <cmath>
#include <string>

#include "geomphase/error.hpp"
#include "geomphase/phase.hpp"
#include "geomphase/spin_algebra.hpp"

namespace geomphase {

/// tan(theta/2) diverges at the south pole; parameterisations stop short.
inline constexpr double pole_cutoff = 1e-9;

/// Largest beta*omega0*j accepted before the smallest weight underflows.
inline constexpr double max_boltzmann_exponent = 700.0;

struct ThermalState {
  SpinJ j;
  double beta;
  double omega0;
  ComplexMatrix rho;
  RealVector lambdas;  // m ascending, so the largest weight comes first
};

/// A point on the unit sphere. Paths may carry unwrapped phi, so the ranges
/// are not enforced here; operations check the pole only.
struct SpherePoint {
  double theta = 0.0;
  double phi = 0.0;

  /// xi = e^{-i phi} theta/2
  complex xi() const { return std::polar(0.5 * theta, -phi); }
  /// zeta = e^{-i phi} tan(theta/2); also the two-axis z.
  complex zeta() const { return std::polar(std::tan(0.5 * theta), -phi); }
};

struct SqueezeAngle {
  double value = 0.0;  // dimensionless one-axis parameter, 2 eta t
};

namespace detail {

inline void check_beta(double beta, double omega0) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw invalid_spec_error("inverse temperature must be positive and finite");
  }
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    throw invalid_spec_error("omega0 must be positive and finite");
  }
}

inline void check_pole(double theta) {
  if (std::fabs(theta) >= pi - pole_cutoff) {
    throw numerical_error("theta=" + std::to_string(theta) +
                          " is at the tan(theta/2) pole");
  }
}

}  // namespace detail

/// Z = sinh((j+1/2) beta omega0) / sinh(beta omega0 / 2)
inline double partition_function(SpinJ j, double beta, double omega0 = 1.0) {
  detail::check_beta(beta, omega0);
  const double x = beta * omega0;
  return std::sinh((j.value() + 0.5) * x) / std::sinh(0.5 * x);
}

/// rho = exp(-beta omega0 J_z) / Z, diagonal in the m basis.
inline ThermalState thermal_state(SpinJ j, double beta, double omega0 = 1.0) {
  detail::check_beta(beta, omega0);
  const double x = beta * omega0;
  if (x * j.value() > max_boltzmann_exponent) {
    throw numerical_error("temperature too low for full-rank state");
  }
  const Eigen::Index d = j.dim();
  RealVector w(d);
  // Weights relative to the m = -j population, so nothing overflows.
  for (Eigen::Index i = 0; i < d; ++i) w(i) = std::exp(-static_cast<double>(i) * x);
  RealVector lambdas = w / w.sum();
  ComplexMatrix rho = lambdas.cast<complex>().asDiagonal();
  return {j, beta, omega0, std::move(rho), std::move(lambdas)};
}

inline ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho) {
  return u * rho * u.adjoint();
}

/// D(xi) = exp(xi J+ - conj(xi) J-)
inline ComplexMatrix displacement_operator(const SpinOperatorSet& ops,
                                           SpherePoint p) {
  detail::check_pole(p.theta);
  const complex xi = p.xi();
  return matrix_exponential(xi * ops.jplus - std::conj(xi) * ops.jminus);
}

inline ComplexMatrix displacement_operator(SpinJ j, SpherePoint p) {
  return displacement_operator(build_spin_operators(j), p);
}

/// One-axis twisting S(Theta) = exp(-i Theta J_x^2 / 2). Holds the spectral
/// decomposition of J_x^2 so that repeated evaluations are cheap.
class OneAxisSqueezer {
 public:
  explicit OneAxisSqueezer(SpinJ j)
      : j_(j), jx2_([&] {
          const auto ops = build_spin_operators(j);
          return ComplexMatrix(ops.jx * ops.jx);
        }()),
        eig_(hermitian_eigendecomposition(jx2_)) {}

  SpinJ spin() const { return j_; }
  const ComplexMatrix& jx_squared() const { return jx2_; }

  ComplexMatrix operator()(double theta_cap) const {
    return hermitian_function(
        eig_, [&](double mu) { return std::exp(-0.5 * I * theta_cap * mu); });
  }

  /// dS/dTheta = -(i/2) J_x^2 S
  ComplexMatrix derivative(double theta_cap) const {
    return -0.5 * I * jx2_ * (*this)(theta_cap);
  }

  /// Accumulated phase of each basis state,
  /// phi_m = i * integral_0^{Theta_f} <m|S^dagger dS/dTheta|m> dTheta,
  /// by the midpoint rule.
  RealVector geometric_phases(double theta_cap_final, int n_steps) const {
    if (n_steps < 64) {
      throw invalid_spec_error("geometric phase quadrature needs >= 64 steps");
    }
    const Eigen::Index d = j_.dim();
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(d);
    const double h = theta_cap_final / n_steps;
    for (int k = 0; k < n_steps; ++k) {
      const double t = (k + 0.5) * h;
      const ComplexMatrix s = (*this)(t);
      const ComplexMatrix integrand = s.adjoint() * derivative(t);
      acc += integrand.diagonal() * h;
    }
    const Eigen::VectorXcd phases = I * acc;
    if (phases.imag().cwiseAbs().maxCoeff() > 1e-10) {
      throw numerical_error("geometric phase integrand is not anti-Hermitian");
    }
    return phases.real();
  }

  /// S~ = S(Theta_f) diag(e^{i phi_m})
  ComplexMatrix tilde(double theta_cap_final, int n_steps) const {
    const RealVector phases = geometric_phases(theta_cap_final, n_steps);
    const Eigen::VectorXcd factors =
        phases.unaryExpr([](double p) { return std::exp(I * p); });
    return (*this)(theta_cap_final) * factors.asDiagonal();
  }

 private:
  SpinJ j_;
  ComplexMatrix jx2_;
  EigenDecomposition eig_;
};

inline ComplexMatrix one_axis_squeeze(SpinJ j, double theta_cap) {
  const auto ops = build_spin_operators(j);
  return matrix_exponential(-0.5 * I * theta_cap * (ops.jx * ops.jx));
}

inline RealVector one_axis_geometric_phases(SpinJ j, double theta_cap_final,
                                            int n_steps) {
  return OneAxisSqueezer(j).geometric_phases(theta_cap_final, n_steps);
}

inline ComplexMatrix tilde_S(SpinJ j, double theta_cap_final, int n_steps) {
  return OneAxisSqueezer(j).tilde(theta_cap_final, n_steps);
}

/// K(z) = exp(z J+^2 - conj(z) J-^2), z = e^{-i phi} tan(theta/2)
inline ComplexMatrix two_axis_squeeze(const SpinOperatorSet& ops, SpherePoint p) {
  detail::check_pole(p.theta);
  const complex z = p.zeta();
  return matrix_exponential(z * ops.jplus * ops.jplus -
                            std::conj(z) * ops.jminus * ops.jminus);
}

inline ComplexMatrix two_axis_squeeze(SpinJ j, SpherePoint p) {
  return two_axis_squeeze(build_spin_operators(j), p);
}

}  // namespace geomphase
