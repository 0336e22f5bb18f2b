#pragma once

// Interferometric geometric phase: arg Tr[rho(0) U(t)] for evolutions that
// satisfy the parallel-transport condition, with closed forms for the three
// families and a direct numerical route.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "geomphase/error.hpp"
#include "geomphase/phase.hpp"
#include "geomphase/spin_algebra.hpp"
#include "geomphase/states.hpp"
#include "geomphase/uhlmann.hpp"

namespace geomphase {

/// Largest two-axis endpoint; tan(theta/2) oscillations make values past it
/// meaningless.
inline constexpr double two_axis_theta_max = 0.75 * pi;

/// Residual above which an evolution is not treated as parallel transport.
inline constexpr double transport_tolerance = 1e-6;

/// One open evolution per family:
///   css       D(theta, phi = fixed), theta: start -> endpoint (a longitude)
///   one_axis  S~(Theta), Theta: start -> endpoint
///   two_axis  K(theta, phi = fixed), theta: start -> endpoint (a meridian)
struct EvolutionSpec {
  Family family = Family::css;
  SpinJ j = SpinJ(3);
  double endpoint = 0.0;
  double fixed = 0.0;
  double start = 0.0;
  int n_steps = 1024;
  int phase_steps = 64;  // quadrature for the S~ phases
};

inline EvolutionSpec css_longitude(SpinJ j, double theta_f, double phi = 0.0) {
  return {Family::css, j, theta_f, phi};
}

inline EvolutionSpec one_axis_tilde(double theta_cap_f, SpinJ j = SpinJ(2)) {
  return {Family::one_axis, j, theta_cap_f, 0.0};
}

inline EvolutionSpec two_axis_meridian(double theta_f, SpinJ j = SpinJ(2)) {
  return {Family::two_axis, j, theta_f, 0.5 * pi};
}

struct TransportReport {
  double weak_residual = 0.0;    // max |Tr[rho(0) U^dagger dU/dt]|
  double strong_residual = 0.0;  // max |<n(t)| dU/dt U^dagger |n(t)>|
  double dynamic_phase = 0.0;    // -i integral Tr[rho(t) dU/dt U^dagger] dt
  double step = 0.0;
};

namespace detail {

inline void check_evolution(const EvolutionSpec& spec) {
  auto in = [&](double lo, double hi, bool hi_open) {
    for (double v : {spec.start, spec.endpoint}) {
      if (!(v >= lo) || (hi_open ? !(v < hi) : !(v <= hi))) return false;
    }
    return true;
  };
  bool ok = false;
  switch (spec.family) {
    case Family::css: ok = in(0.0, pi, true); break;
    case Family::one_axis: ok = in(0.0, 4.0 * pi, false); break;
    case Family::two_axis: ok = in(0.0, two_axis_theta_max, false); break;
  }
  if (!ok) {
    throw invalid_spec_error(std::string("endpoint outside the ") +
                             to_string(spec.family) + " evolution domain");
  }
  if (spec.n_steps < 16) throw invalid_spec_error("evolution needs >= 16 steps");
}

/// Absolute family unitary V(s); the evolution is U(s) = V(s) V(start)^dagger.
class EvolutionUnitary {
 public:
  explicit EvolutionUnitary(const EvolutionSpec& spec)
      : spec_(spec), ops_(build_spin_operators(spec.j)), squeezer_(spec.j) {}

  ComplexMatrix operator()(double s) const {
    switch (spec_.family) {
      case Family::css:
        return displacement_operator(ops_, SpherePoint{s, spec_.fixed});
      case Family::one_axis:
        return squeezer_.tilde(s, spec_.phase_steps);
      case Family::two_axis:
        return two_axis_squeeze(ops_, SpherePoint{s, spec_.fixed});
    }
    throw invalid_spec_error("unknown family");
  }

 private:
  EvolutionSpec spec_;
  SpinOperatorSet ops_;
  OneAxisSqueezer squeezer_;
};

}  // namespace detail

/// arg Tr[rho0 U], branch (-pi, pi].
inline double total_phase(const ComplexMatrix& rho0, const ComplexMatrix& u) {
  if (unitarity_error(u) > 1e-8) {
    throw invalid_spec_error("total_phase requires a unitary evolution");
  }
  const complex tr = (rho0 * u).trace();
  if (std::abs(tr) < undefined_trace) {
    throw undefined_phase_error("total phase undefined", std::abs(tr));
  }
  return wrap_phase(std::arg(tr));
}

inline double total_phase(const ThermalState& rho0, const ComplexMatrix& u) {
  return total_phase(rho0.rho, u);
}

/// Residuals of both transport conditions along the evolution. dU/dt is a
/// five-point symmetric difference centred on each segment midpoint.
inline TransportReport transport_report(const EvolutionSpec& spec, double beta,
                                        double omega0 = 1.0) {
  detail::check_evolution(spec);
  const auto th = thermal_state(spec.j, beta, omega0);
  const detail::EvolutionUnitary v(spec);
  const double h = (spec.endpoint - spec.start) / spec.n_steps;
  TransportReport rep;
  rep.step = h;
  if (h == 0.0) return rep;
  complex dyn = 0.0;
  for (int k = 0; k < spec.n_steps; ++k) {
    const double s = spec.start + (k + 0.5) * h;
    const ComplexMatrix vm = v(s);
    const ComplexMatrix vdot =
        (-v(s + h) + 8.0 * v(s + 0.5 * h) - 8.0 * v(s - 0.5 * h) + v(s - h)) /
        (6.0 * h);
    // In the frame of rho_th: <n(t)|dU U^dagger|n(t)> = <n|V^dagger dV|n>.
    const ComplexMatrix gen = vm.adjoint() * vdot;
    const complex weak = (th.rho * gen).trace();
    rep.weak_residual = std::max(rep.weak_residual, std::abs(weak));
    rep.strong_residual = std::max(rep.strong_residual, gen.diagonal().cwiseAbs().maxCoeff());
    dyn += weak * h;
  }
  rep.dynamic_phase = (-I * dyn).real();
  return rep;
}

// ---------------------------------------------------------------------------
// Closed forms. Each *_argument returns the complex number whose arg is the
// IGP, scaled to be O(1); its magnitude is what flags a critical point.

inline constexpr double critical_argument = 1e-14;

namespace detail {

inline double checked_arg(complex z, const char* what) {
  if (std::abs(z) < critical_argument) {
    throw undefined_phase_error(std::string(what) + ": critical point", std::abs(z));
  }
  return wrap_phase(std::arg(z));
}

}  // namespace detail

/// j = 3/2 coherent-state longitude. The unscaled argument
/// e^{2x} + 1 - 2 e^{x} tan^2(theta_f/2) is divided by e^{2x} + 1.
inline double igp_css_argument(double theta_f, double beta, double omega0 = 1.0) {
  detail::check_beta(beta, omega0);
  if (!(theta_f >= 0.0 && theta_f < pi)) {
    throw invalid_spec_error("css theta_f must lie in [0, pi)");
  }
  const double t = std::tan(0.5 * theta_f);
  return 1.0 - t * t / std::cosh(beta * omega0);
}

inline double igp_css_closed(SpinJ j, double theta_f, double beta,
                             double omega0 = 1.0) {
  if (j.two_j() != 3) {
    throw invalid_spec_error("closed-form coherent-state IGP is for j = 3/2");
  }
  return detail::checked_arg(igp_css_argument(theta_f, beta, omega0), "css IGP");
}

/// (2 cos(Theta/4) cosh x + 1) / (2 cosh x + 1), evaluated as
/// (2 cos(Theta/4) + sech x) / (2 + sech x).
inline double igp_one_axis_argument(double theta_cap_f, double beta,
                                    double omega0 = 1.0) {
  detail::check_beta(beta, omega0);
  if (!(theta_cap_f >= 0.0 && theta_cap_f <= 4.0 * pi)) {
    throw invalid_spec_error("one-axis Theta_f must lie in [0, 4pi]");
  }
  const double sech = 1.0 / std::cosh(beta * omega0);
  return (2.0 * std::cos(0.25 * theta_cap_f) + sech) / (2.0 + sech);
}

inline double igp_one_axis_closed(double theta_cap_f, double beta,
                                  double omega0 = 1.0) {
  return detail::checked_arg(igp_one_axis_argument(theta_cap_f, beta, omega0),
                             "one-axis IGP");
}

/// arg sum_m lambda_m nu_m e^{i phi_m} with nu_m = <m|S(Theta_f)|m>.
inline complex igp_one_axis_spectral_sum(double theta_cap_f, double beta,
                                         int n_steps, double omega0 = 1.0) {
  const SpinJ j(2);
  const auto th = thermal_state(j, beta, omega0);
  const OneAxisSqueezer sq(j);
  const ComplexMatrix s = sq(theta_cap_f);
  const RealVector phases = sq.geometric_phases(theta_cap_f, n_steps);
  complex sum = 0.0;
  for (Eigen::Index m = 0; m < j.dim(); ++m) {
    sum += th.lambdas(m) * s(m, m) * std::exp(I * phases(m));
  }
  return sum;
}

inline double igp_one_axis_spectral(double theta_cap_f, double beta, int n_steps,
                                    double omega0 = 1.0) {
  return detail::checked_arg(
      igp_one_axis_spectral_sum(theta_cap_f, beta, n_steps, omega0),
      "one-axis IGP");
}

/// Endpoint where 2 cos(Theta/4) cosh(omega0/T) + 1 changes sign; lies in
/// [2pi, 8pi/3], reaching the ends as T -> 0 and T -> infinity.
inline double critical_theta_one_axis(double temperature, double omega0 = 1.0) {
  if (!(temperature > 0.0)) {
    throw invalid_spec_error("critical_theta_one_axis needs T > 0");
  }
  const double sech = 1.0 / std::cosh(omega0 / temperature);
  return 4.0 * std::acos(-0.5 * sech);
}

/// 2 cos(2t)/(sech x + 2) + (1 - 2i sin(2t))/(2 cosh x + 1), t = tan(theta_f/2).
inline complex igp_two_axis_argument(double theta_f, double beta,
                                     double omega0 = 1.0) {
  detail::check_beta(beta, omega0);
  if (!(theta_f >= 0.0 && theta_f <= two_axis_theta_max)) {
    throw invalid_spec_error("two-axis theta_f must lie in [0, 3pi/4]");
  }
  const double x = beta * omega0;
  const double a = 2.0 * std::tan(0.5 * theta_f);
  const double ch = std::cosh(x);
  return 2.0 * std::cos(a) / (1.0 / ch + 2.0) +
         complex(1.0, -2.0 * std::sin(a)) / (2.0 * ch + 1.0);
}

inline double igp_two_axis_closed(double theta_f, double beta, double omega0 = 1.0) {
  return detail::checked_arg(igp_two_axis_argument(theta_f, beta, omega0),
                             "two-axis IGP");
}

/// Direct arg Tr[rho(0) U(t_final)] with the family's unitary. Refuses when
/// the evolution is not parallel transport, since the result would then be
/// a total phase rather than a geometric one.
inline complex igp_numeric_trace(const EvolutionSpec& spec, double beta,
                                 double omega0 = 1.0) {
  const TransportReport rep = transport_report(spec, beta, omega0);
  const double worst = std::max(rep.weak_residual, rep.strong_residual);
  if (worst > transport_tolerance) {
    throw transport_violation_error("evolution violates parallel transport", worst);
  }
  const auto th = thermal_state(spec.j, beta, omega0);
  const detail::EvolutionUnitary v(spec);
  const ComplexMatrix v0 = v(spec.start);
  return (conjugate(v0, th.rho) * v(spec.endpoint) * v0.adjoint()).trace();
}

inline double igp_numeric(const EvolutionSpec& spec, double beta,
                          double omega0 = 1.0) {
  const complex tr = igp_numeric_trace(spec, beta, omega0);
  if (std::abs(tr) < undefined_trace) {
    throw undefined_phase_error("total phase undefined", std::abs(tr));
  }
  return wrap_phase(std::arg(tr));
}

}  // namespace geomphase
