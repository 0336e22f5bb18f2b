#pragma once

// Uhlmann connections and holonomies.
//
// A loop of density matrices rho(t) = U(t) rho_th U(t)^dagger is discretised
// into n segments; each segment contributes exp(-A_U) with A_U evaluated at
// the segment midpoint, and later segments multiply on the left. The phase is
// arg Tr[rho(0) * holonomy].

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "geomphase/error.hpp"
#include "geomphase/phase.hpp"
#include "geomphase/spin_algebra.hpp"
#include "geomphase/states.hpp"

namespace geomphase {

enum class Family { css, one_axis, two_axis };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::css: return "css";
    case Family::one_axis: return "oneaxis";
    case Family::two_axis: return "twoaxis";
  }
  return "?";
}

using PathPoint = std::variant<SpherePoint, SqueezeAngle>;

inline PathPoint midpoint(const PathPoint& a, const PathPoint& b) {
  if (std::holds_alternative<SqueezeAngle>(a)) {
    return SqueezeAngle{0.5 * (std::get<SqueezeAngle>(a).value +
                               std::get<SqueezeAngle>(b).value)};
  }
  const auto& p = std::get<SpherePoint>(a);
  const auto& q = std::get<SpherePoint>(b);
  return SpherePoint{0.5 * (p.theta + q.theta), 0.5 * (p.phi + q.phi)};
}

/// A parameter curve t in [0, 1] -> point, sampled on demand so that the
/// holonomy can refine its step count.
struct ParameterPath {
  Family family;
  std::function<PathPoint(double)> curve;
  bool closed = true;

  std::vector<PathPoint> samples(int n_segments) const {
    if (n_segments < 1) throw invalid_spec_error("path needs >= 1 segment");
    std::vector<PathPoint> out;
    out.reserve(static_cast<std::size_t>(n_segments) + 1);
    for (int k = 0; k <= n_segments; ++k) {
      out.push_back(curve(static_cast<double>(k) / n_segments));
    }
    return out;
  }
};

/// Latitude circle theta = const, phi: 0 -> 2pi.
inline ParameterPath css_latitude_loop(double theta) {
  return {Family::css,
          [theta](double t) -> PathPoint { return SpherePoint{theta, two_pi * t}; },
          true};
}

/// Theta: 0 -> period (4pi closes the loop for integer j).
inline ParameterPath one_axis_loop(double period = 4.0 * pi) {
  return {Family::one_axis,
          [period](double t) -> PathPoint { return SqueezeAngle{period * t}; },
          true};
}

/// Equator theta = pi/2, phi: 0 -> 2pi.
inline ParameterPath two_axis_equator_loop() {
  return {Family::two_axis,
          [](double t) -> PathPoint { return SpherePoint{0.5 * pi, two_pi * t}; },
          true};
}

/// The unitary that maps rho_th to the state at a path point.
inline ComplexMatrix family_unitary(Family family, const SpinOperatorSet& ops,
                                    const PathPoint& p) {
  switch (family) {
    case Family::css:
      return displacement_operator(ops, std::get<SpherePoint>(p));
    case Family::one_axis:
      return matrix_exponential(-0.5 * I * std::get<SqueezeAngle>(p).value *
                                (ops.jx * ops.jx));
    case Family::two_axis:
      return two_axis_squeeze(ops, std::get<SpherePoint>(p));
  }
  throw invalid_spec_error("unknown family");
}

/// Throws unless the generated unitaries at both ends of a closed path agree.
inline void check_closed(const ParameterPath& path, SpinJ j) {
  if (!path.closed) return;
  const auto ops = build_spin_operators(j);
  const double gap = max_abs(family_unitary(path.family, ops, path.curve(0.0)) -
                             family_unitary(path.family, ops, path.curve(1.0)));
  if (gap > 1e-10) {
    throw invalid_spec_error("path is marked closed but its end unitaries differ by " +
                             std::to_string(gap));
  }
}

/// A_U contracted with one step's displacement. Anti-Hermitian.
struct ConnectionStep {
  ComplexMatrix a_dt;
};

using ConnectionFn =
    std::function<ConnectionStep(const PathPoint& from, const PathPoint& to)>;

// ---------------------------------------------------------------------------
// Thermal coupling coefficients

/// Coupling between levels with |m - n| = 1: 1 - sech(beta omega0 / 2).
inline double chi_nearest(double beta, double omega0 = 1.0) {
  detail::check_beta(beta, omega0);
  return 1.0 - 1.0 / std::cosh(0.5 * beta * omega0);
}

/// Coupling between levels with |m - n| = 2:
/// (e^{x/2} - e^{-x/2})^2 / (e^x + e^{-x}) = 1 - sech(x), x = beta omega0.
inline double chi_skip2(double beta, double omega0 = 1.0) {
  detail::check_beta(beta, omega0);
  return 1.0 - 1.0 / std::cosh(beta * omega0);
}

// ---------------------------------------------------------------------------
// Connections

/// Generic route: A_U = -sum |m><m| [d sqrt(rho), sqrt(rho)] |n><n| / (l_m + l_n)
/// with d sqrt(rho) taken between the segment ends and the spectral data at
/// the segment midpoint.
template <class DensitySampler>
ConnectionStep connection_spectral(const DensitySampler& rho_at,
                                   const PathPoint& from, const PathPoint& to) {
  constexpr double rank_floor = 1e-14;
  auto sqrt_psd = [&](const ComplexMatrix& rho) {
    const auto eig = hermitian_eigendecomposition(rho);
    if (eig.values.minCoeff() < rank_floor) {
      throw numerical_error("density matrix is rank deficient (eigenvalue " +
                            std::to_string(eig.values.minCoeff()) + ")");
    }
    return std::make_pair(
        hermitian_function(eig, [](double l) { return complex(std::sqrt(l)); }),
        eig);
  };
  const ComplexMatrix s0 = sqrt_psd(rho_at(from)).first;
  const ComplexMatrix s1 = sqrt_psd(rho_at(to)).first;
  const auto [sm, eig] = sqrt_psd(rho_at(midpoint(from, to)));
  const ComplexMatrix ds = s1 - s0;
  const ComplexMatrix c = eig.vectors.adjoint() * (ds * sm - sm * ds) * eig.vectors;
  const Eigen::Index d = c.rows();
  ComplexMatrix a(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      a(m, n) = -c(m, n) / (eig.values(m) + eig.values(n));
    }
  }
  return {eig.vectors * a * eig.vectors.adjoint()};
}

template <class DensitySampler>
ConnectionStep connection_spectral(const DensitySampler& rho_at,
                                   const std::vector<PathPoint>& samples,
                                   std::size_t step) {
  if (step + 1 >= samples.size()) {
    throw invalid_spec_error("connection step index past the end of the path");
  }
  return connection_spectral(rho_at, samples[step], samples[step + 1]);
}

/// Coherent-state connection at a sphere point for displacement (dtheta, dphi):
///   i chi [(Jx cos phi + Jy sin phi) cos theta + Jz sin theta] sin theta dphi
/// + i chi (Jx sin phi - Jy cos phi) dtheta
inline ConnectionStep connection_css(const SpinOperatorSet& ops, SpherePoint p,
                                     double d_theta, double d_phi, double beta,
                                     double omega0 = 1.0) {
  const double chi = chi_nearest(beta, omega0);
  const double st = std::sin(p.theta), ct = std::cos(p.theta);
  const double sp = std::sin(p.phi), cp = std::cos(p.phi);
  ComplexMatrix a =
      (I * chi * st * d_phi) * ((ops.jx * cp + ops.jy * sp) * ct + ops.jz * st) +
      (I * chi * d_theta) * (ops.jx * sp - ops.jy * cp);
  return {std::move(a)};
}

inline ConnectionStep connection_css(SpinJ j, SpherePoint p, double d_theta,
                                     double d_phi, double beta,
                                     double omega0 = 1.0) {
  return connection_css(build_spin_operators(j), p, d_theta, d_phi, beta, omega0);
}

/// j = 1 one-axis connection (i chi / 4) [Jx^2 - S Jy^2 S^dagger] dTheta.
inline ConnectionStep connection_one_axis(SpinJ j, double theta_cap,
                                          double d_theta_cap, double beta,
                                          double omega0 = 1.0) {
  if (j.two_j() != 2) {
    throw invalid_spec_error("closed-form one-axis connection is only for j = 1");
  }
  const double chi = chi_skip2(beta, omega0);
  const auto ops = build_spin_operators(j);
  const ComplexMatrix jx2 = ops.jx * ops.jx;
  const ComplexMatrix s = matrix_exponential(-0.5 * I * theta_cap * jx2);
  return {(I * chi * 0.25 * d_theta_cap) *
          (jx2 - s * ops.jy * ops.jy * s.adjoint())};
}

/// j = 1 two-axis connection along the equator theta = pi/2, where
/// 2 tan(theta/2) = 2 makes the entries constants in sin(4), sin(8).
inline ConnectionStep connection_two_axis_equator(double phi, double d_phi,
                                                  double beta,
                                                  double omega0 = 1.0) {
  const double chi = chi_skip2(beta, omega0);
  const double s4 = std::sin(4.0), s8 = std::sin(8.0);
  ComplexMatrix a = ComplexMatrix::Zero(3, 3);
  a(0, 0) = -0.5 * s4 * s4;
  a(2, 2) = 0.5 * s4 * s4;
  a(0, 2) = 0.25 * s8 * std::exp(I * phi);
  a(2, 0) = 0.25 * s8 * std::exp(-I * phi);
  return {(I * chi * d_phi) * a};
}

// ---------------------------------------------------------------------------
// Holonomy

struct HolonomyOptions {
  int n_steps = 4096;
  bool refine = false;
  double tolerance = 1e-6;
  int max_steps = 1 << 20;
};

struct HolonomyResult {
  ComplexMatrix holonomy;
  double phase = 0.0;            // (-pi, pi]
  double trace_magnitude = 0.0;  // |Tr[rho(0) holonomy]|
  int n_steps = 0;
  bool converged = false;
};

/// Trace magnitude below which arg() is treated as undefined.
inline constexpr double undefined_trace = 1e-12;

/// Path-ordered product prod_{k=n-1..0} exp(-A_U(segment k)).
inline ComplexMatrix ordered_product(const ParameterPath& path,
                                     const ConnectionFn& connection, int n_steps,
                                     Eigen::Index dim) {
  const auto pts = path.samples(n_steps);
  ComplexMatrix g = ComplexMatrix::Identity(dim, dim);
  for (int k = 0; k < n_steps; ++k) {
    const ConnectionStep step = connection(pts[k], pts[k + 1]);
    g = matrix_exponential(-step.a_dt) * g;
  }
  return g;
}

/// Without refine, convergence is judged against a run with n/2 steps;
/// with refine, n doubles until successive phases agree or max_steps is hit.
inline HolonomyResult holonomy(const ParameterPath& path,
                               const ConnectionFn& connection,
                               const ComplexMatrix& rho0,
                               const HolonomyOptions& opt = {}) {
  if (!path.closed) throw invalid_spec_error("holonomy requires a closed path");
  if (opt.n_steps < 16) throw invalid_spec_error("holonomy needs >= 16 steps");

  auto evaluate = [&](int n) {
    HolonomyResult r;
    r.holonomy = ordered_product(path, connection, n, rho0.rows());
    const complex tr = (rho0 * r.holonomy).trace();
    r.trace_magnitude = std::abs(tr);
    r.n_steps = n;
    if (r.trace_magnitude < undefined_trace) {
      throw undefined_phase_error("phase undefined at this point", r.trace_magnitude);
    }
    r.phase = wrap_phase(std::arg(tr));
    return r;
  };

  if (!opt.refine) {
    HolonomyResult coarse = evaluate(opt.n_steps / 2);
    HolonomyResult fine = evaluate(opt.n_steps);
    fine.converged = phase_distance(coarse.phase, fine.phase) < opt.tolerance;
    return fine;
  }

  HolonomyResult prev = evaluate(opt.n_steps);
  while (2LL * prev.n_steps <= opt.max_steps) {
    HolonomyResult next = evaluate(2 * prev.n_steps);
    if (phase_distance(prev.phase, next.phase) < opt.tolerance) {
      next.converged = true;
      return next;
    }
    prev = std::move(next);
  }
  prev.converged = false;
  return prev;
}

// ---------------------------------------------------------------------------
// Family loops

enum class ConnectionMethod { closed_form, spectral };

/// Everything holonomy() needs for one family at one temperature.
struct UhlmannLoop {
  SpinJ j;
  ParameterPath path;
  ConnectionFn connection;
  ComplexMatrix rho0;
};

/// Lowest temperature (units of omega0) accepted for Trotter evaluation.
inline constexpr double trotter_temperature_floor = 1e-3;

namespace detail {

inline void check_trotter_floor(double beta, double omega0) {
  check_beta(beta, omega0);
  if (1.0 / (beta * omega0) < trotter_temperature_floor) {
    throw numerical_error("temperature below the full-rank floor for Trotter runs");
  }
}

inline ConnectionFn spectral_connection_fn(Family family, SpinJ j,
                                           const ThermalState& th) {
  auto ops = std::make_shared<SpinOperatorSet>(build_spin_operators(j));
  auto rho = std::make_shared<ComplexMatrix>(th.rho);
  auto sampler = [family, ops, rho](const PathPoint& p) {
    return conjugate(family_unitary(family, *ops, p), *rho);
  };
  return [sampler](const PathPoint& a, const PathPoint& b) {
    return connection_spectral(sampler, a, b);
  };
}

}  // namespace detail

inline UhlmannLoop css_uhlmann_loop(SpinJ j, double theta, double beta,
                                    double omega0 = 1.0,
                                    ConnectionMethod method = ConnectionMethod::closed_form) {
  detail::check_trotter_floor(beta, omega0);
  detail::check_pole(theta);
  const auto th = thermal_state(j, beta, omega0);
  const auto ops = build_spin_operators(j);
  ParameterPath path = css_latitude_loop(theta);
  ComplexMatrix rho0 = conjugate(family_unitary(Family::css, ops, path.curve(0.0)), th.rho);
  ConnectionFn fn;
  if (method == ConnectionMethod::spectral) {
    fn = detail::spectral_connection_fn(Family::css, j, th);
  } else {
    fn = [ops, beta, omega0](const PathPoint& a, const PathPoint& b) {
      const auto& p = std::get<SpherePoint>(a);
      const auto& q = std::get<SpherePoint>(b);
      return connection_css(ops, std::get<SpherePoint>(midpoint(a, b)),
                            q.theta - p.theta, q.phi - p.phi, beta, omega0);
    };
  }
  return {j, std::move(path), std::move(fn), std::move(rho0)};
}

inline UhlmannLoop one_axis_uhlmann_loop(SpinJ j, double beta, double omega0 = 1.0,
                                         ConnectionMethod method = ConnectionMethod::closed_form) {
  detail::check_trotter_floor(beta, omega0);
  const auto th = thermal_state(j, beta, omega0);
  ParameterPath path = one_axis_loop();
  ConnectionFn fn;
  if (method == ConnectionMethod::spectral) {
    fn = detail::spectral_connection_fn(Family::one_axis, j, th);
  } else {
    if (j.two_j() != 2) {
      throw invalid_spec_error("closed-form one-axis connection is only for j = 1");
    }
    // Same expression as connection_one_axis, with the operators hoisted.
    auto sq = std::make_shared<OneAxisSqueezer>(j);
    const auto ops = build_spin_operators(j);
    const ComplexMatrix jy2 = ops.jy * ops.jy;
    const double chi = chi_skip2(beta, omega0);
    fn = [sq, jy2, chi](const PathPoint& a, const PathPoint& b) {
      const double ta = std::get<SqueezeAngle>(a).value;
      const double tb = std::get<SqueezeAngle>(b).value;
      const ComplexMatrix s = (*sq)(0.5 * (ta + tb));
      return ConnectionStep{(I * chi * 0.25 * (tb - ta)) *
                            (sq->jx_squared() - s * jy2 * s.adjoint())};
    };
  }
  return {j, std::move(path), std::move(fn), th.rho};
}

inline UhlmannLoop two_axis_uhlmann_loop(SpinJ j, double beta, double omega0 = 1.0,
                                         ConnectionMethod method = ConnectionMethod::closed_form) {
  detail::check_trotter_floor(beta, omega0);
  const auto th = thermal_state(j, beta, omega0);
  const auto ops = build_spin_operators(j);
  ParameterPath path = two_axis_equator_loop();
  ComplexMatrix rho0 =
      conjugate(family_unitary(Family::two_axis, ops, path.curve(0.0)), th.rho);
  ConnectionFn fn;
  if (method == ConnectionMethod::spectral) {
    fn = detail::spectral_connection_fn(Family::two_axis, j, th);
  } else {
    if (j.two_j() != 2) {
      throw invalid_spec_error("closed-form two-axis connection is only for j = 1");
    }
    fn = [beta, omega0](const PathPoint& a, const PathPoint& b) {
      const double pa = std::get<SpherePoint>(a).phi;
      const double pb = std::get<SpherePoint>(b).phi;
      return connection_two_axis_equator(0.5 * (pa + pb), pb - pa, beta, omega0);
    };
  }
  return {j, std::move(path), std::move(fn), std::move(rho0)};
}

inline HolonomyResult uhlmann_phase(const UhlmannLoop& loop,
                                    const HolonomyOptions& opt = {}) {
  return holonomy(loop.path, loop.connection, loop.rho0, opt);
}

// ---------------------------------------------------------------------------
// Closed forms

/// On the equator A_U = i chi J_z dphi is constant, so the ordered exponential
/// is exp(-2 pi i chi J_z) and the trace is taken against rho(0) = D rho_th D^dagger.
inline complex css_equator_trace(SpinJ j, double beta, double omega0 = 1.0) {
  const auto th = thermal_state(j, beta, omega0);
  const auto ops = build_spin_operators(j);
  const ComplexMatrix d = displacement_operator(ops, SpherePoint{0.5 * pi, 0.0});
  const double chi = chi_nearest(beta, omega0);
  Eigen::VectorXcd hol(j.dim());
  for (Eigen::Index i = 0; i < j.dim(); ++i) hol(i) = std::exp(-I * two_pi * chi * j.m(i));
  return (conjugate(d, th.rho) * hol.asDiagonal()).trace();
}

inline double uhlmann_phase_css_equator_closed(SpinJ j, double beta,
                                               double omega0 = 1.0) {
  const complex tr = css_equator_trace(j, beta, omega0);
  if (std::abs(tr) < undefined_trace) {
    throw undefined_phase_error("equator phase undefined (critical point)", std::abs(tr));
  }
  return wrap_phase(std::arg(tr));
}

/// Ground-state limit of the coherent-state loop at fixed theta:
/// 4 pi j sin^2(theta/2), reduced to (-pi, pi].
inline double berry_phase_css(SpinJ j, double theta) {
  if (theta < 0.0 || theta >= pi) {
    throw invalid_spec_error("berry_phase_css needs 0 <= theta < pi");
  }
  const double s = std::sin(0.5 * theta);
  return wrap_phase(4.0 * pi * j.value() * s * s);
}

}  // namespace geomphase
