#pragma once

// Parameter sweeps, jump detection, critical-point bisection and 2-D grids.
// Points are evaluated independently (optionally on several threads) and
// gathered by index, so output order never depends on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "geomphase/error.hpp"
#include "geomphase/igp.hpp"
#include "geomphase/phase.hpp"
#include "geomphase/spin_algebra.hpp"
#include "geomphase/states.hpp"
#include "geomphase/uhlmann.hpp"

namespace geomphase {

enum class Quantity { uhlmann, igp };
enum class Axis { temperature, endpoint };
enum class Spacing { linear, log };
/// closed_form: analytic expressions. numeric: Trotter holonomy (Uhlmann) or
/// the direct transported trace (IGP).
enum class Method { closed_form, numeric };
enum class Flag { ok, critical, unconverged };

inline const char* to_string(Quantity q) { return q == Quantity::uhlmann ? "uhlmann" : "igp"; }
inline const char* to_string(Axis a) { return a == Axis::temperature ? "temperature" : "endpoint"; }
inline const char* to_string(Spacing s) { return s == Spacing::linear ? "linear" : "log"; }
inline const char* to_string(Method m) { return m == Method::closed_form ? "closed" : "numeric"; }
inline const char* to_string(Flag f) {
  switch (f) {
    case Flag::ok: return "ok";
    case Flag::critical: return "critical";
    case Flag::unconverged: return "unconverged";
  }
  return "?";
}

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
  int n = 2;
  Spacing spacing = Spacing::linear;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / (n - 1);
      v[i] = spacing == Spacing::linear
                 ? lo + (hi - lo) * f
                 : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * f);
    }
    v.front() = lo;
    v.back() = hi;
    return v;
  }
};

struct SolverOptions {
  int n_steps = 4096;
  bool refine = false;
  double tolerance = 1e-6;
  int max_steps = 1 << 14;  // refinement ceiling
  ConnectionMethod connection = ConnectionMethod::closed_form;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepSpec {
  Quantity quantity = Quantity::uhlmann;
  Family family = Family::css;
  SpinJ j = SpinJ(3);
  double omega0 = 1.0;

  double theta = 0.5 * pi;        // latitude of the coherent-state Uhlmann loop
  double phi = 0.0;               // longitude of the coherent-state IGP path
  double theta_f = 0.75 * pi;     // css / two-axis IGP endpoint
  double theta_cap_f = 3.0 * pi;  // one-axis IGP endpoint
  double temperature = 1.0;       // fixed T when sweeping the endpoint

  Axis axis = Axis::temperature;
  AxisRange range{0.05, 1.0, 200, Spacing::linear};
  Method method = Method::numeric;
  SolverOptions solver;
  double jump_threshold = 0.5 * pi;
  double critical_threshold = 1e-9;
};

struct PointResult {
  double axis = 0.0;
  double phase = std::numeric_limits<double>::quiet_NaN();  // (-pi, pi]
  double trace_magnitude = 0.0;
  Flag flag = Flag::ok;
};

struct JumpEvent {
  double axis_value_lo = 0.0;
  double axis_value_hi = 0.0;
  double phase_lo = 0.0;
  double phase_hi = 0.0;
  double magnitude = 0.0;
};

struct PhaseScan {
  SweepSpec spec;
  std::vector<PointResult> rows;
  std::vector<JumpEvent> jumps;
};

// ---------------------------------------------------------------------------

/// Lowest temperature any sweep accepts (the full-rank floor).
inline constexpr double sweep_temperature_floor = 1e-3;

inline void validate(const SweepSpec& s) {
  const auto& r = s.range;
  if (!(r.lo < r.hi)) throw invalid_spec_error("range needs lo < hi");
  if (r.n < 2) throw invalid_spec_error("range needs at least 2 points");
  if (r.spacing == Spacing::log && !(r.lo > 0.0)) {
    throw invalid_spec_error("log spacing needs a positive lower bound");
  }
  if (!(s.omega0 > 0.0)) throw invalid_spec_error("omega0 must be positive");
  if (!(s.jump_threshold > 0.0 && s.jump_threshold <= pi)) {
    throw invalid_spec_error("jump threshold must lie in (0, pi]");
  }
  const double t_lo = s.axis == Axis::temperature ? r.lo : s.temperature;
  if (!(t_lo >= sweep_temperature_floor)) {
    throw invalid_spec_error("temperatures must be >= 1e-3 (full-rank floor)");
  }
  if (s.solver.n_steps < 16) throw invalid_spec_error("n_steps must be >= 16");
  // Spec-wide numerical preconditions; these fail the whole sweep.
  (void)thermal_state(s.j, 1.0 / t_lo, s.omega0);
  if (s.quantity == Quantity::uhlmann && s.family == Family::css) {
    detail::check_pole(s.axis == Axis::endpoint ? std::max(std::fabs(r.lo), std::fabs(r.hi))
                                                : s.theta);
  }

  if (s.quantity == Quantity::uhlmann) {
    if (s.axis == Axis::endpoint && s.family != Family::css) {
      throw invalid_spec_error("only the coherent-state Uhlmann loop has an endpoint axis (its latitude)");
    }
    if (s.method == Method::closed_form &&
        (s.family != Family::css || s.axis != Axis::temperature ||
         std::fabs(s.theta - 0.5 * pi) > 1e-12)) {
      throw invalid_spec_error("closed-form Uhlmann phase exists only for the coherent-state equator");
    }
    if (s.family != Family::css && s.solver.connection == ConnectionMethod::closed_form &&
        s.j.two_j() != 2) {
      throw invalid_spec_error("closed-form squeezing connections are for j = 1; use the spectral connection");
    }
  } else {
    const double e_lo = s.axis == Axis::endpoint ? r.lo
                        : s.family == Family::one_axis ? s.theta_cap_f
                                                       : s.theta_f;
    const double e_hi = s.axis == Axis::endpoint ? r.hi : e_lo;
    const double limit = s.family == Family::css        ? pi
                         : s.family == Family::one_axis ? 4.0 * pi
                                                        : two_axis_theta_max;
    const bool open = s.family == Family::css;
    if (e_lo < 0.0 || (open ? e_hi >= limit : e_hi > limit)) {
      throw invalid_spec_error(std::string("endpoint outside the ") + to_string(s.family) +
                               " IGP domain");
    }
  }
  if (s.quantity == Quantity::igp && s.method == Method::closed_form) {
    if (s.family == Family::css && s.j.two_j() != 3) {
      throw invalid_spec_error("closed-form coherent-state IGP is for j = 3/2");
    }
    if (s.family != Family::css && s.j.two_j() != 2) {
      throw invalid_spec_error("closed-form squeezing IGP is for j = 1");
    }
  }
}

namespace detail {

inline double endpoint_for(const SweepSpec& s) {
  if (s.quantity == Quantity::uhlmann) return s.theta;
  return s.family == Family::one_axis ? s.theta_cap_f : s.theta_f;
}

inline PointResult finish(double axis, complex value, double threshold) {
  PointResult r;
  r.axis = axis;
  r.trace_magnitude = std::abs(value);
  if (r.trace_magnitude < threshold) {
    r.flag = Flag::critical;
  } else {
    r.phase = wrap_phase(std::arg(value));
  }
  return r;
}

inline PointResult evaluate_unchecked(const SweepSpec& s, double x) {
  const double temperature = s.axis == Axis::temperature ? x : s.temperature;
  const double endpoint = s.axis == Axis::endpoint ? x : endpoint_for(s);
  const double beta = 1.0 / temperature;

  if (s.quantity == Quantity::uhlmann) {
    if (s.method == Method::closed_form) {
      return finish(x, css_equator_trace(s.j, beta, s.omega0), s.critical_threshold);
    }
    const UhlmannLoop loop = [&] {
      switch (s.family) {
        case Family::css:
          return css_uhlmann_loop(s.j, endpoint, beta, s.omega0, s.solver.connection);
        case Family::one_axis:
          return one_axis_uhlmann_loop(s.j, beta, s.omega0, s.solver.connection);
        case Family::two_axis:
          break;
      }
      return two_axis_uhlmann_loop(s.j, beta, s.omega0, s.solver.connection);
    }();
    HolonomyOptions opt;
    opt.n_steps = s.solver.n_steps;
    opt.refine = s.solver.refine;
    opt.tolerance = s.solver.tolerance;
    opt.max_steps = std::max(s.solver.max_steps, s.solver.n_steps);
    const HolonomyResult h = uhlmann_phase(loop, opt);
    PointResult r;
    r.axis = x;
    r.trace_magnitude = h.trace_magnitude;
    if (h.trace_magnitude < s.critical_threshold) {
      r.flag = Flag::critical;
      return r;
    }
    r.phase = h.phase;
    r.flag = h.converged ? Flag::ok : Flag::unconverged;
    return r;
  }

  if (s.method == Method::closed_form) {
    switch (s.family) {
      case Family::css:
        return finish(x, igp_css_argument(endpoint, beta, s.omega0), s.critical_threshold);
      case Family::one_axis:
        return finish(x, igp_one_axis_argument(endpoint, beta, s.omega0), s.critical_threshold);
      case Family::two_axis:
        return finish(x, igp_two_axis_argument(endpoint, beta, s.omega0), s.critical_threshold);
    }
  }
  EvolutionSpec ev;
  ev.family = s.family;
  ev.j = s.j;
  ev.endpoint = endpoint;
  ev.fixed = s.family == Family::css ? s.phi : 0.5 * pi;
  ev.n_steps = s.solver.n_steps;
  return finish(x, igp_numeric_trace(ev, beta, s.omega0), s.critical_threshold);
}

}  // namespace detail

/// One point of a sweep. Undefined phases come back flagged as critical and
/// other numerical failures as unconverged; neither throws.
inline PointResult evaluate_point(const SweepSpec& s, double axis_value) {
  try {
    return detail::evaluate_unchecked(s, axis_value);
  } catch (const undefined_phase_error& e) {
    PointResult r;
    r.axis = axis_value;
    r.trace_magnitude = e.trace_magnitude();
    r.flag = Flag::critical;
    return r;
  } catch (const numerical_error&) {
    PointResult r;
    r.axis = axis_value;
    r.flag = Flag::unconverged;
    return r;
  }
}

/// Compares consecutive rows with a defined phase; flagged rows in between
/// widen the bracket rather than being interpolated.
inline std::vector<JumpEvent> detect_jumps(const std::vector<PointResult>& rows,
                                           double threshold) {
  std::vector<JumpEvent> jumps;
  const PointResult* prev = nullptr;
  for (const auto& r : rows) {
    if (std::isnan(r.phase)) continue;
    if (prev) {
      const double d = phase_distance(prev->phase, r.phase);
      if (d > threshold) {
        jumps.push_back({prev->axis, r.axis, prev->phase, r.phase, d});
      }
    }
    prev = &r;
  }
  return jumps;
}

template <class F>
void parallel_for_index(std::size_t n, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline PhaseScan sweep(const SweepSpec& spec) {
  validate(spec);
  PhaseScan scan;
  scan.spec = spec;
  const std::vector<double> xs = spec.range.values();
  scan.rows.resize(xs.size());
  parallel_for_index(xs.size(), spec.solver.threads,
                     [&](std::size_t i) { scan.rows[i] = evaluate_point(spec, xs[i]); });
  scan.jumps = detect_jumps(scan.rows, spec.jump_threshold);
  return scan;
}

/// Bisection tolerance used when none is given: 1e-4 for closed forms and
/// 1e-3 for Trotter or transported-trace quantities.
inline double default_critical_tolerance(const SweepSpec& spec) {
  return spec.method == Method::closed_form ? 1e-4 : 1e-3;
}

struct CriticalResult {
  double lo = 0.0;
  double hi = 0.0;
  double estimate() const { return 0.5 * (lo + hi); }
  int evaluations = 0;
};

/// Bisects the jump locus inside (lo, hi) along spec.axis.
inline CriticalResult find_critical(const SweepSpec& spec, double lo, double hi,
                                    std::optional<double> tolerance = std::nullopt) {
  SweepSpec s = spec;
  s.range = AxisRange{std::min(lo, hi), std::max(lo, hi), 2, Spacing::linear};
  validate(s);
  const double tol = tolerance.value_or(default_critical_tolerance(s));
  if (!(tol > 0.0)) throw invalid_spec_error("bisection tolerance must be positive");

  CriticalResult out{s.range.lo, s.range.hi};
  PointResult a = evaluate_point(s, out.lo);
  PointResult b = evaluate_point(s, out.hi);
  out.evaluations = 2;
  if (std::isnan(a.phase) || std::isnan(b.phase)) {
    throw invalid_spec_error("bracket ends must have defined phases");
  }
  if (phase_distance(a.phase, b.phase) <= s.jump_threshold) {
    throw invalid_spec_error("no jump in bracket");
  }
  while (out.hi - out.lo > tol) {
    const double mid = 0.5 * (out.lo + out.hi);
    const PointResult m = evaluate_point(s, mid);
    ++out.evaluations;
    if (std::isnan(m.phase)) {
      // The trace vanishes here: this is the locus itself.
      out.lo = out.hi = mid;
      break;
    }
    if (phase_distance(m.phase, a.phase) > s.jump_threshold) {
      out.hi = mid;
    } else {
      out.lo = mid;
      a = m;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grids: rows are temperatures, columns are endpoints.

struct GridSpec {
  SweepSpec base;  // quantity, family, fixed parameters, solver
  AxisRange temperatures{0.05, 1.0, 40, Spacing::linear};
  AxisRange endpoints{0.0, 1.0, 40, Spacing::linear};
};

struct GridJump {
  Axis along = Axis::endpoint;  // direction in which the phase jumps
  double fixed = 0.0;           // the other coordinate
  JumpEvent event;
};

struct PhaseGrid {
  GridSpec spec;
  std::vector<double> temperatures;
  std::vector<double> endpoints;
  std::vector<PointResult> cells;  // row-major, temperature index outer
  std::vector<GridJump> jumps;

  const PointResult& at(std::size_t ti, std::size_t ei) const {
    return cells[ti * endpoints.size() + ei];
  }
};

/// The endpoint sweep that forms one grid row.
inline SweepSpec grid_row_spec(const GridSpec& g, double temperature) {
  SweepSpec s = g.base;
  s.axis = Axis::endpoint;
  s.range = g.endpoints;
  s.temperature = temperature;
  return s;
}

inline PhaseGrid grid(const GridSpec& g) {
  PhaseGrid out;
  out.spec = g;
  out.temperatures = g.temperatures.values();
  out.endpoints = g.endpoints.values();
  {
    SweepSpec probe = grid_row_spec(g, g.temperatures.lo);
    validate(probe);
    probe.axis = Axis::temperature;
    probe.range = g.temperatures;
    validate(probe);
  }
  const std::size_t nt = out.temperatures.size(), ne = out.endpoints.size();
  out.cells.resize(nt * ne);
  parallel_for_index(nt * ne, g.base.solver.threads, [&](std::size_t idx) {
    const std::size_t ti = idx / ne, ei = idx % ne;
    out.cells[idx] = evaluate_point(grid_row_spec(g, out.temperatures[ti]), out.endpoints[ei]);
  });

  std::vector<PointResult> line;
  for (std::size_t ti = 0; ti < nt; ++ti) {
    line.assign(out.cells.begin() + ti * ne, out.cells.begin() + (ti + 1) * ne);
    for (const auto& e : detect_jumps(line, g.base.jump_threshold)) {
      out.jumps.push_back({Axis::endpoint, out.temperatures[ti], e});
    }
  }
  for (std::size_t ei = 0; ei < ne; ++ei) {
    line.clear();
    for (std::size_t ti = 0; ti < nt; ++ti) {
      PointResult r = out.at(ti, ei);
      r.axis = out.temperatures[ti];
      line.push_back(r);
    }
    for (const auto& e : detect_jumps(line, g.base.jump_threshold)) {
      out.jumps.push_back({Axis::temperature, out.endpoints[ei], e});
    }
  }
  return out;
}

}  // namespace geomphase
