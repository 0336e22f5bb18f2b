#pragma once

// CSV and JSON writers for scans and grids. Numbers are printed with 12
// significant digits, phases in [0, 2pi), undefined phases as "nan".

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "geomphase/error.hpp"
#include "geomphase/phase.hpp"
#include "geomphase/scan.hpp"

namespace geomphase {

enum class Format { csv, json };

using json = nlohmann::ordered_json;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

/// Values that would print as 2pi are printed as 0 instead.
inline double exported_phase(double p) {
  const double r = wrap_phase_positive(p);
  return format_number(r) == format_number(two_pi) ? 0.0 : r;
}

inline std::string format_phase(double p) {
  return std::isnan(p) ? "nan" : format_number(exported_phase(p));
}

namespace detail {

inline json json_number(double v) {
  if (std::isnan(v)) return "nan";
  return std::strtod(format_number(v).c_str(), nullptr);
}

inline json json_phase(double p) {
  if (std::isnan(p)) return "nan";
  return json_number(exported_phase(p));
}

inline json json_range(const AxisRange& r) {
  return {{"lo", json_number(r.lo)},
          {"hi", json_number(r.hi)},
          {"n", r.n},
          {"spacing", to_string(r.spacing)}};
}

inline json json_jump(const JumpEvent& e) {
  return {{"lo", json_number(e.axis_value_lo)},
          {"hi", json_number(e.axis_value_hi)},
          {"magnitude", json_number(e.magnitude)}};
}

}  // namespace detail

inline json to_json(const SweepSpec& s) {
  json j = {
      {"quantity", to_string(s.quantity)},
      {"family", to_string(s.family)},
      {"two_j", s.j.two_j()},
      {"omega0", detail::json_number(s.omega0)},
      {"axis", to_string(s.axis)},
      {"range", detail::json_range(s.range)},
      {"method", to_string(s.method)},
      {"steps", s.solver.n_steps},
      {"refine", s.solver.refine},
      {"connection", s.solver.connection == ConnectionMethod::closed_form ? "closed" : "spectral"},
      {"jump_threshold", detail::json_number(s.jump_threshold)},
  };
  if (s.quantity == Quantity::uhlmann) {
    if (s.family == Family::css) j["theta"] = detail::json_number(s.theta);
  } else if (s.family == Family::one_axis) {
    j["Theta_f"] = detail::json_number(s.theta_cap_f);
  } else {
    j["theta_f"] = detail::json_number(s.theta_f);
    if (s.family == Family::css) j["phi"] = detail::json_number(s.phi);
  }
  if (s.axis == Axis::endpoint) j["temperature"] = detail::json_number(s.temperature);
  return j;
}

inline void write_csv(const PhaseScan& scan, std::ostream& os) {
  os << "# geomphase-scan v1\n";
  os << "axis,phase,trace_mag,flag\n";
  for (const auto& r : scan.rows) {
    os << format_number(r.axis) << ',' << format_phase(r.phase) << ','
       << format_number(r.trace_magnitude) << ',' << to_string(r.flag) << '\n';
  }
}

inline json to_json(const PhaseScan& scan) {
  json axis = json::array(), phase = json::array(),
                 mags = json::array(), flags = json::array(),
                 jumps = json::array();
  for (const auto& r : scan.rows) {
    axis.push_back(detail::json_number(r.axis));
    phase.push_back(detail::json_phase(r.phase));
    mags.push_back(detail::json_number(r.trace_magnitude));
    flags.push_back(to_string(r.flag));
  }
  for (const auto& e : scan.jumps) jumps.push_back(detail::json_jump(e));
  return {{"format", "geomphase-scan v1"},
          {"spec", to_json(scan.spec)},
          {"axis", axis},
          {"phase", phase},
          {"trace_mag", mags},
          {"flags", flags},
          {"jumps", jumps}};
}

inline void write_csv(const PhaseGrid& g, std::ostream& os) {
  os << "# geomphase-grid v1\n";
  os << "temperature,endpoint,phase,trace_mag,flag\n";
  for (std::size_t ti = 0; ti < g.temperatures.size(); ++ti) {
    for (std::size_t ei = 0; ei < g.endpoints.size(); ++ei) {
      const PointResult& r = g.at(ti, ei);
      os << format_number(g.temperatures[ti]) << ',' << format_number(g.endpoints[ei]) << ','
         << format_phase(r.phase) << ',' << format_number(r.trace_magnitude) << ','
         << to_string(r.flag) << '\n';
    }
  }
}

inline json to_json(const PhaseGrid& g) {
  json temps = json::array(), ends = json::array(),
                 phase = json::array(), mags = json::array(),
                 flags = json::array(), jumps = json::array();
  for (double t : g.temperatures) temps.push_back(detail::json_number(t));
  for (double e : g.endpoints) ends.push_back(detail::json_number(e));
  for (const auto& r : g.cells) {
    phase.push_back(detail::json_phase(r.phase));
    mags.push_back(detail::json_number(r.trace_magnitude));
    flags.push_back(to_string(r.flag));
  }
  for (const auto& gj : g.jumps) {
    json e = detail::json_jump(gj.event);
    e["along"] = to_string(gj.along);
    e["at"] = detail::json_number(gj.fixed);
    jumps.push_back(std::move(e));
  }
  json spec = to_json(g.spec.base);
  spec.erase("axis");
  spec.erase("range");
  spec.erase("temperature");
  spec["temperatures"] = detail::json_range(g.spec.temperatures);
  spec["endpoints"] = detail::json_range(g.spec.endpoints);
  return {{"format", "geomphase-grid v1"},
          {"spec", spec},
          {"axis_names", {"temperature", "endpoint"}},
          {"axis", {temps, ends}},
          {"phase", phase},
          {"trace_mag", mags},
          {"flags", flags},
          {"jumps", jumps}};
}

template <class Result>
void write(const Result& result, Format format, std::ostream& os) {
  if (format == Format::csv) {
    write_csv(result, os);
  } else {
    os << to_json(result).dump(2) << '\n';
  }
  if (!os) throw io_error("write failed");
}

/// "-" writes to stdout.
template <class Result>
void write(const Result& result, Format format, const std::string& path) {
  if (path.empty() || path == "-") {
    write(result, format, std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  write(result, format, out);
  out.close();
  if (!out) throw io_error("failed writing " + path);
}

}  // namespace geomphase
