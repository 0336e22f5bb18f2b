// geomphase: sweep, bisect and grid mixed-state geometric phases.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geomphase/geomphase.hpp"

namespace gp = geomphase;

namespace {

struct Args {
  std::optional<int> two_j;
  double omega0 = 1.0;
  std::optional<double> theta, phi, theta_f, theta_cap_f;
  double tmin = 0.05, tmax = 1.0;
  int tn = 200;
  std::string tscale = "linear";
  std::string axis = "temperature";
  double temperature = 1.0;
  std::optional<double> emin, emax;
  int en = 100;
  std::optional<std::string> method;
  std::string connection = "closed";
  int steps = 4096;
  bool refine = false;
  double jump_threshold = 0.5 * gp::pi;
  unsigned threads = 0;
  std::string format = "csv";
  std::string out = "-";

  std::string quantity = "uhlmann";
  std::string family = "css";
  double lo = 0.0, hi = 0.0;
  std::optional<double> tol;
};

const std::map<std::string, gp::Family> families = {
    {"css", gp::Family::css}, {"oneaxis", gp::Family::one_axis}, {"twoaxis", gp::Family::two_axis}};

void add_common(CLI::App* app, Args& a) {
  app->add_option("--j", a.two_j, "2j as an integer (3 for j = 3/2)")->check(CLI::PositiveNumber);
  app->add_option("--omega0", a.omega0, "level spacing; unit of temperature")->capture_default_str();
  app->add_option("--theta", a.theta, "latitude of the coherent-state Uhlmann loop");
  app->add_option("--phi", a.phi, "longitude of the coherent-state IGP path");
  app->add_option("--theta-f", a.theta_f, "IGP endpoint (css, twoaxis)");
  app->add_option("--Theta-f", a.theta_cap_f, "IGP endpoint (oneaxis)");
  app->add_option("--tmin", a.tmin)->capture_default_str();
  app->add_option("--tmax", a.tmax)->capture_default_str();
  app->add_option("--tn", a.tn)->capture_default_str();
  app->add_option("--tscale", a.tscale)->check(CLI::IsMember({"linear", "log"}))->capture_default_str();
  app->add_option("--axis", a.axis, "swept parameter")
      ->check(CLI::IsMember({"temperature", "endpoint"}))
      ->capture_default_str();
  app->add_option("--T", a.temperature, "fixed temperature for endpoint sweeps")->capture_default_str();
  app->add_option("--emin", a.emin);
  app->add_option("--emax", a.emax);
  app->add_option("--en", a.en)->capture_default_str();
  app->add_option("--method", a.method, "closed or numeric")->check(CLI::IsMember({"closed", "numeric"}));
  app->add_option("--connection", a.connection, "Uhlmann connection: closed or spectral")
      ->check(CLI::IsMember({"closed", "spectral"}))
      ->capture_default_str();
  app->add_option("--steps", a.steps)->capture_default_str();
  app->add_flag("--refine", a.refine, "double steps until the phase converges");
  app->add_option("--jump-threshold", a.jump_threshold)->capture_default_str();
  app->add_option("--threads", a.threads, "0 uses all cores")->capture_default_str();
  app->add_option("--format", a.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app->add_option("--out", a.out, "output path, - for stdout")->capture_default_str();
}

/// Endpoint domain used when --emin/--emax are absent.
std::pair<double, double> default_endpoints(gp::Quantity q, gp::Family f) {
  if (q == gp::Quantity::uhlmann) return {0.05, gp::pi - 0.05};
  switch (f) {
    case gp::Family::css: return {0.0, 0.95 * gp::pi};
    case gp::Family::one_axis: return {0.0, 4.0 * gp::pi};
    case gp::Family::two_axis: break;
  }
  return {0.0, gp::two_axis_theta_max};
}

gp::SweepSpec make_spec(const Args& a, gp::Quantity q, gp::Family f) {
  gp::SweepSpec s;
  s.quantity = q;
  s.family = f;
  s.j = gp::SpinJ(a.two_j.value_or(f == gp::Family::css ? 3 : 2));
  s.omega0 = a.omega0;
  if (a.theta) s.theta = *a.theta;
  if (a.phi) s.phi = *a.phi;
  if (a.theta_f) {
    s.theta_f = *a.theta_f;
  } else if (f == gp::Family::two_axis) {
    s.theta_f = 0.5 * gp::pi;
  }
  if (a.theta_cap_f) s.theta_cap_f = *a.theta_cap_f;
  s.temperature = a.temperature;
  s.axis = a.axis == "endpoint" ? gp::Axis::endpoint : gp::Axis::temperature;
  if (s.axis == gp::Axis::temperature) {
    s.range = {a.tmin, a.tmax, a.tn, a.tscale == "log" ? gp::Spacing::log : gp::Spacing::linear};
  } else {
    const auto [lo, hi] = default_endpoints(q, f);
    s.range = {a.emin.value_or(lo), a.emax.value_or(hi), a.en, gp::Spacing::linear};
  }
  const std::string method = a.method.value_or(q == gp::Quantity::igp ? "closed" : "numeric");
  s.method = method == "closed" ? gp::Method::closed_form : gp::Method::numeric;
  s.solver.n_steps = a.steps;
  s.solver.refine = a.refine;
  s.solver.threads = a.threads;
  s.solver.connection =
      a.connection == "spectral" ? gp::ConnectionMethod::spectral : gp::ConnectionMethod::closed_form;
  s.jump_threshold = a.jump_threshold;
  return s;
}

gp::Format format_of(const Args& a) { return a.format == "json" ? gp::Format::json : gp::Format::csv; }

int run_critical(const Args& a) {
  const gp::SweepSpec s = make_spec(a, a.quantity == "igp" ? gp::Quantity::igp : gp::Quantity::uhlmann,
                                    families.at(a.family));
  const gp::CriticalResult r = gp::find_critical(s, a.lo, a.hi, a.tol);
  if (a.format == "json") {
    gp::json j = {{"spec", gp::to_json(s)},
                  {"lo", gp::detail::json_number(r.lo)},
                  {"hi", gp::detail::json_number(r.hi)},
                  {"critical", gp::detail::json_number(r.estimate())},
                  {"evaluations", r.evaluations}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "lo,hi,critical\n"
              << gp::format_number(r.lo) << ',' << gp::format_number(r.hi) << ','
              << gp::format_number(r.estimate()) << '\n';
  }
  return 0;
}

int run_grid(const Args& a) {
  const auto q = a.quantity == "igp" ? gp::Quantity::igp : gp::Quantity::uhlmann;
  const auto f = families.at(a.family);
  gp::GridSpec g;
  g.base = make_spec(a, q, f);
  g.temperatures = {a.tmin, a.tmax, a.tn, a.tscale == "log" ? gp::Spacing::log : gp::Spacing::linear};
  const auto [lo, hi] = default_endpoints(q, f);
  g.endpoints = {a.emin.value_or(lo), a.emax.value_or(hi), a.en, gp::Spacing::linear};
  gp::write(gp::grid(g), format_of(a), a.out);
  return 0;
}

int run_check(const Args& a) {
  const double beta = 1.0 / a.temperature;
  struct Line {
    std::string name;
    double value;
    double limit;
    bool pass;
  };
  std::vector<Line> lines;
  const std::vector<std::pair<std::string, gp::EvolutionSpec>> paths = {
      {"igp_css", gp::css_longitude(gp::SpinJ(3), 0.75 * gp::pi)},
      {"igp_oneaxis", gp::one_axis_tilde(3.0 * gp::pi)},
      {"igp_twoaxis", gp::two_axis_meridian(0.5 * gp::pi)},
  };
  for (auto [name, ev] : paths) {
    ev.n_steps = std::min(a.steps, 1024);
    const gp::TransportReport r = gp::transport_report(ev, beta, a.omega0);
    const double tol = gp::transport_tolerance;
    lines.push_back({name + ".weak_residual", r.weak_residual, tol, r.weak_residual < tol});
    lines.push_back({name + ".strong_residual", r.strong_residual, tol, r.strong_residual < tol});
    const double dyn = std::fabs(r.dynamic_phase);
    lines.push_back({name + ".dynamic_phase", dyn, tol, dyn < tol});
  }
  gp::HolonomyOptions opt;
  opt.n_steps = a.steps;
  opt.refine = a.refine;
  const std::vector<std::pair<std::string, gp::UhlmannLoop>> loops = {
      {"uhlmann_css", gp::css_uhlmann_loop(gp::SpinJ(3), 0.5 * gp::pi, beta, a.omega0)},
      {"uhlmann_oneaxis", gp::one_axis_uhlmann_loop(gp::SpinJ(2), beta, a.omega0)},
      {"uhlmann_twoaxis", gp::two_axis_uhlmann_loop(gp::SpinJ(2), beta, a.omega0)},
  };
  for (const auto& [name, loop] : loops) {
    const gp::HolonomyResult h = gp::uhlmann_phase(loop, opt);
    const double u = gp::unitarity_error(h.holonomy);
    lines.push_back({name + ".unitarity", u, 1e-8, u < 1e-8});
    lines.push_back({name + ".converged", h.converged ? 1.0 : 0.0, 1.0, h.converged});
  }
  bool ok = true;
  std::cout << "check,value,limit,status\n";
  for (const auto& l : lines) {
    const bool pass = l.pass;
    ok = ok && pass;
    std::cout << l.name << ',' << gp::format_number(l.value) << ',' << gp::format_number(l.limit)
              << ',' << (pass ? "ok" : "fail") << '\n';
  }
  return ok ? 0 : 3;
}

int exit_code(gp::ErrorKind k) {
  switch (k) {
    case gp::ErrorKind::invalid_spec: return 2;
    case gp::ErrorKind::numerical: return 3;
    case gp::ErrorKind::io: return 4;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-state geometric phases of thermal spin states"};
  app.require_subcommand(1);
  Args a;

  auto* uhl = app.add_subcommand("uhlmann", "sweep the Uhlmann phase of a closed loop");
  uhl->add_option("family", a.family)->required()->check(CLI::IsMember({"css", "oneaxis", "twoaxis"}));
  add_common(uhl, a);

  auto* igp = app.add_subcommand("igp", "sweep the interferometric geometric phase");
  igp->add_option("family", a.family)->required()->check(CLI::IsMember({"css", "oneaxis", "twoaxis"}));
  add_common(igp, a);

  auto* crit = app.add_subcommand("critical", "bisect a phase jump inside [lo, hi]");
  crit->add_option("--quantity", a.quantity)->check(CLI::IsMember({"uhlmann", "igp"}))->capture_default_str();
  crit->add_option("--family", a.family)->check(CLI::IsMember({"css", "oneaxis", "twoaxis"}))->capture_default_str();
  crit->add_option("--lo", a.lo)->required();
  crit->add_option("--hi", a.hi)->required();
  crit->add_option("--tol", a.tol, "bracket width (default 1e-4 closed, 1e-3 numeric)");
  add_common(crit, a);

  auto* grd = app.add_subcommand("grid", "phase over a temperature x endpoint grid");
  grd->add_option("--quantity", a.quantity)->check(CLI::IsMember({"uhlmann", "igp"}))->capture_default_str();
  grd->add_option("--family", a.family)->check(CLI::IsMember({"css", "oneaxis", "twoaxis"}))->capture_default_str();
  add_common(grd, a);

  auto* chk = app.add_subcommand("check", "transport and convergence diagnostics");
  chk->add_option("--T", a.temperature)->capture_default_str();
  chk->add_option("--omega0", a.omega0)->capture_default_str();
  chk->add_option("--steps", a.steps)->capture_default_str();
  chk->add_flag("--refine", a.refine);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*uhl || *igp) {
      const auto q = *uhl ? gp::Quantity::uhlmann : gp::Quantity::igp;
      gp::write(gp::sweep(make_spec(a, q, families.at(a.family))), format_of(a), a.out);
      return 0;
    }
    if (*crit) return run_critical(a);
    if (*grd) return run_grid(a);
    return run_check(a);
  } catch (const gp::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
