#pragma once

#include <stdexcept>
#include <string>

namespace geomphase {

/// Broad failure classes; the CLI maps each to a distinct exit code.
enum class ErrorKind { invalid_spec, numerical, io };

class error : public std::runtime_error {
 public:
  error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class invalid_spec_error : public error {
 public:
  explicit invalid_spec_error(const std::string& what)
      : error(ErrorKind::invalid_spec, what) {}
};

class numerical_error : public error {
 public:
  explicit numerical_error(const std::string& what)
      : error(ErrorKind::numerical, what) {}
};

// Raised where Tr[rho(0) U] vanishes and arg() carries no information.
class undefined_phase_error : public numerical_error {
 public:
  undefined_phase_error(const std::string& what, double trace_magnitude)
      : numerical_error(what), trace_magnitude_(trace_magnitude) {}
  double trace_magnitude() const noexcept { return trace_magnitude_; }

 private:
  double trace_magnitude_;
};

class transport_violation_error : public numerical_error {
 public:
  transport_violation_error(const std::string& what, double residual)
      : numerical_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class io_error : public error {
 public:
  explicit io_error(const std::string& what) : error(ErrorKind::io, what) {}
};

}  // namespace geomphase
