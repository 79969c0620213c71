#pragma once

#include <string>

#include "scheq/spectral.hpp"

namespace scheq {

enum class NonlinKind { Log, Power };

struct NonlinSpec {
  NonlinKind kind = NonlinKind::Log;
  double alpha = 1.0;  // Power only

  static NonlinSpec log() { return {NonlinKind::Log, 1.0}; }
  // Throws std::invalid_argument unless alpha > 0.
  static NonlinSpec power(double alpha);

  std::string label() const;
};

// Parses "log" or "power:<alpha>".
NonlinSpec parse_spec(const std::string& text);

// Singular drift: -ln x or x^-alpha for x > 0, +inf for x <= 0.
double f_singular(const NonlinSpec& spec, double x);
// Regularized drift f(x+ + 1/n). Throws std::invalid_argument for n < 1.
double f_reg(const NonlinSpec& spec, int n, double x);
// Antiderivative of -f on [0, inf); F_ln(0) = 1, +inf at 0 for Power alpha >= 1.
double F_anti(const NonlinSpec& spec, double x);
// Antiderivative of -f^n on the real line.
double F_reg_anti(const NonlinSpec& spec, int n, double x);
// Lipschitz constant of f^n: n (Log), alpha n^(alpha+1) (Power).
double lipschitz(const NonlinSpec& spec, int n);

// Midpoint-rule potentials.
double potential_U_reg(const NonlinSpec& spec, int n, const GridField& x);
// +inf if any grid value is negative or any F term is infinite.
double potential_U(const NonlinSpec& spec, const GridField& x);
// Integral over [0,1/2]; throws std::invalid_argument for odd M.
double half_potential_reg(const NonlinSpec& spec, int n, const GridField& x);

}  // namespace scheq
