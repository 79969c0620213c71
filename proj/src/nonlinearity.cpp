#include "scheq/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace scheq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// y^-a with exact shortcuts for the common exponents.
double inv_pow(double y, double a) {
  if (a == 1.0) return 1.0 / y;
  if (a == 2.0) return 1.0 / (y * y);
  if (a == 3.0) return 1.0 / (y * y * y);
  if (a == 4.0) {
    double y2 = y * y;
    return 1.0 / (y2 * y2);
  }
  if (a == 0.5) return 1.0 / std::sqrt(y);
  return std::pow(y, -a);
}

void check_n(int n) {
  if (n < 1) throw std::invalid_argument("regularization level n must be >= 1");
}

}  // namespace

NonlinSpec NonlinSpec::power(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Power exponent alpha must be > 0");
  return {NonlinKind::Power, alpha};
}

std::string NonlinSpec::label() const {
  if (kind == NonlinKind::Log) return "log";
  std::ostringstream s;
  s << "power:" << alpha;
  return s.str();
}

NonlinSpec parse_spec(const std::string& text) {
  if (text == "log") return NonlinSpec::log();
  const std::string prefix = "power:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(text.substr(prefix.size()), &used);
    } catch (...) {
      throw std::invalid_argument("bad nonlinearity '" + text + "'");
    }
    if (used != text.size() - prefix.size()) throw std::invalid_argument("bad nonlinearity '" + text + "'");
    return NonlinSpec::power(a);
  }
  throw std::invalid_argument("unknown nonlinearity '" + text + "' (expected log or power:<alpha>)");
}

double f_singular(const NonlinSpec& spec, double x) {
  if (x <= 0.0) return kInf;
  if (spec.kind == NonlinKind::Log) return -std::log(x);
  return inv_pow(x, spec.alpha);
}

double f_reg(const NonlinSpec& spec, int n, double x) {
  check_n(n);
  double y = (x > 0.0 ? x : 0.0) + 1.0 / n;
  if (spec.kind == NonlinKind::Log) return -std::log(y);
  return inv_pow(y, spec.alpha);
}

double F_anti(const NonlinSpec& spec, double x) {
  if (x < 0.0) return kInf;
  if (spec.kind == NonlinKind::Log) return x > 0.0 ? x * std::log(x) - x + 1.0 : 1.0;
  double a = spec.alpha;
  if (a == 1.0) return x > 0.0 ? -std::log(x) : kInf;
  if (x == 0.0) return a > 1.0 ? kInf : 0.0;
  return std::pow(x, 1.0 - a) / (a - 1.0);
}

double F_reg_anti(const NonlinSpec& spec, int n, double x) {
  check_n(n);
  double inv = 1.0 / n;
  double xp = x > 0.0 ? x : 0.0;
  double xm = x < 0.0 ? -x : 0.0;
  if (spec.kind == NonlinKind::Log) return (x + inv) * std::log(xp + inv) - xp + 1.0 - inv;
  double a = spec.alpha;
  double na = std::pow(static_cast<double>(n), a);
  if (a == 1.0) return -std::log(xp + inv) + na * xm;
  return std::pow(xp + inv, 1.0 - a) / (a - 1.0) + na * xm;
}

double lipschitz(const NonlinSpec& spec, int n) {
  check_n(n);
  if (spec.kind == NonlinKind::Log) return static_cast<double>(n);
  return spec.alpha * std::pow(static_cast<double>(n), spec.alpha + 1.0);
}

double potential_U_reg(const NonlinSpec& spec, int n, const GridField& x) {
  check_n(n);
  double s = 0.0;
  for (double v : x.values) s += F_reg_anti(spec, n, v);
  return s / static_cast<double>(x.size());
}

double potential_U(const NonlinSpec& spec, const GridField& x) {
  double s = 0.0;
  for (double v : x.values) {
    if (v < 0.0) return kInf;
    double F = F_anti(spec, v);
    if (std::isinf(F)) return kInf;
    s += F;
  }
  return s / static_cast<double>(x.size());
}

double half_potential_reg(const NonlinSpec& spec, int n, const GridField& x) {
  check_n(n);
  if (x.size() % 2 != 0) throw std::invalid_argument("half potential needs an even grid size");
  double s = 0.0;
  for (std::size_t j = 0; j < x.size() / 2; ++j) s += F_reg_anti(spec, n, x[j]);
  return s / static_cast<double>(x.size());
}

}  // namespace scheq
