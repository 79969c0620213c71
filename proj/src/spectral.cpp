#include "scheq/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace scheq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

// FFTW plans per grid size, created once under a lock (the planner is not
// thread safe) and executed through the new-array interface, which is.
class Plans {
 public:
  struct Pair {
    fftw_plan forward;  // REDFT10
    fftw_plan inverse;  // REDFT01
  };

  static const Pair& get(std::size_t M) {
    static Plans instance;
    std::lock_guard<std::mutex> lock(instance.mutex_);
    auto it = instance.plans_.find(M);
    if (it != instance.plans_.end()) return it->second;
    std::vector<double> a(M), b(M);
    int m = static_cast<int>(M);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Pair p{fftw_plan_r2r_1d(m, a.data(), b.data(), FFTW_REDFT10, flags),
           fftw_plan_r2r_1d(m, a.data(), b.data(), FFTW_REDFT01, flags)};
    return instance.plans_.emplace(M, p).first->second;
  }

  ~Plans() {
    for (auto& [m, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.inverse);
    }
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, Pair> plans_;
};

std::vector<double>& scratch(std::size_t M) {
  thread_local std::vector<double> buf;
  if (buf.size() < 2 * M) buf.resize(2 * M);
  return buf;
}

void check_sizes(std::size_t N, std::size_t M) {
  if (M < N) throw std::invalid_argument("grid size M must be at least the mode count N");
  if (M == 0) throw std::invalid_argument("grid size must be positive");
}

}  // namespace

SpectralField SpectralField::mode(std::size_t N, std::size_t i, double amp) {
  SpectralField h(N);
  h.coeffs.at(i) = amp;
  return h;
}

double eigenvalue(std::size_t i) {
  double k = static_cast<double>(i) * kPi;
  return -k * k;
}

double basis_eval(std::size_t i, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::domain_error("basis_eval: theta outside [0,1]");
  if (i == 0) return 1.0;
  return kSqrt2 * std::cos(static_cast<double>(i) * kPi * theta);
}

double grid_point(std::size_t j, std::size_t M) {
  return (static_cast<double>(j) + 0.5) / static_cast<double>(M);
}

void to_grid(const double* coeffs, std::size_t N, double* grid, std::size_t M) {
  check_sizes(N, M);
  const auto& plan = Plans::get(M);
  auto& buf = scratch(M);
  double* in = buf.data();
  in[0] = N > 0 ? coeffs[0] : 0.0;
  for (std::size_t k = 1; k < M; ++k) in[k] = k < N ? coeffs[k] / kSqrt2 : 0.0;
  fftw_execute_r2r(plan.inverse, in, grid);
}

void to_spectral(const double* grid, std::size_t M, double* coeffs, std::size_t N) {
  check_sizes(N, M);
  const auto& plan = Plans::get(M);
  auto& buf = scratch(M);
  double* in = buf.data();
  double* out = buf.data() + M;
  for (std::size_t j = 0; j < M; ++j) in[j] = grid[j];
  fftw_execute_r2r(plan.forward, in, out);
  double m = static_cast<double>(M);
  if (N > 0) coeffs[0] = out[0] / (2.0 * m);
  for (std::size_t k = 1; k < N; ++k) coeffs[k] = out[k] / (kSqrt2 * m);
}

GridField to_grid(const SpectralField& h, std::size_t M) {
  GridField g(M);
  to_grid(h.coeffs.data(), h.size(), g.values.data(), M);
  return g;
}

SpectralField to_spectral(const GridField& g, std::size_t N) {
  SpectralField h(N);
  to_spectral(g.values.data(), g.size(), h.coeffs.data(), N);
  return h;
}

double mean(const SpectralField& h) { return h.size() > 0 ? h[0] : 0.0; }

SpectralField project_zero_mean(const SpectralField& h) {
  SpectralField r = h;
  if (r.size() > 0) r[0] = 0.0;
  return r;
}

SpectralField apply_neg_A_pow(double gamma, const SpectralField& h) {
  SpectralField r = h;
  if (gamma == 0.0) return r;
  if (r.size() > 0) r[0] = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) r[i] *= std::pow(-eigenvalue(i), gamma);
  return r;
}

SpectralField apply_A(const SpectralField& h) {
  SpectralField r = h;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] *= eigenvalue(i);
  return r;
}

SpectralField q_bar(const SpectralField& h) {
  SpectralField r = h;
  for (std::size_t i = 1; i < r.size(); ++i) r[i] /= -eigenvalue(i);
  return r;
}

GammaNorm norm_gamma(double gamma, const SpectralField& h) {
  double s = 0.0;
  for (std::size_t i = 1; i < h.size(); ++i) s += std::pow(-eigenvalue(i), gamma) * h[i] * h[i];
  GammaNorm g;
  g.gamma = gamma;
  g.seminorm = std::sqrt(s);
  double m = mean(h);
  g.full_norm = std::sqrt(s + m * m);
  return g;
}

double inner_vm1(const SpectralField& h, const SpectralField& k) {
  std::size_t n = std::min(h.size(), k.size());
  if (n == 0) return 0.0;
  double s = h[0] * k[0];
  for (std::size_t i = 1; i < n; ++i) s += h[i] * k[i] / (-eigenvalue(i));
  return s;
}

double inner_l2(const SpectralField& h, const SpectralField& k) {
  std::size_t n = std::min(h.size(), k.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += h[i] * k[i];
  return s;
}

double grid_inner(const GridField& a, const GridField& b) {
  if (a.size() != b.size()) throw std::invalid_argument("grid_inner: size mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s / static_cast<double>(a.size());
}

double grid_mean(const GridField& g) {
  double s = 0.0;
  for (double v : g.values) s += v;
  return s / static_cast<double>(g.size());
}

}  // namespace scheq
