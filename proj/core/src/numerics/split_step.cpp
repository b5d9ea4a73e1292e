// SPDX-License-Identifier: Apache-2.0
#include "sciexp/numerics/split_step.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "sciexp/error.hpp"

namespace sciexp::numerics {

namespace {

// fftw_plan creation is not thread-safe; execution with new arrays is.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, plans] : plans_) {
      fftw_destroy_plan(plans.forward);
      fftw_destroy_plan(plans.backward);
    }
  }

  PlanPair get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<Complex> a(n), b(n);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const int size = static_cast<int>(n);
    PlanPair p;
    p.forward = fftw_plan_dft_1d(size, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft_1d(size, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void execute(fftw_plan plan, std::span<const Complex> in, std::span<Complex> out) {
  // FFTW never writes to the input of an out-of-place c2c transform.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

void check_propagator_output(const std::vector<Complex>& v, std::size_t n, std::size_t step,
                             const char* which) {
  if (v.size() != n) {
    throw Error(ErrorKind::propagator_fault,
                std::string("propagator fault at substep ") + std::to_string(step) + ": " + which +
                    " returned " + std::to_string(v.size()) + " values, expected " + std::to_string(n));
  }
  for (const auto& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::propagator_fault, std::string("propagator fault at substep ") +
                                                   std::to_string(step) + ": " + which +
                                                   " returned a non-finite value");
    }
  }
}

}  // namespace

LatticeGrid LatticeGrid::uniform(std::size_t n, double lo, double hi) {
  LatticeGrid g;
  g.dx = (hi - lo) / static_cast<double>(n);
  g.x.resize(n);
  g.k.resize(n);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * g.dx);
  const auto half = static_cast<std::ptrdiff_t>((n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    g.x[i] = lo + static_cast<double>(i) * g.dx;
    auto m = static_cast<std::ptrdiff_t>(i);
    if (m > half) m -= static_cast<std::ptrdiff_t>(n);
    g.k[i] = static_cast<double>(m) * dk;
  }
  return g;
}

LatticeGrid LatticeGrid::standard() { return uniform(100, -5.0, 5.0); }

void fft_forward(std::span<const Complex> in, std::span<Complex> out) {
  execute(plan_cache().get(in.size()).forward, in, out);
}

void fft_inverse(std::span<const Complex> in, std::span<Complex> out) {
  execute(plan_cache().get(in.size()).backward, in, out);
  const double scale = 1.0 / static_cast<double>(in.size());
  for (auto& z : out) z *= scale;
}

std::vector<double> uniform_times(double t_end, std::size_t count) {
  std::vector<double> ts(count);
  if (count == 1) return ts;
  const double step = t_end / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) ts[i] = static_cast<double>(i) * step;
  ts.back() = t_end;
  return ts;
}

std::size_t substeps_for(const std::vector<double>& t_out, double max_substep) {
  if (t_out.size() < 2) return 1;
  const double spacing = t_out[1] - t_out[0];
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(spacing / max_substep - 1e-12)));
}

FieldHistory split_step_evolve(std::span<const Complex> phi0, const RealSpacePropagator& potential,
                               const FourierSpacePropagator& kinetic, const LatticeGrid& grid,
                               const std::vector<double>& t_out, std::size_t substeps_per_output) {
  const std::size_t n = grid.size();
  if (phi0.size() != n) {
    throw Error(ErrorKind::shape, "initial field has " + std::to_string(phi0.size()) +
                                      " points, the grid has " + std::to_string(n));
  }
  if (substeps_per_output < 1 || t_out.empty()) {
    throw Error(ErrorKind::invalid_argument, "split_step_evolve needs at least one output time and substep");
  }

  FieldHistory hist;
  hist.ts = t_out;
  hist.x = grid.x;
  hist.phis.resize(t_out.size() * n);
  std::copy(phi0.begin(), phi0.end(), hist.phis.begin());

  std::vector<Complex> phi(phi0.begin(), phi0.end());
  std::vector<Complex> phi_k(n);
  std::size_t substep = 0;

  for (std::size_t i = 1; i < t_out.size(); ++i) {
    const double delta = (t_out[i] - t_out[i - 1]) / static_cast<double>(substeps_per_output);
    for (std::size_t s = 0; s < substeps_per_output; ++s, ++substep) {
      const double t = t_out[i - 1] + static_cast<double>(s) * delta;
      fft_forward(phi, phi_k);
      auto evolved_k = kinetic(phi_k, grid.k, t, delta);
      check_propagator_output(evolved_k, n, substep, "U_kinetic");
      fft_inverse(evolved_k, phi);
      phi = potential(phi, grid.x, t, delta);
      check_propagator_output(phi, n, substep, "U_potential");
    }
    std::copy(phi.begin(), phi.end(), hist.phis.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  return hist;
}

}  // namespace sciexp::numerics
