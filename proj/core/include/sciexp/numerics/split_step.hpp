// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sciexp/ndarray.hpp"

namespace sciexp::numerics {

/// Periodic 1D lattice: x uniformly spaced on [lo, hi), k in standard DFT
/// ordering with spacing 2 pi / (n dx).
struct LatticeGrid {
  std::vector<double> x;
  std::vector<double> k;
  double dx = 0.0;

  static LatticeGrid uniform(std::size_t n, double lo, double hi);
  /// 100 points on [-5, 5).
  static LatticeGrid standard();
  std::size_t size() const noexcept { return x.size(); }
};

/// Unnormalized forward DFT and 1/n-normalized inverse (numpy convention).
void fft_forward(std::span<const Complex> in, std::span<Complex> out);
void fft_inverse(std::span<const Complex> in, std::span<Complex> out);

/// (phi, x, t, dt) -> phi after the real-space part of one substep.
using RealSpacePropagator = std::function<std::vector<Complex>(
    std::span<const Complex> phi, std::span<const double> x, double t, double dt)>;
/// (phi_k, k, t, dt) -> phi_k after the Fourier-space part of one substep.
using FourierSpacePropagator = std::function<std::vector<Complex>(
    std::span<const Complex> phi_k, std::span<const double> k, double t, double dt)>;

/// Complex field record: phis is [ts.size(), x.size()] row-major.
struct FieldHistory {
  std::vector<double> ts;
  std::vector<double> x;
  std::vector<Complex> phis;

  std::size_t n_t() const noexcept { return ts.size(); }
  std::size_t n_x() const noexcept { return x.size(); }
  std::span<const Complex> row(std::size_t i) const { return {phis.data() + i * x.size(), x.size()}; }
};

/// Uniform output grid of `count` points on [0, t_end] (endpoints included).
std::vector<double> uniform_times(double t_end, std::size_t count);

/// Smallest substep count with (t_out spacing)/substeps <= max_substep.
std::size_t substeps_for(const std::vector<double>& t_out, double max_substep);

/// Lie splitting, kinetic first: per substep of length d,
/// phi <- U_potential(IFFT(U_kinetic(FFT(phi), k, t, d)), x, t, d).
/// Throws ErrorKind::propagator_fault when a propagator returns a wrong-length
/// or non-finite array.
FieldHistory split_step_evolve(std::span<const Complex> phi0, const RealSpacePropagator& potential,
                               const FourierSpacePropagator& kinetic, const LatticeGrid& grid,
                               const std::vector<double>& t_out, std::size_t substeps_per_output);

}  // namespace sciexp::numerics
