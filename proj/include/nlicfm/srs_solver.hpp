#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlicfm/link_model.hpp"
#include "nlicfm/raman_gain.hpp"

namespace nlicfm {

/// Sampled per-span power evolution P_j(z).
struct PowerEvolution {
  std::size_t span_index = 0;
  std::vector<double> z;       // m, z.front() == 0, z.back() == span length
  std::vector<double> powers;  // W, row-major [channel][z-sample]
  std::vector<double> launch;  // W, P_j(0)

  std::size_t channel_count() const { return launch.size(); }
  std::size_t sample_count() const { return z.size(); }
  std::span<const double> channel(std::size_t j) const {
    return {powers.data() + j * z.size(), z.size()};
  }
  double at(std::size_t j, std::size_t k) const { return powers[j * z.size() + k]; }
  double end_power(std::size_t j) const { return at(j, z.size() - 1); }
};

struct SolverOptions {
  double rtol = 1e-8;
  double atol = 1e-15;  // W
  std::size_t min_points = 200;
  double max_spacing = 250.0;  // m
  // Keep the f_l/f_i photon-conversion factors. Disabling them reproduces
  // the energy-conserving approximation used by the analytic solutions.
  bool photon_factors = true;
};

/// Uniform output grid of max(min_points, ceil(L / max_spacing)) samples.
std::vector<double> output_grid(double length, const SolverOptions& opts);

/// Integrates the coupled SRS power equations along one span. The state is
/// ln P_j, which keeps every power positive. Channel frequencies are taken
/// at the channel centers.
PowerEvolution solve_power_evolution(const Span& span, const RamanGainProfile& profile,
                                     std::span<const Channel> channels,
                                     std::span<const double> launch,
                                     const SolverOptions& opts = {},
                                     std::size_t span_index = 0);

/// Frequency comb obeying the triangular-gain, flat-loss, photon-factor-free
/// assumptions under which the SRS equations have closed-form solutions.
struct FlatComb {
  double alpha0 = 0.0;    // Np/m, common to all channels
  double cr_slope = 0.0;  // C_R,max / delta_f_ISRS, 1/(W m Hz)
  std::vector<double> frequencies;  // Hz, increasing; span must be <= delta_f_ISRS
};

/// Closed-form power profile for arbitrary launch powers on a FlatComb.
std::vector<double> analytic_flat_solution(const FlatComb& comb, std::span<const double> launch,
                                           double z);

/// Equally spaced comb with equal launch power.
struct UniformComb {
  std::size_t count = 0;
  double p0 = 0.0;       // W per channel
  double f_first = 0.0;  // Hz
  double spacing = 0.0;  // Hz
  double alpha0 = 0.0;
  double cr_slope = 0.0;

  double frequency(std::size_t j) const { return f_first + static_cast<double>(j) * spacing; }
  FlatComb as_flat() const;
  /// Left side of the weak-Raman condition, N^2 P0 slope spacing Leff(z).
  double weak_raman_measure(double z) const;
};

/// Closed-form solution for the uniform comb; the sinh ratio is evaluated in
/// log space for large arguments.
std::vector<double> analytic_uniform_solution(const UniformComb& comb, double z);

/// sinh(x) / sinh(n x) for x >= 0, overflow-free.
double sinh_ratio(double x, double n);

struct ProfileTriple;

/// (alpha0, alpha1, sigma) of the weak-Raman perturbative solution for
/// channel j (0-based).
ProfileTriple perturbative_triple(const UniformComb& comb, std::size_t j);

/// Perturbative weak-Raman power of channel j at z.
double perturbative_profile(const UniformComb& comb, std::size_t j, double z);

/// (1 - exp(-2 alpha z)) / (2 alpha), with the alpha -> 0 limit.
double effective_length(double alpha, double z);

}  // namespace nlicfm
