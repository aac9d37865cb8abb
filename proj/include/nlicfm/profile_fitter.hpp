#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nlicfm {

/// Parameters of P(z) = P(0) exp(-2 alpha0 z + (2 alpha1 / sigma)(exp(-sigma z) - 1)).
struct ProfileTriple {
  double alpha0 = 0.0;  // Np/m
  double alpha1 = 0.0;  // Np/m
  double sigma = 0.0;   // 1/m
};

struct FittedProfile {
  std::size_t span_index = 0;
  std::size_t channel_index = 0;  // 0-based position in the link
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double sigma = 0.0;
  double cost = 0.0;
  double m_c = 0.0;
  double sigma_lo = 0.0;  // search interval actually used
  double sigma_hi = 0.0;
  bool widened = false;  // optimum hit the default interval edge

  ProfileTriple triple() const { return {alpha0, alpha1, sigma}; }
};

struct FitSettings {
  double m_c = 2.0;
  double sigma_lo_factor = 1.0;
  double sigma_hi_factor = 4.0;
  double gs_tol = 1e-4;
  // Interval retried when the optimum lands on an edge of the first one.
  double widened_lo_factor = 0.25;
  double widened_hi_factor = 8.0;
  bool allow_widening = true;

  void check() const;
};

double model_profile(double p0, const ProfileTriple& t, double z);

/// Weighted log-residual cost of the model against a sampled profile,
/// trapezoidal on the sample grid.
double fit_cost(std::span<const double> z, std::span<const double> power,
                const ProfileTriple& t, double m_c);

struct Alpha01 {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
};

/// Closed-form optimal (alpha0, alpha1) for a fixed sigma. Throws
/// NumericError("degenerate fit geometry") when the normal matrix is
/// singular or its condition number exceeds 1e12.
Alpha01 solve_alpha01(std::span<const double> z, std::span<const double> power, double sigma,
                      double m_c);

/// Golden-section search over sigma with nested (alpha0, alpha1) solve.
FittedProfile fit_profile(std::span<const double> z, std::span<const double> power,
                          double intrinsic_alpha, const FitSettings& settings = {},
                          std::size_t span_index = 0, std::size_t channel_index = 0);

}  // namespace nlicfm
