#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nlicfm {

/// Adaptive Dormand-Prince 5(4) integrator with FSAL and the 4th-order
/// continuous extension, so solutions can be sampled on an arbitrary output
/// grid without constraining the step size.
class Dopri5 {
 public:
  using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
  /// Per-component error scale; the step is accepted when the RMS of
  /// err_i / scale_i is <= 1.
  using ErrorScale = std::function<double(std::size_t i, double y_old, double y_new)>;

  struct Options {
    double rtol = 1e-8;
    double atol = 1e-12;
    ErrorScale error_scale;  // overrides rtol/atol when set
    double initial_step = 0.0;  // 0 = automatic
    std::size_t max_steps = 1'000'000;
    double min_step_fraction = 1e-14;  // of the integration interval
  };

  struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
  };

  /// Integrates y' = f(t, y) from t_out.front() to t_out.back() and returns the
  /// state at every t_out point, row-major [sample][component]. t_out must be
  /// strictly increasing. Throws NumericError on step underflow or a
  /// non-finite state; the message carries the abscissa.
  static std::vector<double> integrate(const Rhs& f, std::span<const double> t_out,
                                       std::span<const double> y0, const Options& opts,
                                       Stats* stats = nullptr);
};

}  // namespace nlicfm
