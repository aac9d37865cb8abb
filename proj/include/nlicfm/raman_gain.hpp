#pragma once

#include <utility>
#include <vector>

namespace nlicfm {

/// Odd Raman gain function C_R(u) in 1/(W m). Only u >= 0 is stored; negative
/// arguments are answered by odd symmetry, so C_R(-u) = -C_R(u) and C_R(0) = 0
/// hold for every instance.
class RamanGainProfile {
 public:
  enum class Kind { triangular, tabulated };

  /// Identically zero gain (Raman-free fiber).
  static RamanGainProfile none();

  /// Linear in |u| up to delta_f, zero beyond. c_r_max >= 0, delta_f > 0.
  static RamanGainProfile triangular(double c_r_max, double delta_f);

  /// Piecewise-linear through (u, c_r) samples with u >= 0 strictly
  /// increasing and c_r >= 0. A (0, 0) node is prepended when missing. Zero
  /// beyond the last sample.
  static RamanGainProfile tabulated(std::vector<std::pair<double, double>> samples);

  double operator()(double u) const;

  Kind kind() const { return kind_; }
  double c_r_max() const { return c_r_max_; }
  double delta_f() const { return delta_f_; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }
  bool is_zero() const;

 private:
  RamanGainProfile() = default;
  double positive_branch(double u) const;

  Kind kind_ = Kind::triangular;
  double c_r_max_ = 0.0;
  double delta_f_ = 1.0;
  std::vector<std::pair<double, double>> samples_;
};

/// C_R(u) honoring odd symmetry.
inline double evaluate_gain(const RamanGainProfile& profile, double u) { return profile(u); }

}  // namespace nlicfm
