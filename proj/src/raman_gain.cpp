#include "nlicfm/raman_gain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlicfm {

RamanGainProfile RamanGainProfile::none() { return triangular(0.0, 1.0); }

RamanGainProfile RamanGainProfile::triangular(double c_r_max, double delta_f) {
  if (!(c_r_max >= 0.0) || !std::isfinite(c_r_max)) {
    throw std::invalid_argument("triangular Raman profile: c_r_max must be finite and >= 0");
  }
  if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
    throw std::invalid_argument("triangular Raman profile: delta_f must be finite and > 0");
  }
  RamanGainProfile p;
  p.kind_ = Kind::triangular;
  p.c_r_max_ = c_r_max;
  p.delta_f_ = delta_f;
  return p;
}

RamanGainProfile RamanGainProfile::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("tabulated Raman profile: no samples");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [u, c] = samples[i];
    if (!std::isfinite(u) || !std::isfinite(c) || u < 0.0 || c < 0.0) {
      throw std::invalid_argument("tabulated Raman profile: samples need u >= 0 and c_r >= 0");
    }
    if (i > 0 && !(u > samples[i - 1].first)) {
      throw std::invalid_argument("tabulated Raman profile: u must be strictly increasing");
    }
  }
  if (samples.front().first == 0.0 && samples.front().second != 0.0) {
    throw std::invalid_argument("tabulated Raman profile: C_R(0) must be 0");
  }
  if (samples.front().first > 0.0) {
    samples.insert(samples.begin(), {0.0, 0.0});
  }
  RamanGainProfile p;
  p.kind_ = Kind::tabulated;
  p.samples_ = std::move(samples);
  p.c_r_max_ = 0.0;
  for (const auto& s : p.samples_) p.c_r_max_ = std::max(p.c_r_max_, s.second);
  p.delta_f_ = p.samples_.back().first;
  return p;
}

bool RamanGainProfile::is_zero() const { return c_r_max_ == 0.0; }

double RamanGainProfile::positive_branch(double u) const {
  if (kind_ == Kind::triangular) {
    if (u > delta_f_) return 0.0;
    return c_r_max_ / delta_f_ * u;
  }
  if (u >= samples_.back().first) {
    return u == samples_.back().first ? samples_.back().second : 0.0;
  }
  auto it = std::upper_bound(samples_.begin(), samples_.end(), u,
                             [](double v, const auto& s) { return v < s.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (u - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

double RamanGainProfile::operator()(double u) const {
  if (u == 0.0) return 0.0;
  return u > 0.0 ? positive_branch(u) : -positive_branch(-u);
}

}  // namespace nlicfm
