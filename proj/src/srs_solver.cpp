#include "nlicfm/srs_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlicfm/dopri5.hpp"
#include "nlicfm/errors.hpp"
#include "nlicfm/profile_fitter.hpp"

namespace nlicfm {

double effective_length(double alpha, double z) {
  if (alpha == 0.0) return z;
  return -std::expm1(-2.0 * alpha * z) / (2.0 * alpha);
}

std::vector<double> output_grid(double length, const SolverOptions& opts) {
  const auto by_spacing = static_cast<std::size_t>(std::ceil(length / opts.max_spacing)) + 1;
  const std::size_t n = std::max<std::size_t>({opts.min_points, by_spacing, 3});
  std::vector<double> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    z[k] = length * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  z.back() = length;
  return z;
}

PowerEvolution solve_power_evolution(const Span& span, const RamanGainProfile& profile,
                                     std::span<const Channel> channels,
                                     std::span<const double> launch, const SolverOptions& opts,
                                     std::size_t span_index) {
  const std::size_t n = channels.size();
  const std::string where = "span " + std::to_string(span_index + 1);
  if (launch.size() != n || span.intrinsic_alpha.size() != n) {
    throw NumericError(where + ": launch/attenuation size does not match channel count");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!(launch[j] > 0.0)) {
      throw NumericError(where + ": launch power of channel " + std::to_string(channels[j].index) +
                         " must be > 0");
    }
  }

  // coupling[l][i] = w_li C_R(f_i - f_l); w_li = f_l / f_i when power flows
  // from l down to a lower-frequency channel i.
  std::vector<double> coupling(n * n, 0.0);
  if (!profile.is_zero()) {
    for (std::size_t l = 0; l < n; ++l) {
      const double fl = channels[l].f_center;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == l) continue;
        const double fi = channels[i].f_center;
        const double w = (opts.photon_factors && fi < fl) ? fl / fi : 1.0;
        coupling[l * n + i] = w * profile(fi - fl);
      }
    }
  }
  std::vector<double> loss(n);
  for (std::size_t j = 0; j < n; ++j) loss[j] = 2.0 * span.intrinsic_alpha[j];

  std::vector<double> p(n);
  auto rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    for (std::size_t i = 0; i < n; ++i) p[i] = std::exp(y[i]);
    for (std::size_t l = 0; l < n; ++l) {
      const double* row = coupling.data() + l * n;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += row[i] * p[i];
      dy[l] = acc - loss[l];
    }
  };

  std::vector<double> y0(n);
  for (std::size_t j = 0; j < n; ++j) y0[j] = std::log(launch[j]);

  Dopri5::Options dp;
  dp.rtol = opts.rtol;
  // In log space the local error is a relative power error; atol (W) acts
  // as a floor relative to the current power.
  dp.error_scale = [&](std::size_t, double a, double b) {
    return opts.rtol + opts.atol * std::exp(-std::max(a, b));
  };

  PowerEvolution ev;
  ev.span_index = span_index;
  ev.z = output_grid(span.length, opts);
  ev.launch.assign(launch.begin(), launch.end());
  std::vector<double> states;
  try {
    states = Dopri5::integrate(rhs, ev.z, y0, dp);
  } catch (const NumericError& e) {
    throw NumericError(where + ": " + e.what());
  }

  const std::size_t nz = ev.z.size();
  ev.powers.resize(n * nz);
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = k == 0 ? launch[j] : std::exp(states[k * n + j]);
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw NumericError(where + ": non-positive power at z = " + std::to_string(ev.z[k]));
      }
      ev.powers[j * nz + k] = v;
    }
  }
  return ev;
}

std::vector<double> analytic_flat_solution(const FlatComb& comb, std::span<const double> launch,
                                           double z) {
  const std::size_t n = comb.frequencies.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  double p_tot = 0.0;
  for (double v : launch) p_tot += v;
  const double f_top = comb.frequencies.back();
  const double leff = effective_length(comb.alpha0, z);

  std::vector<double> expo(n);
  double e_max = -INFINITY;
  for (std::size_t j = 0; j < n; ++j) {
    expo[j] = p_tot * comb.cr_slope * (f_top - comb.frequencies[j]) * leff;
    e_max = std::max(e_max, expo[j]);
  }
  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) denom += launch[i] * std::exp(expo[i] - e_max);
  const double decay = std::exp(-2.0 * comb.alpha0 * z);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = launch[j] * decay * p_tot * std::exp(expo[j] - e_max) / denom;
  }
  return out;
}

FlatComb UniformComb::as_flat() const {
  FlatComb flat;
  flat.alpha0 = alpha0;
  flat.cr_slope = cr_slope;
  for (std::size_t j = 0; j < count; ++j) flat.frequencies.push_back(frequency(j));
  return flat;
}

double UniformComb::weak_raman_measure(double z) const {
  const double nn = static_cast<double>(count);
  return nn * nn * p0 * cr_slope * spacing * effective_length(alpha0, z);
}

namespace {

// ln sinh(x) for x > 0.
double log_sinh(double x) { return x + std::log(-std::expm1(-2.0 * x)) - std::numbers::ln2; }

}  // namespace

double sinh_ratio(double x, double n) {
  if (x == 0.0) return 1.0 / n;
  if (n * x < 20.0) return std::sinh(x) / std::sinh(n * x);
  return std::exp(log_sinh(x) - log_sinh(n * x));
}

std::vector<double> analytic_uniform_solution(const UniformComb& comb, double z) {
  const auto nn = static_cast<double>(comb.count);
  std::vector<double> out(comb.count);
  if (comb.count == 0) return out;
  const double leff = effective_length(comb.alpha0, z);
  const double half = 0.5 * nn * comb.p0 * comb.cr_slope * leff;
  const double arg = half * comb.spacing;
  const double f1 = comb.frequency(0);
  const double fn = comb.frequency(comb.count - 1);

  double log_ratio;
  if (arg == 0.0) {
    log_ratio = -std::log(nn);
  } else if (nn * arg < 20.0) {
    log_ratio = std::log(std::sinh(arg) / std::sinh(nn * arg));
  } else {
    log_ratio = log_sinh(arg) - log_sinh(nn * arg);
  }
  const double base = std::log(nn * comb.p0) - 2.0 * comb.alpha0 * z + log_ratio;
  for (std::size_t j = 0; j < comb.count; ++j) {
    const double tilt = half * (fn + f1 - 2.0 * comb.frequency(j));
    out[j] = std::exp(base + tilt);
  }
  return out;
}

ProfileTriple perturbative_triple(const UniformComb& comb, std::size_t j) {
  const auto nn = static_cast<double>(comb.count);
  const double f1 = comb.frequency(0);
  const double fn = comb.frequency(comb.count - 1);
  ProfileTriple t;
  t.alpha0 = comb.alpha0;
  t.alpha1 = -nn * comb.p0 / 4.0 * comb.cr_slope * (fn + f1 - 2.0 * comb.frequency(j));
  t.sigma = 2.0 * comb.alpha0;
  return t;
}

double perturbative_profile(const UniformComb& comb, std::size_t j, double z) {
  return model_profile(comb.p0, perturbative_triple(comb, j), z);
}

}  // namespace nlicfm
