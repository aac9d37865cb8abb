#include "nlicfm/profile_fitter.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nlicfm/errors.hpp"

namespace nlicfm {

namespace {

constexpr double kMaxCondition = 1e12;

// (1 - exp(-sigma z)) / sigma
double saturating_basis(double sigma, double z) { return -std::expm1(-sigma * z) / sigma; }

// Trapezoid weight of each sample times P^m_c, plus ln(P / P(0)).
struct Samples {
  std::vector<double> weight;
  std::vector<double> log_ratio;
};

Samples prepare(std::span<const double> z, std::span<const double> power, double m_c) {
  const std::size_t n = z.size();
  if (n < 3 || power.size() != n) {
    throw NumericError("profile fit needs >= 3 samples on a matching grid");
  }
  Samples s;
  s.weight.resize(n);
  s.log_ratio.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double left = k > 0 ? z[k] - z[k - 1] : 0.0;
    const double right = k + 1 < n ? z[k + 1] - z[k] : 0.0;
    const double pw = m_c == 0.0 ? 1.0 : std::pow(power[k], m_c);
    s.weight[k] = 0.5 * (left + right) * pw;
    s.log_ratio[k] = std::log(power[k] / power[0]);
  }
  return s;
}

Alpha01 solve_prepared(std::span<const double> z, const Samples& s, double sigma) {
  double m00 = 0.0, m01 = 0.0, m11 = 0.0, r0 = 0.0, r1 = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double u0 = z[k];
    const double u1 = saturating_basis(sigma, z[k]);
    const double w = s.weight[k];
    m00 += w * u0 * u0;
    m01 += w * u0 * u1;
    m11 += w * u1 * u1;
    r0 += w * u0 * s.log_ratio[k];
    r1 += w * u1 * s.log_ratio[k];
  }
  r0 *= -0.5;
  r1 *= -0.5;
  const double tr = m00 + m11;
  const double disc = std::sqrt((m00 - m11) * (m00 - m11) + 4.0 * m01 * m01);
  const double lmax = 0.5 * (tr + disc);
  const double lmin = 0.5 * (tr - disc);
  const double det = m00 * m11 - m01 * m01;
  if (!(lmin > 0.0) || !(lmax / lmin <= kMaxCondition) || !(det > 0.0)) {
    throw NumericError("degenerate fit geometry");
  }
  return {(r0 * m11 - r1 * m01) / det, (m00 * r1 - m01 * r0) / det};
}

double cost_prepared(std::span<const double> z, const Samples& s, const ProfileTriple& t) {
  double acc = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double r = s.log_ratio[k] + 2.0 * t.alpha0 * z[k] +
                     2.0 * t.alpha1 * saturating_basis(t.sigma, z[k]);
    acc += s.weight[k] * r * r;
  }
  return acc;
}

struct Candidate {
  ProfileTriple triple;
  double cost = std::numeric_limits<double>::infinity();
};

struct SearchResult {
  Candidate best;
  bool at_edge = false;
};

SearchResult golden_section(std::span<const double> z, const Samples& s, double lo, double hi,
                            double tol) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  SearchResult res;
  auto eval = [&](double sigma) {
    try {
      const auto a = solve_prepared(z, s, sigma);
      const ProfileTriple t{a.alpha0, a.alpha1, sigma};
      const double c = cost_prepared(z, s, t);
      if (c < res.best.cost) res.best = {t, c};
      return c;
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  const double width = tol * (hi - lo);
  while (b - a > width) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  res.at_edge = (a == lo) || (b == hi);
  return res;
}

}  // namespace

void FitSettings::check() const {
  if (!(m_c >= 0.0)) throw ValidationError("fit settings: m_c must be >= 0");
  if (!(sigma_lo_factor > 0.0 && sigma_lo_factor < sigma_hi_factor)) {
    throw ValidationError("fit settings: need 0 < sigma_lo_factor < sigma_hi_factor");
  }
  if (!(gs_tol > 0.0)) throw ValidationError("fit settings: gs_tol must be > 0");
  if (allow_widening && !(widened_lo_factor > 0.0 && widened_lo_factor < widened_hi_factor)) {
    throw ValidationError("fit settings: invalid widened interval");
  }
}

double model_profile(double p0, const ProfileTriple& t, double z) {
  return p0 * std::exp(-2.0 * t.alpha0 * z + (2.0 * t.alpha1 / t.sigma) * std::expm1(-t.sigma * z));
}

double fit_cost(std::span<const double> z, std::span<const double> power,
                const ProfileTriple& t, double m_c) {
  return cost_prepared(z, prepare(z, power, m_c), t);
}

Alpha01 solve_alpha01(std::span<const double> z, std::span<const double> power, double sigma,
                      double m_c) {
  return solve_prepared(z, prepare(z, power, m_c), sigma);
}

FittedProfile fit_profile(std::span<const double> z, std::span<const double> power,
                          double intrinsic_alpha, const FitSettings& settings,
                          std::size_t span_index, std::size_t channel_index) {
  settings.check();
  const Samples s = prepare(z, power, settings.m_c);

  FittedProfile out;
  out.span_index = span_index;
  out.channel_index = channel_index;
  out.m_c = settings.m_c;
  out.sigma_lo = settings.sigma_lo_factor * intrinsic_alpha;
  out.sigma_hi = settings.sigma_hi_factor * intrinsic_alpha;

  auto run = golden_section(z, s, out.sigma_lo, out.sigma_hi, settings.gs_tol);
  if (run.at_edge && settings.allow_widening) {
    const double lo = std::min(out.sigma_lo, settings.widened_lo_factor * intrinsic_alpha);
    const double hi = std::max(out.sigma_hi, settings.widened_hi_factor * intrinsic_alpha);
    auto wide = golden_section(z, s, lo, hi, settings.gs_tol);
    out.widened = true;
    out.sigma_lo = lo;
    out.sigma_hi = hi;
    if (wide.best.cost <= run.best.cost) run = wide;
  }
  if (!std::isfinite(run.best.cost)) {
    throw NumericError("fit failed for span " + std::to_string(span_index + 1) + ", channel " +
                       std::to_string(channel_index + 1));
  }
  out.alpha0 = run.best.triple.alpha0;
  out.alpha1 = run.best.triple.alpha1;
  out.sigma = run.best.triple.sigma;
  out.cost = run.best.cost;
  return out;
}

}  // namespace nlicfm
