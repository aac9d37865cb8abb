#include "nlicfm/cfm_engine.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "nlicfm/errors.hpp"
#include "nlicfm/parallel.hpp"
#include "nlicfm/special_functions.hpp"

namespace nlicfm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPiSq = kPi * kPi;
constexpr double kSixteen27 = 16.0 / 27.0;
constexpr unsigned kPathologicalM = 120;
constexpr double kLegacyLimit = 0.3;

void check_dispersion(double beta, std::size_t span, std::size_t interferer) {
  if (!(std::abs(beta) >= kDispersionFloor)) {
    throw NumericError("dispersion singularity at span " + std::to_string(span + 1) +
                       ", interferer " + std::to_string(interferer + 1));
  }
}

// Island integral of a / (a^2 + varrho^2) over f1 in [f_cut + d_lo, f_cut + d_hi],
// f2 across the CUT band.
double island_core(double a, double beta, double bw_cut, double d_lo, double d_hi, bool exact) {
  const double s = kPiSq * beta * bw_cut;
  const double x_hi = s * d_hi / a;
  const double x_lo = s * d_lo / a;
  assert(std::isfinite(x_hi) && std::isfinite(x_lo));
  if (exact) return (f_int_exact(2.0 * x_hi) - f_int_exact(2.0 * x_lo)) / (4.0 * kPiSq * beta);
  return (std::asinh(x_hi) - std::asinh(x_lo)) / (4.0 * kPi * beta);
}

void check_tables(const Link& link, const FitTable& fits, const SpanLossTable& losses) {
  const std::size_t ns = link.spans.size();
  const std::size_t nc = link.channels.size();
  if (fits.size() != ns || losses.span_count() != ns) {
    throw ValidationError("fit and loss tables must cover every span");
  }
  for (std::size_t p = 0; p < ns; ++p) {
    if (fits[p].size() != nc || losses.s[p].size() != nc) {
      throw ValidationError("fit and loss tables must cover every channel (span " +
                            std::to_string(p + 1) + ")");
    }
  }
}

}  // namespace

std::vector<double> span_loss(const PowerEvolution& evolution) {
  std::vector<double> s(evolution.channel_count());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = evolution.at(j, 0) / evolution.end_power(j);
  return s;
}

SpanLossTable loss_table(std::span<const PowerEvolution> evolutions) {
  SpanLossTable t;
  t.s.reserve(evolutions.size());
  for (const auto& e : evolutions) t.s.push_back(span_loss(e));
  return t;
}

double net_span_gain(const Span& span, const SpanLossTable& losses, std::size_t p,
                     std::size_t j) {
  return span.amp_transparent ? 1.0 : span.amp_gain[j] / losses.at(p, j);
}

PsdTable propagate_psd(const Link& link, const SpanLossTable& losses) {
  const std::size_t ns = link.spans.size();
  const std::size_t nc = link.channels.size();
  PsdTable g(ns, std::vector<double>(nc));
  for (std::size_t j = 0; j < nc; ++j) g[0][j] = link.channels[j].launch_psd;
  for (std::size_t p = 1; p < ns; ++p) {
    for (std::size_t j = 0; j < nc; ++j) {
      g[p][j] = g[p - 1][j] * net_span_gain(link.spans[p - 1], losses, p - 1, j);
    }
  }
  return g;
}

unsigned choose_M(double alpha1, double sigma) {
  return 1u + static_cast<unsigned>(std::floor(10.0 * std::abs(2.0 * alpha1 / sigma)));
}

double h_coeff(unsigned k1, unsigned M, const ProfileTriple& t) {
  const double c = 2.0 * t.alpha1 / t.sigma;
  double term = 1.0;  // c^k2 / k2!
  double sum = 0.0;
  for (unsigned k2 = 0; k2 <= M; ++k2) {
    if (k2 > 0) term *= c / k2;
    sum += 2.0 * term / (4.0 * t.alpha0 + (k1 + k2) * t.sigma);
  }
  return sum;
}

double zeta_sq(double varrho, const ProfileTriple& t, unsigned M) {
  const double c = 2.0 * t.alpha1 / t.sigma;
  const double r2 = varrho * varrho;
  double term = 1.0;
  double sum = 0.0;
  for (unsigned k1 = 0; k1 <= M; ++k1) {
    if (k1 > 0) term *= c / k1;
    const double a = 2.0 * t.alpha0 + k1 * t.sigma;
    sum += term * a / (a * a + r2) * h_coeff(k1, M, t);
  }
  return sum;
}

double beta2_eff(const Span& span, double f_mch, double f_cut) {
  return span.beta2_eff(f_mch, f_cut);
}

double island_integral(unsigned k1, const ProfileTriple& t, double beta2eff, double bw_cut,
                       double f_cut, double f_start, double f_end, bool exact) {
  if (!(std::abs(beta2eff) >= kDispersionFloor)) throw NumericError("dispersion singularity");
  const double a = 2.0 * t.alpha0 + k1 * t.sigma;
  return island_core(a, beta2eff, bw_cut, f_start - f_cut, f_end - f_cut, exact);
}

CorrectionFactors CorrectionFactors::identity() { return {}; }

CorrectionFactors CorrectionFactors::incoherent_only() {
  CorrectionFactors r;
  r.rho_coh = 0.0;
  return r;
}

CorrectionFactors CorrectionFactors::constant(double cut, double mch, double coh) {
  CorrectionFactors r;
  r.rho_cut = [cut](const RhoContext&) { return cut; };
  r.rho_mch = [mch](const RhoContext&) { return mch; };
  r.rho_coh = coh;
  return r;
}

CfmEngine::CfmEngine(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                     CfmOptions options)
    : link_(link), options_(options), signals_(link.signal_positions()) {
  check_tables(link, fits, losses);
  const std::size_t ns = link.spans.size();
  const std::size_t nc = link.channels.size();

  psd_ = propagate_psd(link, losses);

  post_.assign(ns, std::vector<double>(nc, 1.0));
  for (std::size_t j = 0; j < nc; ++j) {
    double prod = 1.0;
    for (std::size_t p = ns; p-- > 0;) {
      prod *= net_span_gain(link.spans[p], losses, p, j);
      post_[p][j] = prod;
    }
  }

  acc_dispersion_.assign(ns, std::vector<double>(nc, 0.0));
  for (std::size_t j = 0; j < nc; ++j) {
    double acc = 0.0;
    for (std::size_t p = 0; p < ns; ++p) {
      acc += link.spans[p].dispersion_at(link.channels[j].f_center) * link.spans[p].length;
      acc_dispersion_[p][j] = acc;
    }
  }

  weights_.assign(ns, std::vector<Weights>(nc));
  for (std::size_t p = 0; p < ns; ++p) {
    for (std::size_t j : signals_) {
      const FittedProfile& f = fits[p][j];
      if (!(f.sigma > 0.0) || !(f.alpha0 > 0.0) || !std::isfinite(f.alpha1)) {
        throw NumericError("invalid fitted profile for span " + std::to_string(p + 1) +
                           ", channel " + std::to_string(link.channels[j].index));
      }
      Weights& w = weights_[p][j];
      w.triple = f.triple();
      w.M = choose_M(f.alpha1, f.sigma);
      if (w.M > kPathologicalM) {
        diagnostics_.push_back({Diagnostic::Severity::warning, "pathological-fit",
                                "span " + std::to_string(p + 1) + ", channel " +
                                    std::to_string(link.channels[j].index) + ": M = " +
                                    std::to_string(w.M)});
      }
      const double c = 2.0 * f.alpha1 / f.sigma;
      w.prefactor = std::exp(-2.0 * c);
      w.a.resize(w.M + 1);
      w.w.resize(w.M + 1);
      double term = 1.0;
      for (unsigned k = 0; k <= w.M; ++k) {
        if (k > 0) term *= c / k;
        w.a[k] = 2.0 * f.alpha0 + k * f.sigma;
        w.w[k] = h_coeff(k, w.M, w.triple) * term;
      }
    }
  }
}

RhoContext CfmEngine::context(std::size_t span, std::size_t cut, std::size_t interferer) const {
  RhoContext ctx;
  ctx.span = span;
  ctx.cut = cut;
  ctx.interferer = interferer;
  ctx.accumulated_dispersion = acc_dispersion_[span][cut];
  ctx.cut_symbol_rate = link_.channels[cut].bandwidth;
  ctx.phi_cut = link_.channels[cut].mod_format_phi;
  ctx.phi_interferer = link_.channels[interferer].mod_format_phi;
  return ctx;
}

template <class Kernel>
double CfmEngine::accumulate(std::size_t cut, const CorrectionFactors* rho,
                             std::vector<Contribution>* out, Kernel&& kernel) const {
  const Channel& c = link_.channels[cut];
  double total = 0.0;
  for (std::size_t p = 0; p < link_.spans.size(); ++p) {
    const Span& span = link_.spans[p];
    const double gamma2 = span.gamma * span.gamma;
    const double g_cut = psd_[p][cut];
    const double post = post_[p][cut];
    double span_total = 0.0;
    for (std::size_t m : signals_) {
      const Channel& ch = link_.channels[m];
      const double beta = span.beta2_eff(ch.f_center, c.f_center);
      check_dispersion(beta, p, m);
      const bool self = m == cut;
      double r = 1.0;
      if (rho != nullptr) {
        const auto& law = self ? rho->rho_cut : rho->rho_mch;
        if (law) {
          r = law(context(p, cut, m));
          if (!std::isfinite(r) || r < 0.0) {
            throw ValidationError("correction factor must be finite and non-negative");
          }
        }
      }
      const double g_m = psd_[p][m];
      const double island =
          kernel(weights_[p][m], beta, c.bandwidth, ch.f_start() - c.f_center,
                 ch.f_end() - c.f_center);
      const double value =
          kSixteen27 * gamma2 * g_cut * g_m * g_m * (self ? 1.0 : 2.0) * r * post * island;
      span_total += value;
      if (out != nullptr) out->push_back({p, m, value});
    }
    total += span_total;
  }
  return total;
}

double CfmEngine::taylor_island(const Weights& w, double beta, double bw, double d_lo,
                                double d_hi, bool exact) {
  double sum = 0.0;
  for (unsigned k = 0; k <= w.M; ++k) {
    sum += w.w[k] * island_core(w.a[k], beta, bw, d_lo, d_hi, exact);
  }
  return w.prefactor * sum;
}

double CfmEngine::incoherent(std::size_t cut) const {
  const bool exact = options_.exact_fint;
  return accumulate(cut, nullptr, nullptr,
                    [exact](const Weights& w, double beta, double bw, double d_lo, double d_hi) {
                      return taylor_island(w, beta, bw, d_lo, d_hi, exact);
                    });
}

double CfmEngine::m1_legacy(std::size_t cut) const {
  const bool exact = options_.exact_fint;
  return accumulate(cut, nullptr, nullptr,
                    [exact](const Weights& w, double beta, double bw, double d_lo, double d_hi) {
                      const ProfileTriple& t = w.triple;
                      const double c = 2.0 * t.alpha1 / t.sigma;
                      const double i0 = island_core(2.0 * t.alpha0, beta, bw, d_lo, d_hi, exact);
                      const double i1 =
                          island_core(2.0 * t.alpha0 + t.sigma, beta, bw, d_lo, d_hi, exact);
                      const double b0 =
                          2.0 / (4.0 * t.alpha0) + 2.0 / (4.0 * t.alpha0 + t.sigma) * c;
                      const double b1 = 2.0 / (4.0 * t.alpha0 + t.sigma) +
                                        2.0 / (4.0 * t.alpha0 + 2.0 * t.sigma) * c;
                      return (1.0 - 2.0 * c) * (b0 * i0 + b1 * c * i1);
                    });
}

double CfmEngine::coherence(std::size_t cut, const CorrectionFactors& rho) const {
  if (rho.rho_coh == 0.0) return 0.0;
  if (!std::isfinite(rho.rho_coh) || rho.rho_coh < 0.0) {
    throw ValidationError("coherence factor must be finite and non-negative");
  }
  const std::size_t ns = link_.spans.size();
  const double brace = coherence_brace(static_cast<unsigned>(ns));
  if (brace == 0.0) return 0.0;
  const Channel& c = link_.channels[cut];
  const double bw2 = c.bandwidth * c.bandwidth;
  double sum = 0.0;
  for (std::size_t p = 0; p < ns; ++p) {
    const Span& span = link_.spans[p];
    const double beta = span.beta2_eff(c.f_center, c.f_center);
    check_dispersion(beta, p, cut);
    double r = 1.0;
    if (rho.rho_cut) {
      r = rho.rho_cut(context(p, cut, cut));
      if (!std::isfinite(r) || r < 0.0) {
        throw ValidationError("correction factor must be finite and non-negative");
      }
    }
    const double a0 = weights_[p][cut].triple.alpha0;
    const double g = psd_[p][cut];
    const double len = span.length;
    sum += span.gamma * span.gamma * g * g * g * r * post_[p][cut] *
           (1.0 / (4.0 * kPi * beta * a0)) * 2.0 * si(kPiSq * beta * len * bw2) /
           (kPi * a0 * len) * brace;
  }
  return kSixteen27 * rho.rho_coh * sum;
}

NliResult CfmEngine::cfm5(std::size_t cut, const CorrectionFactors& rho) const {
  const Channel& c = link_.channels[cut];
  NliResult r;
  r.channel = cut;
  r.index = c.index;
  r.f_cut = c.f_center;
  r.bandwidth = c.bandwidth;
  const bool exact = options_.exact_fint;
  r.incoherent = accumulate(
      cut, &rho, options_.breakdown ? &r.breakdown : nullptr,
      [exact](const Weights& w, double beta, double bw, double d_lo, double d_hi) {
        return taylor_island(w, beta, bw, d_lo, d_hi, exact);
      });
  r.coherence = coherence(cut, rho);
  r.g_nli = r.incoherent + r.coherence;
  return r;
}

NliReport CfmEngine::evaluate_all(const CorrectionFactors& rho, std::size_t threads) const {
  const auto cuts = link_.cut_positions();
  NliReport report;
  report.diagnostics = diagnostics_;
  report.cuts.resize(cuts.size());
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(cuts.size(), threads, [&](std::size_t i) { report.cuts[i] = cfm5(cuts[i], rho); });
  report.eval_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

double nli_incoherent(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                      std::size_t cut) {
  return CfmEngine(link, fits, losses).incoherent(cut);
}

double coherence_term(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                      std::size_t cut, const CorrectionFactors& rho) {
  return CfmEngine(link, fits, losses).coherence(cut, rho);
}

NliResult nli_cfm5(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                   std::size_t cut, const CorrectionFactors& rho) {
  return CfmEngine(link, fits, losses).cfm5(cut, rho);
}

double nli_m1_legacy(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                     std::size_t cut, std::vector<Diagnostic>* diagnostics) {
  if (diagnostics != nullptr) {
    for (std::size_t p = 0; p < link.spans.size(); ++p) {
      for (std::size_t j : link.signal_positions()) {
        const double c = 2.0 * fits[p][j].alpha1 / fits[p][j].sigma;
        if (std::abs(c) > kLegacyLimit) {
          diagnostics->push_back({Diagnostic::Severity::warning, "legacy-out-of-range",
                                  "span " + std::to_string(p + 1) + ", channel " +
                                      std::to_string(link.channels[j].index) +
                                      ": |2 alpha1 / sigma| = " + std::to_string(std::abs(c))});
        }
      }
    }
  }
  return CfmEngine(link, fits, losses).m1_legacy(cut);
}

}  // namespace nlicfm
