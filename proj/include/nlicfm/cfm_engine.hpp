#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nlicfm/link_model.hpp"
#include "nlicfm/profile_fitter.hpp"
#include "nlicfm/srs_solver.hpp"

namespace nlicfm {

/// Per-span power loss factors S_p(f_j) = P_j(0) / P_j(L_p).
struct SpanLossTable {
  std::vector<std::vector<double>> s;  // [span][channel]

  std::size_t span_count() const { return s.size(); }
  double at(std::size_t span, std::size_t channel) const { return s[span][channel]; }
};

std::vector<double> span_loss(const PowerEvolution& evolution);
SpanLossTable loss_table(std::span<const PowerEvolution> evolutions);

/// Launch PSD at the start of every span, [span][channel].
using PsdTable = std::vector<std::vector<double>>;

/// Gamma_p(f_j) / S_p(f_j); exactly 1 behind a transparent amplifier.
double net_span_gain(const Span& span, const SpanLossTable& losses, std::size_t p, std::size_t j);

/// G^(ns)_j = G_j prod_{p<ns} Gamma_p(f_j) / S_p(f_j), using the amplifier
/// gains stored on the link's spans.
PsdTable propagate_psd(const Link& link, const SpanLossTable& losses);

/// Fitted triples, [span][channel]. Pump entries are ignored.
using FitTable = std::vector<std::vector<FittedProfile>>;

/// Taylor truncation order 1 + floor(10 |2 alpha1 / sigma|).
unsigned choose_M(double alpha1, double sigma);

/// sum_{k2=0..M} (2 / k2!) c^k2 / (4 alpha0 + (k1 + k2) sigma), c = 2 alpha1 / sigma.
double h_coeff(unsigned k1, unsigned M, const ProfileTriple& t);

/// |zeta|^2 assembled from the real h-coefficient form.
double zeta_sq(double varrho, const ProfileTriple& t, unsigned M);

double beta2_eff(const Span& span, double f_mch, double f_cut);

/// Rectangular island integral of a / (a^2 + varrho^2), a = 2 alpha0 + k1 sigma,
/// with beta frozen at beta2eff. `exact` swaps pi asinh(x/2) for the
/// dilogarithm kernel. Throws NumericError("dispersion singularity") when
/// |beta2eff| < 1e-30 s^2/m.
double island_integral(unsigned k1, const ProfileTriple& t, double beta2eff, double bw_cut,
                       double f_cut, double f_start, double f_end, bool exact = false);

inline constexpr double kDispersionFloor = 1e-30;  // s^2/m

/// Inputs handed to correction-factor plugins.
struct RhoContext {
  std::size_t span = 0;        // 0-based
  std::size_t cut = 0;         // 0-based channel position
  std::size_t interferer = 0;  // == cut for the self term
  double accumulated_dispersion = 0.0;  // s/m, D(f_cut) L summed over spans 0..span
  double cut_symbol_rate = 0.0;         // Bd
  double phi_cut = 0.0;
  double phi_interferer = 0.0;
};

struct CorrectionFactors {
  using Law = std::function<double(const RhoContext&)>;
  Law rho_cut;  // empty = 1
  Law rho_mch;  // empty = 1
  double rho_coh = 1.0;

  /// rho_cut = rho_mch = 1 with the coherence term on.
  static CorrectionFactors identity();
  /// rho_cut = rho_mch = 1, rho_coh = 0.
  static CorrectionFactors incoherent_only();
  static CorrectionFactors constant(double cut, double mch, double coh);
};

struct Contribution {
  std::size_t span = 0;
  std::size_t interferer = 0;
  double value = 0.0;  // W/Hz
};

struct NliResult {
  std::size_t channel = 0;  // 0-based position
  int index = 0;            // 1-based channel index
  double f_cut = 0.0;
  double bandwidth = 0.0;
  double g_nli = 0.0;        // W/Hz
  double incoherent = 0.0;   // W/Hz
  double coherence = 0.0;    // W/Hz
  std::vector<Contribution> breakdown;

  double nli_power() const { return g_nli * bandwidth; }
};

struct NliReport {
  std::vector<NliResult> cuts;
  std::vector<Diagnostic> diagnostics;
  double eval_time = 0.0;  // s
};

struct CfmOptions {
  bool exact_fint = false;
  bool breakdown = false;
};

/// Closed-form NLI evaluator. Construction precomputes per-(span, channel)
/// Taylor weights, span PSDs and the post-span gain ladders, so per-CUT
/// evaluation is a plain double loop over spans and interferers.
class CfmEngine {
 public:
  CfmEngine(const Link& link, const FitTable& fits, const SpanLossTable& losses,
            CfmOptions options = {});

  double incoherent(std::size_t cut) const;
  double coherence(std::size_t cut, const CorrectionFactors& rho) const;
  NliResult cfm5(std::size_t cut, const CorrectionFactors& rho) const;
  double m1_legacy(std::size_t cut) const;

  /// cfm5 for every CUT of the link, in channel order.
  NliReport evaluate_all(const CorrectionFactors& rho, std::size_t threads = 1) const;

  const PsdTable& psd() const { return psd_; }
  /// prod_{p >= span} Gamma_p(f_j) / S_p(f_j)
  double post_span_gain(std::size_t span, std::size_t channel) const { return post_[span][channel]; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  struct Weights {
    unsigned M = 0;
    double prefactor = 0.0;  // exp(-4 alpha1 / sigma)
    std::vector<double> a;   // 2 alpha0 + k sigma
    std::vector<double> w;   // h(k) c^k / k!
    ProfileTriple triple;
  };

  static double taylor_island(const Weights& w, double beta, double bw, double d_lo, double d_hi,
                              bool exact);
  template <class Kernel>
  double accumulate(std::size_t cut, const CorrectionFactors* rho, std::vector<Contribution>* out,
                    Kernel&& kernel) const;
  RhoContext context(std::size_t span, std::size_t cut, std::size_t interferer) const;

  const Link& link_;
  CfmOptions options_;
  std::vector<std::size_t> signals_;
  PsdTable psd_;
  std::vector<std::vector<double>> post_;
  std::vector<std::vector<double>> acc_dispersion_;
  std::vector<std::vector<Weights>> weights_;  // [span][channel]
  std::vector<Diagnostic> diagnostics_;
};

double nli_incoherent(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                      std::size_t cut);
double coherence_term(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                      std::size_t cut, const CorrectionFactors& rho);
NliResult nli_cfm5(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                   std::size_t cut, const CorrectionFactors& rho);
/// First-order form with M = 1 and a linearized exponential prefactor.
/// Appends a warning to `diagnostics` when any |2 alpha1 / sigma| > 0.3.
double nli_m1_legacy(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                     std::size_t cut, std::vector<Diagnostic>* diagnostics = nullptr);

}  // namespace nlicfm
