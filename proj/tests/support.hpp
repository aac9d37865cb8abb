#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "nlicfm/cfm_engine.hpp"
#include "nlicfm/link_model.hpp"
#include "nlicfm/pipeline.hpp"

namespace testing {

inline constexpr double kAlphaSmf = 0.2 / nlicfm::units::kNeperToDb / 1000.0;  // 0.2 dB/km, Np/m

struct CombSetup {
  std::size_t channels = 5;
  double f_first = 193.0e12;
  double spacing = 50e9;
  double bandwidth = 32e9;
  double power = 1e-3;  // W per channel
  std::size_t spans = 1;
  double length = 100e3;
  double alpha = kAlphaSmf;
  double gamma = 1.3e-3;
  double d = 17e-6;  // s/m^2
  double s = 67.0;   // s/m^3
  double c_r_max = 0.0;  // 1/(W m)
  double delta_f = 15e12;
  bool transparent = true;
  double gain_db = 0.0;  // used when not transparent
};

inline nlicfm::Link make_link(const CombSetup& c) {
  nlicfm::Link link;
  for (std::size_t j = 0; j < c.channels; ++j) {
    nlicfm::Channel ch;
    ch.index = static_cast<int>(j) + 1;
    ch.f_center = c.f_first + static_cast<double>(j) * c.spacing;
    ch.bandwidth = c.bandwidth;
    ch.launch_psd = c.power / c.bandwidth;
    ch.mod_format_phi = 1.0;
    link.channels.push_back(ch);
  }
  const double f_mid = c.f_first + 0.5 * static_cast<double>(c.channels - 1) * c.spacing;
  const auto beta = nlicfm::beta_from_dispersion(c.d, c.s, f_mid);
  for (std::size_t p = 0; p < c.spans; ++p) {
    nlicfm::Span s;
    s.length = c.length;
    s.gamma = c.gamma;
    s.beta2 = beta.beta2;
    s.beta3 = beta.beta3;
    s.f_taylor_center = f_mid;
    s.intrinsic_alpha.assign(c.channels, c.alpha);
    s.amp_transparent = c.transparent;
    if (!c.transparent) s.amp_gain.assign(c.channels, std::pow(10.0, c.gain_db / 10.0));
    link.spans.push_back(s);
    link.raman.push_back(c.c_r_max > 0.0 ? nlicfm::RamanGainProfile::triangular(c.c_r_max, c.delta_f)
                                         : nlicfm::RamanGainProfile::none());
  }
  return link;
}

/// Every (span, channel) shares one triple; losses follow from the triple.
inline nlicfm::FitTable uniform_fits(const nlicfm::Link& link, const nlicfm::ProfileTriple& t) {
  nlicfm::FitTable fits(link.spans.size(), std::vector<nlicfm::FittedProfile>(link.channels.size()));
  for (auto& row : fits) {
    for (auto& f : row) {
      f.alpha0 = t.alpha0;
      f.alpha1 = t.alpha1;
      f.sigma = t.sigma;
    }
  }
  return fits;
}

inline nlicfm::SpanLossTable model_losses(const nlicfm::Link& link, const nlicfm::FitTable& fits) {
  nlicfm::SpanLossTable t;
  for (std::size_t p = 0; p < link.spans.size(); ++p) {
    std::vector<double> row;
    for (std::size_t j = 0; j < link.channels.size(); ++j) {
      const auto& f = fits[p][j];
      const double len = link.spans[p].length;
      row.push_back(1.0 / nlicfm::model_profile(1.0, f.triple(), len));
    }
    t.s.push_back(row);
  }
  return t;
}

inline double db_gap(double a, double b) { return std::abs(10.0 * std::log10(a / b)); }

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testing
