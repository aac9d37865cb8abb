#include "nlicfm/link_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlicfm/errors.hpp"

namespace nlicfm {

namespace {

void add(std::vector<Diagnostic>& out, Diagnostic::Severity sev, std::string code,
         std::string message) {
  out.push_back({sev, std::move(code), std::move(message)});
}

constexpr auto kErr = Diagnostic::Severity::error;
constexpr auto kWarn = Diagnostic::Severity::warning;

}  // namespace

double Span::beta2_eff(double f_a, double f_b) const {
  return beta2 + std::numbers::pi * beta3 * (f_a + f_b - 2.0 * f_taylor_center);
}

double Span::dispersion_at(double f) const {
  const double local_beta2 = beta2 + 2.0 * std::numbers::pi * beta3 * (f - f_taylor_center);
  return -2.0 * std::numbers::pi * f * f / units::kSpeedOfLight * local_beta2;
}

std::vector<std::size_t> Link::signal_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (!channels[i].is_pump) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Link::cut_positions() const {
  if (cut_selection.empty()) return signal_positions();
  std::vector<std::size_t> out;
  for (int idx : cut_selection) {
    for (std::size_t i = 0; i < channels.size(); ++i) {
      if (channels[i].index == idx) out.push_back(i);
    }
  }
  return out;
}

std::vector<Diagnostic> validate(const Link& link) {
  std::vector<Diagnostic> out;
  const auto& chans = link.channels;
  if (link.spans.empty()) add(out, kErr, "no-spans", "link has no spans");
  if (chans.empty()) add(out, kErr, "no-channels", "link has no channels");
  if (link.raman.size() != link.spans.size()) {
    add(out, kErr, "raman-count", "one Raman gain profile is required per span");
  }

  for (std::size_t j = 0; j < chans.size(); ++j) {
    const auto& c = chans[j];
    std::ostringstream who;
    who << "channel " << c.index;
    if (c.index != static_cast<int>(j) + 1) {
      add(out, kErr, "channel-index", who.str() + ": indices must be 1-based and consecutive");
    }
    if (!(c.bandwidth > 0.0) || !std::isfinite(c.bandwidth)) {
      add(out, kErr, "channel-bandwidth", who.str() + ": bandwidth must be > 0");
    }
    if (!(c.f_center > 0.0) || !std::isfinite(c.f_center)) {
      add(out, kErr, "channel-frequency", who.str() + ": center frequency must be > 0");
    }
    if (!(c.launch_psd >= 0.0) || !std::isfinite(c.launch_psd)) {
      add(out, kErr, "channel-psd", who.str() + ": launch PSD must be >= 0");
    }
    if (j > 0) {
      const auto& prev = chans[j - 1];
      if (!(c.f_center > prev.f_center)) {
        add(out, kErr, "overlapping-channels",
            who.str() + ": center frequencies must be strictly increasing (overlapping channels)");
      } else if (c.f_start() < prev.f_end()) {
        add(out, kWarn, "overlapping-channels",
            who.str() + ": band overlaps channel " + std::to_string(prev.index));
      }
    }
  }

  for (std::size_t s = 0; s < link.spans.size(); ++s) {
    const auto& span = link.spans[s];
    const std::string who = "span " + std::to_string(s + 1);
    if (!(span.length > 0.0) || !std::isfinite(span.length)) {
      add(out, kErr, "span-length", who + ": length must be > 0");
    }
    if (!(span.gamma >= 0.0) || !std::isfinite(span.gamma)) {
      add(out, kErr, "span-gamma", who + ": gamma must be >= 0");
    }
    if (!std::isfinite(span.beta2) || !std::isfinite(span.beta3) ||
        !std::isfinite(span.f_taylor_center)) {
      add(out, kErr, "span-dispersion", who + ": dispersion coefficients must be finite");
    }
    if (span.intrinsic_alpha.size() != chans.size()) {
      add(out, kErr, "span-alpha", who + ": loss must be given for every channel");
    } else {
      double min_loss_db = INFINITY;
      for (double a : span.intrinsic_alpha) {
        if (!(a > 0.0) || !std::isfinite(a)) {
          add(out, kErr, "span-alpha", who + ": attenuation must be > 0");
          break;
        }
        min_loss_db = std::min(min_loss_db, units::power_loss_db(a, span.length));
      }
      if (std::isfinite(min_loss_db) && min_loss_db < kMinSpanLossDb) {
        std::ostringstream msg;
        msg << who << ": span loss < 8 dB (" << min_loss_db << " dB)";
        add(out, kWarn, "short-span", msg.str());
      }
    }
    if (!span.amp_transparent) {
      if (span.amp_gain.size() != chans.size()) {
        add(out, kErr, "span-gain", who + ": amplifier gain must be given for every channel");
      } else {
        for (double g : span.amp_gain) {
          if (!(g > 0.0) || !std::isfinite(g)) {
            add(out, kErr, "span-gain", who + ": amplifier gain must be > 0");
            break;
          }
        }
      }
    }
    for (const auto& c : chans) {
      if (c.is_pump || !std::isfinite(span.beta2)) continue;
      const double d = std::abs(span.dispersion_at(c.f_center));
      if (d < kMinDispersion) {
        std::ostringstream msg;
        msg << who << ": |D| < 2 ps/(nm km) at channel " << c.index << " (" << d * 1e6
            << " ps/(nm km))";
        add(out, kWarn, "low-dispersion", msg.str());
      }
    }
  }

  for (int idx : link.cut_selection) {
    if (idx < 1 || idx > static_cast<int>(chans.size())) {
      add(out, kErr, "cut-selection", "CUT index " + std::to_string(idx) + " out of range");
    } else if (chans[static_cast<std::size_t>(idx - 1)].is_pump) {
      add(out, kErr, "cut-selection", "CUT index " + std::to_string(idx) + " is a pump");
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::error) return true;
  }
  return false;
}

void require_valid(const Link& link) {
  const auto diags = validate(link);
  if (!has_errors(diags)) return;
  std::string msg = "invalid link:";
  for (const auto& d : diags) {
    if (d.severity == Diagnostic::Severity::error) msg += "\n  " + d.message;
  }
  throw ValidationError(msg);
}

DispersionCoefficients beta_from_dispersion(double d, double s, double f_ref) {
  const double lambda = units::kSpeedOfLight / f_ref;
  const double k = lambda * lambda / (2.0 * std::numbers::pi * units::kSpeedOfLight);
  return {-d * k, (s + 2.0 * d / lambda) * k * k};
}

}  // namespace nlicfm
