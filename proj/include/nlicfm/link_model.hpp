#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nlicfm/raman_gain.hpp"

namespace nlicfm {

namespace units {
inline constexpr double kSpeedOfLight = 299792458.0;     // m/s
inline constexpr double kNeperToDb = 8.685889638065037;  // 20 log10(e)

/// dB/km of power loss to field attenuation in Np/m.
inline constexpr double field_alpha_from_db_per_km(double loss_db_per_km) {
  return loss_db_per_km / kNeperToDb / 1000.0;
}
/// Field attenuation alpha (Np/m) over a length (m) to power loss in dB.
inline constexpr double power_loss_db(double alpha, double length) {
  return kNeperToDb * alpha * length;
}
}  // namespace units

struct Channel {
  int index = 0;             // 1-based ordinal in the link
  double f_center = 0.0;     // Hz
  double bandwidth = 0.0;    // Hz, rectangular null-to-null width (= symbol rate)
  double launch_psd = 0.0;   // W/Hz, flat-top value
  double mod_format_phi = 0.0;
  // Co-propagating Raman pump: takes part in the power evolution, never in
  // NLI sums.
  bool is_pump = false;

  double f_start() const { return f_center - 0.5 * bandwidth; }
  double f_end() const { return f_center + 0.5 * bandwidth; }
  double launch_power() const { return launch_psd * bandwidth; }
};

struct Span {
  double length = 0.0;           // m
  double gamma = 0.0;            // 1/(W m)
  double beta2 = 0.0;            // s^2/m
  double beta3 = 0.0;            // s^3/m
  double f_taylor_center = 0.0;  // Hz
  // Per-channel vectors aligned with Link::channels.
  std::vector<double> intrinsic_alpha;  // Np/m (field attenuation)
  std::vector<double> amp_gain;         // dimensionless power gain
  // When set, amp_gain is resolved to the computed span loss per channel.
  bool amp_transparent = false;

  /// beta2 + pi beta3 (f_a + f_b - 2 f_c).
  double beta2_eff(double f_a, double f_b) const;
  /// Local dispersion parameter D(f) in s/m^2.
  double dispersion_at(double f) const;
};

struct Link {
  std::vector<Span> spans;
  std::vector<Channel> channels;
  std::vector<RamanGainProfile> raman;  // one per span
  std::vector<int> cut_selection;       // 1-based channel indices; empty = all signals

  /// 0-based positions of the channels evaluated as CUT.
  std::vector<std::size_t> cut_positions() const;
  /// 0-based positions of non-pump channels.
  std::vector<std::size_t> signal_positions() const;
};

struct Diagnostic {
  enum class Severity { warning, error };
  Severity severity = Severity::warning;
  std::string code;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

/// Checks every invariant of the link. Errors block computation, warnings
/// flag operation outside the accurate regime (short spans, low dispersion,
/// overlapping channel bands).
std::vector<Diagnostic> validate(const Link& link);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Throws ValidationError listing every error diagnostic.
void require_valid(const Link& link);

struct DispersionCoefficients {
  double beta2 = 0.0;  // s^2/m
  double beta3 = 0.0;  // s^3/m
};

/// Converts D [s/m^2] and slope S [s/m^3] at f_ref into beta2/beta3.
DispersionCoefficients beta_from_dispersion(double d, double s, double f_ref);

inline constexpr double kMinDispersion = 2e-6;  // 2 ps/(nm km) in s/m^2
inline constexpr double kMinSpanLossDb = 8.0;

}  // namespace nlicfm
