#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlicfm/errors.hpp"
#include "nlicfm/link_model.hpp"
#include "nlicfm/raman_gain.hpp"
#include "support.hpp"

using namespace nlicfm;
using testing::CombSetup;
using testing::make_link;

namespace {

bool has_code(const std::vector<Diagnostic>& d, const std::string& code, Diagnostic::Severity sev) {
  for (const auto& x : d) {
    if (x.code == code && x.severity == sev) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("loss conversion") {
  CHECK(units::field_alpha_from_db_per_km(0.2) == doctest::Approx(2.3026e-5).epsilon(1e-4));
  CHECK(units::power_loss_db(2.3e-5, 100e3) == doctest::Approx(19.98).epsilon(1e-3));
  CHECK(units::power_loss_db(units::field_alpha_from_db_per_km(0.2), 80e3) ==
        doctest::Approx(16.0).epsilon(1e-14));
}

TEST_CASE("validation") {
  CombSetup setup;
  setup.alpha = 2.3e-5;
  Link link = make_link(setup);
  SUBCASE("100 km span is clean") { CHECK(validate(link).empty()); }
  SUBCASE("short span warns") {
    link.spans[0].length = 10e3;
    const auto d = validate(link);
    CHECK(has_code(d, "short-span", Diagnostic::Severity::warning));
    CHECK(!has_errors(d));
  }
  SUBCASE("identical centers are an error") {
    link.channels[1].f_center = link.channels[0].f_center;
    CHECK(has_code(validate(link), "overlapping-channels", Diagnostic::Severity::error));
    CHECK_THROWS_AS(require_valid(link), ValidationError);
  }
  SUBCASE("overlapping bands warn") {
    for (auto& c : link.channels) c.bandwidth = 60e9;
    const auto d = validate(link);
    CHECK(has_code(d, "overlapping-channels", Diagnostic::Severity::warning));
    CHECK(!has_errors(d));
  }
  SUBCASE("low dispersion warns") {
    const auto b = beta_from_dispersion(1e-6, 0.0, 193.1e12);
    link.spans[0].beta2 = b.beta2;
    link.spans[0].beta3 = b.beta3;
    CHECK(has_code(validate(link), "low-dispersion", Diagnostic::Severity::warning));
  }
  SUBCASE("idempotent") {
    link.spans[0].length = 5e3;
    link.channels[2].launch_psd = -1.0;
    CHECK(validate(link) == validate(link));
    CHECK(has_errors(validate(link)));
  }
  SUBCASE("structural errors") {
    Link bad = link;
    bad.raman.pop_back();
    CHECK(has_code(validate(bad), "raman-count", Diagnostic::Severity::error));
    bad = link;
    bad.spans[0].gamma = -1.0;
    CHECK(has_code(validate(bad), "span-gamma", Diagnostic::Severity::error));
    bad = link;
    bad.spans[0].amp_transparent = false;
    CHECK(has_code(validate(bad), "span-gain", Diagnostic::Severity::error));
    bad = link;
    bad.cut_selection = {9};
    CHECK(has_code(validate(bad), "cut-selection", Diagnostic::Severity::error));
  }
}

TEST_CASE("band edges") {
  Channel c;
  c.f_center = 193.1e12;
  c.bandwidth = 64e9;
  CHECK(c.f_end() - c.f_start() == c.bandwidth);
  c.f_center = 191.35e12;
  c.bandwidth = 32e9;
  CHECK(c.f_end() - c.f_start() == c.bandwidth);
}

TEST_CASE("dispersion conversion") {
  const double f = 193.41e12;
  const double d = 17e-6, s = 67.0;
  const auto b = beta_from_dispersion(d, s, f);
  CHECK(b.beta2 == doctest::Approx(-21.68e-27).epsilon(1e-3));
  Span span;
  span.beta2 = b.beta2;
  span.beta3 = b.beta3;
  span.f_taylor_center = f;
  CHECK(span.dispersion_at(f) == doctest::Approx(d).epsilon(1e-13));
  // dD/dlambda by central difference
  const double c0 = units::kSpeedOfLight;
  const double lam = c0 / f, dl = 1e-10;
  const double slope = (span.dispersion_at(c0 / (lam + dl)) - span.dispersion_at(c0 / (lam - dl))) / (2 * dl);
  CHECK(slope == doctest::Approx(s).epsilon(1e-4));
  CHECK(span.beta2_eff(f + 1e12, f - 1e12) == b.beta2);
}

TEST_CASE("Raman gain") {
  const auto tri = RamanGainProfile::triangular(6e-4, 15e12);
  CHECK(tri(7.5e12) == doctest::Approx(3e-4).epsilon(1e-15));
  CHECK(tri(0.0) == 0.0);
  CHECK(tri(-7.5e12) == doctest::Approx(-3e-4).epsilon(1e-15));
  CHECK(tri(16e12) == 0.0);
  CHECK(RamanGainProfile::none().is_zero());

  const auto tab = RamanGainProfile::tabulated({{5e12, 2e-4}, {13e12, 6e-4}});
  CHECK(tab(2.5e12) == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(tab(9e12) == doctest::Approx(4e-4).epsilon(1e-15));
  CHECK(tab(-9e12) == doctest::Approx(-4e-4).epsilon(1e-15));
  CHECK(tab(13e12) == 6e-4);
  CHECK(tab(14e12) == 0.0);
  CHECK_THROWS(RamanGainProfile::tabulated({{5e12, 2e-4}, {4e12, 6e-4}}));
  CHECK_THROWS(RamanGainProfile::triangular(-1.0, 1e12));
}

TEST_CASE("cut positions skip pumps") {
  CombSetup setup;
  Link link = make_link(setup);
  link.channels[0].is_pump = true;
  CHECK(link.signal_positions() == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(link.cut_positions() == std::vector<std::size_t>{1, 2, 3, 4});
  link.cut_selection = {3, 5};
  CHECK(link.cut_positions() == std::vector<std::size_t>{2, 4});
  link.cut_selection = {1};
  CHECK(has_errors(validate(link)));
}
