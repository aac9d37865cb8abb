#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "nlicfm/special_functions.hpp"

using namespace nlicfm;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = std::numbers::pi;

double si_quadrature(double x) {
  double sum = 0.0;
  const int panels = 1 + static_cast<int>(std::abs(x) / 2.0);
  for (int i = 0; i < panels; ++i) {
    const double a = x * i / panels, b = x * (i + 1) / panels;
    sum += gauss_kronrod<double, 31>::integrate(
        [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }, a, b, 15, 1e-14);
  }
  return sum;
}

// -int_0^1 ln(1 - z t) / t dt
std::complex<double> dilog_quadrature(std::complex<double> z) {
  auto re = [&](double t) { return t == 0.0 ? z.real() : -std::log(1.0 - z * t).real() / t; };
  auto im = [&](double t) { return t == 0.0 ? z.imag() : -std::log(1.0 - z * t).imag() / t; };
  return {gauss_kronrod<double, 31>::integrate(re, 0.0, 1.0, 20, 1e-14),
          gauss_kronrod<double, 31>::integrate(im, 0.0, 1.0, 20, 1e-14)};
}

double f_int_quadrature(double x) {
  return 2.0 * gauss_kronrod<double, 31>::integrate(
                   [](double t) { return t == 0.0 ? 1.0 : std::atan(t) / t; }, 0.0, x, 20, 1e-14);
}

}  // namespace

TEST_CASE("sine integral") {
  CHECK(si(0.0) == 0.0);
  CHECK(si(kPi) == doctest::Approx(1.8519370519824662).epsilon(1e-12));
  CHECK(si(-kPi) == doctest::Approx(-1.8519370519824662).epsilon(1e-12));
  CHECK(si(10.0) == doctest::Approx(1.6583475942188740).epsilon(1e-12));
  CHECK(si(1e6) == doctest::Approx(kPi / 2).epsilon(1e-5));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    CHECK(std::abs(si(x) - si_quadrature(x)) < 1e-10);
  }
  // both sides of the series / continued-fraction switch
  CHECK(std::abs(si(3.999999) - si_quadrature(3.999999)) < 1e-10);
  CHECK(std::abs(si(4.000001) - si_quadrature(4.000001)) < 1e-10);
}

TEST_CASE("harmonic numbers") {
  CHECK(harmonic(0) == 0.0);
  CHECK(harmonic(3) == doctest::Approx(11.0 / 6.0).epsilon(1e-15));
  CHECK(harmonic_exact(0) == Rational{0, 1});
  CHECK(harmonic_exact(3) == Rational{11, 6});
  CHECK(harmonic_exact(10) == Rational{7381, 2520});
  CHECK(harmonic_exact(30).value() == doctest::Approx(harmonic(30)).epsilon(1e-14));
  CHECK_THROWS_AS(harmonic_exact(200), std::overflow_error);
}

TEST_CASE("coherence brace") {
  CHECK(coherence_brace(1) == 0.0);
  CHECK(coherence_brace_exact(1) == Rational{0, 1});
  CHECK(coherence_brace_exact(4) == Rational{13, 12});
  CHECK(coherence_brace(4) == doctest::Approx(13.0 / 12.0).epsilon(1e-15));
  CHECK_THROWS(coherence_brace(0));
}

TEST_CASE("dilogarithm") {
  CHECK(std::abs(dilog(1.0) - kPi * kPi / 6.0) < 1e-15);
  CHECK(std::abs(dilog(-1.0) + kPi * kPi / 12.0) < 1e-14);
  const double ln2 = std::log(2.0);
  CHECK(std::abs(dilog(0.5) - (kPi * kPi / 12.0 - ln2 * ln2 / 2.0)) < 1e-14);
  const std::complex<double> li_i = dilog({0.0, 1.0});
  CHECK(std::abs(li_i.real() + kPi * kPi / 48.0) < 1e-14);
  CHECK(std::abs(li_i.imag() - 0.915965594177219015) < 1e-14);  // Catalan's constant

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(0.0, 6.0), th(-kPi, kPi);
  for (int i = 0; i < 300; ++i) {
    const std::complex<double> z = std::polar(r(rng), th(rng));
    if (std::abs(z.imag()) < 1e-3 && z.real() > 1.0) continue;  // branch cut
    const auto ref = dilog_quadrature(z);
    CHECK(std::abs(dilog(z) - ref) < 1e-11 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("island kernels") {
  CHECK(f_int(0.0) == 0.0);
  CHECK(f_int_exact(0.0) == 0.0);
  for (double x : {0.01, 0.3, 1.0, 2.0, 7.5, 40.0, 1e3}) {
    CHECK(f_int(-x) == -f_int(x));
    CHECK(f_int_exact(-x) == doctest::Approx(-f_int_exact(x)).epsilon(1e-15));
    CHECK(f_int_exact(x) == doctest::Approx(f_int_quadrature(x)).epsilon(1e-11));
  }
  CHECK(f_int(2.0) == doctest::Approx(2.7689167860486807).epsilon(1e-14));
  // The asinh form is 12.2% low at x = 2; the exact kernel is 3.1520308...
  CHECK(f_int_exact(2.0) == doctest::Approx(3.1520308068926468).epsilon(1e-12));
  const double gap = std::abs(f_int_exact(2.0) - f_int(2.0)) / f_int_exact(2.0);
  CHECK(gap == doctest::Approx(0.12154).epsilon(1e-3));
  // small-argument ratio tends to pi/4, large-argument ratio to 1
  CHECK(f_int(1e-6) / f_int_exact(1e-6) == doctest::Approx(kPi / 4).epsilon(1e-9));
  CHECK(f_int(1e6) / f_int_exact(1e6) == doctest::Approx(1.0).epsilon(1e-5));
}
