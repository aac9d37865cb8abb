#pragma once

#include <complex>
#include <cstdint>

namespace nlicfm {

/// Sine integral Si(x) = int_0^x sin(t)/t dt. Power series for |x| < 4,
/// continued fraction for the complex exponential integral beyond.
double si(double x);

/// Harmonic number H(n) = sum_{k=1..n} 1/k, H(0) = 0.
double harmonic(unsigned n);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

Rational operator+(Rational a, Rational b);

/// Exact H(n); throws std::overflow_error when the denominator no longer
/// fits in 64 bits (n > 40 or so).
Rational harmonic_exact(unsigned n);

/// H(Ns - 1) + (1 - Ns) / Ns, the span-count factor of the coherence term.
double coherence_brace(unsigned n_spans);
Rational coherence_brace_exact(unsigned n_spans);

/// Complex dilogarithm Li2(z), principal branch.
std::complex<double> dilog(std::complex<double> z);

/// Island kernel approximation pi asinh(x/2).
double f_int(double x);

/// Island kernel j (Li2(-jx) - Li2(jx)), real for real x.
double f_int_exact(double x);

}  // namespace nlicfm
