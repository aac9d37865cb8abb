#include "nlicfm/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace nlicfm {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kPi2Over6 = kPi * kPi / 6.0;

// B_{2k} / (2k + 1)! for k = 1..12.
const std::array<double, 12>& bernoulli_weights() {
  static const std::array<double, 12> w = [] {
    constexpr std::array<std::array<double, 2>, 12> b = {{{1.0, 6.0},
                                                          {-1.0, 30.0},
                                                          {1.0, 42.0},
                                                          {-1.0, 30.0},
                                                          {5.0, 66.0},
                                                          {-691.0, 2730.0},
                                                          {7.0, 6.0},
                                                          {-3617.0, 510.0},
                                                          {43867.0, 798.0},
                                                          {-174611.0, 330.0},
                                                          {854513.0, 138.0},
                                                          {-236364091.0, 2730.0}}};
    std::array<double, 12> out{};
    double fact = 1.0;  // (2k+1)!
    int m = 1;
    for (std::size_t k = 0; k < b.size(); ++k) {
      while (m < static_cast<int>(2 * k + 3)) fact *= ++m;
      out[k] = b[k][0] / b[k][1] / fact;
    }
    return out;
  }();
  return w;
}

// |z| <= 1, Re z <= 1/2: Bernoulli series in u = -ln(1 - z).
cplx dilog_series(cplx z) {
  const cplx u = -std::log(1.0 - z);
  const cplx u2 = u * u;
  cplx sum = u - 0.25 * u2;
  cplx p = u;
  for (double w : bernoulli_weights()) {
    p *= u2;
    const cplx term = w * p;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double si(double x) {
  if (x < 0.0) return -si(-x);
  if (x == 0.0) return 0.0;
  if (x < 4.0) {
    const double x2 = x * x;
    double term = x;  // x^(2k+1) / (2k+1)! with sign
    double sum = x;
    for (int k = 1; k < 60; ++k) {
      term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
      const double add = term / (2.0 * k + 1.0);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  // Modified Lentz evaluation of E1(ix); Si = pi/2 + Im(e^{-ix} cf).
  constexpr double tiny = 1e-300;
  cplx b(1.0, x);
  cplx c(1.0 / tiny, 0.0);
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 2; i < 1000; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
  }
  h *= cplx(std::cos(x), -std::sin(x));
  return 0.5 * kPi + h.imag();
}

double harmonic(unsigned n) {
  double s = 0.0;
  for (unsigned k = n; k >= 1; --k) s += 1.0 / k;
  return s;
}

Rational operator+(Rational a, Rational b) {
  const std::int64_t g = std::gcd(a.den, b.den);
  const std::int64_t bd = b.den / g;
  std::int64_t den = 0, lhs = 0, rhs = 0;
  if (__builtin_mul_overflow(a.den, bd, &den) || __builtin_mul_overflow(a.num, bd, &lhs) ||
      __builtin_mul_overflow(b.num, a.den / g, &rhs)) {
    throw std::overflow_error("rational overflow");
  }
  std::int64_t num = 0;
  if (__builtin_add_overflow(lhs, rhs, &num)) throw std::overflow_error("rational overflow");
  const std::int64_t r = std::gcd(num, den);
  if (r > 1) {
    num /= r;
    den /= r;
  }
  return {num, den};
}

Rational harmonic_exact(unsigned n) {
  Rational s{0, 1};
  for (unsigned k = 1; k <= n; ++k) s = s + Rational{1, static_cast<std::int64_t>(k)};
  return s;
}

Rational coherence_brace_exact(unsigned n_spans) {
  if (n_spans == 0) throw std::invalid_argument("coherence brace needs at least one span");
  const auto ns = static_cast<std::int64_t>(n_spans);
  return harmonic_exact(n_spans - 1) + Rational{1 - ns, ns};
}

double coherence_brace(unsigned n_spans) {
  if (n_spans == 0) throw std::invalid_argument("coherence brace needs at least one span");
  if (n_spans == 1) return 0.0;
  return harmonic(n_spans - 1) + (1.0 - n_spans) / static_cast<double>(n_spans);
}

cplx dilog(cplx z) {
  if (z == cplx(0.0, 0.0)) return 0.0;
  if (z == cplx(1.0, 0.0)) return kPi2Over6;
  if (std::abs(z) > 1.0) {
    const cplx l = std::log(-z);
    return -kPi2Over6 - 0.5 * l * l - dilog(1.0 / z);
  }
  if (z.real() > 0.5) {
    return -dilog(1.0 - z) + kPi2Over6 - std::log(z) * std::log(1.0 - z);
  }
  return dilog_series(z);
}

double f_int(double x) { return kPi * std::asinh(0.5 * x); }

double f_int_exact(double x) {
  const cplx j(0.0, 1.0);
  return (j * (dilog(-j * x) - dilog(j * x))).real();
}

}  // namespace nlicfm
