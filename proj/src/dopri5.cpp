#include "nlicfm/dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlicfm/errors.hpp"

namespace nlicfm {

namespace {

// Butcher tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// 5th minus 4th order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

[[noreturn]] void fail(const char* what, double t) {
  std::ostringstream msg;
  msg << "ODE solver divergence (" << what << ") at z = " << t;
  throw NumericError(msg.str());
}

}  // namespace

std::vector<double> Dopri5::integrate(const Rhs& f, std::span<const double> t_out,
                                      std::span<const double> y0, const Options& opts,
                                      Stats* stats) {
  const std::size_t n = y0.size();
  const std::size_t n_out = t_out.size();
  std::vector<double> out(n_out * n);
  if (n_out == 0) return out;
  for (std::size_t i = 1; i < n_out; ++i) {
    if (!(t_out[i] > t_out[i - 1])) throw NumericError("Dopri5: output grid must be increasing");
  }

  const double t0 = t_out.front();
  const double t_end = t_out.back();
  const double span = t_end - t0;
  std::copy(y0.begin(), y0.end(), out.begin());
  if (n_out == 1) return out;

  Stats local;
  Stats& st = stats ? *stats : local;
  auto scale = [&](std::size_t i, double a, double b) {
    if (opts.error_scale) return opts.error_scale(i, a, b);
    return opts.atol + opts.rtol * std::max(std::abs(a), std::abs(b));
  };

  std::vector<double> y(y0.begin(), y0.end()), y1(n), ytmp(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> r1(n), r2(n), r3(n), r4(n), r5(n);

  f(t0, y, k1);
  ++st.evaluations;

  double h = opts.initial_step;
  if (h <= 0.0) {
    double fmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) fmax = std::max(fmax, std::abs(k1[i]) / scale(i, y[i], y[i]));
    h = fmax > 0.0 ? 0.01 / fmax : span;
    h = std::clamp(h, span * 1e-6, span);
  }
  const double h_min = span * opts.min_step_fraction;

  double t = t0;
  std::size_t next_out = 1;
  double err_prev = 1e-4;

  while (next_out < n_out) {
    if (st.accepted + st.rejected >= opts.max_steps) fail("step budget exhausted", t);
    if (h < h_min) fail("step underflow", t);
    const bool last = t + 1.01 * h >= t_end;
    if (last) h = t_end - t;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(t + h, y1, k7);
    st.evaluations += 6;

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(y1[i])) finite = false;
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double r = e / scale(i, y[i], y1[i]);
      err += r * r;
    }
    err = std::sqrt(err / static_cast<double>(std::max<std::size_t>(n, 1)));
    if (!finite || !std::isfinite(err)) {
      ++st.rejected;
      h *= 0.25;
      continue;
    }

    if (err > 1.0) {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    // Accepted: build the dense-output polynomial and emit samples in (t, t+h].
    const double t_new = last ? t_end : t + h;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = y1[i] - y[i];
      const double bspl = h * k1[i] - diff;
      r1[i] = y[i];
      r2[i] = diff;
      r3[i] = bspl;
      r4[i] = diff - h * k7[i] - bspl;
      r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    while (next_out < n_out && (t_out[next_out] <= t_new || last)) {
      double* dst = out.data() + next_out * n;
      if (last && next_out == n_out - 1) {
        std::copy(y1.begin(), y1.end(), dst);
      } else {
        const double theta = (t_out[next_out] - t) / h;
        const double theta1 = 1.0 - theta;
        for (std::size_t i = 0; i < n; ++i) {
          dst[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
      }
      ++next_out;
    }

    ++st.accepted;
    t = t_new;
    y.swap(y1);
    k1.swap(k7);
    // PI step-size control.
    const double fac = 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
    err_prev = std::max(err, 1e-4);
    h *= std::clamp(fac, 0.2, 10.0);
  }
  return out;
}

}  // namespace nlicfm
