#include "nlicfm/gn_oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "nlicfm/errors.hpp"
#include "nlicfm/parallel.hpp"

namespace nlicfm {

namespace {

using boost::math::quadrature::gauss_kronrod;
using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;
constexpr double kPanelTol = 1e-9;
constexpr unsigned kMaxDepth = 18;

constexpr int kGradedLevels = 14;

// Panel edges of [lo, hi] in n equal pieces. When `cut` is inside, it is
// added together with edges graded geometrically towards it, so narrow
// ridges on the cut line are never straddled by a coarse panel.
std::vector<double> panels(double lo, double hi, std::size_t n, double cut) {
  std::vector<double> e(n + 1);
  for (std::size_t i = 0; i <= n; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / n;
  e.back() = hi;
  if (cut > lo && cut < hi) {
    e.push_back(cut);
    double h = (hi - lo) / n;
    for (int k = 0; k < kGradedLevels; ++k) {
      h *= 0.25;
      if (cut - h > lo) e.push_back(cut - h);
      if (cut + h < hi) e.push_back(cut + h);
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
  return e;
}

template <class F>
double integrate_panels(F&& f, const std::vector<double>& edges) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    sum += gauss_kronrod<double, 15>::integrate(f, edges[i], edges[i + 1], kMaxDepth, kPanelTol);
  }
  return sum;
}

std::string island_name(const Island& is) {
  return "(" + std::to_string(is.m_ch + 1) + "," + std::to_string(is.n_ch + 1) + "," +
         std::to_string(is.k_ch + 1) + ")";
}

std::vector<std::vector<double>> post_span_gains(const Link& link, const SpanLossTable& losses) {
  const std::size_t ns = link.spans.size();
  const std::size_t nc = link.channels.size();
  std::vector<std::vector<double>> post(ns, std::vector<double>(nc, 1.0));
  for (std::size_t j = 0; j < nc; ++j) {
    for (std::size_t p = 0; p < ns; ++p) {
      double prod = 1.0;
      for (std::size_t q = p; q < ns; ++q) {
        prod *= net_span_gain(link.spans[q], losses, q, j);
      }
      post[p][j] = prod;
    }
  }
  return post;
}

void guard(const Link& link, const QuadSpec& quad) {
  const std::size_t n = link.signal_positions().size() * link.spans.size();
  if (n > quad.max_island_spans) {
    throw ValidationError("oracle refused: " + std::to_string(n) +
                          " island-spans exceed the limit of " +
                          std::to_string(quad.max_island_spans));
  }
}

struct Job {
  std::size_t span;
  Island island;
};

// (16/27) gamma^2 G_cut G_m^2 (2 - delta) post * integral, summed in job order.
template <class IntegralFn>
double assemble(const Link& link, const SpanLossTable& losses, std::size_t cut,
                const QuadSpec& quad, IntegralFn&& integral) {
  const PsdTable psd = propagate_psd(link, losses);
  const auto post = post_span_gains(link, losses);
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < link.spans.size(); ++p) {
    for (const Island& is : enumerate_islands(link, cut).islands) jobs.push_back({p, is});
  }
  std::vector<double> values(jobs.size());
  parallel_for(jobs.size(), quad.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    const Span& span = link.spans[job.span];
    const std::size_t m = job.island.interferer();
    const double g_cut = psd[job.span][cut];
    const double g_m = psd[job.span][m];
    const double fold = job.island.kind == IslandKind::sci ? 1.0 : 2.0;
    values[i] = 16.0 / 27.0 * span.gamma * span.gamma * g_cut * g_m * g_m * fold *
                post[job.span][cut] * integral(job.span, job.island);
  });
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

}  // namespace

IslandSet enumerate_islands(const Link& link, std::size_t cut, bool count_mci) {
  IslandSet set;
  const Channel& c = link.channels.at(cut);
  const auto sig = link.signal_positions();
  for (std::size_t m : sig) {
    const Channel& ch = link.channels[m];
    Island is;
    is.m_ch = m;
    is.n_ch = cut;
    is.k_ch = m;
    is.f1_lo = ch.f_start();
    is.f1_hi = ch.f_end();
    is.f2_lo = c.f_start();
    is.f2_hi = c.f_end();
    is.kind = m == cut ? IslandKind::sci : IslandKind::xci;
    set.islands.push_back(is);
  }
  if (count_mci) {
    for (std::size_t a : sig) {
      for (std::size_t b : sig) {
        for (std::size_t k : sig) {
          const bool sci_xci = (a == cut && b == cut && k == cut) || (b == cut && k == a) ||
                               (a == cut && k == b);
          if (sci_xci) continue;
          const Channel& ca = link.channels[a];
          const Channel& cb = link.channels[b];
          const Channel& ck = link.channels[k];
          const double lo = std::max(ca.f_start() + cb.f_start(), ck.f_start() + c.f_center);
          const double hi = std::min(ca.f_end() + cb.f_end(), ck.f_end() + c.f_center);
          if (hi > lo) ++set.mci_count;
        }
      }
    }
  }
  return set;
}

std::vector<Island> enumerate_islands_unfolded(const Link& link, std::size_t cut) {
  std::vector<Island> out;
  for (const Island& is : enumerate_islands(link, cut).islands) {
    out.push_back(is);
    if (is.kind == IslandKind::xci) {
      Island mirror = is;
      mirror.m_ch = is.n_ch;
      mirror.n_ch = is.m_ch;
      std::swap(mirror.f1_lo, mirror.f2_lo);
      std::swap(mirror.f1_hi, mirror.f2_hi);
      out.push_back(mirror);
    }
  }
  return out;
}

cplx zeta_complex(double varrho, const ProfileTriple& t, unsigned M) {
  const double c = 2.0 * t.alpha1 / t.sigma;
  double term = 1.0;
  cplx sum = 0.0;
  for (unsigned k = 0; k <= M; ++k) {
    if (k > 0) term *= c / k;
    sum += term / cplx(2.0 * t.alpha0 + k * t.sigma, -varrho);
  }
  return sum;
}

unsigned converged_order(const ProfileTriple& t) {
  const double c = std::abs(2.0 * t.alpha1 / t.sigma);
  unsigned k = 0;
  double term = 1.0;
  double total = 1.0;
  while (k < 400) {
    ++k;
    term *= c / k;
    total += term;
    if (term < 1e-17 * total && static_cast<double>(k) > c) break;
  }
  return std::max(k, choose_M(t.alpha1, t.sigma));
}

double varrho(const Span& span, double f1, double f2, double f_cut) {
  const double beta =
      span.beta2 + kPi * span.beta3 * (f1 + f2 - 2.0 * span.f_taylor_center);
  return 4.0 * kPi * kPi * (f1 - f_cut) * (f2 - f_cut) * beta;
}

double integrate_island(const Island& island, const Span& span, double f_cut,
                        const std::function<double(double)>& integrand, const QuadSpec& quad) {
  if (quad.resolution < 1) throw ValidationError("quadrature resolution must be >= 1");
  auto level = [&](std::size_t r) {
    // the f2 = f_cut ridge of XCI islands sits on the inner axis
    const auto outer = panels(island.f1_lo, island.f1_hi, r, f_cut);
    const auto inner = panels(island.f2_lo, island.f2_hi, r, f_cut);
    return integrate_panels(
        [&](double f1) {
          return integrate_panels(
              [&](double f2) { return integrand(varrho(span, f1, f2, f_cut)); }, inner);
        },
        outer);
  };
  std::size_t r = quad.resolution;
  double prev = level(r);
  for (std::size_t i = 0; i <= quad.max_refinements; ++i) {
    r *= 2;
    const double next = level(r);
    if (std::abs(next - prev) <= quad.rtol * std::abs(next)) return next;
    prev = next;
  }
  throw NumericError("quadrature did not converge on island " + island_name(island));
}

double integrate_island_numeric(const Island& island, const Span& span, double f_cut,
                                const ProfileTriple& t, const QuadSpec& quad) {
  const unsigned order = converged_order(t);
  const double c = 2.0 * t.alpha1 / t.sigma;
  std::vector<double> w(order + 1), a(order + 1);
  double term = 1.0;
  for (unsigned k = 0; k <= order; ++k) {
    if (k > 0) term *= c / k;
    w[k] = term;
    a[k] = 2.0 * t.alpha0 + k * t.sigma;
  }
  auto zeta_norm = [&](double r) {
    double re = 0.0, im = 0.0;
    for (unsigned k = 0; k <= order; ++k) {
      const double q = w[k] / (a[k] * a[k] + r * r);
      re += q * a[k];
      im += q * r;
    }
    return re * re + im * im;
  };
  return integrate_island(island, span, f_cut, zeta_norm, quad);
}

double nli_reference(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                     std::size_t cut, const QuadSpec& quad) {
  guard(link, quad);
  const double f_cut = link.channels.at(cut).f_center;
  return assemble(link, losses, cut, quad, [&](std::size_t p, const Island& is) {
    const ProfileTriple t = fits[p][is.interferer()].triple();
    return std::exp(-4.0 * t.alpha1 / t.sigma) *
           integrate_island_numeric(is, link.spans[p], f_cut, t, quad);
  });
}

double filon_link_sq(std::span<const double> z, std::span<const double> g, double varrho) {
  const std::size_t n = z.size();
  if (n < 2 || g.size() != n) throw NumericError("Filon rule needs >= 2 matching samples");
  const double h = (z.back() - z.front()) / static_cast<double>(n - 1);
  const double th = varrho * h;
  const cplx j(0.0, 1.0);
  cplx phi0, phi1;  // int_0^1 e^{j th s} ds, int_0^1 s e^{j th s} ds
  if (std::abs(th) < 1e-3) {
    const double t2 = th * th;
    phi0 = cplx(1.0 - t2 / 6.0 + t2 * t2 / 120.0, th / 2.0 - th * t2 / 24.0);
    phi1 = cplx(0.5 - t2 / 8.0 + t2 * t2 / 144.0, th / 3.0 - th * t2 / 30.0);
  } else {
    const cplx e = std::exp(j * th);
    phi0 = (e - 1.0) / (j * th);
    phi1 = e / (j * th) + (e - 1.0) / (th * th);
  }
  const cplx step = std::exp(j * th);
  cplx rot = std::exp(j * varrho * z.front());
  cplx s0 = 0.0, s1 = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    s0 += rot * g[k];
    s1 += rot * (g[k + 1] - g[k]);
    rot *= step;
  }
  return std::norm(h * (phi0 * s0 + phi1 * s1));
}

double nli_reference_deep(const Link& link, std::span<const PowerEvolution> evolutions,
                          const SpanLossTable& losses, std::size_t cut, const QuadSpec& quad) {
  guard(link, quad);
  if (evolutions.size() != link.spans.size()) {
    throw ValidationError("deep oracle needs one evolution per span");
  }
  for (const auto& e : evolutions) {
    const double h = (e.z.back() - e.z.front()) / static_cast<double>(e.z.size() - 1);
    for (std::size_t k = 1; k < e.z.size(); ++k) {
      if (std::abs(e.z[k] - e.z[k - 1] - h) > 1e-6 * h) {
        throw NumericError("deep oracle needs a uniform z grid");
      }
    }
  }
  const double f_cut = link.channels.at(cut).f_center;
  return assemble(link, losses, cut, quad, [&](std::size_t p, const Island& is) {
    const PowerEvolution& e = evolutions[p];
    const auto pm = e.channel(is.interferer());
    std::vector<double> g(pm.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = pm[k] / pm[0];
    return integrate_island(
        is, link.spans[p], f_cut, [&](double r) { return filon_link_sq(e.z, g, r); }, quad);
  });
}

}  // namespace nlicfm
