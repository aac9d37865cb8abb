#include <doctest.h>

#include <cmath>
#include <random>

#include "nlicfm/errors.hpp"
#include "nlicfm/srs_solver.hpp"
#include "support.hpp"

using namespace nlicfm;
using testing::CombSetup;
using testing::make_link;
using testing::rel;

namespace {

std::vector<double> launch_of(const Link& link) {
  std::vector<double> p;
  for (const auto& c : link.channels) p.push_back(c.launch_power());
  return p;
}

// C+L-like comb obeying the closed-form assumptions: flat loss, no photon
// factors, triangular gain wider than the comb.
struct FlatCase {
  Link link;
  UniformComb comb;
};

FlatCase flat_case(std::size_t n, double p0, double spacing) {
  CombSetup setup;
  setup.channels = n;
  setup.spacing = spacing;
  setup.power = p0;
  setup.c_r_max = 0.4 / 1000.0;
  setup.delta_f = 15e12;
  FlatCase fc{make_link(setup), {}};
  fc.comb.count = n;
  fc.comb.p0 = p0;
  fc.comb.f_first = setup.f_first;
  fc.comb.spacing = spacing;
  fc.comb.alpha0 = setup.alpha;
  fc.comb.cr_slope = setup.c_r_max / setup.delta_f;
  return fc;
}

SolverOptions no_photon() {
  SolverOptions o;
  o.photon_factors = false;
  return o;
}

}  // namespace

TEST_CASE("Raman-free decay") {
  CombSetup setup;
  const Link link = make_link(setup);
  const auto ev = solve_power_evolution(link.spans[0], link.raman[0], link.channels, launch_of(link));
  CHECK(ev.z.size() == 401);
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t k = 0; k < ev.z.size(); ++k) {
      CHECK(rel(ev.at(j, k), 1e-3 * std::exp(-2 * setup.alpha * ev.z[k])) < 1e-9);
      if (k > 0) CHECK(ev.at(j, k) < ev.at(j, k - 1));
    }
  }
}

TEST_CASE("lossless power conservation") {
  FlatCase fc = flat_case(6, 10e-3, 1e12);
  Span span = fc.link.spans[0];
  span.intrinsic_alpha.assign(6, 1e-300);
  std::vector<double> launch = {1e-3, 4e-3, 2e-3, 8e-3, 3e-3, 5e-3};
  SUBCASE("total power without photon factors") {
    const auto ev = solve_power_evolution(span, fc.link.raman[0], fc.link.channels, launch, no_photon());
    double p0 = 0.0;
    for (double v : launch) p0 += v;
    for (std::size_t k = 0; k < ev.z.size(); ++k) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 6; ++j) sum += ev.at(j, k);
      CHECK(rel(sum, p0) < 1e-9);
    }
  }
  SUBCASE("photon number with photon factors") {
    const auto ev = solve_power_evolution(span, fc.link.raman[0], fc.link.channels, launch);
    double n0 = 0.0;
    for (std::size_t j = 0; j < 6; ++j) n0 += launch[j] / fc.link.channels[j].f_center;
    for (std::size_t k = 0; k < ev.z.size(); ++k) {
      double n = 0.0;
      for (std::size_t j = 0; j < 6; ++j) n += ev.at(j, k) / fc.link.channels[j].f_center;
      CHECK(rel(n, n0) < 1e-8);
    }
  }
}

TEST_CASE("flat-comb closed form") {
  FlatCase fc = flat_case(3, 0.0, 2e12);
  const std::vector<double> launch = {20e-3, 5e-3, 12e-3};
  const FlatComb flat = fc.comb.as_flat();
  const auto ev = solve_power_evolution(fc.link.spans[0], fc.link.raman[0], fc.link.channels, launch, no_photon());
  std::size_t k50 = 0;
  while (ev.z[k50] < 50e3) ++k50;
  const auto a = analytic_flat_solution(flat, launch, ev.z[k50]);
  for (std::size_t j = 0; j < 3; ++j) CHECK(rel(a[j], ev.at(j, k50)) < 1e-3);
  const auto at0 = analytic_flat_solution(flat, launch, 0.0);
  for (std::size_t j = 0; j < 3; ++j) CHECK(at0[j] == doctest::Approx(launch[j]).epsilon(1e-15));

  FlatComb no_raman = flat;
  no_raman.cr_slope = 0.0;
  const auto d = analytic_flat_solution(no_raman, launch, 30e3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(d[j] == doctest::Approx(launch[j] * std::exp(-2 * flat.alpha0 * 30e3)).epsilon(1e-14));
  }
}

TEST_CASE("uniform-comb closed form") {
  SUBCASE("two channels") {
    FlatCase fc = flat_case(2, 50e-3, 10e12);
    const auto ev = solve_power_evolution(fc.link.spans[0], fc.link.raman[0], fc.link.channels,
                                          launch_of(fc.link), no_photon());
    for (std::size_t k = 0; k < ev.z.size(); k += 40) {
      const auto a = analytic_uniform_solution(fc.comb, ev.z[k]);
      for (std::size_t j = 0; j < 2; ++j) CHECK(rel(a[j], ev.at(j, k)) < 1e-4);
    }
  }
  SUBCASE("edge channel of a wide comb") {
    FlatCase fc = flat_case(21, 8e-3, 0.5e12);
    const auto ev = solve_power_evolution(fc.link.spans[0], fc.link.raman[0], fc.link.channels,
                                          launch_of(fc.link), no_photon());
    const auto a = analytic_uniform_solution(fc.comb, ev.z.back());
    CHECK(rel(a[0], ev.end_power(0)) < 1e-3);
    CHECK(rel(a[20], ev.end_power(20)) < 1e-3);
  }
  SUBCASE("middle channel") {
    FlatCase fc = flat_case(5, 10e-3, 1e12);
    const double z = 60e3;
    const auto a = analytic_uniform_solution(fc.comb, z);
    const double x = 0.5 * 5 * 10e-3 * fc.comb.cr_slope * effective_length(fc.comb.alpha0, z) * 1e12;
    CHECK(a[2] == doctest::Approx(5 * 10e-3 * std::exp(-2 * fc.comb.alpha0 * z) * sinh_ratio(x, 5)).epsilon(1e-13));
  }
  SUBCASE("large arguments stay finite") {
    FlatCase fc = flat_case(80, 1.0, 0.1e12);
    const auto a = analytic_uniform_solution(fc.comb, 100e3);
    for (double v : a) CHECK(std::isfinite(v));
    CHECK(sinh_ratio(400.0, 3.0) == doctest::Approx(std::exp(-800.0)).epsilon(1e-12));
  }
  CHECK(sinh_ratio(0.0, 7.0) == doctest::Approx(1.0 / 7.0));
  CHECK(sinh_ratio(1e-9, 7.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("weak-Raman perturbative form") {
  FlatCase fc = flat_case(9, 1e-3, 0.5e12);
  CHECK(fc.comb.weak_raman_measure(100e3) < 0.05);
  for (double z : {0.0, 20e3, 50e3, 100e3}) {
    const auto u = analytic_uniform_solution(fc.comb, z);
    for (std::size_t j = 0; j < 9; ++j) CHECK(rel(perturbative_profile(fc.comb, j, z), u[j]) < 1e-2);
  }
  CHECK(perturbative_triple(fc.comb, 4).alpha1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(perturbative_profile(fc.comb, 0, 0.0) == fc.comb.p0);
}

TEST_CASE("frequency ordering and grid refinement") {
  CombSetup setup;
  setup.channels = 2;
  setup.spacing = 10e12;
  setup.power = 50e-3;
  setup.c_r_max = 0.4 / 1000.0;
  const Link link = make_link(setup);
  const auto ev = solve_power_evolution(link.spans[0], link.raman[0], link.channels, launch_of(link));
  const double ref = 50e-3 * std::exp(-2 * setup.alpha * 100e3);
  CHECK(ev.end_power(0) >= ref);
  CHECK(ev.end_power(1) <= ref);

  SolverOptions fine;
  fine.max_spacing = 125.0;
  fine.min_points = 400;
  const auto ev2 = solve_power_evolution(link.spans[0], link.raman[0], link.channels, launch_of(link), fine);
  for (std::size_t j = 0; j < 2; ++j) CHECK(rel(ev.end_power(j), ev2.end_power(j)) < 10 * 1e-8);
}

TEST_CASE("solver errors name the span") {
  CombSetup setup;
  const Link link = make_link(setup);
  std::vector<double> launch(5, 1e-3);
  launch[3] = 0.0;
  CHECK_THROWS_WITH_AS(solve_power_evolution(link.spans[0], link.raman[0], link.channels, launch, {}, 2),
                       doctest::Contains("span 3"), NumericError);
}
