#include <doctest.h>

#include <cmath>

#include "nlicfm/cfm_engine.hpp"
#include "nlicfm/errors.hpp"
#include "nlicfm/gn_oracle.hpp"
#include "nlicfm/pipeline.hpp"
#include "support.hpp"

using namespace nlicfm;
using testing::CombSetup;
using testing::db_gap;
using testing::make_link;
using testing::model_losses;
using testing::rel;
using testing::uniform_fits;

namespace {
const double kA = testing::kAlphaSmf;
}

TEST_CASE("island enumeration") {
  CombSetup setup;
  setup.channels = 1;
  CHECK(enumerate_islands(make_link(setup), 0).islands.size() == 1);
  CHECK(enumerate_islands(make_link(setup), 0).islands[0].kind == IslandKind::sci);

  setup.channels = 3;
  const auto three = enumerate_islands(make_link(setup), 1).islands;
  REQUIRE(three.size() == 3);
  CHECK(three[0].kind == IslandKind::xci);
  CHECK(three[1].kind == IslandKind::sci);
  CHECK(three[2].kind == IslandKind::xci);

  setup.channels = 5;
  const Link five = make_link(setup);
  for (std::size_t cut = 0; cut < 5; ++cut) {
    const auto set = enumerate_islands(five, cut, true);
    CHECK(set.islands.size() == 5);
    CHECK(set.mci_count > 0);
    for (const auto& is : set.islands) {
      CHECK(is.f2_lo == five.channels[cut].f_start());
      CHECK(is.f1_lo == five.channels[is.m_ch].f_start());
      CHECK(is.interferer() == is.m_ch);
    }
  }
  CHECK(enumerate_islands(five, 2).mci_count == 0);
  CHECK(enumerate_islands_unfolded(five, 2).size() == 9);
}

TEST_CASE("self-channel island matches the exact closed form") {
  CombSetup setup;
  setup.channels = 1;
  setup.s = 0.0;
  const Link link = make_link(setup);
  const ProfileTriple t{kA, 0.0, 2 * kA};
  const Island is = enumerate_islands(link, 0).islands[0];
  const Span& s = link.spans[0];
  const double fc = link.channels[0].f_center;
  QuadSpec q;
  q.rtol = 1e-6;
  const double num = integrate_island_numeric(is, s, fc, t, q);
  const double closed = h_coeff(0, 1, t) *
                        island_integral(0, t, s.beta2, 32e9, fc, fc - 16e9, fc + 16e9, true);
  CHECK(rel(num, closed) < 1e-3);
}

TEST_CASE("quadrature convergence") {
  CombSetup setup;
  const Link link = make_link(setup);
  const ProfileTriple t{kA, -0.3 * kA, 1.5 * kA};
  const double fc = link.channels[2].f_center;
  for (const auto& is : enumerate_islands(link, 2).islands) {
    QuadSpec a;
    a.rtol = 1e-4;
    QuadSpec b = a;
    b.resolution = 2 * a.resolution;
    const double va = integrate_island_numeric(is, link.spans[0], fc, t, a);
    const double vb = integrate_island_numeric(is, link.spans[0], fc, t, b);
    CHECK(va > 0.0);
    CHECK(rel(va, vb) < 1e-4);
  }
}

TEST_CASE("non-convergence names the island") {
  CombSetup setup;
  setup.channels = 3;
  const Link link = make_link(setup);
  QuadSpec q;
  q.rtol = 1e-300;
  q.max_refinements = 1;
  const Island is = enumerate_islands(link, 0).islands[2];
  CHECK_THROWS_WITH_AS(integrate_island_numeric(is, link.spans[0], link.channels[0].f_center,
                                                {kA, 0.0, 2 * kA}, q),
                       doctest::Contains("quadrature did not converge on island"), NumericError);
}

TEST_CASE("dispersion slope error grows with island width") {
  // the closed form freezes beta2 at the island center; the oracle does not
  const ProfileTriple t{kA, 0.0, 2 * kA};
  double prev = 0.0;
  for (double bw : {50e9, 200e9, 800e9}) {
    CombSetup setup;
    setup.channels = 3;
    setup.bandwidth = bw;
    setup.spacing = bw * 1.25;
    setup.f_first = 190e12;
    setup.s = 400.0;
    const Link link = make_link(setup);
    const Span& s = link.spans[0];
    const auto& cut = link.channels[0];
    const Island is = enumerate_islands(link, 0).islands[2];
    const auto& m = link.channels[is.m_ch];
    QuadSpec q;
    q.rtol = 1e-6;
    const double num = integrate_island_numeric(is, s, cut.f_center, t, q);
    const double closed = h_coeff(0, 1, t) * island_integral(0, t, s.beta2_eff(m.f_center, cut.f_center),
                                                             bw, cut.f_center, m.f_start(), m.f_end(), true);
    const double gap = rel(closed, num);
    CHECK(gap > prev);
    prev = gap;
  }
}

TEST_CASE("symmetry folding") {
  CombSetup setup;
  const Link link = make_link(setup);
  const ProfileTriple t{kA, 0.0, 2 * kA};
  const std::size_t cut = 2;
  const double fc = link.channels[cut].f_center;
  QuadSpec q;
  q.rtol = 1e-9;
  q.max_refinements = 6;
  const auto folded = enumerate_islands(link, cut).islands;
  const auto unfolded = enumerate_islands_unfolded(link, cut);
  for (const auto& is : folded) {
    if (is.kind == IslandKind::sci) continue;
    double pair = 0.0;
    for (const auto& u : unfolded) {
      if (u.kind == IslandKind::xci && u.k_ch == is.m_ch) {
        pair += integrate_island_numeric(u, link.spans[0], fc, t, q);
      }
    }
    const double one = integrate_island_numeric(is, link.spans[0], fc, t, q);
    CHECK(pair == doctest::Approx(2.0 * one).epsilon(1e-6));
  }
}

TEST_CASE("narrow islands close the gap to the closed form") {
  CombSetup setup;
  setup.bandwidth = 1e9;
  setup.spacing = 50e9;
  const Link link = make_link(setup);
  const auto fits = uniform_fits(link, {kA, 0.0, 2 * kA});
  const auto losses = model_losses(link, fits);
  CfmOptions opt;
  opt.exact_fint = true;
  const CfmEngine engine(link, fits, losses, opt);
  QuadSpec q;
  q.rtol = 1e-6;
  for (std::size_t cut = 0; cut < 5; ++cut) {
    CHECK(db_gap(engine.incoherent(cut), nli_reference(link, fits, losses, cut, q)) < 0.05);
  }
}

TEST_CASE("reference guard and trivial values") {
  CombSetup setup;
  setup.channels = 40;
  setup.spans = 20;
  Link big = make_link(setup);
  auto fits = uniform_fits(big, {kA, 0.0, 2 * kA});
  auto losses = model_losses(big, fits);
  CHECK_THROWS_WITH_AS(nli_reference(big, fits, losses, 0), doctest::Contains("oracle refused"),
                       ValidationError);

  setup = CombSetup{};
  setup.gamma = 0.0;
  const Link free = make_link(setup);
  fits = uniform_fits(free, {kA, 0.0, 2 * kA});
  losses = model_losses(free, fits);
  CHECK(nli_reference(free, fits, losses, 2) == 0.0);
}

TEST_CASE("closed form against the reference") {
  SUBCASE("no Raman tilt, one span, five channels") {
    CombSetup setup;
    const Link link = make_link(setup);
    const auto fits = uniform_fits(link, {kA, 0.0, 2 * kA});
    const auto losses = model_losses(link, fits);
    for (std::size_t cut = 0; cut < 5; ++cut) {
      CHECK(db_gap(nli_incoherent(link, fits, losses, cut), nli_reference(link, fits, losses, cut)) < 0.4);
    }
  }
  SUBCASE("strong SRS, two spans, solved and fitted") {
    CombSetup setup;
    setup.channels = 7;
    setup.spacing = 1.5e12;
    setup.f_first = 187e12;
    setup.power = 15e-3;
    setup.spans = 2;
    setup.c_r_max = 0.4 / 1000.0;
    const Link link = make_link(setup);
    ProfileArtifacts art = compute_profiles(link, RunConfig{});
    bool strong = false;
    for (const auto& row : art.fits) {
      for (const auto& f : row) strong |= std::abs(2 * f.alpha1 / f.sigma) > 0.2;
    }
    CHECK(strong);
    for (std::size_t cut : {0u, 3u, 6u}) {
      CHECK(db_gap(nli_incoherent(link, art.fits, art.losses, cut),
                   nli_reference(link, art.fits, art.losses, cut)) < 0.5);
    }
  }
}

TEST_CASE("deep reference follows the fitted one") {
  CombSetup setup;
  setup.channels = 3;
  setup.spacing = 2e12;
  setup.power = 20e-3;
  setup.c_r_max = 0.4 / 1000.0;
  const Link link = make_link(setup);
  RunConfig cfg;
  cfg.solver.max_spacing = 1000.0;
  cfg.solver.min_points = 101;
  const ProfileArtifacts art = compute_profiles(link, cfg);
  QuadSpec q;
  q.rtol = 1e-3;
  for (std::size_t cut : {0u, 2u}) {
    const double fitted = nli_reference(link, art.fits, art.losses, cut, q);
    const double deep = nli_reference_deep(link, art.evolutions, art.losses, cut, q);
    CHECK(db_gap(deep, fitted) < 0.1);
  }
}

TEST_CASE("Filon rule is exact for linear samples") {
  const double L = 1e3, r = 3e-2;
  std::vector<double> z, g;
  for (int k = 0; k <= 10; ++k) {
    z.push_back(L * k / 10.0);
    g.push_back(1.0 - 0.5 * z.back() / L);
  }
  // int_0^L (1 - z/(2L)) e^{j r z} dz in closed form
  const std::complex<double> j(0.0, 1.0);
  const std::complex<double> e = std::exp(j * r * L);
  const std::complex<double> i0 = (e - 1.0) / (j * r);
  const std::complex<double> i1 = (L * e / (j * r)) + (e - 1.0) / (r * r);
  const double exact = std::norm(i0 - 0.5 / L * i1);
  CHECK(filon_link_sq(z, g, r) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(filon_link_sq(z, g, 0.0) == doctest::Approx(0.75 * L * 0.75 * L).epsilon(1e-14));
}
