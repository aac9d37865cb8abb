#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nlicfm/cfm_engine.hpp"
#include "nlicfm/link_model.hpp"
#include "nlicfm/profile_fitter.hpp"
#include "nlicfm/srs_solver.hpp"

namespace nlicfm {

enum class IslandKind { sci, xci, mci };

/// Rectangular integration island in the (f1, f2) plane. Channel fields
/// are 0-based positions; f1 + f2 - f_cut falls in channel k_ch.
struct Island {
  std::size_t m_ch = 0;
  std::size_t n_ch = 0;
  std::size_t k_ch = 0;
  double f1_lo = 0.0, f1_hi = 0.0;
  double f2_lo = 0.0, f2_hi = 0.0;
  IslandKind kind = IslandKind::xci;

  /// The channel whose power profile shapes the link function.
  std::size_t interferer() const { return k_ch; }
};

struct IslandSet {
  std::vector<Island> islands;
  std::size_t mci_count = 0;  // only filled when requested
};

/// Folded SCI-XCI islands: one per signal channel m, f1 over channel m and
/// f2 over the CUT band.
IslandSet enumerate_islands(const Link& link, std::size_t cut, bool count_mci = false);

/// Both orientations (m, CUT, m) and (CUT, m, m) of every XCI island plus
/// the SCI island.
std::vector<Island> enumerate_islands_unfolded(const Link& link, std::size_t cut);

/// sum_k (c^k / k!) / (2 alpha0 + k sigma - j varrho), c = 2 alpha1 / sigma.
std::complex<double> zeta_complex(double varrho, const ProfileTriple& t, unsigned M);

/// Order past which the zeta series terms drop below 1e-17 relative.
unsigned converged_order(const ProfileTriple& t);

struct QuadSpec {
  std::size_t resolution = 32;  // initial panels per axis
  double rtol = 1e-4;           // R vs 2R acceptance
  std::size_t max_refinements = 4;
  std::size_t max_island_spans = 512;
  std::size_t threads = 1;
};

/// Phase mismatch 4 pi^2 (f1 - f_cut)(f2 - f_cut)(beta2 + pi beta3 (f1 + f2 - 2 f_c)).
double varrho(const Span& span, double f1, double f2, double f_cut);

/// Nested adaptive Gauss-Kronrod integral of integrand(varrho) over the
/// island, with breakpoints on the f1 = f_cut and f2 = f_cut ridges. The
/// panel count is doubled until two levels agree to quad.rtol.
double integrate_island(const Island& island, const Span& span, double f_cut,
                        const std::function<double(double)>& integrand, const QuadSpec& quad);

/// Island integral of |zeta|^2 with frequency-dependent dispersion.
double integrate_island_numeric(const Island& island, const Span& span, double f_cut,
                                const ProfileTriple& t, const QuadSpec& quad = {});

/// Quadrature reference for the incoherent closed form. Refuses links with
/// more than quad.max_island_spans (signal channel, span) pairs.
double nli_reference(const Link& link, const FitTable& fits, const SpanLossTable& losses,
                     std::size_t cut, const QuadSpec& quad = {});

/// |int_0^L g(z) e^{j varrho z} dz|^2 for g sampled on a uniform grid,
/// piecewise-linear Filon rule.
double filon_link_sq(std::span<const double> z, std::span<const double> g, double varrho);

/// Reference built from the sampled power evolutions instead of fitted
/// profiles.
double nli_reference_deep(const Link& link, std::span<const PowerEvolution> evolutions,
                          const SpanLossTable& losses, std::size_t cut, const QuadSpec& quad = {});

}  // namespace nlicfm
