#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlicfm/cfm_engine.hpp"
#include "nlicfm/gn_oracle.hpp"
#include "nlicfm/link_model.hpp"
#include "nlicfm/profile_fitter.hpp"
#include "nlicfm/srs_solver.hpp"

namespace nlicfm {

enum class OracleMode { off, fitted, deep };

struct RunConfig {
  SolverOptions solver;
  FitSettings fit;
  CorrectionFactors rho = CorrectionFactors::identity();
  CfmOptions cfm;
  OracleMode oracle = OracleMode::off;
  QuadSpec quad;
  std::size_t threads = 1;
};

/// Everything the slow stages produce; enough to rerun the closed form.
struct ProfileArtifacts {
  std::vector<PowerEvolution> evolutions;
  SpanLossTable losses;
  FitTable fits;
  std::string structure_key;  // link geometry without launch powers
  std::string full_key;       // structure plus launch powers
  std::vector<Diagnostic> diagnostics;  // from the fit stage
};

struct StageTimes {
  double ode = 0.0;  // s
  double fit = 0.0;
  double cfm = 0.0;
};

struct RunResult {
  NliReport report;
  std::vector<std::optional<double>> oracle;  // per CUT, W/Hz
  std::vector<Diagnostic> diagnostics;
  StageTimes times;
};

/// Fingerprints used to match cached artifacts against a link.
std::string structure_key(const Link& link);
std::string full_key(const Link& link);

/// Span-by-span power evolution. Each span is launched with the previous
/// span's output times its amplifier gain (transparent amplifiers restore
/// the previous launch); pumps are re-injected at their configured power.
std::vector<PowerEvolution> solve_link(const Link& link, const SolverOptions& opts);

/// Per-(span, signal channel) fits, run in parallel. Widened searches are
/// reported as warnings.
FitTable fit_link(const Link& link, std::span<const PowerEvolution> evolutions,
                  const FitSettings& settings, std::size_t threads,
                  std::vector<Diagnostic>* diagnostics = nullptr);

ProfileArtifacts compute_profiles(const Link& link, const RunConfig& config,
                                  StageTimes* times = nullptr,
                                  std::vector<Diagnostic>* diagnostics = nullptr);

/// Closed form (and optional oracle) on precomputed artifacts.
RunResult run_closed_form(const Link& link, const ProfileArtifacts& artifacts,
                          const RunConfig& config);

/// compute_profiles followed by run_closed_form.
RunResult run_pipeline(const Link& link, const RunConfig& config,
                       ProfileArtifacts* artifacts_out = nullptr);

void save_artifacts(const ProfileArtifacts& artifacts, const std::filesystem::path& path);
ProfileArtifacts load_artifacts(const std::filesystem::path& path);

struct StageSummary {
  std::vector<double> samples;  // s
  double median = 0.0;
  double min = 0.0;
};

struct BenchmarkResult {
  std::size_t repetitions = 0;
  std::size_t cut_count = 0;
  StageSummary ode, fit, cfm;
  double cfm_per_cut_median = 0.0;
};

StageSummary summarize(std::vector<double> samples);

/// Full pipeline `repetitions` times (>= 3). With `cached` set, the slow
/// stages are skipped and only the closed form is timed.
BenchmarkResult benchmark(const Link& link, const RunConfig& config, std::size_t repetitions,
                          const ProfileArtifacts* cached = nullptr);

}  // namespace nlicfm
