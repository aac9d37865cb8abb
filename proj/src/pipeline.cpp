#include "nlicfm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "nlicfm/errors.hpp"
#include "nlicfm/parallel.hpp"

namespace nlicfm {

namespace {

using clock_type = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string hex_bits(double v) {
  std::ostringstream s;
  s << std::hexfloat << v << ';';
  return s.str();
}

std::string key(const Link& link, bool with_power) {
  std::string k;
  for (const auto& c : link.channels) {
    k += hex_bits(c.f_center) + hex_bits(c.bandwidth) + (c.is_pump ? "p;" : "s;");
    if (with_power) k += hex_bits(c.launch_psd);
  }
  k += '|';
  for (std::size_t p = 0; p < link.spans.size(); ++p) {
    const Span& s = link.spans[p];
    k += hex_bits(s.length) + hex_bits(s.beta2) + hex_bits(s.beta3) +
         hex_bits(s.f_taylor_center) + (s.amp_transparent ? "t;" : "g;");
    for (double a : s.intrinsic_alpha) k += hex_bits(a);
    for (double g : s.amp_gain) k += hex_bits(g);
    const RamanGainProfile& r = link.raman[p];
    k += std::to_string(static_cast<int>(r.kind())) + hex_bits(r.c_r_max()) + hex_bits(r.delta_f());
    for (const auto& [u, c] : r.samples()) k += hex_bits(u) + hex_bits(c);
  }
  std::ostringstream out;
  out << std::hex << std::hash<std::string>{}(k);
  return out.str();
}

}  // namespace

std::string structure_key(const Link& link) { return key(link, false); }
std::string full_key(const Link& link) { return key(link, true); }

std::vector<PowerEvolution> solve_link(const Link& link, const SolverOptions& opts) {
  const std::size_t nc = link.channels.size();
  std::vector<double> launch(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    launch[j] = link.channels[j].launch_power();
    if (!(launch[j] > 0.0)) {
      throw ValidationError("channel " + std::to_string(link.channels[j].index) +
                            ": launch power must be > 0 for the power-evolution solve");
    }
  }
  std::vector<PowerEvolution> out;
  out.reserve(link.spans.size());
  for (std::size_t p = 0; p < link.spans.size(); ++p) {
    out.push_back(solve_power_evolution(link.spans[p], link.raman[p], link.channels, launch, opts, p));
    const PowerEvolution& e = out.back();
    const Span& span = link.spans[p];
    for (std::size_t j = 0; j < nc; ++j) {
      if (link.channels[j].is_pump) {
        launch[j] = link.channels[j].launch_power();
      } else if (!span.amp_transparent) {
        launch[j] = e.end_power(j) * span.amp_gain[j];
      }
    }
  }
  return out;
}

FitTable fit_link(const Link& link, std::span<const PowerEvolution> evolutions,
                  const FitSettings& settings, std::size_t threads,
                  std::vector<Diagnostic>* diagnostics) {
  const std::size_t ns = link.spans.size();
  const std::size_t nc = link.channels.size();
  const auto sig = link.signal_positions();
  FitTable fits(ns, std::vector<FittedProfile>(nc));
  parallel_for(ns * sig.size(), threads, [&](std::size_t i) {
    const std::size_t p = i / sig.size();
    const std::size_t j = sig[i % sig.size()];
    const PowerEvolution& e = evolutions[p];
    fits[p][j] = fit_profile(e.z, e.channel(j), link.spans[p].intrinsic_alpha[j], settings, p, j);
  });
  if (diagnostics != nullptr) {
    std::size_t count = 0;
    std::ostringstream where;
    for (std::size_t p = 0; p < ns; ++p) {
      std::string list;
      for (std::size_t j : sig) {
        const FittedProfile& f = fits[p][j];
        const double alpha = link.spans[p].intrinsic_alpha[j];
        const bool outside = f.sigma < settings.sigma_lo_factor * alpha ||
                             f.sigma > settings.sigma_hi_factor * alpha;
        if (!f.widened || !outside) continue;
        ++count;
        list += (list.empty() ? "" : ",") + std::to_string(link.channels[j].index);
      }
      if (!list.empty()) where << " span " << p + 1 << ": channels " << list << ';';
    }
    if (count > 0) {
      std::ostringstream msg;
      msg << count << " fits settled outside the default sigma interval [" << settings.sigma_lo_factor
          << ", " << settings.sigma_hi_factor << "] x alpha;" << where.str();
      diagnostics->push_back({Diagnostic::Severity::warning, "sigma-widened", msg.str()});
    }
  }
  return fits;
}

ProfileArtifacts compute_profiles(const Link& link, const RunConfig& config, StageTimes* times,
                                  std::vector<Diagnostic>* diagnostics) {
  require_valid(link);
  config.fit.check();
  ProfileArtifacts a;
  auto t0 = clock_type::now();
  a.evolutions = solve_link(link, config.solver);
  a.losses = loss_table(a.evolutions);
  if (times != nullptr) times->ode = seconds_since(t0);
  t0 = clock_type::now();
  a.fits = fit_link(link, a.evolutions, config.fit, config.threads, &a.diagnostics);
  if (times != nullptr) times->fit = seconds_since(t0);
  if (diagnostics != nullptr) {
    diagnostics->insert(diagnostics->end(), a.diagnostics.begin(), a.diagnostics.end());
  }
  a.structure_key = structure_key(link);
  a.full_key = full_key(link);
  return a;
}

RunResult run_closed_form(const Link& link, const ProfileArtifacts& artifacts,
                          const RunConfig& config) {
  require_valid(link);
  RunResult r;
  const auto t0 = clock_type::now();
  const CfmEngine engine(link, artifacts.fits, artifacts.losses, config.cfm);
  r.report = engine.evaluate_all(config.rho, config.threads);
  r.times.cfm = seconds_since(t0);
  r.diagnostics = artifacts.diagnostics;
  r.diagnostics.insert(r.diagnostics.end(), r.report.diagnostics.begin(),
                       r.report.diagnostics.end());

  r.oracle.assign(r.report.cuts.size(), std::nullopt);
  if (config.oracle != OracleMode::off) {
    QuadSpec q = config.quad;
    q.threads = config.threads;
    for (std::size_t i = 0; i < r.report.cuts.size(); ++i) {
      const std::size_t cut = r.report.cuts[i].channel;
      r.oracle[i] = config.oracle == OracleMode::deep
                        ? nli_reference_deep(link, artifacts.evolutions, artifacts.losses, cut, q)
                        : nli_reference(link, artifacts.fits, artifacts.losses, cut, q);
    }
  }
  return r;
}

RunResult run_pipeline(const Link& link, const RunConfig& config,
                       ProfileArtifacts* artifacts_out) {
  StageTimes times;
  ProfileArtifacts a = compute_profiles(link, config, &times);
  RunResult r = run_closed_form(link, a, config);
  r.times.ode = times.ode;
  r.times.fit = times.fit;
  if (artifacts_out != nullptr) *artifacts_out = std::move(a);
  return r;
}

void save_artifacts(const ProfileArtifacts& a, const std::filesystem::path& path) {
  json j;
  j["structure_key"] = a.structure_key;
  j["full_key"] = a.full_key;
  j["losses"] = a.losses.s;
  json evs = json::array();
  for (const auto& e : a.evolutions) {
    evs.push_back({{"span", e.span_index}, {"z", e.z}, {"powers", e.powers}, {"launch", e.launch}});
  }
  j["evolutions"] = evs;
  json fits = json::array();
  for (const auto& row : a.fits) {
    json r = json::array();
    for (const auto& f : row) {
      r.push_back({{"alpha0", f.alpha0}, {"alpha1", f.alpha1}, {"sigma", f.sigma},
                   {"cost", f.cost}, {"m_c", f.m_c}, {"sigma_lo", f.sigma_lo},
                   {"sigma_hi", f.sigma_hi}, {"widened", f.widened}});
    }
    fits.push_back(r);
  }
  j["fits"] = fits;
  json diags = json::array();
  for (const auto& d : a.diagnostics) {
    diags.push_back({{"severity", d.severity == Diagnostic::Severity::error ? "error" : "warning"},
                     {"code", d.code},
                     {"message", d.message}});
  }
  j["diagnostics"] = diags;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write cache " + path.string());
  out << j.dump();
}

ProfileArtifacts load_artifacts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open cache " + path.string());
  try {
    const json j = json::parse(in);
    ProfileArtifacts a;
    a.structure_key = j.at("structure_key").get<std::string>();
    a.full_key = j.at("full_key").get<std::string>();
    a.losses.s = j.at("losses").get<std::vector<std::vector<double>>>();
    for (const auto& e : j.at("evolutions")) {
      PowerEvolution ev;
      ev.span_index = e.at("span").get<std::size_t>();
      ev.z = e.at("z").get<std::vector<double>>();
      ev.powers = e.at("powers").get<std::vector<double>>();
      ev.launch = e.at("launch").get<std::vector<double>>();
      a.evolutions.push_back(std::move(ev));
    }
    std::size_t p = 0;
    for (const auto& row : j.at("fits")) {
      std::vector<FittedProfile> r;
      std::size_t c = 0;
      for (const auto& f : row) {
        FittedProfile fp;
        fp.span_index = p;
        fp.channel_index = c++;
        fp.alpha0 = f.at("alpha0").get<double>();
        fp.alpha1 = f.at("alpha1").get<double>();
        fp.sigma = f.at("sigma").get<double>();
        fp.cost = f.at("cost").get<double>();
        fp.m_c = f.at("m_c").get<double>();
        fp.sigma_lo = f.at("sigma_lo").get<double>();
        fp.sigma_hi = f.at("sigma_hi").get<double>();
        fp.widened = f.at("widened").get<bool>();
        r.push_back(fp);
      }
      a.fits.push_back(std::move(r));
      ++p;
    }
    for (const auto& d : j.value("diagnostics", json::array())) {
      a.diagnostics.push_back({d.at("severity").get<std::string>() == "error"
                                   ? Diagnostic::Severity::error
                                   : Diagnostic::Severity::warning,
                               d.at("code").get<std::string>(), d.at("message").get<std::string>()});
    }
    return a;
  } catch (const json::exception& e) {
    throw InputError("corrupt cache " + path.string() + ": " + e.what());
  }
}

StageSummary summarize(std::vector<double> samples) {
  StageSummary s;
  s.samples = samples;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  s.min = samples.front();
  s.median = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  return s;
}

BenchmarkResult benchmark(const Link& link, const RunConfig& config, std::size_t repetitions,
                          const ProfileArtifacts* cached) {
  if (repetitions < 3) throw ValidationError("benchmark needs at least 3 repetitions");
  RunConfig cfg = config;
  cfg.oracle = OracleMode::off;
  std::vector<double> ode, fit, cfm;
  BenchmarkResult b;
  b.repetitions = repetitions;
  b.cut_count = link.cut_positions().size();
  for (std::size_t i = 0; i < repetitions; ++i) {
    if (cached != nullptr) {
      const RunResult r = run_closed_form(link, *cached, cfg);
      cfm.push_back(r.times.cfm);
    } else {
      const RunResult r = run_pipeline(link, cfg);
      ode.push_back(r.times.ode);
      fit.push_back(r.times.fit);
      cfm.push_back(r.times.cfm);
    }
  }
  b.ode = summarize(ode);
  b.fit = summarize(fit);
  b.cfm = summarize(cfm);
  b.cfm_per_cut_median = b.cut_count > 0 ? b.cfm.median / static_cast<double>(b.cut_count) : 0.0;
  return b;
}

}  // namespace nlicfm
