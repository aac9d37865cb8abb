#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "nlicfm/errors.hpp"
#include "nlicfm/link_io.hpp"
#include "nlicfm/parallel.hpp"
#include "nlicfm/pipeline.hpp"
#include "nlicfm/report.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kNumeric = 2, kInput = 3 };

struct Options {
  std::string input;
  std::string out;
  std::string format = "json";
  bool oracle = false;
  bool deep_oracle = false;
  double mc = 2.0;
  std::string sigma_range = "1,4";
  double gs_tol = 1e-4;
  std::string rho = "identity";
  std::size_t threads = nlicfm::default_thread_count();
  bool strict = false;
  std::size_t bench = 0;
  bool freeze = false;
  std::string cache;
  std::string stage = "all";
  bool timing = false;
  bool breakdown = false;
  bool exact_fint = false;
};

std::pair<double, double> parse_range(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw nlicfm::InputError("--sigma-range expects LO,HI");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw nlicfm::InputError("--sigma-range expects two numbers, got '" + s + "'");
  }
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw nlicfm::InputError("cannot write " + path);
  out << text;
}

int run(const Options& o) {
  using namespace nlicfm;
  const auto loaded = load_link(o.input, o.strict ? Strictness::strict : Strictness::warn);
  const Link& link = loaded.link;
  for (const auto& d : loaded.diagnostics) std::cerr << "warning [" << d.code << "] " << d.message << '\n';

  RunConfig cfg;
  cfg.fit.m_c = o.mc;
  std::tie(cfg.fit.sigma_lo_factor, cfg.fit.sigma_hi_factor) = parse_range(o.sigma_range);
  cfg.fit.gs_tol = o.gs_tol;
  cfg.fit.check();
  if (o.rho == "identity") {
    cfg.rho = CorrectionFactors::identity();
  } else if (o.rho == "incoherent") {
    cfg.rho = CorrectionFactors::incoherent_only();
  } else {
    cfg.rho = load_correction_factors(o.rho);
  }
  cfg.threads = std::max<std::size_t>(1, o.threads);
  cfg.cfm.exact_fint = o.exact_fint;
  cfg.cfm.breakdown = o.breakdown;
  cfg.oracle = o.deep_oracle ? OracleMode::deep : (o.oracle ? OracleMode::fitted : OracleMode::off);

  const bool reuse = o.stage == "cfm-only" || o.freeze;
  if (reuse && o.cache.empty()) throw InputError("--stage cfm-only and --freeze-profiles need --cache");

  ProfileArtifacts artifacts;
  bool have_artifacts = false;
  if (reuse) {
    artifacts = load_artifacts(o.cache);
    const bool match = o.freeze ? artifacts.structure_key == structure_key(link)
                                : artifacts.full_key == full_key(link);
    if (!match) throw InputError("cache " + o.cache + " was produced for a different link");
    have_artifacts = true;
  }

  if (o.bench > 0) {
    const auto b = benchmark(link, cfg, o.bench, have_artifacts ? &artifacts : nullptr);
    emit(benchmark_json(b), o.out);
    return kOk;
  }

  RunResult result;
  if (have_artifacts) {
    result = run_closed_form(link, artifacts, cfg);
  } else {
    result = run_pipeline(link, cfg, &artifacts);
    if (!o.cache.empty()) save_artifacts(artifacts, o.cache);
  }
  for (const auto& d : result.diagnostics) std::cerr << "warning [" << d.code << "] " << d.message << '\n';

  ReportOptions ro;
  ro.timing = o.timing;
  ro.breakdown = o.breakdown;
  emit(o.format == "csv" ? report_csv(link, result) : report_json(link, result, ro), o.out);
  if (o.timing) {
    std::cerr << "ode " << result.times.ode << " s, fit " << result.times.fit << " s, cfm "
              << result.times.cfm << " s\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form nonlinear interference for wideband links with inter-channel SRS"};
  app.require_subcommand(1);
  Options o;
  auto* cmd = app.add_subcommand("run", "Evaluate NLI for every channel under test");
  cmd->add_option("input", o.input, "Link description (YAML)")->required();
  cmd->add_option("--out", o.out, "Output file (default stdout)");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--oracle", o.oracle, "Add the quadrature reference column");
  cmd->add_flag("--deep-oracle", o.deep_oracle, "Reference from sampled profiles (slow)");
  cmd->add_option("--mc", o.mc, "Fit weight exponent m_c");
  cmd->add_option("--sigma-range", o.sigma_range, "sigma search interval as multiples of alpha, LO,HI");
  cmd->add_option("--gs-tol", o.gs_tol, "Golden-section relative tolerance");
  cmd->add_option("--rho", o.rho, "identity | incoherent | YAML file with rho_cut, rho_mch, rho_coh");
  cmd->add_option("--threads", o.threads, "Worker threads");
  cmd->add_flag("--strict", o.strict, "Treat validation warnings as errors");
  cmd->add_option("--bench", o.bench, "Benchmark with N repetitions (N >= 3)");
  cmd->add_flag("--freeze-profiles", o.freeze, "Reuse cached fits and losses even if launch powers changed");
  cmd->add_option("--cache", o.cache, "Profile cache file");
  cmd->add_option("--stage", o.stage, "Pipeline stages to run")->check(CLI::IsMember({"all", "cfm-only"}));
  cmd->add_flag("--timing", o.timing, "Report stage wall times");
  cmd->add_flag("--breakdown", o.breakdown, "Per-span, per-interferer contributions");
  cmd->add_flag("--exact-fint", o.exact_fint, "Dilogarithm island kernel instead of asinh");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    return run(o);
  } catch (const nlicfm::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const nlicfm::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const nlicfm::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
}
