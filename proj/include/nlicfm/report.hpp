#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nlicfm/pipeline.hpp"

namespace nlicfm {

struct ReportOptions {
  bool timing = false;  // include wall-clock times (breaks byte-stability across runs)
  bool breakdown = false;
};

/// One output row per CUT.
struct ReportRow {
  int channel = 0;
  double f_cut = 0.0;      // Hz
  double bandwidth = 0.0;  // Hz
  double g_nli = 0.0;      // W/Hz
  double incoherent = 0.0;
  double coherence = 0.0;
  double nli_power = 0.0;  // W
  std::optional<double> oracle;  // W/Hz
};

/// 10 log10(G / (1 mW / GHz)).
double dbm_per_ghz(double psd);
double dbm(double watt);

std::vector<ReportRow> report_rows(const Link& link, const RunResult& result);

std::string report_json(const Link& link, const RunResult& result, const ReportOptions& opts = {});
std::string report_csv(const Link& link, const RunResult& result);
std::vector<ReportRow> parse_report_json(const std::string& text);

std::string benchmark_json(const BenchmarkResult& bench);

}  // namespace nlicfm
