#include "nlicfm/report.hpp"

#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "nlicfm/errors.hpp"

namespace nlicfm {

namespace {

using nlohmann::ordered_json;

const char* severity_name(Diagnostic::Severity s) {
  return s == Diagnostic::Severity::error ? "error" : "warning";
}

ordered_json stage_json(const StageSummary& s) {
  return {{"median_s", s.median}, {"min_s", s.min}, {"samples_s", s.samples}};
}

}  // namespace

double dbm_per_ghz(double psd) { return 10.0 * std::log10(psd * 1e9 / 1e-3); }
double dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

std::vector<ReportRow> report_rows(const Link& link, const RunResult& result) {
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < result.report.cuts.size(); ++i) {
    const NliResult& c = result.report.cuts[i];
    ReportRow r;
    r.channel = link.channels[c.channel].index;
    r.f_cut = c.f_cut;
    r.bandwidth = c.bandwidth;
    r.g_nli = c.g_nli;
    r.incoherent = c.incoherent;
    r.coherence = c.coherence;
    r.nli_power = c.nli_power();
    if (i < result.oracle.size()) r.oracle = result.oracle[i];
    rows.push_back(r);
  }
  return rows;
}

std::string report_json(const Link& link, const RunResult& result, const ReportOptions& opts) {
  ordered_json cuts = ordered_json::array();
  const auto rows = report_rows(link, result);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ReportRow& r = rows[i];
    ordered_json j;
    j["channel"] = r.channel;
    j["f_cut_hz"] = r.f_cut;
    j["bandwidth_hz"] = r.bandwidth;
    j["g_nli_w_per_hz"] = r.g_nli;
    j["incoherent_w_per_hz"] = r.incoherent;
    j["coherence_w_per_hz"] = r.coherence;
    j["nli_power_w"] = r.nli_power;
    j["g_nli_dbm_per_ghz"] = dbm_per_ghz(r.g_nli);
    j["nli_power_dbm"] = dbm(r.nli_power);
    if (r.oracle) {
      j["oracle_w_per_hz"] = *r.oracle;
      j["oracle_gap_db"] = 10.0 * std::log10(r.incoherent / *r.oracle);
    }
    if (opts.breakdown) {
      ordered_json b = ordered_json::array();
      for (const auto& c : result.report.cuts[i].breakdown) {
        b.push_back({{"span", c.span + 1},
                     {"interferer", link.channels[c.interferer].index},
                     {"w_per_hz", c.value}});
      }
      j["breakdown"] = b;
    }
    cuts.push_back(j);
  }
  ordered_json doc;
  doc["cuts"] = cuts;
  ordered_json diags = ordered_json::array();
  for (const auto& d : result.diagnostics) {
    diags.push_back({{"severity", severity_name(d.severity)}, {"code", d.code}, {"message", d.message}});
  }
  doc["diagnostics"] = diags;
  if (opts.timing) {
    doc["timing"] = {{"ode_s", result.times.ode}, {"fit_s", result.times.fit}, {"cfm_s", result.times.cfm}};
  }
  return doc.dump(2) + "\n";
}

std::string report_csv(const Link& link, const RunResult& result) {
  const auto rows = report_rows(link, result);
  bool any_oracle = false;
  for (const auto& r : rows) any_oracle = any_oracle || r.oracle.has_value();
  std::ostringstream out;
  out << "channel,f_cut_hz,bandwidth_hz,g_nli_w_per_hz,incoherent_w_per_hz,coherence_w_per_hz,"
         "nli_power_w,g_nli_dbm_per_ghz,nli_power_dbm";
  if (any_oracle) out << ",oracle_w_per_hz,oracle_gap_db";
  out << '\n';
  for (const auto& r : rows) {
    out << r.channel << ',' << std::setprecision(17) << r.f_cut << ',' << r.bandwidth << ','
        << r.g_nli << ',' << r.incoherent << ',' << r.coherence << ',' << r.nli_power << ','
        << std::fixed << std::setprecision(4) << dbm_per_ghz(r.g_nli) << ',' << dbm(r.nli_power);
    out.unsetf(std::ios::floatfield);
    if (any_oracle) {
      if (r.oracle) {
        out << ',' << std::setprecision(17) << *r.oracle << ',' << std::fixed
            << std::setprecision(4) << 10.0 * std::log10(r.incoherent / *r.oracle);
        out.unsetf(std::ios::floatfield);
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
  return out.str();
}

std::vector<ReportRow> parse_report_json(const std::string& text) {
  std::vector<ReportRow> rows;
  try {
    const auto doc = ordered_json::parse(text);
    for (const auto& j : doc.at("cuts")) {
      ReportRow r;
      r.channel = j.at("channel").get<int>();
      r.f_cut = j.at("f_cut_hz").get<double>();
      r.bandwidth = j.at("bandwidth_hz").get<double>();
      r.g_nli = j.at("g_nli_w_per_hz").get<double>();
      r.incoherent = j.at("incoherent_w_per_hz").get<double>();
      r.coherence = j.at("coherence_w_per_hz").get<double>();
      r.nli_power = j.at("nli_power_w").get<double>();
      if (j.contains("oracle_w_per_hz")) r.oracle = j.at("oracle_w_per_hz").get<double>();
      rows.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
  return rows;
}

std::string benchmark_json(const BenchmarkResult& b) {
  ordered_json j;
  j["repetitions"] = b.repetitions;
  j["cuts"] = b.cut_count;
  if (!b.ode.samples.empty()) {
    j["ode"] = stage_json(b.ode);
    j["fit"] = stage_json(b.fit);
  }
  j["cfm"] = stage_json(b.cfm);
  j["cfm_per_cut_median_s"] = b.cfm_per_cut_median;
  if (!b.ode.samples.empty() && b.cfm.median > 0.0) j["ode_to_cfm_ratio"] = b.ode.median / b.cfm.median;
  return j.dump(2) + "\n";
}

}  // namespace nlicfm
