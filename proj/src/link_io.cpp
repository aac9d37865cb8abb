#include "nlicfm/link_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "nlicfm/errors.hpp"

namespace nlicfm {

namespace {

constexpr double kThz = 1e12;
constexpr double kGhz = 1e9;

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  std::ostringstream msg;
  if (node.IsDefined() && node.Mark().line >= 0) {
    msg << "line " << node.Mark().line + 1 << ", column " << node.Mark().column + 1 << ": ";
  }
  msg << "field '" << field << "': " << what;
  throw InputError(msg.str());
}

double as_double(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(node, field, "expected a number, got '" + node.Scalar() + "'");
  }
}

std::optional<double> optional_double(const YAML::Node& map, const std::string& key) {
  const YAML::Node n = map[key];
  if (!n) return std::nullopt;
  return as_double(n, key);
}

double required_double(const YAML::Node& map, const std::string& key, const std::string& who) {
  const YAML::Node n = map[key];
  if (!n) {
    std::ostringstream msg;
    if (map.Mark().line >= 0) msg << "line " << map.Mark().line + 1 << ": ";
    msg << who << ": missing required field '" << key << "'";
    throw InputError(msg.str());
  }
  return as_double(n, key);
}

void check_keys(const YAML::Node& map, std::initializer_list<const char*> allowed,
                const std::string& who) {
  if (!map.IsMap()) fail(map, who, "expected a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end()) {
      fail(kv.first, key, "unknown key in " + who);
    }
  }
}

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double launch_power(const YAML::Node& map, const std::string& who) {
  const auto dbm = optional_double(map, "power_dbm");
  const auto w = optional_double(map, "power_w");
  if (dbm && w) fail(map, who, "give power_dbm or power_w, not both");
  if (dbm) return dbm_to_watt(*dbm);
  if (w) return *w;
  return required_double(map, "power_dbm", who);
}

struct RawChannel {
  double f = 0.0;
  double bw = 0.0;
  double power = 0.0;
  double phi = 0.0;
  bool pump = false;
};

std::vector<RawChannel> read_signals(const YAML::Node& root) {
  std::vector<RawChannel> out;
  const YAML::Node comb = root["comb"];
  const YAML::Node list = root["channels"];
  if (comb && list) fail(comb, "comb", "give either 'comb' or 'channels', not both");
  if (comb) {
    check_keys(comb,
               {"count", "first_thz", "spacing_ghz", "symbol_rate_gbd", "power_dbm", "power_w",
                "phi"},
               "comb");
    const double count = required_double(comb, "count", "comb");
    if (count < 1 || count != std::floor(count)) fail(comb["count"], "count", "must be a positive integer");
    const double first = required_double(comb, "first_thz", "comb") * kThz;
    const double spacing = required_double(comb, "spacing_ghz", "comb") * kGhz;
    const double rate = required_double(comb, "symbol_rate_gbd", "comb") * kGhz;
    const double p = launch_power(comb, "comb");
    const double phi = optional_double(comb, "phi").value_or(0.0);
    for (int i = 0; i < static_cast<int>(count); ++i) {
      out.push_back({first + i * spacing, rate, p, phi, false});
    }
  } else if (list) {
    if (!list.IsSequence()) fail(list, "channels", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const YAML::Node c = list[i];
      const std::string who = "channel " + std::to_string(i + 1);
      check_keys(c, {"f_thz", "symbol_rate_gbd", "power_dbm", "power_w", "phi"}, who);
      out.push_back({required_double(c, "f_thz", who) * kThz,
                     required_double(c, "symbol_rate_gbd", who) * kGhz, launch_power(c, who),
                     optional_double(c, "phi").value_or(0.0), false});
    }
  } else {
    throw InputError("missing 'comb' or 'channels'");
  }
  return out;
}

std::vector<RawChannel> read_pumps(const YAML::Node& root) {
  std::vector<RawChannel> out;
  const YAML::Node pumps = root["pumps"];
  if (!pumps) return out;
  if (!pumps.IsSequence()) fail(pumps, "pumps", "expected a list");
  for (std::size_t i = 0; i < pumps.size(); ++i) {
    const YAML::Node p = pumps[i];
    const std::string who = "pump " + std::to_string(i + 1);
    check_keys(p, {"f_thz", "power_dbm", "power_w", "bandwidth_ghz"}, who);
    out.push_back({required_double(p, "f_thz", who) * kThz,
                   optional_double(p, "bandwidth_ghz").value_or(1.0) * kGhz,
                   launch_power(p, who), 0.0, true});
  }
  return out;
}

RamanGainProfile read_raman(const YAML::Node& node) {
  check_keys(node, {"model", "c_r_max_per_w_km", "delta_f_thz", "samples"}, "raman");
  const YAML::Node model = node["model"];
  if (!model) fail(node, "model", "missing (none | triangular | tabulated)");
  const std::string kind = model.as<std::string>();
  try {
    if (kind == "none") return RamanGainProfile::none();
    if (kind == "triangular") {
      return RamanGainProfile::triangular(
          required_double(node, "c_r_max_per_w_km", "raman") / 1000.0,
          required_double(node, "delta_f_thz", "raman") * kThz);
    }
    if (kind == "tabulated") {
      const YAML::Node s = node["samples"];
      if (!s || !s.IsSequence()) fail(node, "samples", "expected a list of [u_thz, c_r_per_w_km]");
      std::vector<std::pair<double, double>> samples;
      for (const auto& row : s) {
        if (!row.IsSequence() || row.size() != 2) fail(row, "samples", "expected [u_thz, c_r_per_w_km]");
        samples.emplace_back(as_double(row[0], "samples") * kThz,
                             as_double(row[1], "samples") / 1000.0);
      }
      return RamanGainProfile::tabulated(samples);
    }
  } catch (const std::invalid_argument& e) {
    fail(node, "raman", e.what());
  }
  fail(model, "model", "unknown Raman model '" + kind + "'");
}

// Scalar or per-channel list.
std::vector<double> per_channel(const YAML::Node& node, const std::string& field, std::size_t n,
                                double scale) {
  std::vector<double> out;
  if (node.IsSequence()) {
    if (node.size() != n) {
      fail(node, field, "expected " + std::to_string(n) + " entries, got " +
                            std::to_string(node.size()));
    }
    for (const auto& v : node) out.push_back(as_double(v, field) * scale);
  } else {
    out.assign(n, as_double(node, field) * scale);
  }
  return out;
}

}  // namespace

LoadedLink parse_link(const std::string& text, Strictness strictness) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  if (!root.IsMap()) throw InputError("link document must be a mapping");
  check_keys(root, {"comb", "channels", "pumps", "raman", "spans", "cut"}, "document");

  try {
    std::vector<RawChannel> raw = read_signals(root);
    const std::size_t n_signals = raw.size();
    std::vector<RawChannel> pumps = read_pumps(root);
    raw.insert(raw.end(), pumps.begin(), pumps.end());

    std::vector<std::size_t> order(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a].f < raw[b].f; });

    LoadedLink out;
    Link& link = out.link;
    std::vector<int> signal_to_index(n_signals);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const RawChannel& r = raw[order[pos]];
      Channel c;
      c.index = static_cast<int>(pos) + 1;
      c.f_center = r.f;
      c.bandwidth = r.bw;
      c.launch_psd = r.bw > 0.0 ? r.power / r.bw : 0.0;
      c.mod_format_phi = r.phi;
      c.is_pump = r.pump;
      link.channels.push_back(c);
      if (order[pos] < n_signals) signal_to_index[order[pos]] = c.index;
    }
    const std::size_t nc = link.channels.size();

    double f_mid = 0.0;
    {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t i = 0; i < n_signals; ++i) {
        lo = std::min(lo, raw[i].f);
        hi = std::max(hi, raw[i].f);
      }
      f_mid = 0.5 * (lo + hi);
    }

    RamanGainProfile default_raman = RamanGainProfile::none();
    if (root["raman"]) default_raman = read_raman(root["raman"]);

    const YAML::Node spans = root["spans"];
    if (!spans || !spans.IsSequence() || spans.size() == 0) {
      fail(spans, "spans", "expected a non-empty list");
    }
    std::size_t span_no = 0;
    for (std::size_t e = 0; e < spans.size(); ++e) {
      const YAML::Node s = spans[e];
      const std::string who = "span " + std::to_string(span_no + 1);
      check_keys(s,
                 {"repeat", "length_km", "loss_db_per_km", "gamma_per_w_km",
                  "dispersion_ps_nm_km", "slope_ps_nm2_km", "f_ref_thz", "amp_gain", "raman"},
                 who);
      Span span;
      span.length = required_double(s, "length_km", who) * 1000.0;
      span.gamma = required_double(s, "gamma_per_w_km", who) / 1000.0;
      if (!s["loss_db_per_km"]) required_double(s, "loss_db_per_km", who);
      span.intrinsic_alpha = per_channel(s["loss_db_per_km"], "loss_db_per_km", nc,
                                         units::field_alpha_from_db_per_km(1.0));
      span.f_taylor_center = optional_double(s, "f_ref_thz").value_or(f_mid / kThz) * kThz;
      const double d = required_double(s, "dispersion_ps_nm_km", who) * 1e-6;
      const double slope = optional_double(s, "slope_ps_nm2_km").value_or(0.0) * 1e3;
      const auto beta = beta_from_dispersion(d, slope, span.f_taylor_center);
      span.beta2 = beta.beta2;
      span.beta3 = beta.beta3;

      const YAML::Node gain = s["amp_gain"];
      if (!gain || (gain.IsScalar() && gain.Scalar() == "transparent")) {
        span.amp_transparent = true;
      } else if (gain.IsMap()) {
        check_keys(gain, {"db"}, "amp_gain");
        const auto db = per_channel(gain["db"], "amp_gain.db", nc, 1.0);
        for (double g : db) span.amp_gain.push_back(std::pow(10.0, g / 10.0));
      } else {
        fail(gain, "amp_gain", "expected 'transparent' or {db: value | list}");
      }

      RamanGainProfile raman = s["raman"] ? read_raman(s["raman"]) : default_raman;

      std::size_t repeat = 1;
      if (s["repeat"]) {
        const double r = as_double(s["repeat"], "repeat");
        if (r < 1 || r != std::floor(r)) fail(s["repeat"], "repeat", "must be a positive integer");
        repeat = static_cast<std::size_t>(r);
      }
      for (std::size_t k = 0; k < repeat; ++k) {
        link.spans.push_back(span);
        link.raman.push_back(raman);
        ++span_no;
      }
    }

    if (const YAML::Node cut = root["cut"]) {
      if (!cut.IsSequence()) fail(cut, "cut", "expected a list of signal channel numbers");
      for (const auto& v : cut) {
        const double k = as_double(v, "cut");
        if (k < 1 || k > static_cast<double>(n_signals) || k != std::floor(k)) {
          fail(v, "cut", "signal channel number out of range");
        }
        link.cut_selection.push_back(signal_to_index[static_cast<std::size_t>(k) - 1]);
      }
    }

    out.diagnostics = validate(link);
    const bool fatal =
        has_errors(out.diagnostics) || (strictness == Strictness::strict && !out.diagnostics.empty());
    if (fatal) {
      std::string msg = "invalid link:";
      for (const auto& d : out.diagnostics) {
        msg += std::string("\n  ") + (d.severity == Diagnostic::Severity::error ? "error" : "warning") +
               " [" + d.code + "] " + d.message;
      }
      throw ValidationError(msg);
    }
    return out;
  } catch (const YAML::Exception& e) {
    throw InputError(std::string("malformed document: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedLink load_link(const std::filesystem::path& path, Strictness strictness) {
  try {
    return parse_link(read_text_file(path), strictness);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

CorrectionFactors parse_correction_factors(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  check_keys(root, {"rho_cut", "rho_mch", "rho_coh"}, "correction factors");
  const double cut = optional_double(root, "rho_cut").value_or(1.0);
  const double mch = optional_double(root, "rho_mch").value_or(1.0);
  const double coh = optional_double(root, "rho_coh").value_or(1.0);
  for (double v : {cut, mch, coh}) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("correction factors must be >= 0");
  }
  return CorrectionFactors::constant(cut, mch, coh);
}

CorrectionFactors load_correction_factors(const std::filesystem::path& path) {
  return parse_correction_factors(read_text_file(path));
}

}  // namespace nlicfm
