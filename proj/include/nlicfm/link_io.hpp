#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlicfm/cfm_engine.hpp"
#include "nlicfm/link_model.hpp"

namespace nlicfm {

enum class Strictness { warn, strict };

struct LoadedLink {
  Link link;
  std::vector<Diagnostic> diagnostics;
};

/// Parses a YAML link document (schema in docs/input-format.md). Throws
/// InputError with line/field context on malformed input and
/// ValidationError on invariant violations; under Strictness::strict
/// warnings are fatal too.
LoadedLink parse_link(const std::string& text, Strictness strictness = Strictness::warn);
LoadedLink load_link(const std::filesystem::path& path, Strictness strictness = Strictness::warn);

/// Constant correction factors from a YAML document with keys rho_cut,
/// rho_mch, rho_coh (each optional, default 1).
CorrectionFactors parse_correction_factors(const std::string& text);
CorrectionFactors load_correction_factors(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace nlicfm
