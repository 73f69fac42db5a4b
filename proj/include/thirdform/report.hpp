#pragma once

// Serialization of analysis results. JSON reports are pretty-printed with
// keys in insertion order and every float written with 17 significant
// digits, so identical inputs give identical bytes.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "thirdform/catalog.hpp"
#include "thirdform/classify.hpp"
#include "thirdform/forms.hpp"

namespace thirdform {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "thirdform";
inline constexpr const char* kToolVersion = "0.1.0";

struct ReportMeta {
  std::string command;
  std::string entry;
  Params params;
  std::uint64_t seed = 0;
  int samples = 0;
  Tolerances tol;
  AnalysisFrame frame = AnalysisFrame::Auto;
};

/// {"value": v, "tol": t}; non-finite values become null.
Json measured(double value, double tol);

Json meta_json(const ReportMeta& meta);
Json verdict_json(const Verdict& v, const Tolerances& tol);
Json sample_json(const SampleRow& row, const Tolerances& tol);
Json analysis_json(const ReportMeta& meta, const Analysis& analysis);

/// Decomposition of a raw shape pair together with its block certificates.
Json decomposition_json(const BilinearForm2& form, const AdaptedDecomposition& dec, const FormTolerances& tol);

/// Deterministic pretty printer (two-space indent, %.17g floats, NaN -> null).
std::string dump_json(const Json& j);

std::string analysis_text(const ReportMeta& meta, const Analysis& analysis);
std::string decomposition_text(const Json& decomposition);

}  // namespace thirdform
