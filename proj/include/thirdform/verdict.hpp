#pragma once

#include <optional>
#include <string_view>

namespace thirdform {

enum class VerdictKind { TotallyGeodesic, RoundSphere, SphereProduct, VeroneseLike, NotHomothetic, Inconclusive };

/// Which second fundamental form is analyzed: the one in the flat ambient
/// space, or the one relative to the space form Q_c containing the image.
enum class AnalysisFrame { Auto, Euclidean, SpaceForm };

std::string_view to_string(VerdictKind kind);
std::string_view to_string(AnalysisFrame frame);
std::optional<VerdictKind> parse_verdict_kind(std::string_view text);
std::optional<AnalysisFrame> parse_analysis_frame(std::string_view text);

}  // namespace thirdform
