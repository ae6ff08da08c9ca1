#pragma once

#include <string>
#include <vector>

#include "lanewrap/centerlines.hpp"
#include "lanewrap/types.hpp"

namespace lanewrap {

struct PlotOptions {
  double pixels_per_metre = 4.0;
  double margin_m = 10.0;
};

/// Lane corridors in grey, centerline sequences in green, histories in
/// yellow, predictions in blue (opacity by probability), ground truth in
/// red. Pass null for any layer that should be omitted.
std::string render_svg(const Scene& scene, const std::vector<CenterlineSequence>* sequences,
                       const PredictionSet* predictions, const PlotOptions& options = {});

}  // namespace lanewrap
