#pragma once

#include "motionspc/hotelling.hpp"
#include "motionspc/landmark.hpp"

#include <string>

namespace motionspc {

struct ChartSpec {
    std::string title;
    int width = 900;
    int height = 420;
    std::string x_label = "frame";
    std::string y_label = "T²";
    std::string marker_color = "#d62728";
    double marker_radius = 3.5;
    /// Written into the document's <desc> element when non-empty.
    std::string description;
};

/// SVG control chart: one polyline for the series, one horizontal UCL line
/// and one circle per value strictly above the UCL.
/// Throws Error(EmptySeries), Error(InvalidArgument) for bad dimensions.
std::string render_control_chart(const TsquaredSeries& series, double ucl, const ChartSpec& spec);

/// SVG with three panels (x-y, x-z, y-z projections). Each panel holds one
/// polyline per selected landmark; consecutive points that coincide at plot
/// resolution are merged. Throws Error(EmptyStream), Error(MissingLandmark).
std::string render_trajectory(const LandmarkStream& stream, const LandmarkSelection& selection,
                              const ChartSpec& spec);

/// Stroke colour for a landmark; fixed per index.
std::string landmark_color(LandmarkId id);

}  // namespace motionspc
