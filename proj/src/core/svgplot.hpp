#pragma once

#include <string>

#include "core/common.hpp"

namespace bdbm {

// Standalone scatter plot: fixed 640x640 canvas, axes auto-scaled to the data
// bounds with a 5% margin, one <circle> per point.  Output bytes depend only
// on the input points.
std::string render_scatter_svg(const std::vector<vec>& points);

void write_scatter_svg(const std::string& path, const std::vector<vec>& points);

}  // namespace bdbm
