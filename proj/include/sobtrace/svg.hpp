#pragma once

#include <string>

#include "sobtrace/domains.hpp"
#include "sobtrace/isoperimetry.hpp"

namespace sobtrace {

struct SvgOptions {
    int width_px = 640;
    int margin_px = 24;
    std::string caption;  // empty: a descriptive caption for the domain tag
};

std::string default_caption(const Domain& dom);

// Boundary line art (segments, arcs, isolated points); 1-D and 3-D domains draw their bounding box.
std::string render_domain_svg(const Domain& dom, const SvgOptions& opts = {});

// Inside cells of a 2-D grid, optionally with a witness set drawn on top.
std::string render_grid_svg(const GridDomain& gd, const GridSet* overlay = nullptr, const SvgOptions& opts = {});

}  // namespace sobtrace
