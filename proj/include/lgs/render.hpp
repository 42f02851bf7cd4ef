#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "lgs/graph.hpp"
#include "lgs/optimizer.hpp"

namespace lgs {

struct Rgb {
    std::uint8_t r, g, b;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Piecewise-linear jet: blue(0) cyan(0.25) green(0.5) yellow(0.75) red(1). Input is clamped.
Rgb jet(double t);
std::string to_hex(Rgb c);

// Edge color for a drawn length measured in graph-distance units: 1 is green,
// shorter is redder, 2 and longer is blue.
Rgb edge_color(double scaled_length);

struct RenderOptions {
    double vertex_radius = 0.0;  // 0 picks a size relative to the layout extent
    double stroke_width = 0.0;
};

// Scales the layout by optimal_scale(d, x) and emits an SVG document.
std::string render_svg(const Graph& g, const DistanceMatrix& d, const Coordinates& x,
                       const RenderOptions& options = {});
std::string render_svg(const Graph& g, const Coordinates& x, const RenderOptions& options = {});
void render_svg(const Graph& g, const Coordinates& x, const std::filesystem::path& out,
                const RenderOptions& options = {});

}  // namespace lgs
