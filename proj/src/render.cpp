#include "lgs/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lgs/metrics.hpp"

namespace lgs {

Rgb jet(double t) {
    t = std::clamp(std::isnan(t) ? 0.0 : t, 0.0, 1.0);
    static constexpr std::array<std::array<double, 3>, 5> anchors{{
        {0, 0, 255},    // blue
        {0, 255, 255},  // cyan
        {0, 255, 0},    // green
        {255, 255, 0},  // yellow
        {255, 0, 0},    // red
    }};
    const double pos = t * 4.0;
    const auto lo = std::min<std::size_t>(static_cast<std::size_t>(pos), 3);
    const double f = pos - static_cast<double>(lo);
    auto channel = [&](std::size_t c) {
        return static_cast<std::uint8_t>(std::lround(anchors[lo][c] + f * (anchors[lo + 1][c] - anchors[lo][c])));
    };
    return {channel(0), channel(1), channel(2)};
}

std::string to_hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

Rgb edge_color(double scaled_length) { return jet(std::clamp((2.0 - scaled_length) / 2.0, 0.0, 1.0)); }

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    if (s == "-0.0000")
        s = "0.0000";
    return s;
}

}  // namespace

std::string render_svg(const Graph& g, const DistanceMatrix& d, const Coordinates& x, const RenderOptions& options) {
    if (static_cast<std::size_t>(x.rows()) != g.vertex_count())
        throw std::invalid_argument("embedding and graph disagree on vertex count");
    const Coordinates scaled = optimal_scale(d, x) * x;

    Eigen::Vector2d lo = scaled.colwise().minCoeff().transpose();
    Eigen::Vector2d hi = scaled.colwise().maxCoeff().transpose();
    const double extent = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-9});
    const double margin = 0.05 * extent;
    const double radius = options.vertex_radius > 0.0 ? options.vertex_radius : extent * 0.004;
    const double stroke = options.stroke_width > 0.0 ? options.stroke_width : extent * 0.0015;

    std::ostringstream out;
    const double width = hi.x() - lo.x() + 2 * margin, height = hi.y() - lo.y() + 2 * margin;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(lo.x() - margin) << ' '
        << fmt(lo.y() - margin) << ' ' << fmt(width) << ' ' << fmt(height) << "\">\n";
    out << "<g stroke-width=\"" << fmt(stroke) << "\" stroke-linecap=\"round\">\n";
    for (const auto& e : g.edges()) {
        const auto a = scaled.row(e.u), b = scaled.row(e.v);
        const double length = (a - b).norm() / e.w;  // weighted edges compare against their own length
        out << "<line x1=\"" << fmt(a(0)) << "\" y1=\"" << fmt(a(1)) << "\" x2=\"" << fmt(b(0)) << "\" y2=\""
            << fmt(b(1)) << "\" stroke=\"" << to_hex(edge_color(length)) << "\"/>\n";
    }
    out << "</g>\n<g fill=\"#333333\">\n";
    for (Eigen::Index v = 0; v < scaled.rows(); ++v)
        out << "<circle cx=\"" << fmt(scaled(v, 0)) << "\" cy=\"" << fmt(scaled(v, 1)) << "\" r=\"" << fmt(radius)
            << "\"/>\n";
    out << "</g>\n</svg>\n";
    return out.str();
}

std::string render_svg(const Graph& g, const Coordinates& x, const RenderOptions& options) {
    return render_svg(g, apsp(g), x, options);
}

void render_svg(const Graph& g, const Coordinates& x, const std::filesystem::path& path,
                const RenderOptions& options) {
    const auto svg = render_svg(g, x, options);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << svg;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

}  // namespace lgs
