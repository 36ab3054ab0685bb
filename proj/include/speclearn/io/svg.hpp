#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "speclearn/geometry.hpp"

namespace speclearn {

/// Minimal SVG emitter for the chart and trace overlays; coordinates are in
/// user units with the origin at the top left.
class SvgWriter {
public:
    SvgWriter(double width, double height);

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0);
    void polyline(const std::vector<Vec2>& pts, const std::string& stroke, double stroke_width,
                  double opacity = 1.0);
    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke = "none");
    void rect(double cx, double cy, double w, double h, const std::string& fill,
              double angle_deg = 0.0);
    void text(double x, double y, const std::string& s, int size = 10,
              const std::string& anchor = "start");

    std::string str() const;
    void save(const std::filesystem::path& path) const;

private:
    double width_, height_;
    std::ostringstream body_;
};

}  // namespace speclearn
