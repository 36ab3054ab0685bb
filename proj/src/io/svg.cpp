#include "speclearn/io/svg.hpp"

#include <cstdio>
#include <fstream>

#include "speclearn/errors.hpp"

namespace speclearn {

namespace {
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}
}  // namespace

SvgWriter::SvgWriter(double width, double height) : width_(width), height_(height) {}

void SvgWriter::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double stroke_width) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
          << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << num(stroke_width) << "\"/>\n";
}

void SvgWriter::polyline(const std::vector<Vec2>& pts, const std::string& stroke,
                         double stroke_width, double opacity) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
          << num(stroke_width) << "\" stroke-opacity=\"" << num(opacity) << "\" points=\"";
    for (const auto& p : pts) body_ << num(p.x) << "," << num(p.y) << " ";
    body_ << "\"/>\n";
}

void SvgWriter::circle(double cx, double cy, double r, const std::string& fill,
                       const std::string& stroke) {
    body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
          << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
}

void SvgWriter::rect(double cx, double cy, double w, double h, const std::string& fill,
                     double angle_deg) {
    body_ << "<rect x=\"" << num(cx - w / 2) << "\" y=\"" << num(cy - h / 2) << "\" width=\""
          << num(w) << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"";
    if (angle_deg != 0.0)
        body_ << " transform=\"rotate(" << num(angle_deg) << " " << num(cx) << " " << num(cy)
              << ")\"";
    body_ << "/>\n";
}

void SvgWriter::text(double x, double y, const std::string& s, int size,
                     const std::string& anchor) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
          << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
}

std::string SvgWriter::str() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\""
       << num(height_) << "\" viewBox=\"0 0 " << num(width_) << " " << num(height_) << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
}

void SvgWriter::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << str();
    if (!os.good()) throw IoError("write failed for " + path.string());
}

}  // namespace speclearn
