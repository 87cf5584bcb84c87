#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace gvfmeta {

// Minimal deterministic SVG writer: fixed decimal formatting, no timestamps,
// attributes always emitted in the same order.
class SvgDoc {
 public:
  SvgDoc(double width, double height) : width_(width), height_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width_) << "\" height=\""
          << fmt(height_) << "\" viewBox=\"0 0 " << fmt(width_) << " " << fmt(height_) << "\">\n";
    body_ << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width_) << "\" height=\"" << fmt(height_)
          << "\" fill=\"white\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
          << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0) {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
          << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(stroke_width) << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                double stroke_width = 1.5) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(stroke_width) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ << " ";
      body_ << fmt(pts[i].first) << "," << fmt(pts[i].second);
    }
    body_ << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 12,
            const std::string& anchor = "start") {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\""
          << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\">" << escape(s)
          << "</text>\n";
  }

  std::string str() const { return body_.str() + "</svg>\n"; }

 private:
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
      }
    }
    return out;
  }

  double width_, height_;
  std::ostringstream body_;
};

}  // namespace gvfmeta
