#include "plot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace lrp {

RecallCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open curve file: " + path.string());

  RecallCurve curve;
  curve.name = path.stem().string();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("threshold", 0) == 0) continue;  // header
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw_format(path.string() + ":" + std::to_string(line_no) +
                   ": expected `threshold,recall`");
    }
    try {
      const double t = std::stod(line.substr(0, comma));
      const double r = std::stod(line.substr(comma + 1));
      curve.points.emplace_back(t, r);
    } catch (const std::exception&) {
      throw_format(path.string() + ":" + std::to_string(line_no) +
                   ": non-numeric curve values");
    }
  }
  if (curve.points.empty()) {
    throw_format(path.string() + ": curve file has no data rows");
  }
  return curve;
}

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 150;  // legend area
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 50;
constexpr double kXMin = 0.3, kXMax = 0.9;
constexpr double kYMin = 0.0, kYMax = 1.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

double map_x(double t) {
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  return kMarginLeft + (t - kXMin) / (kXMax - kXMin) * plot_w;
}

double map_y(double r) {
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  return kMarginTop + (kYMax - r) / (kYMax - kYMin) * plot_h;
}

}  // namespace

std::string render_recall_svg(const std::vector<RecallCurve>& curves) {
  if (curves.empty()) throw_argument("render_recall_svg: no curves");

  std::ostringstream svg;
  char buf[256];
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";

  // Axes box and grid ticks.
  std::snprintf(buf, sizeof(buf),
                "  <rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                "fill=\"none\" stroke=\"black\"/>\n",
                map_x(kXMin), map_y(kYMax), map_x(kXMax) - map_x(kXMin),
                map_y(kYMin) - map_y(kYMax));
  svg << buf;
  for (int i = 0; i <= 6; ++i) {
    const double t = kXMin + 0.1 * i;
    std::snprintf(buf, sizeof(buf),
                  "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#cccccc\"/>\n"
                  "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                  "text-anchor=\"middle\">%.1f</text>\n",
                  map_x(t), map_y(kYMin), map_x(t), map_y(kYMax), map_x(t),
                  map_y(kYMin) + 18.0, t);
    svg << buf;
  }
  for (int i = 0; i <= 10; i += 2) {
    const double r = 0.1 * i;
    std::snprintf(buf, sizeof(buf),
                  "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#cccccc\"/>\n"
                  "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                  "text-anchor=\"end\">%.1f</text>\n",
                  map_x(kXMin), map_y(r), map_x(kXMax), map_y(r),
                  map_x(kXMin) - 6.0, map_y(r) + 4.0, r);
    svg << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"14\" "
                "text-anchor=\"middle\">IoU threshold</text>\n",
                0.5 * (map_x(kXMin) + map_x(kXMax)),
                static_cast<double>(kHeight - 10));
  svg << buf;
  std::snprintf(buf, sizeof(buf),
                "  <text x=\"16\" y=\"%.1f\" font-size=\"14\" "
                "text-anchor=\"middle\" transform=\"rotate(-90 16 %.1f)\">"
                "recall</text>\n",
                0.5 * (map_y(kYMin) + map_y(kYMax)),
                0.5 * (map_y(kYMin) + map_y(kYMax)));
  svg << buf;

  for (size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "  <polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& [t, r] : curves[c].points) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", map_x(t), map_y(r));
      svg << buf;
    }
    svg << "\"/>\n";

    const double ly = kMarginTop + 16.0 + 18.0 * static_cast<double>(c);
    std::snprintf(buf, sizeof(buf),
                  "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"%s\" stroke-width=\"2\"/>\n"
                  "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                  "class=\"legend\">%s</text>\n",
                  static_cast<double>(kWidth - kMarginRight + 10), ly,
                  static_cast<double>(kWidth - kMarginRight + 34), ly, color,
                  static_cast<double>(kWidth - kMarginRight + 40), ly + 4.0,
                  curves[c].name.c_str());
    svg << buf;
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_recall_svg(const std::vector<RecallCurve>& curves,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_io("cannot open output file: " + path.string());
  out << render_recall_svg(curves);
  if (!out) throw_io("write failed on " + path.string());
}

}  // namespace lrp
