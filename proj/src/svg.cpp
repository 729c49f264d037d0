#include "hyperorbit/verification.hpp"

#include <cstdio>
#include <sstream>

namespace hyperorbit {

namespace {

std::string fixed(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", x);
  return buffer;
}

}  // namespace

std::string svg_scatter(const std::vector<std::vector<Real>>& points,
                        const std::vector<Interval>& box, const SvgOptions& options) {
  if (box.empty() || box.size() > 2) {
    throw Error(ErrorCode::InvalidArgument, "scatter plots need one or two axes");
  }
  const double w = options.width - 2.0 * options.margin;
  const double h = options.height - 2.0 * options.margin;
  auto map = [&](const Real& x, const Interval& axis) {
    return static_cast<double>((x - axis.lo) / (axis.hi - axis.lo));
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height << "\">\n";
  out << "<rect x=\"" << options.margin << "\" y=\"" << options.margin << "\" width=\"" << fixed(w)
      << "\" height=\"" << fixed(h) << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "<text x=\"" << options.margin << "\" y=\"" << options.margin - 8 << "\" font-size=\"11\">["
      << format_real(box[0].lo, 6) << ", " << format_real(box[0].hi, 6) << "]";
  if (box.size() == 2) out << " x [" << format_real(box[1].lo, 6) << ", " << format_real(box[1].hi, 6) << "]";
  out << "</text>\n<g fill=\"#1f4e8c\">\n";
  for (const auto& p : points) {
    if (p.size() < box.size()) continue;
    bool inside = true;
    for (std::size_t i = 0; i < box.size(); ++i) inside = inside && p[i] >= box[i].lo && p[i] <= box[i].hi;
    if (!inside) continue;
    const double u = options.margin + w * map(p[0], box[0]);
    const double v = box.size() == 2 ? options.margin + h * (1.0 - map(p[1], box[1]))
                                     : options.margin + h / 2;
    out << "<circle cx=\"" << fixed(u) << "\" cy=\"" << fixed(v) << "\" r=\"" << fixed(options.radius)
        << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace hyperorbit
