#include "rodessa/detect.hpp"

#include "rodessa/error.hpp"
#include "rodessa/plot_style.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace rodessa {

namespace {

std::string num(double v) {
  if (std::abs(v) < 0.005) v = 0.0;  // no "-0.00"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return {buf, res.ptr};
}

std::string label(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return {buf, res.ptr};
}

std::string color(const style::Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

Range value_range(const SeriesPanel& p) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Vector* v : {&p.raw, &p.reconstructed, &p.forecasts}) {
    if (v->size() == 0) continue;
    lo = std::min(lo, v->minCoeff());
    hi = std::max(hi, v->maxCoeff());
  }
  if (!(lo <= hi)) return {};
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string emit_svg(const PlotModel& model, const SvgGeometry& g) {
  if (!(g.width > 0.0 && g.panel_height > 0.0 && g.strip_height > 0.0) || g.margin < 0.0 ||
      g.gap < 0.0 || g.width <= 2.0 * g.margin) {
    throw Error(ErrorKind::Argument, "plot geometry must have positive size");
  }
  const std::size_t N = model.length();
  const std::size_t h = model.horizon();
  const std::size_t P = model.panels.size();
  const double left = g.margin, right = g.width - g.margin * 0.5;
  const double top = g.margin * 0.5;
  const double strip_top = top, strip_bottom = top + g.strip_height;
  const double panels_top = strip_bottom + g.gap;
  const double height = panels_top + static_cast<double>(P) * (g.panel_height + g.gap) + g.margin * 0.5;
  const double bottom = panels_top + static_cast<double>(P) * (g.panel_height + g.gap) - g.gap;

  const std::size_t span = std::max<std::size_t>(N + h, 2) - 1;
  auto xpos = [&](std::size_t t) {  // t is 0-based
    return left + (right - left) * static_cast<double>(t) / static_cast<double>(span);
  };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(g.width)
    << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(g.width) << " " << num(height)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << num(g.width) << "\" height=\"" << num(height)
    << "\" fill=\"#ffffff\"/>\n";

  // case-weight strip
  s << "<g id=\"cases\">\n"
    << "<rect x=\"" << num(left) << "\" y=\"" << num(strip_top) << "\" width=\"" << num(right - left)
    << "\" height=\"" << num(g.strip_height) << "\" fill=\"none\" stroke=\"" << style::kAxis
    << "\"/>\n"
    << "<text x=\"" << num(left - 6) << "\" y=\"" << num(strip_top + g.strip_height / 2 + 4)
    << "\" text-anchor=\"end\">case</text>\n";
  for (std::size_t i = 0; i < N; ++i) {
    const bool flagged = i < model.case_flags.size() && model.case_flags[i];
    if (flagged) {
      s << "<line x1=\"" << num(xpos(i)) << "\" y1=\"" << num(strip_bottom) << "\" x2=\""
        << num(xpos(i)) << "\" y2=\"" << num(bottom) << "\" stroke=\"" << style::kCaseLine
        << "\" stroke-dasharray=\"4 3\"/>\n";
    }
    const std::string fill =
        flagged ? "#000000" : color(style::ramp(style::kCase, model.case_weights(static_cast<Eigen::Index>(i))));
    s << "<circle cx=\"" << num(xpos(i)) << "\" cy=\"" << num(strip_top + g.strip_height / 2)
      << "\" r=\"" << num(style::kCaseRadius) << "\" fill=\"" << fill << "\" stroke=\""
      << style::kAxis << "\" stroke-width=\"0.6\"/>\n";
  }
  s << "</g>\n";

  for (std::size_t k = 0; k < P; ++k) {
    const SeriesPanel& p = model.panels[k];
    const double y0 = panels_top + static_cast<double>(k) * (g.panel_height + g.gap);
    const Range r = value_range(p);
    auto ypos = [&](double v) { return y0 + g.panel_height * (r.hi - v) / (r.hi - r.lo); };

    s << "<g id=\"series-" << (k + 1) << "\">\n"
      << "<rect x=\"" << num(left) << "\" y=\"" << num(y0) << "\" width=\"" << num(right - left)
      << "\" height=\"" << num(g.panel_height) << "\" fill=\"none\" stroke=\"" << style::kAxis
      << "\"/>\n"
      << "<text x=\"" << num(left + 4) << "\" y=\"" << num(y0 + 13) << "\">" << escape(p.name)
      << "</text>\n"
      << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y0 + 10) << "\" text-anchor=\"end\">"
      << label(r.hi) << "</text>\n"
      << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y0 + g.panel_height) << "\" text-anchor=\"end\">"
      << label(r.lo) << "</text>\n";

    if (p.reconstructed.size() > 0) {
      s << "<polyline fill=\"none\" stroke=\"" << style::kReconstruction << "\" stroke-width=\"1.4\" points=\"";
      for (Eigen::Index i = 0; i < p.reconstructed.size(); ++i) {
        s << (i ? " " : "") << num(xpos(static_cast<std::size_t>(i))) << "," << num(ypos(p.reconstructed(i)));
      }
      s << "\"/>\n";
    }
    if (p.forecasts.size() > 0) {
      s << "<polyline fill=\"none\" stroke=\"" << style::kForecast << "\" stroke-width=\"1.4\" points=\"";
      if (N > 0) s << num(xpos(N - 1)) << "," << num(ypos(p.reconstructed(static_cast<Eigen::Index>(N) - 1))) << " ";
      for (Eigen::Index i = 0; i < p.forecasts.size(); ++i) {
        s << (i ? " " : "") << num(xpos(N + static_cast<std::size_t>(i))) << "," << num(ypos(p.forecasts(i)));
      }
      s << "\"/>\n";
      for (Eigen::Index i = 0; i < p.forecasts.size(); ++i) {
        const double cx = xpos(N + static_cast<std::size_t>(i)), cy = ypos(p.forecasts(i));
        s << "<polygon points=\"" << num(cx) << "," << num(cy - 4) << " " << num(cx - 3.5) << ","
          << num(cy + 3) << " " << num(cx + 3.5) << "," << num(cy + 3) << "\" fill=\""
          << style::kForecast << "\"/>\n";
      }
    }
    for (Eigen::Index i = 0; i < p.raw.size(); ++i) {
      const double cx = xpos(static_cast<std::size_t>(i)), cy = ypos(p.raw(i));
      const bool negative = p.residuals(i) < 0.0;
      const auto& target = negative ? style::kNegative : style::kPositive;
      const int flag = p.flags[static_cast<std::size_t>(i)];
      if (flag != 0) {
        const double half = style::kFlagSize / 2;
        s << "<rect x=\"" << num(cx - half) << "\" y=\"" << num(cy - half) << "\" width=\""
          << num(style::kFlagSize) << "\" height=\"" << num(style::kFlagSize) << "\" fill=\""
          << color(flag < 0 ? style::kNegative : style::kPositive) << "\"/>\n";
      } else {
        s << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\""
          << num(style::kCellRadius) << "\" fill=\"" << color(style::ramp(target, p.weights(i)))
          << "\" stroke=\"" << style::kRaw << "\" stroke-width=\"0.6\"/>\n";
      }
    }
    s << "</g>\n";
  }

  // time axis under the last panel (or under the strip if there are none)
  const double axis_y = P > 0 ? bottom : strip_bottom;
  s << "<g id=\"time-axis\">\n";
  if (N + h > 0) {
    const std::size_t last = N + h - 1;
    const std::size_t step = std::max<std::size_t>(1, (last + 1) / 8);
    for (std::size_t t = 0; t <= last; t += step) {
      std::string text = t < model.timestamps.size() ? model.timestamps[t] : std::to_string(t + 1);
      s << "<text x=\"" << num(xpos(t)) << "\" y=\"" << num(axis_y + 13)
        << "\" text-anchor=\"middle\">" << escape(text) << "</text>\n";
    }
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace rodessa
