#include "rodessa/simulation.hpp"

#include "rodessa/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace rodessa {

namespace {

std::string num(double v) {
  if (std::abs(v) < 0.005) v = 0.0;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return {buf, res.ptr};
}

std::string tick(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 3);
  return {buf, res.ptr};
}

const char* method_color(Method m) {
  switch (m) {
    case Method::Cmssa: return "#1f78b4";
    case Method::Rlm: return "#33a02c";
    case Method::Cs: return "#ff7f00";
    case Method::Cheng: return "#6a3d9a";
    case Method::Rodessa: return "#e31a1c";
  }
  return "#000000";
}

}  // namespace

void write_study_table(std::ostream& out, const StudyReport& r, const Provenance& provenance) {
  for (const auto& [k, v] : provenance) out << "# " << k << "=" << v << "\n";
  out << "# replications=" << r.replications << "\n"
      << "# base_seed=" << r.base_seed << "\n"
      << "# rodessa_cell_tuning=" << format_double(r.rodessa_cell_tuning) << "\n"
      << "# rodessa_case_tuning=" << format_double(r.rodessa_case_tuning) << "\n"
      << "# cs_tuning=" << format_double(r.cs_tuning) << "\n";
  out << "scenario,mode,fraction,gamma,method,mean_re,mean_fe,replications,failures,nonconverged\n";
  for (const auto& c : r.cells) {
    out << c.scenario << "," << to_string(c.mode) << "," << format_double(c.fraction) << ","
        << format_double(c.gamma) << "," << to_string(c.method) << ","
        << (std::isnan(c.mean_re) ? "nan" : format_double(c.mean_re)) << ","
        << (std::isnan(c.mean_fe) ? "nan" : format_double(c.mean_fe)) << "," << c.replications
        << "," << c.failures << "," << c.nonconverged << "\n";
  }
}

std::string emit_study_svg(const StudyReport& r, int scenario, ContaminationMode mode,
                           double fraction) {
  std::vector<const StudyCell*> cells;
  for (const auto& c : r.cells)
    if (c.scenario == scenario && c.mode == mode && c.fraction == fraction) cells.push_back(&c);
  if (cells.empty()) throw Error(ErrorKind::Argument, "no study cells for the requested chart");

  std::vector<double> gammas;
  for (const auto* c : cells) gammas.push_back(c->gamma);
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
  const double g_lo = gammas.front(), g_hi = std::max(gammas.back(), g_lo + 1.0);

  const double W = 900, H = 380, panel_w = 360, panel_h = 260, top = 50, left0 = 70, gap = 90;
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(W)
    << "\" height=\"" << num(H) << "\" viewBox=\"0 0 " << num(W) << " " << num(H)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << num(W) << "\" height=\"" << num(H) << "\" fill=\"#ffffff\"/>\n"
    << "<text x=\"" << num(W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">Scenario "
    << scenario << ", " << to_string(mode) << ", eps=" << tick(fraction) << ", "
    << r.replications << " replications</text>\n";

  for (int panel = 0; panel < 2; ++panel) {
    const double x0 = left0 + panel * (panel_w + gap);
    auto value = [panel](const StudyCell& c) { return panel == 0 ? c.mean_re : c.mean_fe; };
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto* c : cells) {
      const double v = value(*c);
      if (std::isfinite(v) && v > 0.0) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!(lo <= hi)) {
      lo = 1.0;
      hi = 10.0;
    }
    double llo = std::floor(std::log10(lo)), lhi = std::ceil(std::log10(hi));
    if (lhi <= llo) lhi = llo + 1;
    auto xpos = [&](double g) { return x0 + panel_w * (g - g_lo) / (g_hi - g_lo); };
    auto ypos = [&](double v) { return top + panel_h * (lhi - std::log10(v)) / (lhi - llo); };

    s << "<g id=\"" << (panel == 0 ? "re" : "fe") << "\">\n"
      << "<rect x=\"" << num(x0) << "\" y=\"" << num(top) << "\" width=\"" << num(panel_w)
      << "\" height=\"" << num(panel_h) << "\" fill=\"none\" stroke=\"#333333\"/>\n"
      << "<text x=\"" << num(x0 + panel_w / 2) << "\" y=\"" << num(top - 8)
      << "\" text-anchor=\"middle\">" << (panel == 0 ? "mean RE" : "mean FE") << " (log scale)</text>\n"
      << "<text x=\"" << num(x0 + panel_w / 2) << "\" y=\"" << num(top + panel_h + 32)
      << "\" text-anchor=\"middle\">gamma</text>\n";
    for (double e = llo; e <= lhi; e += 1.0) {
      s << "<line x1=\"" << num(x0) << "\" y1=\"" << num(ypos(std::pow(10.0, e))) << "\" x2=\""
        << num(x0 + panel_w) << "\" y2=\"" << num(ypos(std::pow(10.0, e)))
        << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << num(x0 - 5) << "\" y=\"" << num(ypos(std::pow(10.0, e)) + 4)
        << "\" text-anchor=\"end\">" << tick(std::pow(10.0, e)) << "</text>\n";
    }
    for (double g : gammas) {
      s << "<text x=\"" << num(xpos(g)) << "\" y=\"" << num(top + panel_h + 15)
        << "\" text-anchor=\"middle\">" << tick(g) << "</text>\n";
    }
    for (Method m : r.grid.methods) {
      s << "<polyline fill=\"none\" stroke=\"" << method_color(m) << "\" stroke-width=\"1.6\" points=\"";
      bool firstpt = true;
      for (double g : gammas) {
        for (const auto* c : cells) {
          if (c->method != m || c->gamma != g) continue;
          const double v = value(*c);
          if (!(std::isfinite(v) && v > 0.0)) continue;
          s << (firstpt ? "" : " ") << num(xpos(g)) << "," << num(ypos(v));
          firstpt = false;
        }
      }
      s << "\"/>\n";
    }
    s << "</g>\n";
  }
  double lx = left0;
  for (Method m : r.grid.methods) {
    s << "<line x1=\"" << num(lx) << "\" y1=\"" << num(H - 22) << "\" x2=\"" << num(lx + 22)
      << "\" y2=\"" << num(H - 22) << "\" stroke=\"" << method_color(m) << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << num(lx + 27) << "\" y=\"" << num(H - 18) << "\">" << to_string(m) << "</text>\n";
    lx += 110;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace rodessa
