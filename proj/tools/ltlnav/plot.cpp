#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "commands.hpp"
#include "ltlnav/vec.hpp"
#include "ltlnav/world.hpp"

namespace ltlnav::cli {
namespace {

struct P2 {
  double u = 0.0;
  double v = 0.0;
};

// Orthonormal projections, so spheres render as circles of their true radius.
P2 project(const std::string& mode, const Vec3& p) {
  if (mode == "xz") return {p.x, p.z};
  if (mode == "iso")  // view down the (1,1,1) diagonal
    return {(p.x - p.y) / std::sqrt(2.0),
            (p.x + p.y - 2.0 * p.z) / std::sqrt(6.0)};
  return {p.x, p.y};
}

struct Track {
  std::string agent;
  std::vector<Vec3> points;
};

double cell_to_double(const std::string& cell) {
  if (cell.empty()) return 0.0;
  std::size_t used = 0;
  double v = std::stod(cell, &used);
  if (used != cell.size()) throw std::runtime_error("bad number '" + cell + "'");
  return v;
}

std::vector<Track> read_tracks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,agent,", 0) != 0)
    throw std::runtime_error("'" + path + "' is not a trajectory CSV");

  std::vector<Track> tracks;
  std::map<std::string, std::size_t> index;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream cs(line);
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    if (cells.size() < 5)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": short row");
    auto [it, fresh] = index.try_emplace(cells[1], tracks.size());
    if (fresh) tracks.push_back({cells[1], {}});
    tracks[it->second].points.push_back({cell_to_double(cells[2]),
                                         cell_to_double(cells[3]),
                                         cell_to_double(cells[4])});
  }
  return tracks;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr int kPaletteSize = 8;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

int cmd_plot(const PlotOptions& o) {
  auto tracks = read_tracks(o.traj_path);

  std::optional<world::Scenario> scenario;
  if (!o.config_path.empty()) scenario = world::load_scenario(o.config_path);

  // Gather projected geometry and its bounding box.
  double lo_u = 0, hi_u = 0, lo_v = 0, hi_v = 0;
  bool any = false;
  auto grow = [&](P2 p, double r) {
    if (!any) {
      lo_u = p.u - r, hi_u = p.u + r, lo_v = p.v - r, hi_v = p.v + r;
      any = true;
      return;
    }
    lo_u = std::min(lo_u, p.u - r);
    hi_u = std::max(hi_u, p.u + r);
    lo_v = std::min(lo_v, p.v - r);
    hi_v = std::max(hi_v, p.v + r);
  };
  if (scenario && !o.no_workspace)
    grow(project(o.projection, scenario->workspace.center),
         scenario->workspace.radius);
  if (scenario && !o.no_regions)
    for (const auto& r : scenario->regions)
      grow(project(o.projection, r.center), r.radius);
  for (const auto& t : tracks)
    for (const auto& p : t.points) grow(project(o.projection, p), 0.0);
  if (!any) grow({0, 0}, 1.0);

  const double side = 840.0, pad = 40.0;
  double span = std::max({hi_u - lo_u, hi_v - lo_v, 1e-9});
  double scale = (side - 2 * pad) / span;
  double cu = 0.5 * (lo_u + hi_u), cv = 0.5 * (lo_v + hi_v);
  auto sx = [&](double u) { return side / 2 + (u - cu) * scale; };
  auto sy = [&](double v) { return side / 2 - (v - cv) * scale; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << side
      << " " << side << "\">\n";
  svg << "<rect class=\"bg\" width=\"" << side << "\" height=\"" << side
      << "\" fill=\"#ffffff\"/>\n";

  if (scenario && !o.no_workspace) {
    auto c = project(o.projection, scenario->workspace.center);
    svg << "<circle class=\"workspace\" cx=\"" << num(sx(c.u)) << "\" cy=\""
        << num(sy(c.v)) << "\" r=\"" << num(scenario->workspace.radius * scale)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1.5\""
           " stroke-dasharray=\"7 5\"/>\n";
  }
  if (scenario && !o.no_regions) {
    for (const auto& r : scenario->regions) {
      auto c = project(o.projection, r.center);
      svg << "<circle class=\"region\" cx=\"" << num(sx(c.u)) << "\" cy=\""
          << num(sy(c.v)) << "\" r=\"" << num(r.radius * scale)
          << "\" fill=\"#dbe9f6\" fill-opacity=\"0.65\""
             " stroke=\"#4a78a8\" stroke-width=\"1.2\"/>\n";
      svg << "<text class=\"region-label\" x=\"" << num(sx(c.u)) << "\" y=\""
          << num(sy(c.v)) << "\" dy=\"4\" text-anchor=\"middle\""
             " font-family=\"sans-serif\" font-size=\"13\""
             " fill=\"#2a4b6e\">"
          << r.name << "</text>\n";
    }
  }

  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    svg << "<polyline class=\"traj\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t k = 0; k < tracks[i].points.size(); ++k) {
      auto p = project(o.projection, tracks[i].points[k]);
      if (k) svg << ' ';
      svg << num(sx(p.u)) << ',' << num(sy(p.v));
    }
    svg << "\"/>\n";
    if (!tracks[i].points.empty()) {
      auto p0 = project(o.projection, tracks[i].points.front());
      svg << "<circle class=\"start\" cx=\"" << num(sx(p0.u)) << "\" cy=\""
          << num(sy(p0.v)) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
    }
    svg << "<text class=\"legend\" x=\"" << num(pad / 2) << "\" y=\""
        << num(pad / 2 + 16.0 * static_cast<double>(i)) << "\""
           " font-family=\"sans-serif\" font-size=\"13\" fill=\""
        << color << "\">" << tracks[i].agent << "</text>\n";
  }
  svg << "</svg>\n";

  std::string out = o.out_path;
  if (out.empty()) {
    auto dot = o.traj_path.find_last_of('.');
    out = (dot == std::string::npos ? o.traj_path : o.traj_path.substr(0, dot)) +
          ".svg";
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + out + "'");
  f << svg.str();
  std::cerr << "wrote " << out << " (" << tracks.size() << " track(s))\n";
  return kExitOk;
}

}  // namespace ltlnav::cli
