#include "mplan/app/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

namespace mplan::app {

namespace {

constexpr double kCanvasPx = 800.0;

std::string num(double v) {
  std::string s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string header(double width_px, double height_px, const std::string& view_box) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{}\" "
      "shape-rendering=\"crispEdges\">\n",
      num(width_px), num(height_px), view_box);
}

double cell_scale(GridSize dims) { return kCanvasPx / std::max(dims.width, dims.height); }

std::string grid_header(GridSize dims) {
  const double s = cell_scale(dims);
  return header(dims.width * s, dims.height * s, fmt::format("0 0 {} {}", dims.width, dims.height));
}

/// Row runs of a sorted cell set as one path.
std::string cells_path(const CellSet& cells, const std::string& attrs) {
  if (cells.empty()) return {};
  std::string d;
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i + 1;
    while (j < cells.size() && cells[j].y == cells[i].y && cells[j].x == cells[j - 1].x + 1) ++j;
    const std::size_t n = j - i;
    d += fmt::format("M{} {}h{}v1h-{}z", cells[i].x, cells[i].y, n, n);
    i = j;
  }
  return fmt::format("<path {} d=\"{}\"/>\n", attrs, d);
}

/// The image rounded to nine gray levels, one path per level.
std::string image_layer(const GrayImage& image) {
  std::array<CellSet, 9> bins;
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) bins[(image.at(x, y) + 16) / 32].push_back({x, y});
  std::string out = "<g id=\"image\">\n";
  for (std::size_t q = 0; q < bins.size(); ++q) {
    const int g = std::min(255, static_cast<int>(q) * 32);
    out += cells_path(bins[q], fmt::format("fill=\"rgb({},{},{})\"", g, g, g));
  }
  return out + "</g>\n";
}

CellSet candidate_cells(const MissionScene& scene, bool viable) {
  CellSet out;
  for (const Candidate& c : scene.candidates)
    if (c.viable == viable) out.push_back(c.cell);
  normalize(out);
  return out;
}

CellSet minus(const CellSet& a, const CellSet& b) {
  CellSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

CellSet occupied_cells(const OccupancyGrid& grid) {
  CellSet out;
  const GridSize dims = grid.size();
  for (int y = 0; y < dims.height; ++y)
    for (int x = 0; x < dims.width; ++x)
      if (grid.occupied({x, y})) out.push_back({x, y});
  return out;
}

std::string label_layers(const SceneLabels& labels) {
  return "<g id=\"labels\">\n" + cells_path(labels.obstacle_cells, "id=\"obstacles\" fill=\"#e02020\" fill-opacity=\"0.75\"") +
         cells_path(labels.pit_cells, "id=\"pit\" fill=\"#ff80c0\" fill-opacity=\"0.75\"") +
         cells_path(labels.rim_cells, "id=\"rim\" fill=\"#2060ff\"") + "</g>\n";
}

/// Rounds up to 1, 2 or 5 times a power of ten.
double nice_step(double raw) {
  if (!(raw > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

std::string tick_label(double v, double step) {
  const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
  return fmt::format("{:.{}f}", v, decimals);
}

}  // namespace

std::string detect_overlay_svg(const GrayImage& image, const SceneLabels* labels, const MissionScene* scene) {
  std::string out = grid_header(image.size());
  out += image_layer(image);
  if (labels) out += label_layers(*labels);
  if (scene) {
    out += "<g id=\"candidates\">\n";
    out += cells_path(candidate_cells(*scene, false), "fill=\"#ffd400\" fill-opacity=\"0.35\"");
    out += cells_path(candidate_cells(*scene, true), "fill=\"#ffd400\"");
    out += "</g>\n";
  }
  return out + "</svg>\n";
}

std::string plan_overlay_svg(const PreparedScene& scene, const PlanRecord& plan) {
  const MissionScene& m = scene.mission;
  const GridSize dims = m.size();
  const double mpc = m.meters_per_cell;
  const double unit = std::max(dims.width, dims.height) / 400.0;

  std::string out = grid_header(dims);
  out += image_layer(scene.image);
  out += "<g id=\"hazards\">\n";
  out += cells_path(minus(occupied_cells(m.rover_cspace), scene.labels.pit_cells),
                    "fill=\"#e02020\" fill-opacity=\"0.75\"");
  out += cells_path(scene.labels.pit_cells, "fill=\"#ff80c0\" fill-opacity=\"0.75\"");
  out += cells_path(m.goals, "fill=\"#2060ff\"");
  out += "</g>\n";

  const double cx = m.pit_center.x + 0.5;
  const double cy = m.pit_center.y + 0.5;
  out += "<g id=\"annulus\" fill=\"none\" stroke=\"#ffd400\" stroke-dasharray=\"" + num(4 * unit) + "\" stroke-width=\"" +
         num(unit) + "\">\n";
  for (const double r : {m.annulus_inner_m, m.annulus_outer_m})
    out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n", num(cx), num(cy), num(r / mpc));
  out += "</g>\n";

  double lander_r = 0.5;
  if (plan.config.contains("mission")) lander_r = plan.config["mission"].value("lander_diameter_m", 1.0) / (2.0 * mpc);
  out += fmt::format(
      "<circle id=\"landing-zone\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#ffd400\" fill-opacity=\"0.5\" stroke=\"#ffd400\" "
      "stroke-width=\"{}\"/>\n",
      num(plan.start.x + 0.5), num(plan.start.y + 0.5), num(std::max(lander_r, 0.5)), num(unit));

  std::string pts;
  for (const Cell c : plan.path.waypoints) {
    if (!pts.empty()) pts += ' ';
    pts += num(c.x + 0.5) + ',' + num(c.y + 0.5);
  }
  out += fmt::format(
      "<polyline id=\"path\" fill=\"none\" stroke=\"#20d020\" stroke-width=\"{}\" stroke-linejoin=\"round\" "
      "points=\"{}\"/>\n",
      num(2 * unit), pts);

  const double gx = plan.goal.x + 0.5;
  const double gy = plan.goal.y + 0.5;
  const double k = 6 * unit;
  out += fmt::format(
      "<polygon id=\"goal\" fill=\"#2060ff\" stroke=\"#ffffff\" stroke-width=\"{}\" points=\"{},{} {},{} {},{} {},{}\"/>\n",
      num(unit / 2), num(gx), num(gy - k), num(gx + k), num(gy), num(gx), num(gy + k), num(gx - k), num(gy));
  return out + "</svg>\n";
}

std::string trace_svg(const PlanRecord& plan) {
  constexpr double kW = 720, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;

  double e_max = plan.initial_energy_m;
  for (const TraceRecord& r : plan.trace) {
    e_max = std::max(e_max, r.current_energy);
    if (std::isfinite(r.proposed_energy)) e_max = std::max(e_max, r.proposed_energy);
  }
  const double y_step = nice_step(std::max(e_max, 1.0) / 5.0);
  const double y_max = y_step * std::max(1.0, std::ceil(e_max / y_step));
  const int n_iter = std::max(1, plan.iterations_run);
  const double x_step = nice_step(n_iter / 10.0);
  const double x_max = x_step * std::ceil(n_iter / x_step);

  auto px = [&](double i) { return kLeft + plot_w * i / x_max; };
  auto py = [&](double e) { return kTop + plot_h * (1.0 - e / y_max); };

  std::string out = header(kW, kH, fmt::format("0 0 {} {}", kW, kH));
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", num(kW), num(kH));
  out += "<g id=\"grid\" stroke=\"#dddddd\" stroke-width=\"1.000000\">\n";
  for (double e = 0; e <= y_max + 1e-9; e += y_step)
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", num(kLeft), num(py(e)), num(kLeft + plot_w),
                       num(py(e)));
  out += "</g>\n";

  out += "<g id=\"axes\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">\n";
  out += fmt::format(
      "<path fill=\"none\" stroke=\"#000000\" stroke-width=\"1.000000\" d=\"M{} {}V{}H{}\"/>\n", num(kLeft), num(kTop),
      num(kTop + plot_h), num(kLeft + plot_w));
  for (double e = 0; e <= y_max + 1e-9; e += y_step)
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(kLeft - 6), num(py(e) + 4),
                       tick_label(e, y_step));
  for (double i = 0; i <= x_max + 1e-9; i += x_step)
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(px(i)),
                       num(kTop + plot_h + 18), tick_label(i, x_step));
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">iteration</text>\n", num(kLeft + plot_w / 2),
                     num(kH - 10));
  out += fmt::format("<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">energy (m)</text>\n",
                     num(kTop + plot_h / 2), num(kTop + plot_h / 2));
  out += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">seed {}</text>\n",
                     num(kLeft + plot_w / 2), plan.seed);
  out += "</g>\n";

  out += "<g id=\"proposals\">\n";
  for (const TraceRecord& r : plan.trace) {
    if (!std::isfinite(r.proposed_energy)) continue;
    const char* fill = r.accepted ? (r.uphill ? "#ff8000" : "#20a020") : "#999999";
    out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.500000\" fill=\"{}\"/>\n", num(px(r.iteration)),
                       num(py(std::min(r.proposed_energy, y_max))), fill);
  }
  out += "</g>\n";

  std::string current = num(px(0)) + ',' + num(py(plan.initial_energy_m));
  std::string best = current;
  for (const TraceRecord& r : plan.trace) {
    current += ' ' + num(px(r.iteration)) + ',' + num(py(r.current_energy));
    best += ' ' + num(px(r.iteration)) + ',' + num(py(r.best_energy));
  }
  out += fmt::format("<polyline id=\"current\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.500000\" points=\"{}\"/>\n",
                     current);
  out += fmt::format(
      "<polyline id=\"best\" fill=\"none\" stroke=\"#d02020\" stroke-width=\"2.000000\" stroke-dasharray=\"6 4\" "
      "points=\"{}\"/>\n",
      best);

  const double lx = kLeft + plot_w - 170;
  out += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\" stroke-width=\"1.500000\"/>\n",
                     num(lx), num(kTop + 12), num(lx + 24), num(kTop + 12));
  out += fmt::format("<text x=\"{}\" y=\"{}\">current</text>\n", num(lx + 30), num(kTop + 16));
  out += fmt::format(
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#d02020\" stroke-width=\"2.000000\" "
      "stroke-dasharray=\"6 4\"/>\n",
      num(lx), num(kTop + 30), num(lx + 24), num(kTop + 30));
  out += fmt::format("<text x=\"{}\" y=\"{}\">best so far</text>\n", num(lx + 30), num(kTop + 34));
  out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.500000\" fill=\"#ff8000\"/>\n", num(lx + 12), num(kTop + 48));
  out += fmt::format("<text x=\"{}\" y=\"{}\">accepted uphill</text>\n", num(lx + 30), num(kTop + 52));
  out += "</g>\n";
  return out + "</svg>\n";
}

}  // namespace mplan::app
