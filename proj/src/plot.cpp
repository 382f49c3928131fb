#include "peec/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace peec {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

constexpr double kSize = 560.0;
constexpr double kMargin = 28.0;

struct MapScale {
  double w, h;
  double sx(double x) const { return kMargin + x / w * (kSize - 2 * kMargin); }
  double sy(double y) const { return kSize - kMargin - y / h * (kSize - 2 * kMargin); }
};

void polyline(std::ostringstream& os, const std::vector<std::pair<double, double>>& pts,
              const char* color) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) os << " ";
    os << px(pts[i].first) << "," << px(pts[i].second);
  }
  os << "\"/>\n";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("plot: cannot open " + path + " for writing");
  f << text;
}

bool defined(double v) { return !std::isnan(v); }

}  // namespace

std::string trajectory_svg(const EpisodeTrace& trace) {
  MapScale m{trace.config.map_w, trace.config.map_h};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)kSize << "\" height=\""
     << (int)kSize << "\" viewBox=\"0 0 " << (int)kSize << " " << (int)kSize << "\">\n";
  os << "<rect x=\"" << px(kMargin) << "\" y=\"" << px(kMargin) << "\" width=\""
     << px(kSize - 2 * kMargin) << "\" height=\"" << px(kSize - 2 * kMargin)
     << "\" fill=\"#fbfbfb\" stroke=\"#444444\"/>\n";

  std::vector<std::pair<double, double>> p_pts, e_pts;
  for (const StepRecord& s : trace.steps) {
    p_pts.emplace_back(m.sx(s.px), m.sy(s.py));
    e_pts.emplace_back(m.sx(s.ex), m.sy(s.ey));
  }
  polyline(os, e_pts, "#d62728");
  polyline(os, p_pts, "#1f77b4");

  for (const StepRecord& s : trace.steps) {
    if (s.q == 1) {
      os << "<circle class=\"query\" cx=\"" << px(m.sx(s.px)) << "\" cy=\"" << px(m.sy(s.py))
         << "\" r=\"4\" fill=\"#ffbf00\" stroke=\"#1f77b4\"/>\n";
    }
  }
  if (!trace.steps.empty()) {
    const StepRecord& a = trace.steps.front();
    const StepRecord& z = trace.steps.back();
    os << "<rect x=\"" << px(m.sx(a.px) - 3) << "\" y=\"" << px(m.sy(a.py) - 3)
       << "\" width=\"6\" height=\"6\" fill=\"#1f77b4\"/>\n";
    os << "<rect x=\"" << px(m.sx(a.ex) - 3) << "\" y=\"" << px(m.sy(a.ey) - 3)
       << "\" width=\"6\" height=\"6\" fill=\"#d62728\"/>\n";
    os << "<circle cx=\"" << px(m.sx(z.px)) << "\" cy=\"" << px(m.sy(z.py))
       << "\" r=\"5\" fill=\"#1f77b4\"/>\n";
    os << "<circle cx=\"" << px(m.sx(z.ex)) << "\" cy=\"" << px(m.sy(z.ey))
       << "\" r=\"5\" fill=\"#d62728\"/>\n";
  }
  os << "<text x=\"" << px(kMargin) << "\" y=\"" << px(kMargin - 8)
     << "\" font-family=\"sans-serif\" font-size=\"13\">episode " << trace.episode_index
     << " seed " << trace.seed << " outcome " << to_string(trace.final_status())
     << " steps " << trace.steps.size() << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string trajectory_distance_csv(const EpisodeTrace& trace) {
  std::ostringstream os;
  os << "t,px,py,ex,ey,dist\n";
  for (const StepRecord& s : trace.steps) {
    double dist = std::hypot(s.ex - s.px, s.ey - s.py);
    os << s.t << "," << num(s.px) << "," << num(s.py) << "," << num(s.ex) << "," << num(s.ey)
       << "," << num(dist) << "\n";
  }
  return os.str();
}

void write_trajectory_plot(const std::string& base, const EpisodeTrace& trace) {
  write_file(base + ".svg", trajectory_svg(trace));
  write_file(base + ".csv", trajectory_distance_csv(trace));
}

TrainingCurves parse_training_log(const std::string& csv_text) {
  TrainingCurves out;
  std::istringstream is(csv_text);
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      out.columns = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != out.columns.size())
      throw std::invalid_argument("training log: row with " + std::to_string(cells.size()) +
                                  " cells under a " + std::to_string(out.columns.size()) +
                                  "-column header");
    std::vector<double> row;
    for (const std::string& c : cells) {
      if (c == "N/A" || c.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      size_t used = 0;
      double v = std::stod(c, &used);
      if (used != c.size())
        throw std::invalid_argument("training log: cell '" + c + "' is not numeric");
      row.push_back(v);
    }
    out.rows.push_back(std::move(row));
  }
  if (!have_header) throw std::invalid_argument("training log: empty input");
  return out;
}

TrainingCurves read_training_log(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("training log: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_training_log(buf.str());
}

namespace {

int column_index(const TrainingCurves& curves, const std::string& name) {
  auto it = std::find(curves.columns.begin(), curves.columns.end(), name);
  if (it == curves.columns.end())
    throw std::invalid_argument("training log: no column named '" + name + "'");
  return static_cast<int>(it - curves.columns.begin());
}

}  // namespace

std::string training_curves_csv(const TrainingCurves& curves,
                                const std::vector<std::string>& series) {
  if (curves.columns.empty()) throw std::invalid_argument("training log: no columns");
  std::vector<int> idx{0};
  for (const std::string& s : series) idx.push_back(column_index(curves, s));
  std::ostringstream os;
  for (size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << curves.columns[idx[i]];
  os << "\n";
  for (const auto& row : curves.rows) {
    for (size_t i = 0; i < idx.size(); ++i) {
      double v = row[idx[i]];
      os << (i ? "," : "") << (defined(v) ? num(v) : std::string("N/A"));
    }
    os << "\n";
  }
  return os.str();
}

std::string training_curves_svg(const TrainingCurves& curves,
                                const std::vector<std::string>& series) {
  if (curves.columns.empty()) throw std::invalid_argument("training log: no columns");
  const double panel_w = 640, panel_h = 130, pad_l = 64, pad_r = 16, pad_v = 26;
  const int n = static_cast<int>(series.size());
  const double total_h = n * panel_h + pad_v;

  double x_lo = 0, x_hi = 1;
  bool have_x = false;
  for (const auto& row : curves.rows) {
    if (!defined(row[0])) continue;
    if (!have_x) {
      x_lo = x_hi = row[0];
      have_x = true;
    }
    x_lo = std::min(x_lo, row[0]);
    x_hi = std::max(x_hi, row[0]);
  }
  if (x_hi == x_lo) x_hi = x_lo + 1;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)panel_w << "\" height=\""
     << (int)total_h << "\" viewBox=\"0 0 " << (int)panel_w << " " << (int)total_h << "\">\n";
  for (int k = 0; k < n; ++k) {
    int col = column_index(curves, series[k]);
    double top = k * panel_h + pad_v;
    double bot = top + panel_h - pad_v;
    double lo = 0, hi = 1;
    bool any = false;
    for (const auto& row : curves.rows) {
      double v = row[col];
      if (!defined(v) || !defined(row[0])) continue;
      if (!any) {
        lo = hi = v;
        any = true;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!any) {
      lo = 0;
      hi = 1;
    }
    if (hi == lo) {
      hi += 0.5;
      lo -= 0.5;
    }
    auto X = [&](double x) {
      return pad_l + (x - x_lo) / (x_hi - x_lo) * (panel_w - pad_l - pad_r);
    };
    auto Y = [&](double v) { return bot - (v - lo) / (hi - lo) * (bot - top); };

    os << "<rect x=\"" << px(pad_l) << "\" y=\"" << px(top) << "\" width=\""
       << px(panel_w - pad_l - pad_r) << "\" height=\"" << px(bot - top)
       << "\" fill=\"#fbfbfb\" stroke=\"#444444\"/>\n";
    os << "<text x=\"" << px(pad_l) << "\" y=\"" << px(top - 6)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[k] << "</text>\n";
    os << "<text x=\"4\" y=\"" << px(top + 10) << "\" font-family=\"sans-serif\" font-size=\"10\">"
       << px(hi) << "</text>\n";
    os << "<text x=\"4\" y=\"" << px(bot) << "\" font-family=\"sans-serif\" font-size=\"10\">"
       << px(lo) << "</text>\n";

    std::vector<std::pair<double, double>> pts;
    for (const auto& row : curves.rows) {
      double v = row[col];
      if (!defined(v) || !defined(row[0])) continue;
      pts.emplace_back(X(row[0]), Y(v));
    }
    if (!pts.empty()) polyline(os, pts, "#1f77b4");
  }
  os << "</svg>\n";
  return os.str();
}

void write_training_plot(const std::string& base, const TrainingCurves& curves,
                         const std::vector<std::string>& series) {
  write_file(base + ".svg", training_curves_svg(curves, series));
  write_file(base + ".csv", training_curves_csv(curves, series));
}

const std::vector<std::string>& default_training_series() {
  static const std::vector<std::string> kSeries{"P_win", "P_shot", "P_timeout", "C_ratio",
                                                "C_gap"};
  return kSeries;
}

}  // namespace peec
