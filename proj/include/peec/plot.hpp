#pragma once
#include <string>
#include <vector>

#include "peec/trace.hpp"

namespace peec {

// Map-space SVG of one episode: both tracks as polylines, a marker on the
// pursuer's position at every query step, start squares and end dots, and a
// status caption. Rendering is deterministic for a given trace.
std::string trajectory_svg(const EpisodeTrace& trace);

// One row per step: t,px,py,ex,ey,dist. The distance column is recomputed
// from the recorded positions and all numbers are printed with round-trip
// precision, so the CSV carries exactly the information in the trace.
std::string trajectory_distance_csv(const EpisodeTrace& trace);

// Writes base + ".svg" and base + ".csv".
void write_trajectory_plot(const std::string& base, const EpisodeTrace& trace);

// Numeric view of a training-log-style CSV. Cells rendered as N/A parse to
// NaN. The first column is taken as the x axis by the SVG renderer.
struct TrainingCurves {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

TrainingCurves parse_training_log(const std::string& csv_text);
TrainingCurves read_training_log(const std::string& path);

// Subset CSV with the x column plus the named series, N/A for NaN cells.
std::string training_curves_csv(const TrainingCurves& curves,
                                const std::vector<std::string>& series);

// Stacked panels, one per named series, x column on the horizontal axis.
// Rows whose cell is undefined are skipped in that panel. Throws
// std::invalid_argument for unknown column names.
std::string training_curves_svg(const TrainingCurves& curves,
                                const std::vector<std::string>& series);

// Writes base + ".svg" and base + ".csv".
void write_training_plot(const std::string& base, const TrainingCurves& curves,
                         const std::vector<std::string>& series);

// The outcome and communication series a training run is judged by.
const std::vector<std::string>& default_training_series();

}  // namespace peec
