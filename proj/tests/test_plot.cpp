#include <doctest.h>

#include <cmath>
#include <sstream>

#include "peec/plot.hpp"

using namespace peec;

namespace {

EpisodeTrace straight_line_trace(int steps) {
  EpisodeTrace tr;
  tr.config = GameConfig{};
  tr.seed = 9;
  tr.episode_index = 0;
  for (int t = 0; t < steps; ++t) {
    StepRecord s;
    s.t = t;
    s.px = 0.1 + 0.1 * t;
    s.py = 0.2;
    s.ex = 0.8;
    s.ey = 0.9 - 0.1 * t;
    s.q = t == 1 ? 1 : 0;
    s.status = t + 1 == steps ? Status::Timeout : Status::Running;
    tr.steps.push_back(s);
  }
  return tr;
}

int count_occurrences(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("trajectory svg holds one polyline per track with one point per step") {
  EpisodeTrace tr = straight_line_trace(2);
  std::string svg = trajectory_svg(tr);
  CHECK(count_occurrences(svg, "<polyline") == 2);
  // two steps, two points per polyline: exactly one separating space inside points="a b"
  std::istringstream is(svg);
  std::string line;
  int polylines = 0;
  while (std::getline(is, line)) {
    if (line.rfind("<polyline", 0) != 0) continue;
    ++polylines;
    auto open = line.find("points=\"");
    REQUIRE(open != std::string::npos);
    auto close = line.find('"', open + 8);
    std::string pts = line.substr(open + 8, close - open - 8);
    CHECK(count_occurrences(pts, " ") == 1);
    CHECK(count_occurrences(pts, ",") == 2);
  }
  CHECK(polylines == 2);
}

TEST_CASE("query steps render markers at the pursuer position") {
  EpisodeTrace tr = straight_line_trace(4);  // one query at t=1
  std::string svg = trajectory_svg(tr);
  CHECK(count_occurrences(svg, "class=\"query\"") == 1);
  // pursuer at t=1 is (0.2, 0.2); map scale: 28 + 0.2*504 = 128.80, y flips to 431.20
  CHECK(svg.find("<circle class=\"query\" cx=\"128.80\" cy=\"431.20\"") != std::string::npos);

  tr.steps[1].q = 0;
  CHECK(count_occurrences(trajectory_svg(tr), "class=\"query\"") == 0);
}

TEST_CASE("distance csv reproduces the trace positions and distances exactly") {
  EpisodeTrace tr = straight_line_trace(3);
  std::string csv = trajectory_distance_csv(tr);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,px,py,ex,ey,dist");
  int t = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 6);
    CHECK(std::stoi(cells[0]) == t);
    CHECK(std::stod(cells[1]) == tr.steps[t].px);
    CHECK(std::stod(cells[2]) == tr.steps[t].py);
    CHECK(std::stod(cells[3]) == tr.steps[t].ex);
    CHECK(std::stod(cells[4]) == tr.steps[t].ey);
    double dist = std::hypot(tr.steps[t].ex - tr.steps[t].px, tr.steps[t].ey - tr.steps[t].py);
    CHECK(std::stod(cells[5]) == dist);
    ++t;
  }
  CHECK(t == 3);
}

TEST_CASE("training log parsing keeps columns and maps N/A to NaN") {
  std::string text =
      "# banner to be skipped\n"
      "episode,P_win,C_gap\n"
      "10,0.5,N/A\n"
      "20,0.75,3.5\n";
  TrainingCurves c = parse_training_log(text);
  REQUIRE(c.columns == std::vector<std::string>{"episode", "P_win", "C_gap"});
  REQUIRE(c.rows.size() == 2);
  CHECK(c.rows[0][0] == 10.0);
  CHECK(std::isnan(c.rows[0][2]));
  CHECK(c.rows[1][2] == 3.5);

  CHECK_THROWS_AS(parse_training_log(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_training_log("a,b\n1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_training_log("a,b\n1,zebra\n"), std::invalid_argument);
}

TEST_CASE("training curves renderers select series and reject unknown names") {
  std::string text =
      "episode,P_win,C_gap\n"
      "10,0.5,N/A\n"
      "20,0.75,3.5\n";
  TrainingCurves c = parse_training_log(text);

  std::string csv = training_curves_csv(c, {"P_win", "C_gap"});
  CHECK(csv ==
        "episode,P_win,C_gap\n"
        "10,0.5,N/A\n"
        "20,0.75,3.5\n");

  std::string svg = training_curves_svg(c, {"P_win", "C_gap"});
  CHECK(count_occurrences(svg, "<polyline") == 2);
  CHECK(svg.find(">P_win</text>") != std::string::npos);
  CHECK(svg.find(">C_gap</text>") != std::string::npos);

  CHECK_THROWS_AS(training_curves_svg(c, {"nope"}), std::invalid_argument);
  CHECK_THROWS_AS(training_curves_csv(c, {"nope"}), std::invalid_argument);
}
