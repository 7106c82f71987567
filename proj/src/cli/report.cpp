// Copyright 2026 The hwnas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "common/format.hpp"
#include "hwnas/cli.hpp"
#include "hwnas/error.hpp"
#include "hwnas/graph.hpp"
#include "hwnas/profiler.hpp"
#include "json.hpp"

namespace hwnas {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 56.0;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Fixed-size plot with linear axes, four ticks per axis.
class SvgPlot {
 public:
  SvgPlot(Range x, Range y, std::string title, std::string x_label, std::string y_label)
      : x_(x), y_(y) {
    body_ << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
          << xml_escape(title) << "</text>\n";
    body_ << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
          << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(x_label) << "</text>\n";
    body_ << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
          << kHeight / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
    body_ << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
          << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      body_ << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kMargin + 16
            << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(xv) << "</text>\n";
      body_ << "<text x=\"" << kMargin - 4 << "\" y=\"" << py(yv) + 3
            << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(yv) << "</text>\n";
    }
  }

  double px(double x) const { return kMargin + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - 2 * kMargin); }

  void point(double x, double y, std::string_view color) {
    body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }
  void label(double x, double y, std::string_view text) {
    body_ << "<text x=\"" << px(x) + 5 << "\" y=\"" << py(y) - 5 << "\" font-size=\"9\">" << xml_escape(text)
          << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view color, bool dashed) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\"" << (dashed ? " stroke-dasharray=\"4 3\"" : "")
          << " points=\"";
    for (const auto& [x, y] : pts) body_ << px(x) << "," << py(y) << " ";
    body_ << "\"/>\n";
  }

  std::string str() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\">\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  Range x_, y_;
  std::ostringstream body_;
};

CalibrationReport parse_calibration_csv(const std::string& text) {
  CalibrationReport report;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("calibration csv", "expected two columns: " + line);
    report.points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  double ape = 0.0;
  std::vector<double> xs, ys;
  for (const auto& p : report.points) {
    ape += std::abs(p.predicted_ms - p.measured_ms) / p.measured_ms;
    xs.push_back(p.predicted_ms);
    ys.push_back(p.measured_ms);
  }
  if (!report.points.empty()) report.mape = 100.0 * ape / static_cast<double>(report.points.size());
  report.pearson = pearson_correlation(xs, ys);
  return report;
}

std::string calibration_svg(const CalibrationReport& report) {
  Range r;
  for (const auto& p : report.points) {
    r.add(p.predicted_ms);
    r.add(p.measured_ms);
  }
  r.pad();
  std::string title = "Predicted vs measured latency, MAPE " + fmt(report.mape) + "%";
  if (report.pearson) title += ", r = " + fmt(*report.pearson);
  SvgPlot plot(r, r, title, "predicted (ms)", "measured (ms)");
  plot.polyline({{r.lo, r.lo}, {r.hi, r.hi}}, "gray", true);
  for (const auto& p : report.points) plot.point(p.predicted_ms, p.measured_ms, "steelblue");
  return plot.str();
}

struct FrontierPoint {
  std::string net;
  double latency_ms = 0.0;
  double quality = 0.0;
  bool pareto = false;
};

/// Marks points not dominated by a faster-or-equal, better-or-equal point.
void mark_pareto(std::vector<FrontierPoint>& points) {
  for (auto& p : points) {
    p.pareto = std::none_of(points.begin(), points.end(), [&](const FrontierPoint& q) {
      return q.latency_ms <= p.latency_ms && q.quality >= p.quality &&
             (q.latency_ms < p.latency_ms || q.quality > p.quality);
    });
  }
}

std::string frontier_svg(std::vector<FrontierPoint> points, const std::string& quality_name) {
  Range x, y;
  for (const auto& p : points) {
    x.add(p.latency_ms);
    y.add(p.quality);
  }
  x.pad();
  y.pad();
  SvgPlot plot(x, y, "Latency / " + quality_name + " frontier", "LUT latency (ms)", quality_name);
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.latency_ms < b.latency_ms; });
  std::vector<std::pair<double, double>> front;
  for (const auto& p : points) {
    if (p.pareto) front.emplace_back(p.latency_ms, p.quality);
  }
  if (front.size() > 1) plot.polyline(front, "firebrick", false);
  for (const auto& p : points) {
    plot.point(p.latency_ms, p.quality, p.pareto ? "firebrick" : "steelblue");
    plot.label(p.latency_ms, p.quality, p.net);
  }
  return plot.str();
}

}  // namespace

std::vector<std::string> write_report(const RunManifest& manifest, const std::string& out_dir,
                                      const std::string& base_dir) {
  namespace fs = std::filesystem;
  const auto resolve = [&](const std::string& path) {
    return fs::path(path).is_absolute() ? path : (fs::path(base_dir) / path).string();
  };
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  const auto emit = [&](const std::string& name, const std::string& text) {
    const std::string path = (fs::path(out_dir) / name).string();
    save_text(path, text);
    written.push_back(path);
  };

  ordered_json summary;
  summary["format"] = "hwnas.report";
  summary["version"] = 1;

  summary["calibration"] = ordered_json::array();
  int cal_index = 0;
  for (const auto& a : manifest.of_kind("calibration")) {
    const CalibrationReport report = parse_calibration_csv(read_text(resolve(a.path)));
    const std::string name = cal_index == 0 ? "calibration.svg" : "calibration_" + std::to_string(cal_index) + ".svg";
    emit(name, calibration_svg(report));
    ordered_json entry{{"source", a.path}, {"points", report.points.size()}, {"mape_percent", report.mape}};
    entry["pearson"] = report.pearson ? ordered_json(*report.pearson) : ordered_json(nullptr);
    entry["plot"] = name;
    summary["calibration"].push_back(entry);
    ++cal_index;
  }

  std::vector<FrontierPoint> points;
  std::string quality_name = "accuracy";
  summary["metrics"] = ordered_json::array();
  for (const auto& a : manifest.of_kind("metrics")) {
    const auto j = nlohmann::json::parse(read_text(resolve(a.path)));
    ordered_json entry{{"source", a.path}};
    entry["net"] = j.value("net", "");
    entry["quality_name"] = j.value("quality_name", "accuracy");
    entry["quality"] = j.value("quality", 0.0);
    entry["latency_ms"] = j.contains("latency_ms") ? ordered_json(j["latency_ms"]) : ordered_json(nullptr);
    summary["metrics"].push_back(entry);
    if (j.contains("latency_ms") && j["latency_ms"].is_number()) {
      quality_name = entry["quality_name"].get<std::string>();
      points.push_back({fs::path(entry["net"].get<std::string>()).filename().string(),
                        j["latency_ms"].get<double>(), entry["quality"].get<double>(), false});
    }
  }
  if (!points.empty()) {
    mark_pareto(points);
    std::ostringstream csv;
    csv << "net,latency_ms," << quality_name << ",pareto\n";
    for (const auto& p : points) {
      csv << p.net << "," << format_double(p.latency_ms) << "," << format_double(p.quality) << ","
          << (p.pareto ? 1 : 0) << "\n";
    }
    emit("frontier.csv", csv.str());
    emit("frontier.svg", frontier_svg(points, quality_name));
  }

  summary["searches"] = ordered_json::array();
  for (const auto& a : manifest.of_kind("history")) {
    std::istringstream in(read_text(resolve(a.path)));
    std::string line, last;
    int rounds = -1;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      last = line;
      ++rounds;
    }
    ordered_json entry{{"source", a.path}, {"rounds", std::max(rounds, 0)}};
    if (rounds > 0) {
      // round,train_loss,val_loss,e_latency_ms,...
      std::istringstream fields(last);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(fields, cell, ',')) cells.push_back(cell);
      if (cells.size() >= 4) entry["final_e_latency_ms"] = std::stod(cells[3]);
    }
    summary["searches"].push_back(entry);
  }

  emit("report.json", summary.dump(2) + "\n");
  return written;
}

}  // namespace hwnas
