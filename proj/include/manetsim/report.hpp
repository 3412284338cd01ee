#pragma once

// Result persistence: the metrics.csv table, run metadata, and simple
// self-contained SVG line charts (one per metric, node count on the x axis,
// one series per protocol). Formatting goes through snprintf with a fixed
// precision so identical runs serialize to identical bytes.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "metrics.hpp"

namespace manetsim {

inline constexpr const char* kResultsHeader =
    "protocol,nodes,area_m,duration_s,seed,pdr,ro,throughput_kbps,e_tx_j,e_rx_j,e_idle_j,e_over_j,"
    "avg_remaining_j";

inline std::string fmt_g(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Ratios that were undefined for the run (no packets originated) stay empty
// in the CSV rather than being written as NaN.
inline std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_g(*v) : "";
}

struct ResultRow {
  std::string protocol;
  int nodes = 0;
  double area_m = 0;
  double duration_s = 0;
  std::string seed;  // a seed number, or "avg" for the per-configuration mean
  RunMetrics m;
};

inline void write_row(std::ostream& out, const ResultRow& r) {
  out << r.protocol << ',' << r.nodes << ',' << fmt_g(r.area_m) << ',' << fmt_g(r.duration_s) << ','
      << r.seed << ',' << fmt_opt(r.m.pdr) << ',' << fmt_opt(r.m.ro) << ','
      << fmt_g(r.m.throughput_kbps) << ',' << fmt_g(r.m.e_tx_j) << ',' << fmt_g(r.m.e_rx_j) << ','
      << fmt_g(r.m.e_idle_j) << ',' << fmt_g(r.m.e_over_j) << ',' << fmt_g(r.m.avg_remaining_j)
      << '\n';
}

inline void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const ResultRow& r : rows) write_row(out, r);
}

// Arithmetic mean over seed rows of one (protocol, nodes) configuration.
// Undefined values are averaged over the rows where they are defined.
inline ResultRow average_rows(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("average_rows: nothing to average");
  ResultRow avg = rows.front();
  avg.seed = "avg";
  avg.m = RunMetrics{};
  double pdr_sum = 0, ro_sum = 0;
  int pdr_n = 0, ro_n = 0;
  for (const ResultRow& r : rows) {
    if (r.m.pdr) {
      pdr_sum += *r.m.pdr;
      ++pdr_n;
    }
    if (r.m.ro) {
      ro_sum += *r.m.ro;
      ++ro_n;
    }
    avg.m.originated += r.m.originated;
    avg.m.delivered += r.m.delivered;
    avg.m.throughput_kbps += r.m.throughput_kbps;
    avg.m.e_tx_j += r.m.e_tx_j;
    avg.m.e_rx_j += r.m.e_rx_j;
    avg.m.e_idle_j += r.m.e_idle_j;
    avg.m.e_over_j += r.m.e_over_j;
    avg.m.avg_remaining_j += r.m.avg_remaining_j;
  }
  double n = static_cast<double>(rows.size());
  if (pdr_n > 0) avg.m.pdr = pdr_sum / pdr_n;
  if (ro_n > 0) avg.m.ro = ro_sum / ro_n;
  avg.m.throughput_kbps /= n;
  avg.m.e_tx_j /= n;
  avg.m.e_rx_j /= n;
  avg.m.e_idle_j /= n;
  avg.m.e_over_j /= n;
  avg.m.avg_remaining_j /= n;
  return avg;
}

// --- output directory handling ---

inline void prepare_out_dir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir))
      throw std::runtime_error("output path " + dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir) && !force)
      throw std::runtime_error("output directory " + dir.string() +
                               " is not empty; pass --force to write into it anyway");
  } else {
    fs::create_directories(dir);
  }
}

inline void write_metadata(const std::filesystem::path& dir, const nlohmann::json& meta) {
  std::ofstream out(dir / "metadata.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "metadata.json").string());
  out << meta.dump(2) << '\n';
}

// --- SVG line charts ---

struct ChartSeries {
  std::string name;
  std::vector<double> y;  // aligned with the x vector; NaN = missing point
};

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string svg_line_chart(const std::string& title, const std::string& x_label,
                                  const std::string& y_label, const std::vector<double>& xs,
                                  const std::vector<ChartSeries>& series) {
  const double width = 720, height = 480;
  const double ml = 80, mr = 140, mt = 50, mb = 60;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  double xmin = xs.empty() ? 0 : xs.front(), xmax = xmin;
  for (double x : xs) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  if (xmax == xmin) {
    xmin -= 1;
    xmax += 1;
  }
  double ymin = 0, ymax = 0;
  bool seen = false;
  for (const ChartSeries& s : series) {
    for (double v : s.y) {
      if (std::isnan(v)) continue;
      if (!seen) {
        ymin = ymax = v;
        seen = true;
      } else {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
  }
  if (!seen) {
    ymin = 0;
    ymax = 1;
  }
  if (ymin > 0) ymin = 0;  // anchor positive metrics at zero
  if (ymax == ymin) ymax = ymin + 1;
  ymax += (ymax - ymin) * 0.05;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"18\">" << svg_escape(title) << "</text>\n";

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    double fx = xmin + (xmax - xmin) * i / ticks;
    double fy = ymin + (ymax - ymin) * i / ticks;
    svg << "<line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(fx) << "\" y2=\""
        << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_g(fx)
        << "</text>\n";
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml << "\" y2=\""
        << py(fy) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_g(fy)
        << "</text>\n";
    if (i > 0)
      svg << "<line x1=\"" << ml << "\" y1=\"" << py(fy) << "\" x2=\"" << ml + pw << "\" y2=\""
          << py(fy) << "\" stroke=\"#dddddd\" stroke-dasharray=\"3,3\"/>\n";
  }
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << svg_escape(x_label) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
      << mt + ph / 2 << ")\">" << svg_escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % (sizeof(palette) / sizeof(palette[0]))];
    std::ostringstream pts;
    for (std::size_t i = 0; i < xs.size() && i < series[s].y.size(); ++i) {
      double v = series[s].y[i];
      if (std::isnan(v)) continue;
      pts << px(xs[i]) << ',' << py(v) << ' ';
      svg << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(v) << "\" r=\"3.5\" fill=\"" << color
          << "\"/>\n";
    }
    svg << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    double ly = mt + 16 + 22 * static_cast<double>(s);
    svg << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw + 36
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << ml + pw + 42 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << svg_escape(series[s].name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

// Chart files from the averaged rows: <metric>.svg, node count on x, one
// series per protocol. Returns the metric keys written.
inline std::vector<std::string> write_charts(const std::filesystem::path& dir,
                                             const std::vector<ResultRow>& avg_rows) {
  std::set<int> node_set;
  std::set<std::string> proto_set;
  for (const ResultRow& r : avg_rows) {
    node_set.insert(r.nodes);
    proto_set.insert(r.protocol);
  }
  std::vector<double> xs(node_set.begin(), node_set.end());

  struct MetricDef {
    const char* key;
    const char* label;
    double (*get)(const RunMetrics&);
  };
  static const MetricDef defs[] = {
      {"pdr", "packet delivery ratio",
       [](const RunMetrics& m) { return m.pdr ? *m.pdr : std::nan(""); }},
      {"ro", "routing overhead (control tx per delivered packet)",
       [](const RunMetrics& m) { return m.ro ? *m.ro : std::nan(""); }},
      {"throughput_kbps", "throughput (kbit/s)", [](const RunMetrics& m) { return m.throughput_kbps; }},
      {"e_tx_j", "mean transmit energy per node (J)", [](const RunMetrics& m) { return m.e_tx_j; }},
      {"e_rx_j", "mean receive energy per node (J)", [](const RunMetrics& m) { return m.e_rx_j; }},
      {"e_idle_j", "mean idle energy per node (J)", [](const RunMetrics& m) { return m.e_idle_j; }},
      {"e_over_j", "mean overhearing energy per node (J)",
       [](const RunMetrics& m) { return m.e_over_j; }},
      {"avg_remaining_j", "mean remaining energy per node (J)",
       [](const RunMetrics& m) { return m.avg_remaining_j; }},
  };

  std::vector<std::string> written;
  for (const MetricDef& def : defs) {
    std::vector<ChartSeries> series;
    for (const std::string& proto : proto_set) {
      ChartSeries s;
      s.name = proto;
      for (double nodes : xs) {
        double v = std::nan("");
        for (const ResultRow& r : avg_rows)
          if (r.protocol == proto && r.nodes == static_cast<int>(nodes)) v = def.get(r.m);
        s.y.push_back(v);
      }
      series.push_back(std::move(s));
    }
    std::string svg = svg_line_chart(def.label, "nodes", def.key, xs, series);
    std::ofstream out(dir / (std::string(def.key) + ".svg"));
    if (!out) throw std::runtime_error("cannot write chart " + (dir / def.key).string());
    out << svg;
    written.push_back(def.key);
  }
  return written;
}

}  // namespace manetsim
