#pragma once

// Experiment reports: one container for every laboratory result, with a
// lossless JSON round trip, CSV emission, and self-contained SVG charts on a
// fixed 960x540 canvas. Serialized artifacts are byte-deterministic so reruns
// under a fixed seed can be compared with cmp; the wall-clock field is the one
// volatile value and is serialized only on request, never by the artifact
// writers.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "walklab/group.hpp"

namespace walklab {

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;  // cells: number, string, or bool

  bool operator==(const ReportTable&) const = default;

  int column_index(const std::string& col) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == col) return static_cast<int>(i);
    return -1;
  }
};

struct PlotHint {
  std::string table;
  std::string x;
  std::vector<std::string> y;
  bool logx = false;
  bool logy = false;

  bool operator==(const PlotHint&) const = default;
  bool empty() const { return table.empty() || x.empty() || y.empty(); }
};

struct ExperimentReport {
  std::string id;
  nlohmann::json config = nlohmann::json::object();    // group, measure, budgets as given
  nlohmann::json summary = nlohmann::json::object();   // scalar results, errors as *_err keys
  nlohmann::json verdicts = nlohmann::json::object();
  std::vector<ReportTable> tables;
  std::optional<std::uint64_t> seed;  // present iff any result is random
  PlotHint plot;
  double wall_time_s = 0.0;

  bool operator==(const ExperimentReport&) const = default;

  const ReportTable* find_table(const std::string& name) const {
    for (const ReportTable& t : tables)
      if (t.name == name) return &t;
    return nullptr;
  }

  ReportTable& add_table(std::string name, std::vector<std::string> columns) {
    tables.push_back({std::move(name), std::move(columns), {}});
    return tables.back();
  }
};

inline nlohmann::json report_to_json(const ExperimentReport& r, bool include_timing = true) {
  nlohmann::json j;
  j["id"] = r.id;
  j["config"] = r.config;
  j["summary"] = r.summary;
  j["verdicts"] = r.verdicts;
  nlohmann::json tables = nlohmann::json::array();
  for (const ReportTable& t : r.tables)
    tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
  j["tables"] = std::move(tables);
  if (r.seed) j["seed"] = *r.seed;
  if (!r.plot.empty())
    j["plot"] = {{"table", r.plot.table}, {"x", r.plot.x},     {"y", r.plot.y},
                 {"logx", r.plot.logx},   {"logy", r.plot.logy}};
  if (include_timing) j["wall_time_s"] = r.wall_time_s;
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.id = j.at("id").get<std::string>();
  r.config = j.at("config");
  r.summary = j.at("summary");
  r.verdicts = j.at("verdicts");
  for (const auto& t : j.at("tables")) {
    ReportTable tab;
    tab.name = t.at("name").get<std::string>();
    tab.columns = t.at("columns").get<std::vector<std::string>>();
    for (const auto& row : t.at("rows")) tab.rows.push_back(row.get<std::vector<nlohmann::json>>());
    r.tables.push_back(std::move(tab));
  }
  if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("plot")) {
    const auto& p = j.at("plot");
    r.plot.table = p.at("table").get<std::string>();
    r.plot.x = p.at("x").get<std::string>();
    r.plot.y = p.at("y").get<std::vector<std::string>>();
    r.plot.logx = p.at("logx").get<bool>();
    r.plot.logy = p.at("logy").get<bool>();
  }
  if (j.contains("wall_time_s")) r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

// 17 significant digits round-trip a double exactly.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_cell(const nlohmann::json& v) {
  if (v.is_number_float()) return fmt17(v.get<double>());
  if (v.is_string()) return csv_escape(v.get<std::string>());
  return v.dump();  // integers, booleans, null
}

}  // namespace detail

// Tables plus summary and verdict lines. The config echo stays JSON-only; the
// CSV is the tabular artifact.
inline std::string report_to_csv(const ExperimentReport& r) {
  std::string out;
  out += "# report," + detail::csv_escape(r.id) + "\n";
  if (r.seed) out += "# seed," + std::to_string(*r.seed) + "\n";
  for (const auto& [k, v] : r.summary.items())
    out += "# summary," + detail::csv_escape(k) + "," + detail::csv_cell(v) + "\n";
  for (const auto& [k, v] : r.verdicts.items())
    out += "# verdict," + detail::csv_escape(k) + "," + detail::csv_cell(v) + "\n";
  for (const ReportTable& t : r.tables) {
    out += "# table," + detail::csv_escape(t.name) + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ',';
      out += detail::csv_escape(t.columns[i]);
    }
    out += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += detail::csv_cell(row[i]);
      }
      out += '\n';
    }
  }
  return out;
}

// ---- SVG charts ----

struct PlotGeometry {
  double width = 960, height = 540;
  double left = 72, right = 24, top = 48, bottom = 56;
};

namespace detail {

inline std::string fmt2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

inline std::string fmt_tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

// Tick positions at 1-2-5 multiples covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi, int target) {
  std::vector<double> ticks;
  const double span = hi - lo;
  if (!(span > 0) || !std::isfinite(span)) return ticks;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = mag * (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0);
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 0.5 * step && ticks.size() < 40; t += step) {
    if (std::abs(t) < 1e-12 * step) t = 0.0;
    ticks.push_back(t);
  }
  return ticks;
}

struct AxisScale {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double place(double v, double a, double b) const {
    const double x = log ? std::log10(v) : v;
    return a + (x - lo) / (hi - lo) * (b - a);
  }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0); }
};

inline AxisScale fit_axis(const std::vector<double>& values, bool log) {
  AxisScale ax;
  ax.log = log;
  bool any = false;
  double lo = 0.0, hi = 0.0;
  for (double v : values) {
    if (!ax.usable(v)) continue;
    const double x = log ? std::log10(v) : v;
    if (!any) {
      lo = hi = x;
      any = true;
    } else {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!any) {
    ax.lo = log ? -1.0 : 0.0;
    ax.hi = log ? 1.0 : 1.0;
    return ax;
  }
  if (hi - lo < 1e-12) {
    const double pad = std::max(1.0, std::abs(lo) * 0.5);
    lo -= pad;
    hi += pad;
  }
  const double pad = 0.05 * (hi - lo);
  ax.lo = lo - pad;
  ax.hi = hi + pad;
  return ax;
}

inline std::vector<double> axis_ticks(const AxisScale& ax) {
  if (!ax.log) return nice_ticks(ax.lo, ax.hi, 5);
  std::vector<double> ticks;
  for (double k = std::ceil(ax.lo); k <= std::floor(ax.hi) + 1e-9; k += 1.0)
    ticks.push_back(std::pow(10.0, k));
  if (ticks.size() < 2)
    for (double t : nice_ticks(ax.lo, ax.hi, 4)) ticks.push_back(std::pow(10.0, t));
  return ticks;
}

inline const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

}  // namespace detail

// Line-and-marker chart of the hinted columns. Missing table or column is a
// configuration error; a table with no plottable points still renders axes.
inline std::string render_plot(const ExperimentReport& r, const PlotHint& hint,
                               const PlotGeometry& geo = {}) {
  const ReportTable* table = r.find_table(hint.table);
  if (!table) throw ConfigError("plot table not found: " + hint.table);
  const int xi = table->column_index(hint.x);
  if (xi < 0) throw ConfigError("plot column not found: " + hint.x);
  std::vector<int> yi;
  for (const std::string& col : hint.y) {
    const int i = table->column_index(col);
    if (i < 0) throw ConfigError("plot column not found: " + col);
    yi.push_back(i);
  }

  const auto numeric = [](const nlohmann::json& v, double& out) {
    if (!v.is_number()) return false;
    out = v.get<double>();
    return true;
  };

  std::vector<double> xs, ys;
  for (const auto& row : table->rows) {
    double x, y;
    if (static_cast<std::size_t>(xi) >= row.size() || !numeric(row[xi], x)) continue;
    xs.push_back(x);
    for (int i : yi)
      if (static_cast<std::size_t>(i) < row.size() && numeric(row[i], y)) ys.push_back(y);
  }
  const detail::AxisScale ax = detail::fit_axis(xs, hint.logx);
  const detail::AxisScale ay = detail::fit_axis(ys, hint.logy);

  const double x0 = geo.left, x1 = geo.width - geo.right;
  const double y0 = geo.height - geo.bottom, y1 = geo.top;  // y grows downward in SVG

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt2(geo.width) +
         "\" height=\"" + detail::fmt2(geo.height) + "\" viewBox=\"0 0 " + detail::fmt2(geo.width) +
         " " + detail::fmt2(geo.height) + "\">\n";
  svg += "<title>" + detail::xml_escape(r.id + " / " + hint.table) + "</title>\n";
  svg += "<metadata>report=" + detail::xml_escape(r.id);
  if (r.seed) svg += ";seed=" + std::to_string(*r.seed);
  svg += "</metadata>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (double t : detail::axis_ticks(ax)) {
    if (!ax.usable(t)) continue;
    const double px = ax.place(t, x0, x1);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    svg += "<line x1=\"" + detail::fmt2(px) + "\" y1=\"" + detail::fmt2(y0) + "\" x2=\"" +
           detail::fmt2(px) + "\" y2=\"" + detail::fmt2(y1) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::fmt2(px) + "\" y=\"" + detail::fmt2(y0 + 18) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"#333333\" "
           "text-anchor=\"middle\">" +
           detail::xml_escape(detail::fmt_tick(t)) + "</text>\n";
  }
  for (double t : detail::axis_ticks(ay)) {
    if (!ay.usable(t)) continue;
    const double py = ay.place(t, y0, y1);
    if (py > y0 + 0.5 || py < y1 - 0.5) continue;
    svg += "<line x1=\"" + detail::fmt2(x0) + "\" y1=\"" + detail::fmt2(py) + "\" x2=\"" +
           detail::fmt2(x1) + "\" y2=\"" + detail::fmt2(py) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::fmt2(x0 - 6) + "\" y=\"" + detail::fmt2(py + 4) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"#333333\" "
           "text-anchor=\"end\">" +
           detail::xml_escape(detail::fmt_tick(t)) + "</text>\n";
  }
  svg += "<line x1=\"" + detail::fmt2(x0) + "\" y1=\"" + detail::fmt2(y0) + "\" x2=\"" +
         detail::fmt2(x1) + "\" y2=\"" + detail::fmt2(y0) +
         "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
  svg += "<line x1=\"" + detail::fmt2(x0) + "\" y1=\"" + detail::fmt2(y0) + "\" x2=\"" +
         detail::fmt2(x0) + "\" y2=\"" + detail::fmt2(y1) +
         "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";

  svg += "<text x=\"" + detail::fmt2((x0 + x1) / 2) + "\" y=\"" + detail::fmt2(geo.height - 14) +
         "\" font-family=\"monospace\" font-size=\"14\" fill=\"#000000\" "
         "text-anchor=\"middle\">" +
         detail::xml_escape(hint.x + (hint.logx ? " (log)" : "")) + "</text>\n";
  svg += "<text x=\"" + detail::fmt2((x0 + x1) / 2) + "\" y=\"" + detail::fmt2(geo.top - 20) +
         "\" font-family=\"monospace\" font-size=\"15\" fill=\"#000000\" "
         "text-anchor=\"middle\">" +
         detail::xml_escape(r.id + " / " + hint.table) + "</text>\n";

  for (std::size_t s = 0; s < yi.size(); ++s) {
    const char* color = detail::series_color(s);
    std::string polyline, markers;
    for (const auto& row : table->rows) {
      double x, y;
      if (static_cast<std::size_t>(xi) >= row.size() || !numeric(row[xi], x)) continue;
      if (static_cast<std::size_t>(yi[s]) >= row.size() || !numeric(row[yi[s]], y)) continue;
      if (!ax.usable(x) || !ay.usable(y)) continue;
      const double px = ax.place(x, x0, x1);
      const double py = ay.place(y, y0, y1);
      if (!polyline.empty()) polyline += ' ';
      polyline += detail::fmt2(px) + "," + detail::fmt2(py);
      markers += "<circle cx=\"" + detail::fmt2(px) + "\" cy=\"" + detail::fmt2(py) +
                 "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    if (!polyline.empty())
      svg += "<polyline points=\"" + polyline + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.7\"/>\n";
    svg += markers;
    svg += "<text x=\"" + detail::fmt2(x1 - 8) + "\" y=\"" +
           detail::fmt2(y1 + 16 + 16 * static_cast<double>(s)) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"" + color +
           "\" text-anchor=\"end\">" +
           detail::xml_escape(hint.y[s] + (hint.logy ? " (log)" : "")) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
  if (!out) throw ConfigError("failed writing output file: " + path);
}

}  // namespace walklab
