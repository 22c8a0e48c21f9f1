#include "mipool/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace mipool {

std::string format_number(double value, int decimals) {
  if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
  if (std::isnan(value)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(s.begin());
  return s;
}

std::string format_report_row(const ConditionSummary& row) {
  std::string s = row.variable;
  s += ',' + format_number(row.pct_missing, 4);
  s += ',' + std::string(to_string(row.rule));
  s += ',' + format_number(row.avg_r, 4);
  s += ',' + format_number(row.avg_nu, 4);
  s += ',' + format_number(row.avg_fmi, 4);
  s += ',' + format_number(row.avg_ciw, 4);
  s += ',' + format_number(row.coverage, 3);
  s += ',' + format_number(row.bias, 4);
  s += ',' + std::to_string(row.reps);
  return s;
}

void write_report(const std::vector<ConditionSummary>& rows, std::ostream& out) {
  if (rows.empty()) throw Error("write_report: no rows to write");
  out << kReportHeader << '\n';
  for (const auto& row : rows) out << format_report_row(row) << '\n';
}

void write_report(const std::vector<ConditionSummary>& rows, const std::string& path) {
  if (rows.empty()) throw Error("write_report: no rows to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_report: cannot open '" + path + "' for writing");
  write_report(rows, out);
  out.flush();
  if (!out) throw Error("write_report: write to '" + path + "' failed");
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 200.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;
constexpr double kYMin = 0.90;
constexpr double kYMax = 1.005;

double px(double rate) { return kLeft + rate * (kWidth - kLeft - kRight); }
double py(double coverage) {
  const double c = std::clamp(coverage, kYMin, kYMax);
  return kTop + (kYMax - c) / (kYMax - kYMin) * (kHeight - kTop - kBottom);
}

std::string fmt(double v) { return format_number(v, 2); }

const char* rule_color(PoolingRule rule) {
  return rule == PoolingRule::conventional ? "#c0392b" : "#1f5fa8";
}

}  // namespace

std::string render_coverage_plot(const std::vector<ConditionSummary>& rows, double level,
                                 const std::vector<PoolingRule>& required_rules) {
  if (rows.empty()) throw Error("write_coverage_plot: no rows to plot");
  for (PoolingRule rule : required_rules) {
    const bool present = std::any_of(rows.begin(), rows.end(),
                                     [rule](const ConditionSummary& r) { return r.rule == rule; });
    if (!present)
      throw Error("write_coverage_plot: no rows for the " + std::string(to_string(rule)) + " rule");
  }

  // Series keyed by first appearance so the output order follows the rows.
  std::vector<std::pair<std::string, PoolingRule>> keys;
  std::map<std::pair<std::string, PoolingRule>, std::vector<std::pair<double, double>>> series;
  for (const auto& row : rows) {
    auto key = std::make_pair(row.variable, row.rule);
    if (!series.count(key)) keys.push_back(key);
    series[key].emplace_back(row.pct_missing, row.coverage);
  }
  std::vector<std::string> variables;
  for (const auto& k : keys)
    if (std::find(variables.begin(), variables.end(), k.first) == variables.end())
      variables.push_back(k.first);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(kWidth)
      << "\" height=\"" << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << ' ' << fmt(kHeight)
      << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
      << "\" fill=\"white\"/>\n";

  const double x0 = px(0.0), x1 = px(1.0), y0 = py(kYMin), y1 = py(kYMax);
  svg << "<g id=\"grid\" stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double c = kYMin + 0.02 * i;
    svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py(c)) << "\" x2=\"" << fmt(x1)
        << "\" y2=\"" << fmt(py(c)) << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1) << "\" y2=\""
      << fmt(y0) << "\"/>\n"
      << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0) << "\" y2=\""
      << fmt(y1) << "\"/>\n"
      << "</g>\n";
  svg << "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double c = kYMin + 0.02 * i;
    svg << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(py(c) + 4)
        << "\" text-anchor=\"end\">" << format_number(c, 2) << "</text>\n";
  }
  for (int i = 0; i <= 10; ++i) {
    const double rate = 0.1 * i;
    svg << "<text x=\"" << fmt(px(rate)) << "\" y=\"" << fmt(y0 + 18)
        << "\" text-anchor=\"middle\">" << format_number(rate, 1) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(0.5 * (x0 + x1)) << "\" y=\"" << fmt(kHeight - 15)
      << "\" text-anchor=\"middle\">missingness rate</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt(0.5 * (y0 + y1)) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt(0.5 * (y0 + y1)) << ")\">coverage</text>\n";
  svg << "</g>\n";

  if (level >= kYMin && level <= kYMax) {
    svg << "<line id=\"nominal\" x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py(level)) << "\" x2=\""
        << fmt(x1) << "\" y2=\"" << fmt(py(level))
        << "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"2,3\"/>\n";
  }

  for (const auto& key : keys) {
    const auto& pts = series[key];
    const bool dashed = std::find(variables.begin(), variables.end(), key.first) != variables.begin();
    svg << "<polyline class=\"series\" data-variable=\"" << key.first << "\" data-rule=\""
        << to_string(key.second) << "\" fill=\"none\" stroke=\"" << rule_color(key.second)
        << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      svg << (i ? " " : "") << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
    svg << "\"/>\n";
  }

  svg << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double ly = kTop + 10;
  const double lx = kWidth - kRight + 20;
  for (const auto& key : keys) {
    const bool dashed = std::find(variables.begin(), variables.end(), key.first) != variables.begin();
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 30)
        << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << rule_color(key.second) << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    svg << "<text x=\"" << fmt(lx + 38) << "\" y=\"" << fmt(ly + 4) << "\">" << key.first << ' '
        << to_string(key.second) << "</text>\n";
    ly += 20;
  }
  svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 30) << "\" y2=\""
      << fmt(ly) << "\" stroke=\"#555555\" stroke-dasharray=\"2,3\"/>\n";
  svg << "<text x=\"" << fmt(lx + 38) << "\" y=\"" << fmt(ly + 4) << "\">nominal "
      << format_number(level, 3) << "</text>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void write_coverage_plot(const std::vector<ConditionSummary>& rows, const std::string& path,
                         double level, const std::vector<PoolingRule>& required_rules) {
  const std::string svg = render_coverage_plot(rows, level, required_rules);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_coverage_plot: cannot open '" + path + "' for writing");
  out << svg;
  out.flush();
  if (!out) throw Error("write_coverage_plot: write to '" + path + "' failed");
}

}  // namespace mipool
