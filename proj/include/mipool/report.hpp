#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mipool/pooling.hpp"
#include "mipool/simulation.hpp"

namespace mipool {

inline constexpr const char* kReportHeader = "variable,pct_missing,rule,r,nu,fmi,ciw,cov,bias,reps";

// Fixed-point with `decimals` digits; infinity as `Inf`, negative zero
// printed without its sign.
std::string format_number(double value, int decimals);

std::string format_report_row(const ConditionSummary& row);

// Header plus one record per row. Throws on empty input or I/O failure.
void write_report(const std::vector<ConditionSummary>& rows, std::ostream& out);
void write_report(const std::vector<ConditionSummary>& rows, const std::string& path);

// Self-contained SVG 1.1 coverage chart: one polyline per (variable, rule),
// y-axis clipped to [0.90, 1.005], dashed reference line at `level`.
// Every rule in `required_rules` must appear in `rows`.
std::string render_coverage_plot(const std::vector<ConditionSummary>& rows, double level,
                                 const std::vector<PoolingRule>& required_rules);
void write_coverage_plot(const std::vector<ConditionSummary>& rows, const std::string& path,
                         double level, const std::vector<PoolingRule>& required_rules);

}  // namespace mipool
