#pragma once

#include <string>
#include <vector>

#include "mipool/pooling.hpp"
#include "mipool/simulation.hpp"

namespace mipool {

enum class RuleSelection { both, conventional, simplified };

struct CliOptions {
  SimulationConfig config;
  RuleSelection rules = RuleSelection::both;
  std::string out_csv;   // empty: write the table to standard output
  std::string plot_svg;  // empty: no plot
  bool quiet = false;
  bool show_help = false;
  std::string help_text;

  std::vector<PoolingRule> selected_rules() const;
};

// Defaults follow the reference design (N = 1000, m = 5, 10 iterations,
// rates 0.10..0.95, level 0.95) with 1000 replications. The seed falls back
// to the MIPOOL_SEED environment variable. Throws mipool::Error on bad input.
CliOptions parse_args(const std::vector<std::string>& args);
CliOptions parse_args(int argc, const char* const* argv);

// Comma-separated missingness rates, each strictly inside (0, 1).
std::vector<double> parse_rate_list(const std::string& text);

// Keeps only rows whose rule was selected.
std::vector<ConditionSummary> filter_rows(const std::vector<ConditionSummary>& rows,
                                          RuleSelection rules);

}  // namespace mipool
