#include "mipool/cli_options.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <thread>

namespace mipool {

std::vector<PoolingRule> CliOptions::selected_rules() const {
  switch (rules) {
    case RuleSelection::conventional:
      return {PoolingRule::conventional};
    case RuleSelection::simplified:
      return {PoolingRule::simplified};
    case RuleSelection::both:
      break;
  }
  return {PoolingRule::conventional, PoolingRule::simplified};
}

std::vector<double> parse_rate_list(const std::string& text) {
  std::vector<double> rates;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    std::string item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw Error("malformed rate '" + item + "' in list '" + text + "'");
    if (!(v > 0.0 && v < 1.0))
      throw Error("rate " + item + " outside (0, 1)");
    rates.push_back(v);
    start = end + 1;
  }
  return rates;
}

CliOptions parse_args(const std::vector<std::string>& args) {
  CliOptions opts;
  SimulationConfig& cfg = opts.config;
  cfg.reps = 1000;
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());

  CLI::App app{"Coverage study of conventional and finite-population pooling rules", "mipool"};
  std::string rates_text;
  std::string rules_text = "both";
  app.add_option("--n-pop", cfg.n_pop, "Population size")->check(CLI::Range(2ul, 100000000ul));
  app.add_option("--m", cfg.m, "Number of imputations")->check(CLI::Range(2ul, 100000ul));
  app.add_option("--iterations", cfg.iterations, "Chained-equations cycles")
      ->check(CLI::Range(1ul, 100000ul));
  app.add_option("--reps", cfg.reps, "Replications per missingness rate")
      ->check(CLI::Range(1ul, 100000000ul));
  app.add_option("--rates", rates_text, "Comma-separated missingness rates in (0,1)");
  app.add_option("--level", cfg.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", cfg.seed, "Master seed")->envname("MIPOOL_SEED");
  app.add_option("--rules", rules_text, "Rule sets to report")
      ->check(CLI::IsMember({"both", "conventional", "simplified"}));
  app.add_option("--out", opts.out_csv, "CSV output path (default: standard output)");
  app.add_option("--plot", opts.plot_svg, "SVG coverage plot path");
  app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1ul, 4096ul));
  app.add_flag("--quiet", opts.quiet, "Suppress progress on standard error");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    opts.show_help = true;
    opts.help_text = app.help();
    return opts;
  } catch (const CLI::ParseError& e) {
    throw Error(e.what());
  }

  if (!rates_text.empty()) cfg.miss_rates = parse_rate_list(rates_text);
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw Error("--level must lie strictly inside (0, 1)");
  if (rules_text == "conventional")
    opts.rules = RuleSelection::conventional;
  else if (rules_text == "simplified")
    opts.rules = RuleSelection::simplified;
  cfg.validate();
  return opts;
}

CliOptions parse_args(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_args(args);
}

std::vector<ConditionSummary> filter_rows(const std::vector<ConditionSummary>& rows,
                                          RuleSelection rules) {
  if (rules == RuleSelection::both) return rows;
  const PoolingRule keep =
      rules == RuleSelection::conventional ? PoolingRule::conventional : PoolingRule::simplified;
  std::vector<ConditionSummary> out;
  for (const auto& r : rows)
    if (r.rule == keep) out.push_back(r);
  return out;
}

}  // namespace mipool
