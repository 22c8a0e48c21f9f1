#include <cstdio>
#include <exception>
#include <iostream>

#include "mipool/cli_options.hpp"
#include "mipool/report.hpp"
#include "mipool/simulation.hpp"

int main(int argc, char** argv) {
  using namespace mipool;
  try {
    const CliOptions opts = parse_args(argc, argv);
    if (opts.show_help) {
      std::cout << opts.help_text;
      return 0;
    }
    ProgressCallback progress;
    if (!opts.quiet) {
      progress = [](const StudyProgress& p) {
        std::fprintf(stderr, "mipool: %zu/%zu replications\n", p.completed, p.total);
      };
    }
    const auto rows = filter_rows(run_study(opts.config, progress), opts.rules);

    if (opts.out_csv.empty())
      write_report(rows, std::cout);
    else
      write_report(rows, opts.out_csv);
    if (!opts.plot_svg.empty())
      write_coverage_plot(rows, opts.plot_svg, opts.config.level, opts.selected_rules());

    double last_rate = -1.0;
    for (const auto& r : rows) {
      if (r.pct_missing == last_rate || r.retries == 0) continue;
      last_rate = r.pct_missing;
      std::fprintf(stderr, "mipool: rate %.2f needed %zu replication retries\n", r.pct_missing,
                   r.retries);
    }
    std::cout.flush();
    if (!std::cout) {
      std::fprintf(stderr, "mipool: failed writing to standard output\n");
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mipool: error: %s\n", e.what());
    return 1;
  }
}
