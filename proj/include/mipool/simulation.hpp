#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mipool/dataset.hpp"
#include "mipool/matrix.hpp"
#include "mipool/pooling.hpp"
#include "mipool/rng.hpp"

namespace mipool {

// Finite-population coverage study. Column 0 (X) stays complete; every other
// column (Y1, Y2, ...) is amputed at the condition's rate.
struct SimulationConfig {
  std::size_t n_pop = 1000;
  std::vector<double> mu{1.0, 2.0, 3.0};
  Matrix sigma{{1.0, 0.1, 0.1}, {0.1, 1.0, 0.1}, {0.1, 0.1, 1.0}};
  std::vector<double> miss_rates{0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95};
  std::size_t m = 5;
  std::size_t iterations = 10;
  std::size_t reps = 10000;
  double level = 0.95;
  std::uint64_t seed = 20150101;
  // Worker count for run_study; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
  std::vector<std::string> column_names() const;
};

inline constexpr std::size_t kMaxReplicationRetries = 10;

IncompleteDataset generate_population(const SimulationConfig& cfg, RngStream& rng);

// Deletes each cell of the listed columns independently with probability
// `rate`. Listing a column twice is the same as listing it once.
IncompleteDataset ampute_mcar(const IncompleteDataset& ds, const std::vector<std::size_t>& cols,
                              double rate, RngStream& rng);

struct VariableOutcome {
  std::string variable;
  double truth = 0.0;
  PooledResult conventional;
  PooledResult simplified;
  bool conventional_covered = false;
  bool simplified_covered = false;
};

struct ReplicationResult {
  std::vector<VariableOutcome> variables;
  // Number of failed attempts (imputer errors) before the successful one.
  std::size_t retries = 0;
};

// Stream for attempt `attempt` of replication `rep_index` at `rate`.
RngStream replication_stream(std::uint64_t seed, double rate, std::uint64_t rep_index,
                             std::uint64_t attempt);

// Impute `amputed`, analyze each completion (mean, s^2 / n) and pool both
// ways against the pre-deletion means of `population`.
ReplicationResult analyze_replication(const SimulationConfig& cfg, const IncompleteDataset& population,
                                      const IncompleteDataset& amputed, RngStream imputer_rng);

ReplicationResult run_replication(const SimulationConfig& cfg, double rate, std::uint64_t rep_index);

struct ConditionSummary {
  std::string variable;
  double pct_missing = 0.0;
  PoolingRule rule = PoolingRule::conventional;
  double avg_r = 0.0;
  double avg_nu = 0.0;
  double avg_fmi = 0.0;
  double avg_ciw = 0.0;
  double coverage = 0.0;
  double bias = 0.0;
  // Monte Carlo standard error of `bias`.
  double bias_se = 0.0;
  std::size_t reps = 0;
  std::size_t retries = 0;
};

struct StudyProgress {
  std::size_t completed = 0;
  std::size_t total = 0;
};

using ProgressCallback = std::function<void(const StudyProgress&)>;

// Runs every (rate, replication) pair and aggregates per variable, rate and
// rule. Rows are ordered variable-major, then by ascending rate, then
// conventional before simplified. `progress` is called every 100
// replications, serialized across workers.
std::vector<ConditionSummary> run_study(const SimulationConfig& cfg,
                                        const ProgressCallback& progress = {});

// Aggregation of already computed replications for one rate (order matters
// only through floating-point summation, which is done in index order).
std::vector<ConditionSummary> summarize_condition(double rate,
                                                  const std::vector<ReplicationResult>& reps);

}  // namespace mipool
