#include "mipool/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mipool/imputer.hpp"
#include "mipool/linalg.hpp"

namespace mipool {

void SimulationConfig::validate() const {
  if (n_pop < 2) throw Error("SimulationConfig: n_pop must be at least 2");
  if (mu.size() < 2) throw Error("SimulationConfig: need a covariate and at least one target");
  if (sigma.rows() != mu.size() || sigma.cols() != mu.size())
    throw Error("SimulationConfig: sigma must be k x k with k = length of mu");
  cholesky(sigma);
  if (miss_rates.empty()) throw Error("SimulationConfig: no missingness rates");
  for (double r : miss_rates)
    if (!(r > 0.0 && r < 1.0))
      throw Error("SimulationConfig: missingness rate " + std::to_string(r) + " outside (0, 1)");
  if (m < 2) throw Error("SimulationConfig: m must be at least 2");
  if (iterations < 1) throw Error("SimulationConfig: iterations must be at least 1");
  if (reps < 1) throw Error("SimulationConfig: reps must be at least 1");
  if (!(level > 0.0 && level < 1.0)) throw Error("SimulationConfig: level must lie in (0, 1)");
}

std::vector<std::string> SimulationConfig::column_names() const {
  std::vector<std::string> names{"X"};
  for (std::size_t j = 1; j < mu.size(); ++j) names.push_back("Y" + std::to_string(j));
  return names;
}

IncompleteDataset generate_population(const SimulationConfig& cfg, RngStream& rng) {
  if (cfg.n_pop < 1) throw Error("generate_population: n_pop must be positive");
  const Matrix chol = cholesky(cfg.sigma);
  if (cfg.mu.size() != chol.rows()) throw Error("generate_population: mu and sigma disagree");
  Matrix values(cfg.n_pop, cfg.mu.size());
  for (std::size_t r = 0; r < cfg.n_pop; ++r) {
    const auto draw = mvn_sample(cfg.mu, chol, rng);
    std::copy(draw.begin(), draw.end(), values.row(r).begin());
  }
  return IncompleteDataset::complete(std::move(values), cfg.column_names());
}

IncompleteDataset ampute_mcar(const IncompleteDataset& ds, const std::vector<std::size_t>& cols,
                              double rate, RngStream& rng) {
  if (!(rate > 0.0 && rate < 1.0))
    throw Error("ampute_mcar: rate " + std::to_string(rate) + " outside (0, 1)");
  std::vector<std::size_t> targets = cols;
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  Mask mask = ds.mask();
  for (std::size_t c : targets) {
    if (c >= ds.cols()) throw Error("ampute_mcar: column index out of range");
    for (std::size_t r = 0; r < ds.rows(); ++r)
      if (rng.uniform() < rate) mask.set(r, c, false);
  }
  return IncompleteDataset(ds.values(), std::move(mask), ds.column_names());
}

RngStream replication_stream(std::uint64_t seed, double rate, std::uint64_t rep_index,
                             std::uint64_t attempt) {
  const std::uint64_t rate_key = mix64(std::bit_cast<std::uint64_t>(rate));
  return RngStream(seed, mix64(rate_key ^ mix64(rep_index ^ mix64(attempt))));
}

ReplicationResult analyze_replication(const SimulationConfig& cfg, const IncompleteDataset& population,
                                      const IncompleteDataset& amputed, RngStream imputer_rng) {
  ImputerConfig icfg{cfg.m, cfg.iterations, imputer_rng};
  const ImputationStack stack = mice(amputed, icfg);
  const double nu_com = static_cast<double>(population.rows() - 1);

  ReplicationResult out;
  for (std::size_t col = 1; col < population.cols(); ++col) {
    VariableOutcome v;
    v.variable = population.column_names()[col];
    v.truth = mean_estimate(population.values(), col).q_hat;
    const RepeatedEstimates est = stack_estimates(stack, column_mean_analyzer(col));
    v.conventional = pool_conventional(est, nu_com, cfg.level);
    v.simplified = pool_simplified(est, cfg.level);
    v.conventional_covered = v.conventional.covers(v.truth);
    v.simplified_covered = v.simplified.covers(v.truth);
    out.variables.push_back(std::move(v));
  }
  return out;
}

ReplicationResult run_replication(const SimulationConfig& cfg, double rate, std::uint64_t rep_index) {
  std::vector<std::size_t> targets;
  for (std::size_t c = 1; c < cfg.mu.size(); ++c) targets.push_back(c);
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= kMaxReplicationRetries; ++attempt) {
    const RngStream base = replication_stream(cfg.seed, rate, rep_index, attempt);
    RngStream pop_rng = base.fork(0);
    RngStream amp_rng = base.fork(1);
    const IncompleteDataset population = generate_population(cfg, pop_rng);
    const IncompleteDataset amputed = ampute_mcar(population, targets, rate, amp_rng);
    try {
      ReplicationResult res = analyze_replication(cfg, population, amputed, base.fork(2));
      res.retries = attempt;
      return res;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw Error("replication " + std::to_string(rep_index) + " at rate " + std::to_string(rate) +
              " failed after " + std::to_string(kMaxReplicationRetries) + " retries: " + last_error);
}

std::vector<ConditionSummary> summarize_condition(double rate,
                                                  const std::vector<ReplicationResult>& reps) {
  if (reps.empty()) throw Error("summarize_condition: no replications");
  const std::size_t n_vars = reps.front().variables.size();
  const double n = static_cast<double>(reps.size());
  std::size_t retries = 0;
  for (const auto& rep : reps) retries += rep.retries;

  std::vector<ConditionSummary> rows;
  for (std::size_t v = 0; v < n_vars; ++v) {
    double bias_sum = 0.0;
    for (const auto& rep : reps) bias_sum += rep.variables[v].conventional.q_bar - rep.variables[v].truth;
    const double bias = bias_sum / n;
    double bias_ss = 0.0;
    for (const auto& rep : reps) {
      const double d = rep.variables[v].conventional.q_bar - rep.variables[v].truth - bias;
      bias_ss += d * d;
    }
    const double bias_se = reps.size() > 1 ? std::sqrt(bias_ss / (n - 1.0) / n) : 0.0;

    for (PoolingRule rule : {PoolingRule::conventional, PoolingRule::simplified}) {
      ConditionSummary s;
      s.variable = reps.front().variables[v].variable;
      s.pct_missing = rate;
      s.rule = rule;
      s.reps = reps.size();
      s.retries = retries;
      s.bias = bias;
      s.bias_se = bias_se;
      double r_sum = 0.0, nu_sum = 0.0, fmi_sum = 0.0, ciw_sum = 0.0, covered = 0.0;
      for (const auto& rep : reps) {
        const VariableOutcome& o = rep.variables[v];
        const PooledResult& p = rule == PoolingRule::conventional ? o.conventional : o.simplified;
        r_sum += p.r;
        nu_sum += p.nu;
        fmi_sum += p.fmi;
        ciw_sum += p.ci_width();
        const bool cov = rule == PoolingRule::conventional ? o.conventional_covered : o.simplified_covered;
        covered += cov ? 1.0 : 0.0;
      }
      s.avg_r = r_sum / n;
      s.avg_nu = nu_sum / n;
      s.avg_fmi = fmi_sum / n;
      s.avg_ciw = ciw_sum / n;
      s.coverage = covered / n;
      rows.push_back(std::move(s));
    }
  }
  return rows;
}

std::vector<ConditionSummary> run_study(const SimulationConfig& cfg, const ProgressCallback& progress) {
  cfg.validate();
  std::vector<double> rates = cfg.miss_rates;
  std::sort(rates.begin(), rates.end());
  rates.erase(std::unique(rates.begin(), rates.end()), rates.end());

  const std::size_t total = rates.size() * cfg.reps;
  std::vector<ReplicationResult> results(total);
  std::atomic<std::size_t> next{0};
  std::size_t completed = 0;
  std::mutex progress_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      try {
        results[job] = run_replication(cfg, rates[job / cfg.reps], job % cfg.reps);
      } catch (...) {
        std::lock_guard lock(progress_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
      std::lock_guard lock(progress_mutex);
      ++completed;
      if (progress && (completed % 100 == 0 || completed == total)) progress({completed, total});
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(cfg.threads, total));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::vector<ConditionSummary>> per_rate;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    std::vector<ReplicationResult> slice(
        std::make_move_iterator(results.begin() + static_cast<std::ptrdiff_t>(i * cfg.reps)),
        std::make_move_iterator(results.begin() + static_cast<std::ptrdiff_t>((i + 1) * cfg.reps)));
    per_rate.push_back(summarize_condition(rates[i], slice));
  }

  // per_rate[i] holds (variable, rule) pairs in variable-major order.
  std::vector<ConditionSummary> rows;
  const std::size_t per_var = 2;
  const std::size_t n_vars = per_rate.front().size() / per_var;
  for (std::size_t v = 0; v < n_vars; ++v)
    for (const auto& block : per_rate)
      for (std::size_t k = 0; k < per_var; ++k) rows.push_back(block[v * per_var + k]);
  return rows;
}

}  // namespace mipool
