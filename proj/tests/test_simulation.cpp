#include <doctest.h>

#include <cmath>

#include "mipool/simulation.hpp"
#include "oracles.hpp"

using namespace mipool;

namespace {

SimulationConfig small_config() {
  SimulationConfig cfg;
  cfg.n_pop = 200;
  cfg.reps = 3;
  cfg.iterations = 3;
  cfg.miss_rates = {0.5, 0.2};
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_SUITE("generate_population") {
  TEST_CASE("single member") {
    SimulationConfig cfg;
    cfg.n_pop = 1;
    RngStream rng(1, 1);
    const auto pop = generate_population(cfg, rng);
    CHECK(pop.rows() == 1);
    CHECK(pop.cols() == 3);
    CHECK(pop.mask().all_observed());
    CHECK(pop.column_names() == std::vector<std::string>{"X", "Y1", "Y2"});
  }

  TEST_CASE("grand mean of 200 populations") {
    SimulationConfig cfg;
    RngStream rng(2, 2);
    std::vector<double> sums(3, 0.0);
    for (int p = 0; p < 200; ++p) {
      const auto pop = generate_population(cfg, rng);
      for (std::size_t j = 0; j < 3; ++j) sums[j] += mean_estimate(pop.values(), j).q_hat;
    }
    const double se = std::sqrt(1.0 / (200.0 * 1000.0));
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(sums[j] / 200.0 - cfg.mu[j]) < 3 * se);
  }

  TEST_CASE("diagonal covariance gives uncorrelated columns") {
    SimulationConfig cfg;
    cfg.n_pop = 100000;
    cfg.sigma = Matrix{{1, 0, 0}, {0, 2, 0}, {0, 0, 0.5}};
    RngStream rng(3, 3);
    const auto pop = generate_population(cfg, rng);
    std::vector<std::vector<double>> cols(3);
    for (std::size_t i = 0; i < cfg.n_pop; ++i)
      for (std::size_t j = 0; j < 3; ++j) cols[j].push_back(pop.values()(i, j));
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) {
        const double ma = oracle::mean(cols[a]), mb = oracle::mean(cols[b]);
        double s = 0;
        for (std::size_t i = 0; i < cfg.n_pop; ++i) s += (cols[a][i] - ma) * (cols[b][i] - mb);
        const double corr = s / (cfg.n_pop - 1) / std::sqrt(oracle::variance(cols[a]) * oracle::variance(cols[b]));
        CHECK(std::abs(corr) < 0.01);
      }
  }

  TEST_CASE("non-SPD covariance") {
    SimulationConfig cfg;
    cfg.sigma = Matrix{{1, 2, 0}, {2, 1, 0}, {0, 0, 1}};
    RngStream rng(1, 1);
    CHECK_THROWS_AS(generate_population(cfg, rng), NumericalError);
    CHECK_THROWS_AS(cfg.validate(), NumericalError);
  }
}

TEST_SUITE("ampute_mcar") {
  TEST_CASE("realized rate concentrates") {
    SimulationConfig cfg;
    cfg.n_pop = 500000;
    RngStream rng(4, 4);
    const auto pop = generate_population(cfg, rng);
    for (double rate : {0.1, 0.5, 0.95}) {
      const auto amp = ampute_mcar(pop, {1, 2}, rate, rng);
      const double missing = 2.0 * cfg.n_pop - amp.mask().observed_count(1) - amp.mask().observed_count(2);
      CHECK(std::abs(missing / (2.0 * cfg.n_pop) - rate) < 0.002);
      CHECK(amp.mask().observed_count(0) == cfg.n_pop);
    }
  }

  TEST_CASE("listing a column twice is the same as once") {
    SimulationConfig cfg;
    cfg.n_pop = 300;
    RngStream rng(5, 5);
    const auto pop = generate_population(cfg, rng);
    RngStream a(6, 6), b(6, 6);
    CHECK(ampute_mcar(pop, {1, 2}, 0.3, a).mask() == ampute_mcar(pop, {2, 1, 2, 1}, 0.3, b).mask());
  }

  TEST_CASE("rate outside (0, 1)") {
    SimulationConfig cfg;
    cfg.n_pop = 10;
    RngStream rng(5, 5);
    const auto pop = generate_population(cfg, rng);
    CHECK_THROWS_AS(ampute_mcar(pop, {1}, 0.0, rng), Error);
    CHECK_THROWS_AS(ampute_mcar(pop, {1}, 1.0, rng), Error);
  }
}

TEST_SUITE("replications") {
  TEST_CASE("no missingness: simplified interval collapses onto the truth") {
    SimulationConfig cfg = small_config();
    RngStream rng(7, 7);
    const auto pop = generate_population(cfg, rng);
    const auto res = analyze_replication(cfg, pop, pop, RngStream(7, 8));
    REQUIRE(res.variables.size() == 2);
    for (const auto& v : res.variables) {
      CHECK(v.simplified.degenerate);
      CHECK(v.simplified.ci_low == v.truth);
      CHECK(v.simplified.ci_high == v.truth);
      CHECK(v.simplified_covered);
      CHECK(v.conventional_covered);
      CHECK(v.conventional.r == 0.0);
    }
  }

  TEST_CASE("a replication is reproducible bit for bit") {
    SimulationConfig cfg = small_config();
    const auto a = run_replication(cfg, 0.5, 17);
    const auto b = run_replication(cfg, 0.5, 17);
    for (std::size_t v = 0; v < 2; ++v) {
      CHECK(a.variables[v].truth == b.variables[v].truth);
      CHECK(a.variables[v].conventional.ci_low == b.variables[v].conventional.ci_low);
      CHECK(a.variables[v].conventional.nu == b.variables[v].conventional.nu);
      CHECK(a.variables[v].simplified.ci_high == b.variables[v].simplified.ci_high);
    }
    const auto c = run_replication(cfg, 0.5, 18);
    CHECK(a.variables[0].truth != c.variables[0].truth);
  }

  TEST_CASE("replication streams separate rate, index and attempt") {
    const auto s = replication_stream(1, 0.5, 3, 0);
    CHECK(s == replication_stream(1, 0.5, 3, 0));
    CHECK(!(s == replication_stream(1, 0.6, 3, 0)));
    CHECK(!(s == replication_stream(1, 0.5, 4, 0)));
    CHECK(!(s == replication_stream(1, 0.5, 3, 1)));
  }

  TEST_CASE("extreme missingness is retried, then reported") {
    SimulationConfig cfg;
    cfg.n_pop = 8;
    cfg.iterations = 1;
    // 4 observed rows are needed per column; at 0.6 that fails often.
    std::size_t retries = 0;
    std::size_t failures = 0;
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
      try {
        retries += run_replication(cfg, 0.6, rep).retries;
      } catch (const Error& e) {
        ++failures;
        CHECK(std::string(e.what()).find("retries") != std::string::npos);
      }
    }
    CHECK(retries > 0);
    cfg.n_pop = 5;
    CHECK_THROWS_WITH(run_replication(cfg, 0.99, 0), doctest::Contains("failed after 10 retries"));
  }

  TEST_CASE("simplified coverage at 50% missingness over 1000 replications") {
    SimulationConfig cfg;
    cfg.reps = 1000;
    cfg.miss_rates = {0.5};
    const auto rows = run_study(cfg);
    for (const auto& r : rows)
      if (r.rule == PoolingRule::simplified) {
        CHECK(r.coverage >= 0.93);
        CHECK(r.coverage <= 0.97);
      }
  }
}

TEST_SUITE("run_study") {
  TEST_CASE("one replication summarizes to itself") {
    SimulationConfig cfg = small_config();
    cfg.reps = 1;
    cfg.miss_rates = {0.3};
    const auto rows = run_study(cfg);
    const auto rep = run_replication(cfg, 0.3, 0);
    REQUIRE(rows.size() == 4);
    const auto& conv = rows[0];
    CHECK(conv.variable == "Y1");
    CHECK(conv.rule == PoolingRule::conventional);
    CHECK(conv.avg_r == rep.variables[0].conventional.r);
    CHECK(conv.avg_nu == rep.variables[0].conventional.nu);
    CHECK(conv.avg_fmi == rep.variables[0].conventional.fmi);
    CHECK(conv.avg_ciw == rep.variables[0].conventional.ci_width());
    CHECK(conv.coverage == (rep.variables[0].conventional_covered ? 1.0 : 0.0));
    CHECK(conv.bias == rep.variables[0].conventional.q_bar - rep.variables[0].truth);
    CHECK(std::isinf(rows[1].avg_r));
    CHECK(rows[1].avg_nu == 4.0);
  }

  TEST_CASE("rows are variable-major with ascending rates") {
    const auto rows = run_study(small_config());
    REQUIRE(rows.size() == 8);
    const char* vars[] = {"Y1", "Y1", "Y1", "Y1", "Y2", "Y2", "Y2", "Y2"};
    const double rates[] = {0.2, 0.2, 0.5, 0.5, 0.2, 0.2, 0.5, 0.5};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].variable == vars[i]);
      CHECK(rows[i].pct_missing == rates[i]);
      CHECK(rows[i].rule == (i % 2 == 0 ? PoolingRule::conventional : PoolingRule::simplified));
      CHECK(rows[i].coverage >= 0.0);
      CHECK(rows[i].coverage <= 1.0);
      CHECK(rows[i].avg_ciw >= 0.0);
    }
  }

  TEST_CASE("results do not depend on the worker count") {
    SimulationConfig cfg = small_config();
    cfg.reps = 7;
    const auto one = run_study(cfg);
    cfg.threads = 3;
    const auto three = run_study(cfg);
    REQUIRE(one.size() == three.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(one[i].avg_ciw == three[i].avg_ciw);
      CHECK(one[i].avg_nu == three[i].avg_nu);
      CHECK(one[i].bias == three[i].bias);
      CHECK(one[i].coverage == three[i].coverage);
    }
  }

  TEST_CASE("progress is reported") {
    SimulationConfig cfg = small_config();
    cfg.reps = 60;
    cfg.n_pop = 50;
    cfg.iterations = 1;
    std::vector<std::size_t> seen;
    run_study(cfg, [&](const StudyProgress& p) { seen.push_back(p.completed); });
    CHECK(seen == std::vector<std::size_t>{100, 120});
  }

  TEST_CASE("configuration validation") {
    SimulationConfig cfg = small_config();
    cfg.miss_rates = {0.5, 1.0};
    CHECK_THROWS_AS(run_study(cfg), Error);
    cfg = small_config();
    cfg.reps = 0;
    CHECK_THROWS_AS(run_study(cfg), Error);
    cfg = small_config();
    cfg.m = 1;
    CHECK_THROWS_AS(run_study(cfg), Error);
  }
}
