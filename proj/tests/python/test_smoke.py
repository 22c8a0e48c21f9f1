import math

import numpy as np
import pytest

import mipool


def test_pooling_rules():
    conv = mipool.pool_conventional([1.0, 2.0, 3.0], [0.5, 0.5, 0.5], nu_com=1e6)
    assert conv.q_bar == 2.0
    assert conv.b == 1.0
    assert conv.t == pytest.approx(11.0 / 6.0)
    assert conv.r == pytest.approx(8.0 / 3.0)
    assert conv.rule == mipool.PoolingRule.conventional

    simp = mipool.pool_simplified([1.0, 2.0, 3.0])
    assert simp.t == pytest.approx(4.0 / 3.0)
    assert simp.nu == 2.0
    assert math.isinf(simp.r)
    assert simp.ci_low < 2.0 < simp.ci_high

    degenerate = mipool.pool_simplified([4.0, 4.0])
    assert degenerate.degenerate
    assert degenerate.ci_low == degenerate.ci_high == 4.0


def test_errors_surface_as_value_error():
    with pytest.raises(ValueError):
        mipool.pool_simplified([1.0])
    with pytest.raises(ValueError):
        mipool.t_quantile(1.5, 4.0)


def test_numeric_kernels():
    assert mipool.t_quantile(0.975, 4.0) == pytest.approx(2.7764451052, abs=1e-8)
    sigma = np.array([[1.0, 0.1, 0.1], [0.1, 1.0, 0.1], [0.1, 0.1, 1.0]])
    chol = mipool.cholesky(sigma)
    np.testing.assert_allclose(chol @ chol.T, sigma, atol=1e-12)
    assert mipool.barnard_rubin_df(5, 1.2, 0.545, 999.0) == pytest.approx(13.057460957559173)


def test_mice_preserves_observed_cells():
    rng = np.random.default_rng(1)
    x = rng.normal(size=200)
    y = 1.0 + 0.5 * x + rng.normal(size=200)
    data = np.column_stack([x, y])
    data[::4, 1] = np.nan
    completions = mipool.mice(data, m=3, iterations=5, seed=11)
    assert len(completions) == 3
    observed = ~np.isnan(data)
    for c in completions:
        assert c.shape == data.shape
        np.testing.assert_array_equal(c[observed], data[observed])
        assert not np.isnan(c).any()
    assert not np.array_equal(completions[0], completions[1])
    again = mipool.mice(data, m=3, iterations=5, seed=11)
    np.testing.assert_array_equal(again[2], completions[2])


def test_small_study():
    cfg = mipool.SimulationConfig()
    cfg.n_pop = 200
    cfg.reps = 20
    cfg.iterations = 3
    cfg.miss_rates = [0.3]
    rows = mipool.run_study(cfg)
    assert [(r.variable, r.rule) for r in rows] == [
        ("Y1", mipool.PoolingRule.conventional),
        ("Y1", mipool.PoolingRule.simplified),
        ("Y2", mipool.PoolingRule.conventional),
        ("Y2", mipool.PoolingRule.simplified),
    ]
    csv = mipool.report_csv(rows)
    assert csv.splitlines()[0] == "variable,pct_missing,rule,r,nu,fmi,ciw,cov,bias,reps"
    assert ",simplified,Inf,2.0000," not in csv
    assert ",simplified,Inf,4.0000," in csv
