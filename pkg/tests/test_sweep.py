import pickle

import numpy as np
import pytest

import spinshield.sweep as sweep_mod
from spinshield import (
    EntanglementReport,
    SweepConfig,
    SweepError,
    run_sweep,
    summarize,
    trial_rng,
    trial_seed,
    x_max_schedule,
)
from spinshield.sweep import _mix64


# ---------------------------------------------------------------------------
# stream splitting (pinned as part of the output contract)


def test_mix64_golden_values():
    assert _mix64(0) == 16294208416658607535
    assert _mix64(1) == 10451216379200822465


def test_trial_seed_golden_values():
    assert trial_seed(0, 2, 1) == 2604956420638222821
    assert trial_seed(0, 2, 2) == 11978791933748687235
    assert trial_seed(123456789, 1000, 200) == 17262197685551615133
    # negative master seeds fold into the 64-bit domain
    assert trial_seed(-1, 4, 1) == 8658841118767523735


def test_trial_rng_streams_are_independent_and_reproducible():
    a1 = trial_rng(0, 10, 1).random(4)
    a2 = trial_rng(0, 10, 1).random(4)
    b = trial_rng(0, 10, 2).random(4)
    np.testing.assert_array_equal(a1, a2)
    assert not np.array_equal(a1, b)


# ---------------------------------------------------------------------------
# summarize


def test_summarize_single_sample():
    stats = summarize([EntanglementReport.from_measures(1.0, 1.0)])
    assert stats["mean_c"] == 1.0 and stats["std_c"] == 0.0
    assert stats["mean_tau"] == 1.0 and stats["std_tau"] == 0.0


def test_summarize_two_samples():
    reports = [
        EntanglementReport.from_measures(0.4, 0.9),
        EntanglementReport.from_measures(0.6, 0.9),
    ]
    stats = summarize(reports)
    assert stats["mean_c"] == pytest.approx(0.5, abs=1e-15)
    assert stats["std_c"] == pytest.approx(0.141421, abs=5e-7)
    assert stats["std_c"] == pytest.approx(np.sqrt(0.02), rel=1e-12)


def test_summarize_identical_samples_have_exactly_zero_std():
    r = EntanglementReport.from_measures(0.7317, 0.8123)
    stats = summarize([r] * 200)
    assert stats["std_c"] == 0.0
    assert stats["std_tau"] == 0.0
    assert stats["std_gap"] == 0.0


def test_summarize_rejects_empty():
    with pytest.raises(ValueError):
        summarize([])


# ---------------------------------------------------------------------------
# run_sweep


def test_single_trial_small_bound_keeps_concurrence_high():
    # two_s=4, n=3 puts the perturbation bound at 1/16
    assert x_max_schedule(4, 3) == pytest.approx(1 / 16)
    for seed in range(10):
        config = SweepConfig(two_s_values=(4,), n_values=(3,), trials=1, master_seed=seed)
        (point,) = run_sweep(config, workers=1)
        assert 0.99 < point.mean_c <= 1.0


def test_run_sweep_output_order_is_n_major():
    config = SweepConfig(two_s_values=(2, 4), n_values=(3, 1), trials=2)
    points = run_sweep(config, workers=1)
    assert [(p.n, p.two_s) for p in points] == [(1, 2), (1, 4), (3, 2), (3, 4)]


def test_run_sweep_monogamy_contract():
    config = SweepConfig(two_s_values=(2, 10), n_values=(1,), trials=25)
    for point in run_sweep(config, workers=1):
        assert point.min_monogamy_slack >= -1e-12
        assert 0.0 <= point.mean_tau <= 1.0


def test_run_sweep_deterministic_and_worker_independent():
    config = SweepConfig(two_s_values=(2, 4, 10), n_values=(1, 2), trials=20)
    serial = run_sweep(config, workers=1)
    again = run_sweep(config, workers=1)
    parallel = run_sweep(config, workers=2)
    assert serial == again
    assert serial == parallel


def test_run_sweep_shares_draws_across_exponents():
    # the same trial stream feeds every n, so at S=1 (equal bounds) the
    # aggregates coincide exactly
    config = SweepConfig(two_s_values=(2,), n_values=(1, 2, 3), trials=10)
    p1, p2, p3 = run_sweep(config, workers=1)
    assert p1.mean_c == p2.mean_c == p3.mean_c
    assert p1.mean_tau == p3.mean_tau


def test_run_sweep_oracle_crosscheck_abort_names_the_trial(monkeypatch):
    monkeypatch.setattr(sweep_mod, "ORACLE_CROSSCHECK_TOL", -1.0)
    config = SweepConfig(two_s_values=(2,), n_values=(1,), trials=3)
    with pytest.raises(SweepError) as err:
        run_sweep(config, workers=1)
    assert (err.value.two_s, err.value.n, err.value.trial) == (2, 1, 1)
    assert "two_s=2" in str(err.value) and "trial=1" in str(err.value)


def test_run_sweep_skips_crosscheck_above_gate():
    # identical results with the crosscheck disabled prove the closed form
    # alone feeds the statistics
    base = SweepConfig(two_s_values=(2,), n_values=(1,), trials=5)
    gated = SweepConfig(two_s_values=(2,), n_values=(1,), trials=5, oracle_crosscheck_max_dim=0)
    assert run_sweep(base, workers=1) == run_sweep(gated, workers=1)


def test_inset_gap_shrinks_with_spin_smoke():
    config = SweepConfig(two_s_values=(2, 10, 40), n_values=(2,), trials=50)
    points = run_sweep(config, workers=1)
    gaps = [p.mean_abs_gap for p in points]
    assert gaps[0] > gaps[1] > gaps[2]


def test_inset_gap_nonincreasing_on_default_grid():
    # default seed, default grid; at most one adjacent rise, below one
    # standard error of the difference
    by_n = {}
    for p in run_sweep(SweepConfig()):
        by_n.setdefault(p.n, []).append(p)
    for n, pts in by_n.items():
        rises = []
        for a, b in zip(pts, pts[1:]):
            if b.mean_abs_gap > a.mean_abs_gap:
                se = np.sqrt(a.std_gap**2 + b.std_gap**2) / np.sqrt(a.trials)
                rises.append((a.two_s, b.mean_abs_gap - a.mean_abs_gap, se))
        assert len(rises) <= 1, f"n={n}: {rises}"
        for _, rise, se in rises:
            assert rise < se


def test_sweep_error_is_picklable():
    err = SweepError(10, 2, 7, "boom")
    clone = pickle.loads(pickle.dumps(err))
    assert (clone.two_s, clone.n, clone.trial) == (10, 2, 7)
    assert "boom" in str(clone)


# ---------------------------------------------------------------------------
# config validation


@pytest.mark.parametrize(
    "kwargs",
    [
        {"two_s_values": ()},
        {"two_s_values": (0, 2)},
        {"two_s_values": (4, 2)},
        {"two_s_values": (2, 2)},
        {"n_values": ()},
        {"n_values": (4,)},
        {"trials": 0},
        {"c": (0, 0, 1)},
    ],
)
def test_config_rejects_invalid(kwargs):
    with pytest.raises(ValueError):
        SweepConfig(**kwargs)


def test_config_normalizes_n_order():
    config = SweepConfig(n_values=(3, 1))
    assert config.n_values == (1, 3)


def test_run_sweep_rejects_bad_worker_count():
    with pytest.raises(ValueError):
        run_sweep(SweepConfig(two_s_values=(2,), n_values=(1,), trials=1), workers=0)
