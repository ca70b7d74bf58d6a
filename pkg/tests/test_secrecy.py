import itertools
import math

import numpy as np
import pytest

from secdof import jamming, secrecy
from secdof.errors import Infeasible, InsufficientPoints, ValidationError
from secdof.scenario import ChannelSet, Regime, SystemConfig, classify_regime, sample_channels

GRID = secrecy.PowerPolicy.grid(30, 60, 5)


def valid_macs(kmax=4, amax=8):
    for K, M, N in itertools.product(range(2, kmax + 1), range(1, amax + 1), range(1, amax + 1)):
        for NE in range(K, M, K):
            yield SystemConfig.mac(K, M, N, NE)


# -- closed forms ----------------------------------------------------------
@pytest.mark.parametrize("args, value", [((2, 3, 5, 2), 4), ((2, 4, 4, 2), 3), ((2, 5, 3, 2), 3)])
def test_mac_bound_branches(args, value):
    assert secrecy.mac_upper_bound(SystemConfig.mac(*args)) == value


def test_ic_bound_examples():
    assert secrecy.ic_upper_bound(4, 2) == 3
    assert secrecy.ic_upper_bound(3, 2) == 2
    assert secrecy.ic_upper_bound(2, 1) == 1.5
    assert secrecy.upper_bound(SystemConfig.ic(4, 2)) == 3


def test_bound_nonnegative_and_monotone_exhaustive():
    for cfg in valid_macs():
        K, M, N, NE = cfg.K, cfg.M, cfg.N, cfg.NE
        ub = secrecy.mac_upper_bound(cfg)
        assert ub >= 0
        if NE + K < M:
            assert secrecy.mac_upper_bound(SystemConfig.mac(K, M, N, NE + K)) <= ub
        if N < 8:
            assert secrecy.mac_upper_bound(SystemConfig.mac(K, M, N + 1, NE)) >= ub


@pytest.mark.parametrize(
    "args, value", [((2, 3, 4, 2), 3), ((2, 5, 3, 2), 3), ((2, 4, 4, 2), 3), ((2, 5, 4, 4), 3)]
)
def test_achievable_examples(args, value):
    assert secrecy.achievable_sdof(SystemConfig.mac(*args)) == value


def test_achievable_ic():
    assert secrecy.achievable_sdof(SystemConfig.ic(4, 2)) == 3


def test_achievable_never_exceeds_bound_and_is_tight_where_claimed():
    checked = 0
    for cfg in valid_macs():
        try:
            ach = secrecy.achievable_sdof(cfg)
        except Infeasible:
            continue
        ub = secrecy.mac_upper_bound(cfg)
        assert ach <= ub + 1e-12
        regime = classify_regime(cfg)
        K, M, N, NE = cfg.K, cfg.M, cfg.N, cfg.NE
        if regime is Regime.ABOVE_N:
            assert ach == ub
        if regime is Regime.BELOW_N and jamming.plan_groups(cfg).L == K and NE <= K * (K * (M - N) + M):
            assert ach == ub
        checked += 1
    assert checked > 100


def test_achievable_infeasible_propagates():
    with pytest.raises(Infeasible):
        secrecy.achievable_sdof(SystemConfig.mac(2, 3, 5, 2))


# -- rates -----------------------------------------------------------------
def single_link(h=1.0, g=1.0):
    cfg = SystemConfig.mac(2, 1, 1, 1)
    one = np.array([[h]], dtype=complex)
    zero = np.zeros((1, 1), dtype=complex)
    ch = ChannelSet(cfg, [[one, zero]], [[np.array([[g]], dtype=complex), zero]])
    empty = np.zeros((1, 0), dtype=complex)
    alloc = jamming.StreamAllocation([1, 0], [0, 0], [0, 0])
    pre = jamming.PrecoderSet(
        [np.ones((1, 1), dtype=complex), empty], [empty, empty], [np.eye(1, dtype=complex)], alloc, None
    )
    return ch, pre, alloc


def test_single_stream_rate_is_log2_1_plus_p():
    ch, pre, alloc = single_link()
    legit, leak = secrecy.sum_secrecy_rate(ch, pre, alloc, 3.0, alpha=0.0)
    assert legit == pytest.approx(2.0, abs=1e-12)
    # an unjammed eavesdropper with the same gain learns everything
    assert leak == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("cfg", [SystemConfig.mac(2, 5, 3, 2), SystemConfig.mac(2, 3, 4, 2), SystemConfig.ic(4, 2)])
def test_vanishing_power(cfg):
    ch = sample_channels(cfg, 0, 0)
    pre, alloc = jamming.build_precoder_set(cfg, ch)
    legit, leak = secrecy.sum_secrecy_rate(ch, pre, alloc, 1e-6, cfg.alpha)
    assert 0 <= legit <= 1e-4 and 0 <= leak <= 1e-4


def test_leakage_saturates_nullspace_example():
    cfg = SystemConfig.mac(2, 5, 3, 2)
    policy = secrecy.PowerPolicy((40.0, 50.0, 60.0))
    curve, _ = secrecy.sweep(cfg, policy, 50, 0)
    assert curve.eav_rate[-1] - curve.eav_rate[0] <= 0.2
    assert secrecy.leakage_constant(curve) == pytest.approx(curve.eav_rate[-1] + 1.0)


def test_eavesdropper_rate_matches_pair():
    cfg = SystemConfig.mac(2, 3, 4, 2)
    ch = sample_channels(cfg, 0, 0)
    pre, alloc = jamming.build_precoder_set(cfg, ch)
    assert secrecy.eavesdropper_rate(ch, pre, alloc, 1e4, 0.5) == secrecy.sum_secrecy_rate(ch, pre, alloc, 1e4, 0.5)[1]


# -- slope fitting ---------------------------------------------------------
def test_fit_exact_line_and_flat():
    p = np.arange(30.0, 61.0, 5.0)
    x = p * math.log2(10) / 10
    slope, err = secrecy.fit_slope(p, 3 * x + 7)
    assert slope == pytest.approx(3.0, abs=1e-12) and err == pytest.approx(0.0, abs=1e-9)
    slope, _ = secrecy.fit_slope(p, np.full_like(p, 5.0))
    assert slope == pytest.approx(0.0, abs=1e-12)


def test_fit_ignores_low_snr_points():
    p = np.arange(0.0, 61.0, 5.0)
    x = p * math.log2(10) / 10
    rates = np.where(p >= 30, 2 * x, 0.0)
    assert secrecy.fit_slope(p, rates)[0] == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("p", [[30.0, 60.0], [30.0, 35.0, 40.0], [0.0, 10.0, 20.0, 40.0, 45.0]])
def test_fit_insufficient_points(p):
    with pytest.raises(InsufficientPoints):
        secrecy.fit_slope(p, np.zeros(len(p)))


def test_power_policy_validation():
    assert secrecy.PowerPolicy.grid(30, 60, 5).p_db == (30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0)
    with pytest.raises(ValidationError):
        secrecy.PowerPolicy((30.0, 40.0))
    with pytest.raises(ValidationError):
        secrecy.PowerPolicy((30.0, 30.0, 40.0))
    with pytest.raises(ValidationError):
        secrecy.PowerPolicy((30.0, 40.0, 50.0), alpha=0.0)


def test_baseline_single_stream_slope_is_one():
    slope, _ = secrecy.baseline_slope(GRID, 200, 0)
    assert slope == pytest.approx(1.0, abs=0.01)


# -- sweeps ----------------------------------------------------------------
@pytest.mark.parametrize(
    "cfg",
    [SystemConfig.mac(2, 5, 3, 2), SystemConfig.mac(2, 3, 4, 2), SystemConfig.mac(2, 4, 4, 2), SystemConfig.ic(4, 2)],
    ids=["nullspace", "aligned", "hybrid", "ic"],
)
def test_sweep_slope_matches_achievable(cfg):
    curve, report = secrecy.sweep(cfg, GRID, 50, 0)
    assert report.feasible
    assert curve.slope == pytest.approx(3.0, abs=0.1)
    assert curve.slope == pytest.approx(report.achievable_formula, abs=0.1)
    assert curve.slope <= report.upper_bound + 0.05
    assert np.all(np.diff(curve.legit_rate) >= 0)
    assert np.all(curve.sum_rate >= 0)
    assert curve.per_trial.shape == (50, 7)


def test_sweep_deterministic_single_trial():
    cfg = SystemConfig.mac(2, 3, 4, 2)
    a, _ = secrecy.sweep(cfg, GRID, 1, 42)
    b, _ = secrecy.sweep(cfg, GRID, 1, 42)
    assert a.points == b.points and a.slope == b.slope


def test_sweep_identical_across_worker_counts():
    cfg = SystemConfig.mac(2, 4, 4, 2)
    a, _ = secrecy.sweep(cfg, GRID, 12, 3, workers=1)
    b, _ = secrecy.sweep(cfg, GRID, 12, 3, workers=2)
    assert np.array_equal(a.per_trial, b.per_trial)
    assert a.points == b.points and a.slope == b.slope


def test_sweep_infeasible_carries_bound_only_report():
    cfg = SystemConfig.mac(2, 3, 5, 2)
    with pytest.raises(Infeasible) as info:
        secrecy.sweep(cfg, GRID, 5, 0)
    report = info.value.report
    assert report.feasible is False
    assert report.upper_bound == secrecy.mac_upper_bound(cfg) == 4
    assert report.simulated_slope is None and report.achievable_formula is None


def test_sweep_multiple_eavesdroppers():
    cfg = SystemConfig.mac(2, 3, 4, 2)
    curve, report = secrecy.sweep(cfg, GRID, 20, 0, eavesdroppers=3)
    assert curve.slope <= report.upper_bound + 0.05
    assert curve.eav_rate[-1] - curve.eav_rate[2] <= 0.2


def test_sweep_rejects_zero_trials():
    with pytest.raises(ValidationError):
        secrecy.sweep(SystemConfig.mac(2, 3, 4, 2), GRID, 0, 0)
