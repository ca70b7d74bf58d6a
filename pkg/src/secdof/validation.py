"""Runtime invariant suite behind ``secdof validate``.

Each check returns ``(name, passed, detail)``.  The generic checks cover the
linear algebra kernel, the bound formulas and the binning code; the
configuration checks exercise the precoders and rates of one experiment.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterator

import numpy as np

from . import binning, jamming, secrecy
from . import matrixlab as ml
from .config import ExperimentConfig
from .scenario import SystemConfig, sample_channels, validate_config

Check = tuple[str, bool, str]


def _crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def check_linear_algebra(instances: int = 20, seed: int = 0) -> Iterator[Check]:
    rng = np.random.default_rng(seed)
    worst = {"rank_nullity": 0, "orthonormal": 0.0, "solve": 0.0, "intersect_sym": 0.0}
    for _ in range(instances):
        m, n = rng.integers(1, 7, size=2)
        r = rng.integers(0, min(m, n) + 1)
        A = _crandn(rng, m, r) @ _crandn(rng, r, n)
        Nb = ml.nullspace(A)
        worst["rank_nullity"] += ml.rank(A) + Nb.shape[1] != n
        if Nb.shape[1]:
            worst["orthonormal"] = max(worst["orthonormal"], np.linalg.norm(Nb.conj().T @ Nb - np.eye(Nb.shape[1])))
        S = _crandn(rng, 4, 4)
        X = ml.solve(S, B := _crandn(rng, 4, 2))
        res = np.linalg.norm(S @ X - B) / (np.linalg.norm(S) * np.linalg.norm(X) + np.linalg.norm(B))
        worst["solve"] = max(worst["solve"], res)
        P, Q = ml.orth(_crandn(rng, 4, 3)), ml.orth(_crandn(rng, 4, 3))
        worst["intersect_sym"] = max(worst["intersect_sym"], ml.subspace_residual(ml.intersect([P, Q]), ml.intersect([Q, P])))
    yield "rank + nullity = cols", worst["rank_nullity"] == 0, f"{worst['rank_nullity']} violations"
    yield "nullspace orthonormal", worst["orthonormal"] <= 1e-10, f"max {worst['orthonormal']:.2e}"
    yield "solve residual", worst["solve"] <= 1e-9, f"max {worst['solve']:.2e}"
    yield "intersect symmetric", worst["intersect_sym"] <= 1e-9, f"max {worst['intersect_sym']:.2e}"


def _valid_macs(kmax=4, amax=8) -> Iterator[SystemConfig]:
    for K, M, N in itertools.product(range(2, kmax + 1), range(1, amax + 1), range(1, amax + 1)):
        for NE in range(K, M, K):
            yield SystemConfig.mac(K, M, N, NE)


def check_bounds() -> Iterator[Check]:
    bad_partition = bad_sign = bad_mono = 0
    for cfg in _valid_macs():
        K, M, N, NE = cfg.K, cfg.M, cfg.N, cfg.NE
        hits = [M < N, N <= M < N + NE / K, M >= N + NE / K]
        bad_partition += sum(hits) != 1
        ub = secrecy.mac_upper_bound(cfg)
        bad_sign += ub < 0
        if NE + K < M:
            bad_mono += secrecy.mac_upper_bound(SystemConfig.mac(K, M, N, NE + K)) > ub
        bad_mono += secrecy.mac_upper_bound(SystemConfig.mac(K, M, N + 1, NE)) < ub
    yield "regime branches partition", bad_partition == 0, f"{bad_partition} violations"
    yield "upper bound nonnegative", bad_sign == 0, f"{bad_sign} violations"
    yield "upper bound monotone", bad_mono == 0, f"{bad_mono} violations"


def check_binning(seeds: int = 5) -> Iterator[Check]:
    bsc = binning.DiscreteChannel.bsc(0.3)
    noiseless = binning.DiscreteChannel.noiseless()
    in_range = round_trip = True
    for s in range(seeds):
        code = binning.build_code(4, 1.0, 0.5, [0.5, 0.5], s)
        h_cond, h = binning.equivocation(code, bsc)
        in_range &= -1e-12 <= h_cond <= h + 1e-12
        for w in range(code.bins):
            x = binning.encode(code, w, s)
            round_trip &= binning.decode(code, x, noiseless)[0] == w
    yield "0 <= H(W|Z) <= H(W)", bool(in_range), ""
    yield "noiseless decode round trip", bool(round_trip), ""


def check_experiment(exp: ExperimentConfig, trials: int = 20) -> Iterator[Check]:
    cfg = exp.system
    a = sample_channels(cfg, exp.seed, 0, exp.eavesdroppers)
    b = sample_channels(cfg, exp.seed, 0, exp.eavesdroppers)
    same = all(np.array_equal(x, y) for rx, ry in zip(a.H + a.G, b.H + b.G) for x, y in zip(rx, ry))
    yield "channel sampling deterministic", same, ""

    worst = {"unitarity": 0.0, "zero_forcing": 0.0, "alignment": 0.0}
    saturated = decodable = conserved = True
    for t in range(trials):
        ch = sample_channels(cfg, exp.seed, t, exp.eavesdroppers)
        pre, _ = jamming.build_precoder_set(cfg, ch)
        chk = jamming.check_precoders(ch, pre)
        for k in worst:
            worst[k] = max(worst[k], getattr(chk, k))
        saturated &= chk.eavesdropper_saturated
        decodable &= chk.decodable
        conserved &= all(u.shape[0] + kd == cfg.N for u, kd in zip(pre.U, chk.killed_dims))
    yield "precoders unitary", worst["unitarity"] <= 1e-9, f"max {worst['unitarity']:.2e}"
    yield "receiver nulls jamming", worst["zero_forcing"] <= 1e-8, f"max {worst['zero_forcing']:.2e}"
    yield "jamming aligned", worst["alignment"] <= 1e-8, f"max {worst['alignment']:.2e}"
    yield "eavesdropper fully jammed", bool(saturated), ""
    yield "messages decodable", bool(decodable), ""
    yield "receive dimensions conserved", bool(conserved), ""

    policy = secrecy.PowerPolicy((30.0, 40.0, 50.0, 60.0), cfg.alpha)
    curve, report = secrecy.sweep(cfg, policy, trials, exp.seed, exp.eavesdroppers)
    yield (
        "slope within upper bound",
        curve.slope <= report.upper_bound + 0.05,
        f"slope {curve.slope:.3f}, bound {report.upper_bound:g}",
    )
    leak_gap = curve.eav_rate[-1] - curve.eav_rate[1]
    yield "leakage saturates", leak_gap <= 0.2, f"leak(60 dB) - leak(40 dB) = {leak_gap:.4f}"
    yield "legitimate rate monotone", bool(np.all(np.diff(curve.legit_rate) >= 0)), ""


def run_all(exp: ExperimentConfig) -> list[Check]:
    """Run every check; raises :class:`Infeasible` for unplannable configs."""
    validate_config(exp.system)
    secrecy.achievable_sdof(exp.system)
    suites: list[Callable[[], Iterator[Check]]] = [
        check_linear_algebra,
        check_bounds,
        check_binning,
        lambda: check_experiment(exp),
    ]
    return [c for suite in suites for c in suite()]
