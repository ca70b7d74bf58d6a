"""Secure-DoF bounds, secrecy-rate evaluation and high-SNR slope fits.

Rates are in bits per complex channel use and slopes are fitted against
``log2 P``, so one interference-free complex stream has slope 1.  This is
the complex-signal counterpart of the usual ``(1/2) log P`` real-signal
normalization; the closed-form bounds compare directly with it.
:func:`baseline_slope` checks the calibration on a single clean stream.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import jamming
from . import matrixlab as ml
from .errors import InsufficientPoints, Infeasible, ValidationError
from .scenario import (
    ChannelSet,
    Kind,
    Regime,
    SystemConfig,
    classify_regime,
    sample_channels,
    trial_rng,
    validate_config,
)

FIT_MIN_DB = 30.0
FIT_MIN_SPAN_DB = 20.0


@dataclass(frozen=True)
class PowerPolicy:
    p_db: tuple
    alpha: float = 0.5

    def __post_init__(self):
        p = tuple(float(x) for x in self.p_db)
        object.__setattr__(self, "p_db", p)
        if len(p) < 3:
            raise ValidationError("a power grid needs at least 3 points")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise ValidationError("power grid must be strictly increasing")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("alpha must lie in (0, 1)")

    @classmethod
    def grid(cls, start: float, stop: float, step: float, alpha: float = 0.5) -> "PowerPolicy":
        n = int(math.floor((stop - start) / step + 1e-9))
        return cls(tuple(start + k * step for k in range(n + 1)), alpha)

    @property
    def powers(self) -> np.ndarray:
        return 10.0 ** (np.asarray(self.p_db) / 10.0)


@dataclass
class RateCurve:
    """Trial-averaged rates on a power grid.

    ``sum_rate`` is the mean secrecy sum rate ``[legit - leak]^+``,
    ``eav_rate`` the mean worst-eavesdropper leakage.  ``per_trial`` keeps
    the secrecy rate of every trial (rows) for variance reporting.
    """

    p_db: np.ndarray
    sum_rate: np.ndarray
    eav_rate: np.ndarray
    legit_rate: np.ndarray
    trials: int
    per_trial: np.ndarray
    slope: float = float("nan")
    slope_stderr: float = float("nan")
    diagnostics: dict = field(default_factory=dict)

    @property
    def points(self) -> list[tuple]:
        return [
            (float(p), float(r), float(e), self.trials)
            for p, r, e in zip(self.p_db, self.sum_rate, self.eav_rate)
        ]


@dataclass
class SdofReport:
    upper_bound: float
    achievable_formula: float | None
    simulated_slope: float | None
    regime: Regime | None
    feasible: bool
    slope_stderr: float | None = None
    scheme: str | None = None
    reason: str | None = None


# -- closed forms ----------------------------------------------------------
def mac_upper_bound(cfg: SystemConfig) -> float:
    """Sum-SDoF upper bound of the K-user MIMO MAC (three branches)."""
    K, M, N, NE = cfg.K, cfg.M, cfg.N, cfg.NE
    per_user = Fraction(NE, K)
    regime = classify_regime(cfg)
    if regime is Regime.BELOW_N:
        value = min(Fraction(K * M - NE), N - per_user)
    elif regime is Regime.MIDDLE:
        value = M - per_user
    else:
        value = Fraction(N)
    return float(value)


def ic_upper_bound(M: int, NE: int) -> float:
    """Sum-SDoF of the two-user ``M x M`` interference channel."""
    return M - NE / 2


def upper_bound(cfg: SystemConfig) -> float:
    if cfg.kind is Kind.IC:
        return ic_upper_bound(cfg.M, cfg.NE)
    return mac_upper_bound(cfg)


def achievable_sdof(cfg: SystemConfig) -> float:
    """Secure DoF delivered by the jamming scheme chosen for ``cfg``.

    Raises :class:`Infeasible` when no alignment plan exists.
    """
    validate_config(cfg)
    return float(jamming.message_streams(cfg))


# -- rates -----------------------------------------------------------------
def _logdet(Q: np.ndarray) -> float:
    return 0.0 if Q.shape[0] == 0 else ml.logdet_psd(Q)


def sum_secrecy_rate(
    channels: ChannelSet,
    pre: jamming.PrecoderSet,
    alloc: jamming.StreamAllocation,
    P: float,
    alpha: float,
) -> tuple[float, float]:
    """Legitimate sum rate and worst-eavesdropper leakage, in bits.

    Each transmitter puts ``(1 - alpha) P`` uniformly on its message streams
    and ``alpha P`` uniformly on its jamming streams.  The legitimate rate is
    measured after the zero-forcing post-processor; the leakage treats the
    jamming as colored Gaussian noise,
    ``log2 det(Q_N + Q_S) - log2 det(Q_N)``.
    """
    cfg = channels.cfg
    s2 = channels.noise_var
    p_msg = [(1 - alpha) * P / d if d else 0.0 for d in alloc.d]
    p_jam = [alpha * P / alloc.jamming(i) if alloc.jamming(i) else 0.0 for i in range(cfg.K)]

    legit = 0.0
    for j, U in enumerate(pre.U):
        senders = [j] if cfg.kind is Kind.IC else range(cfg.K)
        Q = np.eye(U.shape[0], dtype=np.complex128)
        for i in senders:
            if alloc.d[i]:
                A = U @ channels.link(j, i) @ pre.V_L[i]
                Q += (p_msg[i] / s2) * (A @ A.conj().T)
        legit += _logdet(Q)

    leak = 0.0
    for G in channels.G:
        n_e = G[0].shape[0]
        QN = np.eye(n_e, dtype=np.complex128)
        QS = np.zeros((n_e, n_e), dtype=np.complex128)
        for i in range(cfg.K):
            if pre.V_J[i].shape[1]:
                B = G[i] @ pre.V_J[i]
                QN += (p_jam[i] / s2) * (B @ B.conj().T)
            if alloc.d[i]:
                A = G[i] @ pre.V_L[i]
                QS += (p_msg[i] / s2) * (A @ A.conj().T)
        leak = max(leak, _logdet(QN + QS) - _logdet(QN))
    return legit, max(leak, 0.0)


def eavesdropper_rate(channels, pre, alloc, P: float, alpha: float) -> float:
    """Worst-eavesdropper leakage alone (bits)."""
    return sum_secrecy_rate(channels, pre, alloc, P, alpha)[1]


def leakage_constant(curve: RateCurve, margin: float = 1.0) -> float:
    """Power-independent leakage budget: highest-power mean leakage plus ``margin`` bits.

    This is the within-bin rate a wiretap code must spend to hide the
    messages from a jammed eavesdropper.
    """
    return float(curve.eav_rate[-1]) + margin


def fit_slope(p_db, rates, min_db: float = FIT_MIN_DB) -> tuple[float, float]:
    """Least-squares slope of ``rates`` against ``log2 P`` above ``min_db``."""
    p_db = np.asarray(p_db, dtype=float)
    rates = np.asarray(rates, dtype=float)
    keep = p_db >= min_db
    x = p_db[keep] * math.log2(10.0) / 10.0
    y = rates[keep]
    if x.size < 3 or p_db[keep].max() - p_db[keep].min() < FIT_MIN_SPAN_DB:
        raise InsufficientPoints(
            f"need >= 3 points at or above {min_db} dB spanning {FIT_MIN_SPAN_DB} dB"
        )
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ (y - y.mean())) / sxx
    resid = y - y.mean() - slope * xc
    stderr = math.sqrt(float(resid @ resid) / (x.size - 2) / sxx)
    return slope, stderr


def sdof_slope(curve: RateCurve) -> tuple[float, float]:
    return fit_slope(curve.p_db, curve.sum_rate)


# -- Monte Carlo -----------------------------------------------------------
def _run_trials(cfg, p_db, alpha, seed, trials, eavesdroppers, tol):
    powers = 10.0 ** (np.asarray(p_db) / 10.0)
    legit = np.empty((len(trials), powers.size))
    leak = np.empty_like(legit)
    diag = {k: np.empty(len(trials)) for k in ("alignment", "zero_forcing", "unitarity")}
    flags = {k: np.empty(len(trials), dtype=bool) for k in ("eavesdropper_saturated", "decodable")}
    for row, t in enumerate(trials):
        channels = sample_channels(cfg, seed, t, eavesdroppers, tol)
        pre, alloc = jamming.build_precoder_set(cfg, channels, tol)
        chk = jamming.check_precoders(channels, pre, tol)
        diag["alignment"][row] = chk.alignment
        diag["zero_forcing"][row] = chk.zero_forcing
        diag["unitarity"][row] = chk.unitarity
        flags["eavesdropper_saturated"][row] = chk.eavesdropper_saturated
        flags["decodable"][row] = chk.decodable
        for col, P in enumerate(powers):
            legit[row, col], leak[row, col] = sum_secrecy_rate(channels, pre, alloc, P, alpha)
    return legit, leak, {**diag, **flags}


def _chunks(n: int, parts: int) -> list[range]:
    parts = max(1, min(parts, n))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [range(a, b) for a, b in zip(bounds, bounds[1:])]


def sweep(
    cfg: SystemConfig,
    policy: PowerPolicy,
    trials: int,
    seed: int,
    eavesdroppers: int = 1,
    workers: int = 1,
    tol: float = ml.DEFAULT_TOL,
) -> tuple[RateCurve, SdofReport]:
    """Average secrecy rates over ``trials`` channel draws and fit the slope.

    Trial ``t`` always uses the channels keyed by ``(seed, t)`` and results
    are reduced in trial order, so the output is identical for any
    ``workers``.  An infeasible configuration raises :class:`Infeasible`
    carrying a bound-only :class:`SdofReport` in its ``report`` attribute.
    """
    validate_config(cfg)
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    regime = classify_regime(cfg) if cfg.kind is Kind.MAC else None
    scheme = jamming.resolve_scheme(cfg)
    scheme_name = scheme.value if scheme else "ic-aligned"
    bound = upper_bound(cfg)
    try:
        achievable = achievable_sdof(cfg)
    except Infeasible as exc:
        exc.report = SdofReport(bound, None, None, regime, False, scheme=scheme_name, reason=str(exc))
        raise

    p_db = np.asarray(policy.p_db)
    args = (cfg, p_db, policy.alpha, seed)
    if workers <= 1:
        parts = [_run_trials(*args, range(trials), eavesdroppers, tol)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(_run_trials, *args, chunk, eavesdroppers, tol)
                for chunk in _chunks(trials, workers)
            ]
            parts = [f.result() for f in futs]
    legit = np.vstack([p[0] for p in parts])
    leak = np.vstack([p[1] for p in parts])
    diagnostics = {k: np.concatenate([p[2][k] for p in parts]) for k in parts[0][2]}

    secrecy = np.maximum(legit - leak, 0.0)
    curve = RateCurve(
        p_db=p_db,
        sum_rate=secrecy.mean(axis=0),
        eav_rate=leak.mean(axis=0),
        legit_rate=legit.mean(axis=0),
        trials=trials,
        per_trial=secrecy,
        diagnostics=diagnostics,
    )
    curve.slope, curve.slope_stderr = sdof_slope(curve)
    report = SdofReport(
        bound, achievable, curve.slope, regime, True, curve.slope_stderr, scheme_name
    )
    return curve, report


def baseline_slope(policy: PowerPolicy, trials: int = 50, seed: int = 0) -> tuple[float, float]:
    """Slope of a single interference-free complex Rayleigh stream."""
    gains = np.array([np.sum(trial_rng(seed, t).standard_normal(2) ** 2) / 2 for t in range(trials)])
    rates = np.log2(1.0 + np.outer(gains, policy.powers)).mean(axis=0)
    return fit_slope(policy.p_db, rates)
