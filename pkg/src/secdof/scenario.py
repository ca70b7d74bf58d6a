"""System configurations, regime classification and channel sampling.

Channels are i.i.d. unit-variance circularly-symmetric complex Gaussian.
Every realization is keyed by ``(master_seed, trial)``: the generator is
numpy's PCG64 seeded from ``SeedSequence(master_seed, spawn_key=(trial,))``,
so any trial can be regenerated on its own, in any order, on any worker.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import matrixlab
from .errors import (
    IndivisibleStreams,
    InvalidAntennaCounts,
    NotApplicable,
    Singular,
    ValidationError,
)


class Kind(str, enum.Enum):
    MAC = "MAC"
    IC = "IC"


class Scheme(str, enum.Enum):
    AUTO = "auto"
    NULLSPACE = "nullspace"
    ALIGNED = "aligned"
    HYBRID = "hybrid"


class Regime(str, enum.Enum):
    BELOW_N = "BelowN"  # M < N
    MIDDLE = "Middle"  # N <= M < N + NE/K
    ABOVE_N = "AboveN"  # M >= N + NE/K


@dataclass(frozen=True)
class SystemConfig:
    """Antenna counts and scheme selection for one MAC or IC setup.

    ``NE`` is the largest eavesdropper antenna count.  For the interference
    channel ``K`` is 2 and ``N`` equals ``M``; use :meth:`ic` to build one.
    """

    kind: Kind
    K: int
    M: int
    N: int
    NE: int
    alpha: float = 0.5
    scheme: Scheme = Scheme.AUTO

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, Kind) else Kind(str(self.kind).upper())
        scheme = self.scheme if isinstance(self.scheme, Scheme) else Scheme(str(self.scheme).lower())
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "scheme", scheme)

    @classmethod
    def mac(cls, K, M, N, NE, alpha=0.5, scheme=Scheme.AUTO) -> "SystemConfig":
        return cls(Kind.MAC, K, M, N, NE, alpha, scheme)

    @classmethod
    def ic(cls, M, NE, alpha=0.5, scheme=Scheme.AUTO) -> "SystemConfig":
        return cls(Kind.IC, 2, M, M, NE, alpha, scheme)

    @property
    def receivers(self) -> int:
        return 2 if self.kind is Kind.IC else 1


def validate_config(cfg: SystemConfig) -> SystemConfig:
    """Return ``cfg`` unchanged if it is admissible, raise otherwise."""
    for name in ("K", "M", "N", "NE"):
        if not isinstance(getattr(cfg, name), (int, np.integer)):
            raise ValidationError(f"{name} must be an integer")
    if cfg.K < 2:
        raise InvalidAntennaCounts(f"need at least two transmitters, got K={cfg.K}")
    if cfg.M < 1 or cfg.N < 1:
        raise InvalidAntennaCounts("antenna counts must be positive")
    if cfg.NE < 1:
        raise InvalidAntennaCounts(f"need at least one eavesdropper antenna, got NE={cfg.NE}")
    if not 0.0 < cfg.alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {cfg.alpha}")
    if cfg.kind is Kind.IC:
        if cfg.K != 2 or cfg.N != cfg.M:
            raise InvalidAntennaCounts("the interference channel is 2-user with N = M")
        if cfg.NE % 2:
            raise IndivisibleStreams(
                f"NE={cfg.NE} is odd: splitting jamming between two users needs "
                "fractional streams (real interference alignment is not supported)"
            )
        if cfg.scheme is not Scheme.AUTO:
            raise ValidationError("the interference channel only supports scheme=auto")
    elif cfg.NE % cfg.K:
        raise IndivisibleStreams(
            f"K={cfg.K} does not divide NE={cfg.NE}: per-user jamming would be "
            "fractional (real interference alignment is not supported)"
        )
    # checked after divisibility so that a fractional split is the reported cause
    if cfg.NE >= cfg.M:
        raise InvalidAntennaCounts(
            f"eavesdropper antennas must satisfy NE < M, got NE={cfg.NE}, M={cfg.M}"
        )
    return cfg


def classify_regime(cfg: SystemConfig) -> Regime:
    if cfg.kind is not Kind.MAC:
        raise NotApplicable("regimes are defined for the MAC only")
    # integer form of M >= N + NE/K
    if cfg.M < cfg.N:
        return Regime.BELOW_N
    if cfg.K * cfg.M < cfg.K * cfg.N + cfg.NE:
        return Regime.MIDDLE
    return Regime.ABOVE_N


@dataclass
class ChannelSet:
    """One realization of every link.

    ``H[j][i]`` is the ``N x M`` channel from transmitter ``i`` to legitimate
    receiver ``j`` (a single receiver for the MAC).  ``G[e][i]`` is the channel
    from transmitter ``i`` to eavesdropper ``e``; eavesdropper 0 always has
    exactly ``NE`` antennas.
    """

    cfg: SystemConfig
    H: list
    G: list
    noise_var: float = 1.0
    seed: tuple = field(default=(None, None))

    def link(self, rx: int, tx: int) -> np.ndarray:
        return self.H[rx][tx]

    @property
    def eavesdroppers(self) -> int:
        return len(self.G)


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.PCG64(ss))


def sample_channels(
    cfg: SystemConfig,
    master_seed: int,
    trial: int,
    eavesdroppers: int = 1,
    tol: float = matrixlab.DEFAULT_TOL,
) -> ChannelSet:
    """Draw the channel realization for ``trial`` under ``master_seed``.

    Extra eavesdroppers beyond the first get a uniformly drawn antenna
    count in ``1..NE``.
    """
    if eavesdroppers < 1:
        raise ValueError("need at least one eavesdropper")
    rng = trial_rng(master_seed, trial)
    H = [
        [_cn(rng, (cfg.N, cfg.M)) for _ in range(cfg.K)]
        for _ in range(cfg.receivers)
    ]
    counts = [cfg.NE] + [int(rng.integers(1, cfg.NE + 1)) for _ in range(eavesdroppers - 1)]
    G = [[_cn(rng, (ne, cfg.M)) for _ in range(cfg.K)] for ne in counts]
    for mat in [m for row in H for m in row] + [m for row in G for m in row]:
        if matrixlab.rank(mat, tol) < min(mat.shape):
            raise Singular("sampled a rank-deficient channel")
    return ChannelSet(cfg, H, G, 1.0, (master_seed, trial))
