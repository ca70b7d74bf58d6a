"""Line-oriented ``key = value`` experiment configuration.

Example::

    # two-user MAC, nullspace regime
    kind = MAC
    K = 2
    M = 5
    N = 3
    NE = 2
    p_db = 30:60:5

Recognised keys: kind, K, M, N, NE, scheme, alpha, p_db, trials, seed,
eavesdroppers, out.  Defaults: scheme=auto, alpha=0.5, p_db=30:60:5,
trials=50, seed=0, eavesdroppers=1, no output file (CSV goes to stdout).
For ``kind = IC`` the keys K and N may be omitted (K=2, N=M).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .scenario import Kind, Scheme, SystemConfig, validate_config
from .secrecy import PowerPolicy

KEYS = ("kind", "K", "M", "N", "NE", "scheme", "alpha", "p_db", "trials", "seed", "eavesdroppers", "out")
DEFAULT_GRID = (30.0, 60.0, 5.0)


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig
    p_db: tuple = DEFAULT_GRID
    trials: int = 50
    seed: int = 0
    eavesdroppers: int = 1
    out: str | None = None

    @property
    def policy(self) -> PowerPolicy:
        return PowerPolicy.grid(*self.p_db, alpha=self.system.alpha)


def _int(value: str, key: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{key} must be an integer, got {value!r}", line) from None


def _float(value: str, key: str, line: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"{key} must be a number, got {value!r}", line) from None


def _grid(value: str, line: int) -> tuple:
    parts = value.split(":")
    if len(parts) != 3:
        raise ParseError(f"p_db must be start:stop:step, got {value!r}", line)
    start, stop, step = (_float(p, "p_db", line) for p in parts)
    if not start < stop:
        raise ParseError(f"p_db start {start:g} must be below stop {stop:g}", line)
    if step <= 0:
        raise ParseError("p_db step must be positive", line)
    return start, stop, step


def parse_config(text: str) -> ExperimentConfig:
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", lineno)
        if key in raw:
            raise ParseError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno)
        raw[key] = (value, lineno)

    def get(key, conv, default=None, required=False):
        if key not in raw:
            if required:
                raise ParseError(f"missing required key {key!r}")
            return default
        value, lineno = raw[key]
        return conv(value, key, lineno)

    def kind_conv(value, key, lineno):
        try:
            return Kind(value.upper())
        except ValueError:
            raise ParseError(f"kind must be MAC or IC, got {value!r}", lineno) from None

    def scheme_conv(value, key, lineno):
        try:
            return Scheme(value.lower())
        except ValueError:
            raise ParseError(f"unknown scheme {value!r}", lineno) from None

    kind = get("kind", kind_conv, required=True)
    M = get("M", _int, required=True)
    NE = get("NE", _int, required=True)
    if kind is Kind.MAC:
        K = get("K", _int, required=True)
        N = get("N", _int, required=True)
    else:
        K = get("K", _int, 2)
        N = get("N", _int, M)
    system = SystemConfig(
        kind, K, M, N, NE,
        alpha=get("alpha", _float, 0.5),
        scheme=get("scheme", scheme_conv, Scheme.AUTO),
    )
    trials = get("trials", _int, 50)
    if trials < 1:
        raise ParseError("trials must be >= 1", raw["trials"][1])
    eav = get("eavesdroppers", _int, 1)
    if eav < 1:
        raise ParseError("eavesdroppers must be >= 1", raw["eavesdroppers"][1])
    cfg = ExperimentConfig(
        system=system,
        p_db=get("p_db", lambda v, k, n: _grid(v, n), DEFAULT_GRID),
        trials=trials,
        seed=get("seed", _int, 0),
        eavesdroppers=eav,
        out=get("out", lambda v, k, n: v, None),
    )
    validate_config(system)
    return cfg


def format_config(cfg: ExperimentConfig) -> str:
    s = cfg.system
    lines = [
        f"kind = {s.kind.value}",
        f"K = {s.K}",
        f"M = {s.M}",
        f"N = {s.N}",
        f"NE = {s.NE}",
        f"scheme = {s.scheme.value}",
        f"alpha = {s.alpha!r}",
        "p_db = " + ":".join(repr(float(x)) for x in cfg.p_db),
        f"trials = {cfg.trials}",
        f"seed = {cfg.seed}",
        f"eavesdroppers = {cfg.eavesdroppers}",
    ]
    if cfg.out is not None:
        lines.append(f"out = {cfg.out}")
    return "\n".join(lines) + "\n"
