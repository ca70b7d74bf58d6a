"""Toy-scale Wyner wiretap codes built by random binning.

A code of length ``n`` holds ``2^(n R_t)`` codewords split into
``2^(n R_s)`` bins.  The secret picks the bin, the encoder picks a codeword
inside it uniformly at random, and the within-bin randomness (rate
``R_t - R_s``) is what confuses the eavesdropper.

Everything is small enough to enumerate, so decoding is exhaustive
maximum likelihood and the equivocation ``H(W|Z)`` is computed exactly
rather than estimated.

The link to the MIMO schemes is the rate rule: with main and eavesdropper
mutual informations ``I_main`` and ``I_eav`` one sets
``R_t = I_main - eps`` and ``R_s = I_main - I_eav - eps``
(:func:`design_rates`), so the within-bin rate covers the leakage.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, NonIntegerBinStructure, TooLargeToEnumerate

ENUMERATION_LIMIT = 10**7


@dataclass(frozen=True)
class DiscreteChannel:
    """Memoryless channel given by ``W[x, y] = p(y | x)``."""

    W: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        if W.ndim != 2 or np.any(W < 0) or not np.allclose(W.sum(axis=1), 1.0, atol=1e-12, rtol=0):
            raise ValueError("transition matrix must be row-stochastic")
        object.__setattr__(self, "W", W)

    @classmethod
    def bsc(cls, flip: float) -> "DiscreteChannel":
        return cls(np.array([[1 - flip, flip], [flip, 1 - flip]]))

    @classmethod
    def noiseless(cls, q: int = 2) -> "DiscreteChannel":
        return cls(np.eye(q))

    @classmethod
    def bec(cls, erasure: float) -> "DiscreteChannel":
        """Binary erasure channel; output 2 is the erasure symbol."""
        e = erasure
        return cls(np.array([[1 - e, 0.0, e], [0.0, 1 - e, e]]))

    @property
    def inputs(self) -> int:
        return self.W.shape[0]

    @property
    def outputs(self) -> int:
        return self.W.shape[1]

    def transmit(self, x, rng) -> np.ndarray:
        rng = np.random.default_rng(rng)
        cdf = np.cumsum(self.W[np.asarray(x)], axis=1)
        u = rng.random(len(x))[:, None]
        return np.minimum((u > cdf).sum(axis=1), self.outputs - 1)

    def mutual_information(self, input_dist) -> float:
        px = np.asarray(input_dist, dtype=float)
        joint = px[:, None] * self.W
        py = joint.sum(axis=0)
        return _entropy(py) - float(px @ np.array([_entropy(row) for row in self.W]))


@dataclass(frozen=True)
class WiretapCode:
    """``codewords[w, v]`` is codeword ``v`` of bin ``w``."""

    n: int
    R_t: float
    R_s: float
    alphabet: int
    codewords: np.ndarray

    @property
    def bins(self) -> int:
        return self.codewords.shape[0]

    @property
    def bin_size(self) -> int:
        return self.codewords.shape[1]

    @property
    def size(self) -> int:
        return self.bins * self.bin_size

    def flat(self) -> np.ndarray:
        return self.codewords.reshape(self.size, self.n)


def _entropy(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _exponent(n: int, rate: float, what: str) -> int:
    k = round(n * rate)
    if abs(n * rate - k) > 1e-9 or k < 0:
        raise NonIntegerBinStructure(f"n*{what} = {n * rate:g} is not a non-negative integer")
    return int(k)


def build_code(n: int, R_t: float, R_s: float, input_dist, seed, expurgate: bool = True) -> WiretapCode:
    """Draw a random-binning code.

    Codewords are drawn i.i.d. from ``input_dist`` and then dealt into bins
    in random order.  With ``expurgate`` (the default) repeated codewords are
    redrawn, so the legitimate receiver can tell every codeword apart; this
    needs ``2^(n R_t) <= |alphabet|^n``.
    """
    if R_s > R_t:
        raise NonIntegerBinStructure("secret rate exceeds total rate")
    k_t = _exponent(n, R_t, "R_t")
    k_s = _exponent(n, R_s, "R_s")
    px = np.asarray(input_dist, dtype=float)
    if np.any(px < 0) or abs(px.sum() - 1.0) > 1e-12:
        raise ValueError("input distribution must be a probability vector")
    q = px.size
    total = 2**k_t
    rng = np.random.default_rng(seed)
    if expurgate and total > q**n:
        raise ValueError(f"cannot draw {total} distinct words of length {n} over {q} symbols")
    if expurgate and 2 * total > q**n:
        # dense codebook: redrawing duplicates would take coupon-collector time,
        # so draw word indices sequentially without replacement instead
        all_words = _all_words(n, q)
        p_word = np.prod(px[all_words], axis=1)
        words = all_words[rng.choice(q**n, size=total, replace=False, p=p_word / p_word.sum())]
        return WiretapCode(n, R_t, R_s, q, words.reshape(2**k_s, 2 ** (k_t - k_s), n))
    words = rng.choice(q, size=(total, n), p=px)
    if expurgate:
        for _ in range(100_000):
            _, first = np.unique(words, axis=0, return_index=True)
            dup = np.setdiff1d(np.arange(total), first)
            if dup.size == 0:
                break
            words[dup] = rng.choice(q, size=(dup.size, n), p=px)
        else:
            raise RuntimeError("expurgation did not converge")
    words = words[rng.permutation(total)]
    return WiretapCode(n, R_t, R_s, q, words.reshape(2**k_s, 2 ** (k_t - k_s), n))


def encode(code: WiretapCode, w: int, seed) -> np.ndarray:
    """Uniformly chosen codeword of bin ``w``."""
    if not 0 <= w < code.bins:
        raise IndexOutOfRange(f"bin {w} outside 0..{code.bins - 1}")
    v = np.random.default_rng(seed).integers(code.bin_size)
    return code.codewords[w, v].copy()


def decode(code: WiretapCode, y, channel: DiscreteChannel) -> tuple[int, int]:
    """Exhaustive ML estimate of ``(bin, index within bin)``.

    Ties (including the all-impossible case) go to the lowest flat codeword
    index ``w * bin_size + v``.
    """
    y = np.asarray(y)
    if y.shape != (code.n,):
        raise ValueError(f"received word must have length {code.n}")
    with np.errstate(divide="ignore"):
        logW = np.log(channel.W)
    ll = logW[code.flat(), y[None, :]].sum(axis=1)
    best = int(np.argmax(ll))
    return divmod(best, code.bin_size)


def _all_words(n: int, q: int) -> np.ndarray:
    return np.array(list(itertools.product(range(q), repeat=n)), dtype=np.intp).reshape(-1, n)


def equivocation(code: WiretapCode, eav: DiscreteChannel) -> tuple[float, float]:
    """Exact ``(H(W|Z), H(W))`` in bits for a uniform secret ``W``."""
    n_out = eav.outputs**code.n
    if code.size * n_out > ENUMERATION_LIMIT:
        raise TooLargeToEnumerate(
            f"{code.size} codewords x {n_out} output words exceeds {ENUMERATION_LIMIT}"
        )
    Z = _all_words(code.n, eav.outputs)
    X = code.flat()
    p_zx = np.ones((code.size, Z.shape[0]))
    for t in range(code.n):
        p_zx *= eav.W[X[:, t]][:, Z[:, t]]
    p_wz = p_zx.reshape(code.bins, code.bin_size, -1).mean(axis=1) / code.bins
    h_w = float(np.log2(code.bins))
    h_w_given_z = _entropy(p_wz) - _entropy(p_wz.sum(axis=0))
    return min(max(h_w_given_z, 0.0), h_w), h_w


def secrecy_ratio(code: WiretapCode, eav: DiscreteChannel) -> float:
    h_cond, h = equivocation(code, eav)
    return 1.0 if h == 0 else h_cond / h


def best_code(n, R_t, R_s, input_dist, eav: DiscreteChannel, seeds) -> tuple[WiretapCode, float, int]:
    """Code with the largest equivocation ratio among ``seeds``."""
    best = None
    for s in seeds:
        code = build_code(n, R_t, R_s, input_dist, s)
        r = secrecy_ratio(code, eav)
        if best is None or r > best[1]:
            best = (code, r, s)
    return best


def design_rates(main: DiscreteChannel, eav: DiscreteChannel, input_dist, eps: float = 0.0) -> tuple[float, float]:
    """``(R_t, R_s)`` from the main and eavesdropper mutual informations."""
    i_main = main.mutual_information(input_dist)
    i_eav = eav.mutual_information(input_dist)
    return i_main - eps, max(i_main - i_eav - eps, 0.0)


def block_error_rate(code: WiretapCode, main: DiscreteChannel, blocks: int, seed) -> float:
    """Monte Carlo frequency of wrong ``(w, v)`` decisions."""
    rng = np.random.default_rng(seed)
    errors = 0
    for _ in range(blocks):
        w = int(rng.integers(code.bins))
        v = int(rng.integers(code.bin_size))
        y = main.transmit(code.codewords[w, v], rng)
        errors += decode(code, y, main) != (w, v)
    return errors / blocks
