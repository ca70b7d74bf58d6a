"""Jamming and legitimate precoder synthesis.

Three MAC schemes are supported, one per antenna regime:

* nullspace jamming (``M >= N + NE/K``): every transmitter hides ``NE/K``
  noise streams in the kernel of its own channel to the receiver;
* aligned jamming (``M < N``): a group of ``L`` transmitters steers its noise
  into a common subspace of the receiver, so ``J`` streams waste only
  ``ceil(J/L)`` receive dimensions;
* hybrid (in between): ``M - N`` nullspace streams plus aligned streams for
  the remainder.

For the two-user interference channel both transmitters align their noise
at both receivers through an invariant subspace of the cross-channel
product.  In every case the noise fills all ``NE`` dimensions of any
eavesdropper while the legitimate receiver projects it out with a
zero-forcing post-processor ``U``.

Alignment is achieved at the level of spans (equal column spaces), which
is all that rates and slopes depend on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import matrixlab as ml
from .errors import (
    Infeasible,
    NoFreeSpace,
    NotApplicable,
    SchemeRegimeMismatch,
    TooManyStreams,
)
from .scenario import ChannelSet, Kind, Regime, Scheme, SystemConfig, classify_regime

TOL = ml.DEFAULT_TOL

CAPACITY = "NE <= L(L(M-N)+M)"
FREE_SPACE = "ceil(J/L) < N"


@dataclass
class StreamAllocation:
    d: list[int]
    j_null: list[int]
    j_aligned: list[int]

    def jamming(self, i: int) -> int:
        return self.j_null[i] + self.j_aligned[i]

    @property
    def total_jamming(self) -> int:
        return sum(self.j_null) + sum(self.j_aligned)

    @property
    def total_streams(self) -> int:
        return sum(self.d)


@dataclass
class GroupPlan:
    """Alignment grouping for the aligned part of the jamming.

    ``streams[g][k]`` is the number of aligned streams sent by member
    ``groups[g][k]``.  ``intersection_dims`` holds the generic dimension of
    each group's common receive subspace, ``max(0, N - L_g (N - M))`` capped
    at ``N``; the actual bases are computed per channel realization by
    :func:`group_intersections`.
    """

    L: int
    groups: list[list[int]]
    streams: list[list[int]]
    intersection_dims: list[int]

    @property
    def streams_per_group(self) -> list[int]:
        return [sum(s) for s in self.streams]

    @property
    def occupancy(self) -> list[int]:
        """Receive dimensions wasted by each group."""
        return [max(s) if s else 0 for s in self.streams]


@dataclass
class PrecoderSet:
    V_L: list[np.ndarray]
    V_J: list[np.ndarray]
    U: list[np.ndarray]
    alloc: StreamAllocation
    scheme: Scheme
    plan: GroupPlan | None = None
    intersections: list[np.ndarray] = field(default_factory=list)


# -- scheme selection ------------------------------------------------------
def resolve_scheme(cfg: SystemConfig) -> Scheme | None:
    """Scheme actually used for ``cfg``; ``None`` for the interference channel."""
    if cfg.kind is Kind.IC:
        return None
    regime = classify_regime(cfg)
    auto = {
        Regime.ABOVE_N: Scheme.NULLSPACE,
        Regime.BELOW_N: Scheme.ALIGNED,
        Regime.MIDDLE: Scheme.HYBRID,
    }[regime]
    if cfg.scheme is Scheme.AUTO:
        return auto
    if cfg.scheme is Scheme.ALIGNED:
        return Scheme.ALIGNED
    if cfg.scheme is not auto:
        raise SchemeRegimeMismatch(
            f"scheme {cfg.scheme.value} does not fit regime {regime.value} "
            f"(M={cfg.M}, N={cfg.N}, NE={cfg.NE}, K={cfg.K})"
        )
    return auto


def aligned_streams_needed(cfg: SystemConfig) -> int:
    scheme = resolve_scheme(cfg)
    if scheme is Scheme.ALIGNED:
        return cfg.NE
    if scheme is Scheme.HYBRID:
        return cfg.NE - cfg.K * (cfg.M - cfg.N)
    return 0


# -- building blocks -------------------------------------------------------
def nullspace_precoder(H_i, streams: int, tol: float = TOL) -> np.ndarray:
    """``streams`` orthonormal directions in the kernel of ``H_i``."""
    basis = ml.nullspace(H_i, tol)
    if streams > basis.shape[1]:
        raise TooManyStreams(
            f"{streams} nullspace streams requested, kernel has dimension {basis.shape[1]}"
        )
    return basis[:, :streams]


def plan_groups(cfg: SystemConfig, needed: int | None = None) -> GroupPlan:
    """Pick the alignment group size and split the aligned streams.

    The largest ``L <= K`` is chosen for which the per-group dimension count
    ``L (M - N) + M`` (capped at ``N``) can host ``ceil(needed / L)`` streams
    per member, i.e. ``L (L (M - N) + M) >= needed``, while leaving at least
    one receive dimension free.  A single group of the first ``L``
    transmitters carries every aligned stream; extra streams go to the
    lowest-indexed members.
    """
    if needed is None:
        needed = aligned_streams_needed(cfg)
    if needed <= 0:
        raise NotApplicable("no aligned jamming streams are needed for this configuration")
    K, M, N = cfg.K, cfg.M, cfg.N
    failures = []
    for L in range(K, 0, -1):
        count = L * (M - N) + M
        dim = min(count, N)
        per_member = math.ceil(needed / L)
        if L * dim < needed:
            why = f"L(M-N)+M = {count} < 0" if count < 0 else (
                f"capacity L(L(M-N)+M) = {L * dim} < {needed} aligned streams"
            )
            failures.append((L, CAPACITY, why))
        elif per_member >= N:
            failures.append(
                (L, FREE_SPACE, f"{per_member} aligned dimensions leave no receive space")
            )
        else:
            base, extra = divmod(needed, L)
            streams = [base + (k < extra) for k in range(L)]
            generic = max(0, min(N, N - L * (N - M)))
            return GroupPlan(L, [list(range(L))], [streams], [generic])
    binding = CAPACITY if any(f[1] == CAPACITY for f in failures) else FREE_SPACE
    detail = "; ".join(f"L={L}: {msg}" for L, _, msg in failures)
    raise Infeasible(
        f"no alignment group size satisfies the constraints ({detail})", binding=binding
    )


def group_intersections(channels: ChannelSet, plan: GroupPlan, tol: float = TOL) -> list[np.ndarray]:
    """Common receive subspace of every group's members."""
    out = []
    for members in plan.groups:
        spans = [ml.orth(channels.link(0, i), tol) for i in members]
        out.append(ml.intersect(spans, tol))
    return out


def _steer(H: np.ndarray, target: np.ndarray, tol: float) -> np.ndarray:
    """A precoder ``V`` with ``H V = target`` (``target`` inside ``span(H)``).

    Tall or square ``H``: solve the square block formed by ``M`` rows of
    ``H``.  The first ``M`` rows are used unless singular, in which case the
    rows are chosen by pivoted QR.  Wide ``H``: minimum-norm solution, which
    lies in the row space of ``H``.
    """
    n_rows, n_cols = H.shape
    if n_rows >= n_cols:
        rows = np.arange(n_cols)
        if ml.rank(H[rows], tol) < n_cols:
            _, _, piv = scipy.linalg.qr(H.T, pivoting=True)
            rows = np.sort(piv[:n_cols])
        return ml.solve(H[rows], target[rows], tol)
    return H.conj().T @ ml.solve(H @ H.conj().T, target, tol)


def aligned_precoders(channels: ChannelSet, plan: GroupPlan, tol: float = TOL) -> list[np.ndarray]:
    """Aligned jamming precoders, one ``M x j`` matrix per transmitter.

    Members of a group steer their noise into the leading columns of the
    group's intersection subspace, so every member's received noise spans a
    subspace of the same ``occupancy``-dimensional space.
    """
    return _aligned(channels, plan, tol)[0]


def _aligned(channels, plan, tol):
    cfg = channels.cfg
    V = [np.zeros((cfg.M, 0), dtype=np.complex128) for _ in range(cfg.K)]
    bases = group_intersections(channels, plan, tol)
    for members, streams, basis in zip(plan.groups, plan.streams, bases):
        if basis.shape[1] < max(streams):
            raise Infeasible(
                f"intersection has dimension {basis.shape[1]}, need {max(streams)}",
                binding="intersection dimension",
            )
        for i, c in zip(members, streams):
            if c == 0:
                continue
            V[i] = ml.orth(_steer(channels.link(0, i), basis[:, :c], tol), tol)
    return V, bases


def legitimate_precoders(
    channels: ChannelSet,
    V_J: list,
    alloc: StreamAllocation,
    tol: float = TOL,
    U: list | None = None,
) -> list[np.ndarray]:
    """Message precoders orthogonal to each transmitter's jamming.

    Inside the orthogonal complement of ``V_J[i]`` the ``d_i`` strongest
    right singular directions of the effective channel (``U H`` when the
    post-processor is given, else ``H``) are used, so no message stream is
    wasted on a direction the receiver cannot see.
    """
    cfg = channels.cfg
    out = []
    for i, (vj, d) in enumerate(zip(V_J, alloc.d)):
        comp = ml.complement(vj, tol)
        if d > comp.shape[1]:
            raise TooManyStreams(
                f"transmitter {i}: {d} message streams but only {comp.shape[1]} free dimensions"
            )
        rx = i if cfg.kind is Kind.IC else 0
        eff = channels.link(rx, i) @ comp
        if U is not None:
            eff = U[rx] @ eff
        if eff.shape[0] == 0:
            out.append(comp[:, :d])
            continue
        _, _, vh = np.linalg.svd(eff, full_matrices=True)
        out.append(comp @ vh[:d].conj().T)
    return out


def receiver_zero_forcer(
    channels: ChannelSet,
    V_J: list,
    extra_kill: list | None = None,
    tol: float = TOL,
    receiver: int = 0,
) -> np.ndarray:
    """Post-processor with orthonormal rows that annihilates received jamming.

    ``extra_kill`` lists further received spans (``N x k`` matrices) to null,
    e.g. the other user's message in the interference channel.
    """
    cols = [channels.link(receiver, i) @ v for i, v in enumerate(V_J)]
    cols += list(extra_kill or [])
    N = channels.cfg.N
    stacked = np.hstack(cols) if cols else np.zeros((N, 0), dtype=np.complex128)
    scale = max(np.linalg.norm(channels.link(receiver, i), 2) for i in range(len(V_J)))
    killed = ml.range_basis(stacked, tol, scale)
    if killed.shape[1] >= N:
        raise NoFreeSpace(f"unwanted signals span all {N} receive dimensions")
    return ml.complement(killed, tol).conj().T


def _round_robin(total: int, caps: list[int]) -> list[int]:
    d = [0] * len(caps)
    while sum(d) < total:
        moved = False
        for i, cap in enumerate(caps):
            if sum(d) < total and d[i] < cap:
                d[i] += 1
                moved = True
        if not moved:
            raise TooManyStreams(f"cannot place {total} streams under caps {caps}")
    return d


def _finish(cfg, channels, V_J, alloc, scheme, tol, plan=None, bases=()):
    U = [receiver_zero_forcer(channels, V_J, tol=tol)]
    V_L = legitimate_precoders(channels, V_J, alloc, tol, U=U)
    return PrecoderSet(V_L, V_J, U, alloc, scheme, plan, list(bases))


def message_streams(cfg: SystemConfig, plan: GroupPlan | None = None) -> int:
    """Total message streams the scheme for ``cfg`` carries."""
    if cfg.kind is Kind.IC:
        return cfg.M - cfg.NE // 2
    scheme = resolve_scheme(cfg)
    if scheme is Scheme.NULLSPACE:
        return min(cfg.N, cfg.K * cfg.M - cfg.NE)
    if plan is None:
        plan = plan_groups(cfg)
    return min(cfg.K * cfg.M - cfg.NE, cfg.N - sum(plan.occupancy))


def nullspace_scheme(cfg: SystemConfig, channels: ChannelSet, tol: float = TOL) -> PrecoderSet:
    per = cfg.NE // cfg.K
    V_J = [nullspace_precoder(channels.link(0, i), per, tol) for i in range(cfg.K)]
    caps = [cfg.M - per] * cfg.K
    alloc = StreamAllocation(_round_robin(message_streams(cfg), caps), [per] * cfg.K, [0] * cfg.K)
    return _finish(cfg, channels, V_J, alloc, Scheme.NULLSPACE, tol)


def aligned_scheme(cfg: SystemConfig, channels: ChannelSet, tol: float = TOL) -> PrecoderSet:
    plan = plan_groups(cfg, cfg.NE)
    V_J, bases = _aligned(channels, plan, tol)
    j_al = [v.shape[1] for v in V_J]
    caps = [cfg.M - j for j in j_al]
    d = _round_robin(min(cfg.K * cfg.M - cfg.NE, cfg.N - sum(plan.occupancy)), caps)
    alloc = StreamAllocation(d, [0] * cfg.K, j_al)
    return _finish(cfg, channels, V_J, alloc, Scheme.ALIGNED, tol, plan, bases)


def hybrid_precoders(cfg: SystemConfig, channels: ChannelSet, tol: float = TOL) -> PrecoderSet:
    """Nullspace jamming for ``M - N`` streams, aligned jamming for the rest."""
    if cfg.kind is not Kind.MAC or classify_regime(cfg) is not Regime.MIDDLE:
        raise NotApplicable("hybrid jamming needs N <= M < N + NE/K")
    n_null = cfg.M - cfg.N
    V_N = [nullspace_precoder(channels.link(0, i), n_null, tol) for i in range(cfg.K)]
    plan = plan_groups(cfg, cfg.NE - cfg.K * n_null)
    V_A, bases = _aligned(channels, plan, tol)
    V_J = [np.hstack([vn, va]) for vn, va in zip(V_N, V_A)]
    j_al = [v.shape[1] for v in V_A]
    caps = [cfg.M - n_null - j for j in j_al]
    d = _round_robin(min(cfg.K * cfg.M - cfg.NE, cfg.N - sum(plan.occupancy)), caps)
    alloc = StreamAllocation(d, [n_null] * cfg.K, j_al)
    return _finish(cfg, channels, V_J, alloc, Scheme.HYBRID, tol, plan, bases)


def ic_precoders(channels: ChannelSet, tol: float = TOL) -> PrecoderSet:
    """Aligned jamming and zero-forcing receivers for the 2-user IC.

    With ``H[j][i]`` the channel from transmitter ``i`` to receiver ``j``,
    alignment at receiver 1 gives ``V2 ~ H[0][1]^-1 H[0][0] V1`` and at
    receiver 2 ``V1 ~ H[1][0]^-1 H[1][1] V2``; both hold when ``V1`` spans an
    invariant subspace of ``T = H[1][0]^-1 H[1][1] H[0][1]^-1 H[0][0]``.
    """
    cfg = channels.cfg
    if cfg.kind is not Kind.IC:
        raise NotApplicable("ic_precoders needs an interference-channel configuration")
    H = channels.H
    k = cfg.NE // 2
    cross = ml.solve(H[0][1], H[0][0], tol)
    T = ml.solve(H[1][0], H[1][1] @ cross, tol)
    V1 = ml.invariant_subspace(T, k)
    V2 = ml.orth(cross @ V1, tol)
    V_J = [V1, V2]
    total = cfg.M - k
    d = [total - total // 2, total // 2]
    alloc = StreamAllocation(d, [0, 0], [k, k])
    V_L = legitimate_precoders(channels, V_J, alloc, tol)
    U = [
        receiver_zero_forcer(channels, V_J, [H[j][1 - j] @ V_L[1 - j]], tol, receiver=j)
        for j in range(2)
    ]
    return PrecoderSet(V_L, V_J, U, alloc, Scheme.AUTO, None, [])


def build_precoder_set(
    cfg: SystemConfig, channels: ChannelSet, tol: float = TOL
) -> tuple[PrecoderSet, StreamAllocation]:
    if cfg.kind is Kind.IC:
        pre = ic_precoders(channels, tol)
    else:
        scheme = resolve_scheme(cfg)
        build = {
            Scheme.NULLSPACE: nullspace_scheme,
            Scheme.ALIGNED: aligned_scheme,
            Scheme.HYBRID: hybrid_precoders,
        }[scheme]
        pre = build(cfg, channels, tol)
    return pre, pre.alloc


# -- diagnostics -----------------------------------------------------------
@dataclass
class PrecoderCheck:
    unitarity: float
    zero_forcing: float
    post_processor: float
    alignment: float
    eavesdropper_rank: list[int]
    eavesdropper_dims: list[int]
    killed_dims: list[int]
    message_rank: list[int]
    message_streams: list[int]

    @property
    def eavesdropper_saturated(self) -> bool:
        return self.eavesdropper_rank == self.eavesdropper_dims

    @property
    def decodable(self) -> bool:
        return self.message_rank == self.message_streams


def check_precoders(channels: ChannelSet, pre: PrecoderSet, tol: float = TOL) -> PrecoderCheck:
    """Measure every structural property a precoder set should have."""
    cfg = channels.cfg
    K = cfg.K
    unit = 0.0
    for vl, vj in zip(pre.V_L, pre.V_J):
        V = np.hstack([vl, vj])
        unit = max(unit, float(np.linalg.norm(V.conj().T @ V - np.eye(V.shape[1]))))

    zf = post = 0.0
    killed, msg_rank, msg_streams = [], [], []
    for j, U in enumerate(pre.U):
        post = max(post, float(np.linalg.norm(U @ U.conj().T - np.eye(U.shape[0]))))
        for i in range(K):
            zf = max(zf, float(np.linalg.norm(U @ channels.link(j, i) @ pre.V_J[i])))
        killed.append(cfg.N - U.shape[0])
        if cfg.kind is Kind.IC:
            other = 1 - j
            zf = max(zf, float(np.linalg.norm(U @ channels.link(j, other) @ pre.V_L[other])))
            own = [U @ channels.link(j, j) @ pre.V_L[j]]
            msg_streams.append(pre.alloc.d[j])
        else:
            own = [U @ channels.link(0, i) @ pre.V_L[i] for i in range(K)]
            msg_streams.append(sum(pre.alloc.d))
        stacked = np.hstack(own)
        msg_rank.append(ml.rank(stacked, tol) if stacked.size else 0)

    align = 0.0
    if cfg.kind is Kind.IC:
        for j in range(2):
            a, b = channels.link(j, 0) @ pre.V_J[0], channels.link(j, 1) @ pre.V_J[1]
            align = max(align, ml.subspace_residual(a, b, tol))
    elif pre.plan is not None:
        for members in pre.plan.groups:
            recv = []
            for i in members:
                cols = pre.V_J[i][:, pre.alloc.j_null[i]:]
                if cols.shape[1]:
                    recv.append(channels.link(0, i) @ cols)
            for a in range(len(recv)):
                for b in range(a + 1, len(recv)):
                    align = max(align, ml.subspace_residual(recv[a], recv[b], tol))

    eav_rank, eav_dims = [], []
    for G in channels.G:
        stacked = np.hstack([g @ v for g, v in zip(G, pre.V_J)])
        eav_rank.append(ml.rank(stacked, tol) if stacked.size else 0)
        eav_dims.append(min(G[0].shape[0], pre.alloc.total_jamming))
    return PrecoderCheck(unit, zf, post, align, eav_rank, eav_dims, killed, msg_rank, msg_streams)
