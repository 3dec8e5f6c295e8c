"""Multi-level polarization with per-bundle kernel lookup.

Each node of the polarization tree carries a degraded/upgraded pair that
brackets the exact channel.  Children come from transforming both ends
with the node's kernel and re-quantizing on the tile grid, so the state
space stays finite and identical states are merged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .channel import BmsChannel, merge
from .errors import CapacityError, DomainError, LookupFailure
from .exponents import GoodnessParams
from .kernels import Kernel, polar_transform
from .quantize import grid_size, pair_pavement, quantize_pair

MAX_LEAVES = 10**5


@dataclass(frozen=True)
class TrackedChannel:
    D: BmsChannel
    U: BmsChannel
    multiplicity: int
    key: str

    @property
    def H_D(self) -> float:
        return self.D.entropy

    @property
    def H_U(self) -> float:
        return self.U.entropy


@dataclass
class LevelStats:
    level: int
    leaves: int
    good: float
    bad: float
    unpolarized: float
    good_upper: float
    bad_upper: float
    mean_H_D: float
    mean_H_U: float
    histogram: list[tuple[float, float, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "leaves": self.leaves,
            "good": self.good,
            "bad": self.bad,
            "unpolarized": self.unpolarized,
            "good_upper": self.good_upper,
            "bad_upper": self.bad_upper,
            "mean_H_D": self.mean_H_D,
            "mean_H_U": self.mean_H_U,
            "histogram": [{"H_D": d, "H_U": u, "multiplicity": m} for d, u, m in self.histogram],
        }


@dataclass
class SimReport:
    ell: int
    n: int
    delta: float
    levels: list[LevelStats]

    def to_json(self) -> dict:
        return {"ell": self.ell, "n": self.n, "delta": self.delta, "levels": [s.to_json() for s in self.levels]}

    def to_csv(self) -> str:
        lines = ["level,H_D,H_U,multiplicity"]
        for s in self.levels:
            for d, u, m in s.histogram:
                lines.append(f"{s.level},{d!r},{u!r},{m}")
        return "\n".join(lines) + "\n"


def _state_key(D: BmsChannel, U: BmsChannel) -> tuple:
    r = lambda a: tuple(np.round(a, 12).tolist())  # noqa: E731
    return (r(D.p), r(D.mass), r(U.p), r(U.mass))


def _stats(level: int, nodes: list[TrackedChannel], delta: float) -> LevelStats:
    mult = np.array([t.multiplicity for t in nodes], dtype=float)
    hd = np.array([t.H_D for t in nodes])
    hu = np.array([t.H_U for t in nodes])
    total = mult.sum()
    good = float(mult[hd < delta].sum() / total)
    bad = float(mult[(hu > 1.0 - delta) & ~(hd < delta)].sum() / total)
    hist: dict[tuple[float, float], int] = {}
    for t in nodes:
        k = (round(t.H_D, 12), round(t.H_U, 12))
        hist[k] = hist.get(k, 0) + t.multiplicity
    return LevelStats(
        level=level,
        leaves=int(total),
        good=good,
        bad=bad,
        unpolarized=1.0 - good - bad,
        good_upper=float(mult[hu < delta].sum() / total),
        bad_upper=float(mult[hd > 1.0 - delta].sum() / total),
        mean_H_D=float(np.dot(mult, hd) / total),
        mean_H_U=float(np.dot(mult, hu) / total),
        histogram=[(d, u, m) for (d, u), m in sorted(hist.items())],
    )


def simulate(
    W0: BmsChannel,
    levels: int,
    kernel_table: Mapping[str, Kernel],
    params: GoodnessParams,
    delta: float = 0.01,
    atom_cap: int = 16,
    default_kernel: Optional[Kernel] = None,
    n: Optional[int] = None,
) -> SimReport:
    """Polarize ``W0`` for ``levels`` levels with bundle-dependent kernels.

    Nodes look up their kernel by pavement string in ``kernel_table`` and
    fall back to ``default_kernel``.  ``good`` counts leaves whose degraded
    entropy is below ``delta``, ``bad`` those whose upgraded entropy exceeds
    ``1 - delta``; ``good_upper`` and ``bad_upper`` use the opposite ends, so
    the exact fractions lie in ``[good, good_upper]`` and ``[bad, bad_upper]``.
    """
    if levels < 1:
        raise DomainError("levels must be >= 1")
    if not 0.0 < delta < 0.5:
        raise DomainError("delta must lie in (0, 1/2)")
    kernels = list(kernel_table.values()) + ([default_kernel] if default_kernel is not None else [])
    if not kernels:
        raise DomainError("kernel_table is empty and no default kernel given")
    ell = kernels[0].ell
    if any(k.ell != ell for k in kernels):
        raise DomainError("all kernels must share one size")
    if ell**levels > MAX_LEAVES:
        raise CapacityError(f"{ell}^{levels} leaves exceeds the budget of {MAX_LEAVES}")
    if n is None:
        n = grid_size(ell, params.mu)

    q = quantize_pair(W0, n)
    nodes = [TrackedChannel(q.D, q.U, 1, q.pavement.steps)]
    report = [_stats(0, nodes, delta)]
    for level in range(1, levels + 1):
        merged: dict[tuple, TrackedChannel] = {}
        cache: dict[tuple, list[tuple[BmsChannel, BmsChannel]]] = {}
        for node in nodes:
            G = kernel_table.get(node.key, default_kernel)
            if G is None:
                raise LookupFailure(f"no kernel for bundle {node.key!r} and no default kernel")
            ck = (_state_key(node.D, node.U), G.name)
            if ck not in cache:
                cache[ck] = _children(node, G, n, atom_cap)
            for D, U in cache[ck]:
                sk = _state_key(D, U)
                prev = merged.get(sk)
                if prev is None:
                    merged[sk] = TrackedChannel(D, U, node.multiplicity, pair_pavement(D, U, n).steps)
                else:
                    merged[sk] = TrackedChannel(D, U, prev.multiplicity + node.multiplicity, prev.key)
        nodes = [merged[k] for k in sorted(merged)]
        report.append(_stats(level, nodes, delta))
    return SimReport(ell=ell, n=n, delta=delta, levels=report)


def _children(node: TrackedChannel, G: Kernel, n: int, atom_cap: int):
    out = []
    for d, u in zip(polar_transform(node.D, G), polar_transform(node.U, G)):
        D = merge(quantize_pair(d, n).D, "degrade", atom_cap)
        U = merge(quantize_pair(u, n).U, "upgrade", atom_cap)
        out.append((D, U))
    return out


def bec_recursion(eps: float, levels: int) -> list[np.ndarray]:
    """Exact erasure probabilities of Arikan's recursion, level by level."""
    out = [np.array([eps])]
    cur = out[0]
    for _ in range(levels):
        cur = np.stack((2 * cur - cur**2, cur**2), axis=1).ravel()
        out.append(cur)
    return out
