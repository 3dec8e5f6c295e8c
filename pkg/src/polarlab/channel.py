"""Binary memoryless symmetric channels as finite mixtures of BSCs.

A channel is stored as its BSC decomposition: atoms ``(p, mass)`` with
crossover ``p`` in ``[0, 1/2]``.  Most geometry in this package happens on
the entropy axis ``x = h2(p)``, where the channel is drawn as the cdf of its
mixing measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Literal

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

ATOM_TOL = 1e-12
MASS_TOL = 1e-12
# Atoms whose h2(p) lie within X_TOL of a query point count as sitting on it.
X_TOL = 1e-9
CDF_TOL = 1e-12


def binary_entropy(p: float) -> float:
    """Binary entropy in bits, for ``p`` in ``[0, 1/2]``."""
    if not 0.0 <= p <= 0.5:
        raise DomainError(f"binary_entropy: p={p!r} outside [0, 1/2]")
    if p == 0.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def h2(p) -> np.ndarray:
    """Vectorized binary entropy with 0 log 0 = 0; accepts p in [0, 1]."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    inner = (p > 0.0) & (p < 1.0)
    q = p[inner]
    out[inner] = -q * np.log2(q) - (1.0 - q) * np.log2(1.0 - q)
    return out


def inverse_binary_entropy(x: float) -> float:
    """Inverse of :func:`binary_entropy` on ``[0, 1/2]``, absolute error below 1e-12."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"inverse_binary_entropy: x={x!r} outside [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 0.5
    return brentq(lambda p: binary_entropy(p) - x, 0.0, 0.5, xtol=1e-15, maxiter=200)


@dataclass(frozen=True)
class Atom:
    p: float
    mass: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 0.5:
            raise DomainError(f"atom crossover {self.p!r} outside [0, 1/2]")
        if not self.mass > 0.0:
            raise DomainError(f"atom mass {self.mass!r} must be positive")


class BmsChannel:
    """Finite mixture of binary symmetric channels, kept in canonical form.

    Canonical form sorts atoms by crossover, merges atoms closer than
    ``ATOM_TOL`` and drops zero masses.  Instances are immutable.
    """

    def __init__(self, atoms: Iterable[Atom | tuple[float, float]]):
        pairs = [(a.p, a.mass) if isinstance(a, Atom) else (float(a[0]), float(a[1])) for a in atoms]
        if not pairs:
            raise DomainError("a channel needs at least one atom")
        p = np.array([x[0] for x in pairs], dtype=float)
        m = np.array([x[1] for x in pairs], dtype=float)
        if np.any(p < 0.0) or np.any(p > 0.5):
            raise DomainError("atom crossover outside [0, 1/2]")
        if np.any(m < 0.0):
            raise DomainError("negative atom mass")
        total = m.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise DomainError(f"atom masses sum to {total!r}, expected 1")
        self._set(*_canonical(p, m))

    def _set(self, p: np.ndarray, m: np.ndarray) -> None:
        p.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "_p", p)
        object.__setattr__(self, "_mass", m)

    @classmethod
    def from_arrays(cls, p, mass, normalize: bool = False) -> "BmsChannel":
        """Build from parallel arrays; crossovers above 1/2 are folded to ``1 - p``.

        ``normalize`` rescales the masses to sum to one, which absorbs the
        rounding drift of long enumerations.
        """
        p = np.asarray(p, dtype=float).ravel()
        m = np.asarray(mass, dtype=float).ravel()
        p = np.clip(np.minimum(p, 1.0 - p), 0.0, 0.5)
        keep = m > 0.0
        p, m = p[keep], m[keep]
        if p.size == 0:
            raise DomainError("a channel needs at least one atom")
        total = m.sum()
        if normalize:
            m = m / total
        elif abs(total - 1.0) > MASS_TOL:
            raise DomainError(f"atom masses sum to {total!r}, expected 1")
        obj = cls.__new__(cls)
        obj._set(*_canonical(p, m))
        return obj

    # constructors -----------------------------------------------------

    @classmethod
    def bsc(cls, p: float) -> "BmsChannel":
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"BSC crossover {p!r} outside [0, 1]")
        return cls([(min(p, 1.0 - p), 1.0)])

    @classmethod
    def bec(cls, eps: float) -> "BmsChannel":
        """Erasure channel as the mixture {(0, 1-eps), (1/2, eps)}."""
        if not 0.0 <= eps <= 1.0:
            raise DomainError(f"erasure probability {eps!r} outside [0, 1]")
        return cls([(0.0, 1.0 - eps), (0.5, eps)])

    @classmethod
    def noiseless(cls) -> "BmsChannel":
        return cls([(0.0, 1.0)])

    @classmethod
    def useless(cls) -> "BmsChannel":
        return cls([(0.5, 1.0)])

    # accessors --------------------------------------------------------

    @property
    def p(self) -> np.ndarray:
        return self._p

    @property
    def mass(self) -> np.ndarray:
        return self._mass

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return tuple(Atom(float(a), float(b)) for a, b in zip(self._p, self._mass))

    def __len__(self) -> int:
        return int(self._p.size)

    @cached_property
    def x(self) -> np.ndarray:
        """Atom positions on the entropy axis."""
        return h2(self._p)

    @cached_property
    def entropy(self) -> float:
        return float(np.dot(self._mass, self.x))

    @property
    def capacity(self) -> float:
        return 1.0 - self.entropy

    def __eq__(self, other) -> bool:
        if not isinstance(other, BmsChannel):
            return NotImplemented
        return self.isclose(other, tol=ATOM_TOL)

    def __hash__(self):
        return hash((tuple(np.round(self._p, 12)), tuple(np.round(self._mass, 12))))

    def isclose(self, other: "BmsChannel", tol: float = 1e-9) -> bool:
        if len(self) != len(other):
            return False
        return bool(
            np.all(np.abs(self._p - other._p) <= tol) and np.all(np.abs(self._mass - other._mass) <= tol)
        )

    def __repr__(self) -> str:
        body = ", ".join(f"({a:.6g}, {b:.6g})" for a, b in zip(self._p, self._mass))
        return f"BmsChannel([{body}])"

    # serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"atoms": [{"p": float(a), "mass": float(b)} for a, b in zip(self._p, self._mass)]}

    @classmethod
    def from_json(cls, obj: dict) -> "BmsChannel":
        """Accepts ``{"atoms": [{"p":, "mass":}, ...]}``, atoms as ``[p, mass]`` pairs, or ``{"bsc": p}`` / ``{"bec": eps}``."""
        if not isinstance(obj, dict):
            raise DomainError("channel JSON must be an object")
        if "bsc" in obj:
            return cls.bsc(float(obj["bsc"]))
        if "bec" in obj:
            return cls.bec(float(obj["bec"]))
        if "atoms" not in obj:
            raise DomainError("channel JSON needs 'atoms', 'bsc' or 'bec'")
        try:
            atoms = [(float(a["p"]), float(a["mass"])) if isinstance(a, dict) else (float(a[0]), float(a[1]))
                     for a in obj["atoms"]]
        except (KeyError, IndexError, TypeError) as exc:
            raise DomainError(f"malformed channel atom: {exc}") from None
        return cls(atoms)


def _canonical(p: np.ndarray, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keep = m > 0.0
    p, m = p[keep], m[keep]
    order = np.argsort(p, kind="stable")
    p, m = p[order], m[order]
    if p.size < 2:
        return p.copy(), m.copy()
    # cluster runs of atoms closer than ATOM_TOL to their predecessor
    starts = np.concatenate(([True], np.diff(p) >= ATOM_TOL))
    group = np.cumsum(starts) - 1
    mass = np.bincount(group, weights=m)
    pos = np.bincount(group, weights=m * p) / mass
    return np.clip(pos, 0.0, 0.5), mass


def channel_entropy(W: BmsChannel) -> float:
    return W.entropy


def capacity(W: BmsChannel) -> float:
    return W.capacity


def cdf(W: BmsChannel, x: float) -> float:
    """Mass of atoms with ``h2(p) <= x``; right-continuous step function of ``x``."""
    if not -X_TOL <= x <= 1.0 + X_TOL:
        raise DomainError(f"cdf: x={x!r} outside [0, 1]")
    if x >= 1.0:
        return 1.0
    return float(W.mass[W.x <= x + X_TOL].sum())


def cdf_left(W: BmsChannel, x: float) -> float:
    """Mass of atoms with ``h2(p) < x`` (left limit of :func:`cdf`)."""
    return float(W.mass[W.x < x - X_TOL].sum())


def dominates(U: BmsChannel, D: BmsChannel) -> bool:
    """Sufficient test for ``U`` being an upgrade of ``D``: the cdf of ``U`` stays above."""
    pts = np.concatenate((U.x, D.x))
    for x in pts:
        x = min(float(x), 1.0)
        if cdf(U, x) < cdf(D, x) - CDF_TOL:
            return False
    return True


def merge(W: BmsChannel, direction: Literal["degrade", "upgrade"], max_atoms: int) -> BmsChannel:
    """Shrink ``W`` to at most ``max_atoms`` atoms by merging adjacent pairs.

    Each step collapses the adjacent pair whose merge changes the entropy the
    least.  Degrading moves the pair's mass onto the noisier atom, upgrading
    onto the cleaner one, so the result is a degradation (resp. upgradation)
    of ``W`` in the cdf-dominance sense.
    """
    if max_atoms < 1:
        raise DomainError("max_atoms must be >= 1")
    if direction not in ("degrade", "upgrade"):
        raise DomainError(f"unknown merge direction {direction!r}")
    if len(W) <= max_atoms:
        return W
    p = list(W.p)
    m = list(W.mass)
    x = list(W.x)
    while len(p) > max_atoms:
        xs = np.asarray(x)
        ms = np.asarray(m)
        dx = np.diff(xs)
        cost = ms[:-1] * dx if direction == "degrade" else ms[1:] * dx
        k = int(np.argmin(cost))
        if direction == "degrade":
            m[k + 1] += m[k]
            del p[k], m[k], x[k]
        else:
            m[k] += m[k + 1]
            del p[k + 1], m[k + 1], x[k + 1]
    return BmsChannel.from_arrays(p, m, normalize=True)
