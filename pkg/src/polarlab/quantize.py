"""Tile-grid quantization of channels and enumeration of pavements.

The unit square ``[0, 1]^2`` (entropy axis ``x`` against cdf value) is cut
into ``n x n`` tiles.  A channel's cdf is pushed down onto the grid to get a
degraded channel ``D`` and up to get an upgraded channel ``U``; the tiles
between the two staircases form a pavement, and every pavement names one
bundle of channels.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .channel import BmsChannel, cdf, cdf_left, dominates, inverse_binary_entropy
from .errors import CapacityError, DomainError

MAX_ENUM_N = 14
# Slack when rounding n * cdf to an integer; masses are sums of floats.
ROUND_TOL = 1e-9

RIGHT, UP, DIAG = "R", "U", "X"


def grid_size(ell: int, mu: float) -> int:
    """Smallest integer strictly greater than ``ell ** (1/mu)``."""
    if not math.isfinite(mu) or mu <= 0:
        raise DomainError(f"mu must be a finite positive number, got {mu!r}")
    if ell < 2:
        raise DomainError(f"ell must be >= 2, got {ell!r}")
    root = ell ** (1.0 / mu)
    nearest = round(root)
    if math.isclose(root, nearest, rel_tol=1e-12, abs_tol=0.0):
        return int(nearest) + 1
    return math.floor(root) + 1


@dataclass(frozen=True)
class Grid:
    ell: int
    mu: float
    n: int

    @classmethod
    def of(cls, ell: int, mu: float) -> "Grid":
        return cls(ell, mu, grid_size(ell, mu))


@lru_cache(maxsize=64)
def grid_crossovers(n: int) -> tuple[float, ...]:
    """Crossover probabilities ``h2^{-1}(k/n)`` for ``k = 0..n``."""
    return tuple(inverse_binary_entropy(k / n) for k in range(n + 1))


@dataclass(frozen=True, order=True)
class Pavement:
    """Monotone tile path from tile (0, 0) to tile (n-1, n-1).

    ``steps`` is a string over ``R`` (right), ``U`` (up) and, for
    vertex-connected paths only, ``X`` (diagonal).
    """

    n: int
    steps: str

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("pavement grid side must be >= 1")
        bad = set(self.steps) - {RIGHT, UP, DIAG}
        if bad:
            raise DomainError(f"pavement steps contain {sorted(bad)}")
        d = self.steps.count(DIAG)
        if self.steps.count(RIGHT) + d != self.n - 1 or self.steps.count(UP) + d != self.n - 1:
            raise DomainError(f"steps {self.steps!r} do not join (0,0) to ({self.n - 1},{self.n - 1})")

    @property
    def edge_connected(self) -> bool:
        return DIAG not in self.steps

    def tiles(self) -> list[tuple[int, int]]:
        a = r = 0
        out = [(0, 0)]
        for s in self.steps:
            if s != UP:
                a += 1
            if s != RIGHT:
                r += 1
            out.append((a, r))
        return out

    def column_ranges(self) -> list[tuple[int, int]]:
        """Lowest and highest occupied row in each column."""
        lo = [self.n] * self.n
        hi = [-1] * self.n
        for a, r in self.tiles():
            lo[a] = min(lo[a], r)
            hi[a] = max(hi[a], r)
        return list(zip(lo, hi))

    def __str__(self) -> str:
        return self.steps

    @classmethod
    def parse(cls, steps: str, n: Optional[int] = None) -> "Pavement":
        steps = steps.strip().upper()
        if n is None:
            n = steps.count(RIGHT) + steps.count(DIAG) + 1
        return cls(n, steps)


@dataclass(frozen=True)
class Bundle:
    """Channels sandwiched between ``U`` (upgraded) and ``D`` (degraded).

    ``pavement`` is ``None`` for bundles built directly from a channel pair.
    """

    D: BmsChannel
    U: BmsChannel
    pavement: Optional[Pavement] = None
    label: Optional[str] = None

    @property
    def key(self) -> str:
        if self.pavement is not None:
            return self.pavement.steps
        return self.label or "custom"

    @property
    def gap(self) -> float:
        return self.D.entropy - self.U.entropy

    def contains(self, W: BmsChannel) -> bool:
        return dominates(self.U, W) and dominates(W, self.D)

    def to_json(self) -> dict:
        out = {"key": self.key, "D": self.D.to_json(), "U": self.U.to_json()}
        if self.pavement is not None:
            out["n"] = self.pavement.n
            out["pavement"] = self.pavement.steps
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Bundle":
        if "pavement" in obj and "D" not in obj:
            return bundle_endpoints(Pavement.parse(obj["pavement"], obj.get("n")))
        pav = Pavement.parse(obj["pavement"], obj.get("n")) if "pavement" in obj else None
        return cls(
            D=BmsChannel.from_json(obj["D"]),
            U=BmsChannel.from_json(obj["U"]),
            pavement=pav,
            label=obj.get("key") if pav is None else None,
        )


class QuantizedPair(NamedTuple):
    D: BmsChannel
    U: BmsChannel
    pavement: Pavement


def channel_from_columns(levels, n: int) -> BmsChannel:
    """Channel whose cdf equals ``levels[a] / n`` on column ``[a/n, (a+1)/n)``.

    Atoms sit at ``x = a/n`` with the jump heights as masses, plus the rest of
    the mass at ``x = 1``.
    """
    levels = np.asarray(levels, dtype=float)
    ps = grid_crossovers(n)
    masses = np.diff(np.concatenate(([0.0], levels, [float(n)]))) / n
    return BmsChannel.from_arrays(np.asarray(ps), masses, normalize=True)


def staircases(W: BmsChannel, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer column heights of the lower and upper staircases of ``W``.

    ``lower[a] = floor(n * cdf(W, a/n))`` and
    ``upper[a] = ceil(n * cdf(W, ((a+1)/n)^-))`` for ``a = 0..n-1``.
    Mass sitting exactly on a grid line stays there in both.
    """
    if n < 1:
        raise DomainError("grid side must be >= 1")
    lower = np.empty(n, dtype=np.int64)
    upper = np.empty(n, dtype=np.int64)
    for a in range(n):
        lower[a] = math.floor(n * cdf(W, a / n) + ROUND_TOL)
        upper[a] = math.ceil(n * cdf_left(W, (a + 1) / n) - ROUND_TOL)
    return np.minimum(lower, n), np.minimum(upper, n)


def pavement_from_staircases(lower, upper, n: int) -> Pavement:
    """Canonical edge-connected pavement enclosing the two staircases.

    Column ``a`` covers rows ``lower[a]..upper[a]-1`` where possible.  At
    lattice-point crossings (where the staircases touch) the next column is
    extended downwards by one tile, so the path stays edge-connected and its
    boundary channels still sandwich the quantized pair.
    """
    steps = []
    lo = 0
    for a in range(n):
        hi = n - 1 if a == n - 1 else max(int(upper[a]) - 1, lo)
        steps.append(UP * (hi - lo))
        if a < n - 1:
            steps.append(RIGHT)
        lo = hi
    return Pavement(n, "".join(steps))


def quantize_pair(W: BmsChannel, n: int) -> QuantizedPair:
    """Degraded and upgraded grid quantizations of ``W`` plus its pavement."""
    if n < 2:
        raise DomainError("quantization grid needs n >= 2")
    lower, upper = staircases(W, n)
    D = channel_from_columns(lower, n)
    U = channel_from_columns(upper, n)
    return QuantizedPair(D, U, pavement_from_staircases(lower, upper, n))


def pavement_of(W: BmsChannel, n: int) -> Pavement:
    return quantize_pair(W, n).pavement


def pair_pavement(D: BmsChannel, U: BmsChannel, n: int) -> Pavement:
    """Pavement enclosing the lower staircase of ``D`` and the upper one of ``U``."""
    lower, _ = staircases(D, n)
    _, upper = staircases(U, n)
    return pavement_from_staircases(lower, upper, n)


def pavement_count(n: int, include_vertex_connected: bool = False) -> int:
    """Binomial ``C(2(n-1), n-1)``, or the central Delannoy number."""
    m = n - 1
    if not include_vertex_connected:
        return math.comb(2 * m, m)
    return sum(math.comb(m, k) ** 2 * 2**k for k in range(m + 1))


def enumerate_pavements(n: int, include_vertex_connected: bool = False) -> list[Pavement]:
    """All pavements on the ``n x n`` grid, sorted by step string."""
    if n < 2:
        raise DomainError("enumeration needs n >= 2")
    if n > MAX_ENUM_N:
        count = pavement_count(n, include_vertex_connected)
        raise CapacityError(f"n={n} gives {count} pavements; enumeration is capped at n={MAX_ENUM_N}")
    m = n - 1
    if not include_vertex_connected:
        out = []
        for rights in itertools.combinations(range(2 * m), m):
            s = [UP] * (2 * m)
            for i in rights:
                s[i] = RIGHT
            out.append(Pavement(n, "".join(s)))
        return out

    out = []

    def walk(prefix: list[str], a: int, r: int) -> None:
        if a == m and r == m:
            out.append(Pavement(n, "".join(prefix)))
            return
        for s, da, dr in ((RIGHT, 1, 0), (UP, 0, 1), (DIAG, 1, 1)):
            if a + da <= m and r + dr <= m:
                prefix.append(s)
                walk(prefix, a + da, r + dr)
                prefix.pop()

    walk([], 0, 0)
    return out


def bundle_endpoints(pavement: Pavement) -> Bundle:
    """Boundary channels of a pavement.

    ``D`` follows the lower-right boundary (bottom of every column), ``U`` the
    upper-left one (top of every column).
    """
    n = pavement.n
    ranges = pavement.column_ranges()
    D = channel_from_columns([lo for lo, _ in ranges], n)
    U = channel_from_columns([hi + 1 for _, hi in ranges], n)
    return Bundle(D=D, U=U, pavement=pavement)


def enumerate_bundles(n: int, include_vertex_connected: bool = False) -> list[Bundle]:
    return [bundle_endpoints(p) for p in enumerate_pavements(n, include_vertex_connected)]
