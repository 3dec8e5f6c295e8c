"""Badness estimation over a kernel pool and greedy kernel selection.

Bundles and kernels form a bipartite graph with an edge wherever the
kernel is bad for the bundle.  Greedy picks kernels until every bundle has
a good one.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import CapacityError, DomainError, PolarLabError
from .exponents import GoodnessParams, is_good
from .kernels import Kernel
from .quantize import Bundle

MAX_ORACLE_KERNELS = 20


def worker_count() -> int:
    """Worker cap from ``POLARLAB_THREADS`` (default 1)."""
    raw = os.environ.get("POLARLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class BadnessMatrix:
    bundles: list[str]
    kernels: list[str]
    bad: np.ndarray
    errors: Optional[np.ndarray] = None

    def __post_init__(self):
        self.bad = np.asarray(self.bad, dtype=bool)
        if self.bad.shape != (len(self.bundles), len(self.kernels)):
            raise DomainError(f"bad matrix shape {self.bad.shape} != ({len(self.bundles)}, {len(self.kernels)})")
        if self.errors is None:
            self.errors = np.zeros_like(self.bad)

    @property
    def row_badness(self) -> np.ndarray:
        return self.bad.mean(axis=1)

    @property
    def max_badness(self) -> float:
        return float(self.row_badness.max())

    def to_csv(self) -> str:
        lines = ["bundle," + ",".join(self.kernels) + ",row_badness"]
        for name, row, rb in zip(self.bundles, self.bad, self.row_badness):
            lines.append(name + "," + ",".join(str(int(v)) for v in row) + f",{rb!r}")
        return "\n".join(lines) + "\n"


def badness_matrix(
    bundles: Sequence[Bundle],
    pool: Sequence[Kernel],
    params: GoodnessParams,
    goodness: Optional[Callable[[Kernel, Bundle, GoodnessParams], object]] = None,
    workers: Optional[int] = None,
) -> BadnessMatrix:
    """Evaluate goodness for every (bundle, kernel) pair.

    ``goodness`` may return a report with a ``good`` attribute or a plain
    bool.  Pairs whose evaluation raises a library error count as bad and
    are flagged in ``errors``.
    """
    if not bundles or not pool:
        raise DomainError("badness_matrix needs at least one bundle and one kernel")
    check = goodness or is_good
    pairs = [(b, k) for b in range(len(bundles)) for k in range(len(pool))]

    def run(pair):
        b, k = pair
        try:
            res = check(pool[k], bundles[b], params)
        except PolarLabError:
            return True, True
        ok = res if isinstance(res, (bool, np.bool_)) else res.good
        return not ok, False

    n_workers = workers or worker_count()
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as ex:
            results = list(ex.map(run, pairs))
    else:
        results = [run(p) for p in pairs]
    bad = np.array([r[0] for r in results], dtype=bool).reshape(len(bundles), len(pool))
    err = np.array([r[1] for r in results], dtype=bool).reshape(len(bundles), len(pool))
    return BadnessMatrix(
        bundles=[b.key for b in bundles],
        kernels=[str(i) for i in range(len(pool))],
        bad=bad,
        errors=err,
    )


def bound_m(b: float, B: int) -> float:
    """``-log_b(B) + 2``, the greedy kernel count bound."""
    if not 0.0 < b < 1.0:
        raise DomainError(f"badness b={b!r} must lie in (0, 1)")
    if B < 1:
        raise DomainError("bundle count must be >= 1")
    return -math.log(B) / math.log(b) + 2.0


def headline_scaling(ell: int, mu: float) -> float:
    """``ell^(3/mu - 1)``, asymptotic growth of the number of kernels needed."""
    return ell ** (3.0 / mu - 1.0)


def greedy_limit(b: float, B: int) -> int:
    """``ceil(log_{1/b} B) + 1``; greedy never needs more when every row badness is at most b."""
    if b <= 0.0:
        return 1
    if b >= 1.0:
        raise DomainError("greedy limit needs b < 1")
    return math.ceil(math.log(B) / math.log(1.0 / b) - 1e-12) + 1


@dataclass
class CoverReport:
    selected: list[int]
    assignment: dict[str, Optional[int]]
    rounds: list[int]
    uncoverable: list[str]
    badness: float
    bound: Optional[float]
    hypothesis_holds: bool
    kernels: list[Kernel] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "selected": self.selected,
            "assignment": self.assignment,
            "rounds": self.rounds,
            "uncoverable": self.uncoverable,
            "badness": self.badness,
            "bound": self.bound,
            "hypothesis_holds": self.hypothesis_holds,
        }
        if self.kernels:
            out["selected_kernels"] = [self.kernels[i].rows for i in self.selected]
        return out


def greedy_cover(matrix: BadnessMatrix, pool: Sequence[Kernel] = ()) -> CoverReport:
    """Pick kernels good for the most still-uncovered bundles, lowest index on ties.

    Stops when every bundle is covered or no kernel covers anything new;
    the leftovers are reported as uncoverable.  ``bound`` is
    ``-log_b(B) + 2`` with ``b`` the largest row badness.
    """
    good = ~matrix.bad
    n_bundles, n_kernels = good.shape
    if n_bundles == 0 or n_kernels == 0:
        raise DomainError("greedy_cover needs a non-empty matrix")
    uncovered = np.ones(n_bundles, dtype=bool)
    assignment: dict[str, Optional[int]] = {name: None for name in matrix.bundles}
    selected: list[int] = []
    rounds = [n_bundles]
    while uncovered.any():
        gain = good[uncovered].sum(axis=0)
        k = int(np.argmax(gain))
        if gain[k] == 0:
            break
        hit = uncovered & good[:, k]
        for i in np.flatnonzero(hit):
            assignment[matrix.bundles[i]] = k
        uncovered &= ~hit
        selected.append(k)
        rounds.append(int(uncovered.sum()))
    b = matrix.max_badness
    if b <= 0.0:
        bound: Optional[float] = 2.0
    elif b >= 1.0:
        bound = None
    else:
        bound = bound_m(b, n_bundles)
    return CoverReport(
        selected=selected,
        assignment=assignment,
        rounds=rounds,
        uncoverable=[matrix.bundles[i] for i in np.flatnonzero(uncovered)],
        badness=b,
        bound=bound,
        hypothesis_holds=b < 1.0,
        kernels=list(pool),
    )


def min_cover_oracle(matrix: BadnessMatrix) -> int:
    """Smallest number of kernels covering every coverable bundle, by enumeration."""
    good = ~matrix.bad
    n_kernels = good.shape[1]
    if n_kernels > MAX_ORACLE_KERNELS:
        raise CapacityError(f"{n_kernels} kernels; the exact oracle handles at most {MAX_ORACLE_KERNELS}")
    masks = [sum(1 << i for i in np.flatnonzero(good[:, k])) for k in range(n_kernels)]
    target = 0
    for m in masks:
        target |= m
    if target == 0:
        return 0
    for size in range(1, n_kernels + 1):
        for combo in itertools.combinations(masks, size):
            acc = 0
            for m in combo:
                acc |= m
            if acc == target:
                return size
    return n_kernels
