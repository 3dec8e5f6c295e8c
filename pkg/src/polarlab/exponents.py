"""Gallager exponents, thresholds and the goodness predicate for kernels."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import BmsChannel
from .errors import DomainError
from .kernels import Kernel, polar_transform
from .quantize import Bundle


def alpha(ell: int) -> float:
    """``ln(ln ell) / ln ell``."""
    if ell < 3:
        raise DomainError(f"alpha needs ell >= 3, got {ell}")
    return math.log(math.log(ell)) / math.log(ell)


def theta(ell: int, c: float = 1.0) -> float:
    """Goodness cutoff ``exp(-c * ell^(2 alpha))``."""
    if c < 0:
        raise DomainError("theta constant must be non-negative")
    return math.exp(-c * ell ** (2.0 * alpha(ell)))


def potential_h(W: BmsChannel, ell: int) -> float:
    H = min(max(W.entropy, 0.0), 1.0)
    return (H * (1.0 - H)) ** alpha(ell)


def gallager_e0(W: BmsChannel, rho: float) -> float:
    """Gallager's E0 in bits at uniform input.

    Per atom ``(p, m)`` the two outputs contribute
    ``m * 2^-rho * (p^s + (1-p)^s)^(1+rho)`` with ``s = 1/(1+rho)``.
    """
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho={rho!r} outside [0, 1]")
    if rho == 0.0:
        return 0.0
    s = 1.0 / (1.0 + rho)
    p = W.p
    terms = W.mass * 2.0 ** (-rho) * (p**s + (1.0 - p) ** s) ** (1.0 + rho)
    return -math.log2(float(terms.sum()))


def error_exponent(W: BmsChannel, rate: float, tol: float = 1e-10) -> float:
    """``max over rho in [0, 1] of E0(rho) - rho * rate``."""
    if not 0.0 <= rate <= 1.0:
        raise DomainError(f"rate={rate!r} outside [0, 1]")

    def neg(rho):
        return -(gallager_e0(W, rho) - rho * rate)

    res = minimize_scalar(neg, bounds=(0.0, 1.0), method="bounded", options={"xatol": tol})
    # the objective is concave, but the maximizer may sit on either endpoint
    return max(0.0, -neg(1.0), -float(res.fun))


@dataclass(frozen=True)
class GoodnessParams:
    mu: float = 3.0
    theta_const: float = 1.0
    use_alpha_slack: bool = True

    def __post_init__(self):
        if not self.mu > 2.0:
            raise DomainError(f"mu must exceed 2, got {self.mu}")
        if not self.theta_const > 0.0:
            raise DomainError("theta_const must be positive")

    def slack(self, ell: int) -> float:
        exponent = 1.0 - 1.0 / self.mu
        if self.use_alpha_slack:
            exponent += alpha(ell)
        return ell**exponent


@dataclass(frozen=True)
class GoodnessReport:
    j: int
    k: int
    theta: float
    sum_i: float
    sum_h: float
    good: bool

    def to_json(self) -> dict:
        return asdict(self)


def thresholds(H_D: float, H_U: float, ell: int, params: GoodnessParams) -> tuple[int, int]:
    """Integer index cutoffs ``(j, k)`` with ``0 <= j <= k <= ell``."""
    s = params.slack(ell)
    j = math.floor(H_D * ell - s)
    k = math.ceil(H_U * ell + s)
    j = min(max(j, 0), ell)
    k = min(max(k, 0), ell)
    return min(j, k), k


def is_good(G: Kernel, bundle: Bundle, params: GoodnessParams) -> GoodnessReport:
    """Check the two leakage sums for a kernel on a bundle.

    ``sum_i`` is the capacity of the first ``j`` virtual channels of ``U``
    and ``sum_h`` the entropy of the last ``ell - k`` virtual channels of
    ``D``; the kernel is good when both fall below theta.  Every channel
    between ``D`` and ``U`` then satisfies the same bounds.
    """
    ell = G.ell
    if ell < 3:
        raise DomainError(f"goodness needs ell >= 3, got {ell}")
    j, k = thresholds(bundle.D.entropy, bundle.U.entropy, ell, params)
    cut = theta(ell, params.theta_const)
    sum_i = 0.0
    if j > 0:
        sum_i = float(sum(c.capacity for c in polar_transform(bundle.U, G)[:j]))
    sum_h = 0.0
    if k < ell:
        sum_h = float(sum(c.entropy for c in polar_transform(bundle.D, G)[k:]))
    sum_i = max(sum_i, 0.0)
    sum_h = max(sum_h, 0.0)
    return GoodnessReport(j=j, k=k, theta=cut, sum_i=sum_i, sum_h=sum_h, good=sum_i < cut and sum_h < cut)


def e0_table(W: BmsChannel, rhos) -> list[tuple[float, float]]:
    return [(float(r), gallager_e0(W, float(r))) for r in rhos]


def er_table(W: BmsChannel, rates) -> list[tuple[float, float]]:
    return [(float(r), error_exponent(W, float(r))) for r in rates]


def default_grid(points: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)
