"""Binary kernels and exact virtual channels ``W_G^(i)``.

Convention: ``u`` is the row vector fed to the virtual channels and
``x = u G`` (mod 2) is what goes over ``ell`` independent uses of ``W``.
Virtual channel ``i`` sees ``u_i`` through all outputs and ``u_0..u_{i-1}``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

import numpy as np

from .channel import BmsChannel
from .errors import CapacityError, DomainError, KernelError

# |atoms|^ell * 4^ell; above this polar_transform refuses to run.
MAX_WORK = 1 << 26
_CHUNK = 1 << 22


def gf2_rank(vectors: Sequence[int]) -> int:
    """Rank over GF(2) of integer-encoded bit vectors (XOR basis)."""
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def _to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


class Kernel:
    """Square binary matrix, invertible over GF(2)."""

    def __init__(self, rows):
        mat = np.asarray([[int(b) for b in row] for row in rows], dtype=np.uint8)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise KernelError(f"kernel must be a non-empty square matrix, got shape {mat.shape}")
        if np.any(mat > 1):
            raise KernelError("kernel entries must be 0 or 1")
        rank = gf2_rank([_to_int(r) for r in mat])
        if rank != mat.shape[0]:
            raise KernelError(f"kernel is singular over GF(2) (rank {rank} < {mat.shape[0]})")
        mat.flags.writeable = False
        self._m = mat

    @property
    def ell(self) -> int:
        return int(self._m.shape[0])

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def rows(self) -> list[str]:
        return ["".join(str(int(b)) for b in r) for r in self._m]

    @property
    def name(self) -> str:
        return "/".join(self.rows)

    def column(self, j: int) -> int:
        return _to_int(self._m[:, j])

    def kron(self, other: "Kernel") -> "Kernel":
        return Kernel(np.kron(self._m, other._m))

    def __eq__(self, other):
        return isinstance(other, Kernel) and np.array_equal(self._m, other._m)

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"Kernel({self.rows})"

    def to_json(self) -> dict:
        return {"rows": self.rows}

    @classmethod
    def from_json(cls, obj: dict) -> "Kernel":
        return cls(obj["rows"])

    @classmethod
    def identity(cls, ell: int) -> "Kernel":
        return cls(np.eye(ell, dtype=np.uint8))


def kernel_construct(rows) -> Kernel:
    return Kernel(rows)


ARIKAN = Kernel([[1, 0], [1, 1]])


def sample_invertible(ell: int, seed) -> Kernel:
    """Uniform invertible ``ell x ell`` binary matrix by rejection sampling.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    if ell < 2:
        raise DomainError(f"ell must be >= 2, got {ell}")
    rng = np.random.default_rng(seed)
    while True:
        mat = rng.integers(0, 2, size=(ell, ell), dtype=np.uint8)
        if gf2_rank([_to_int(r) for r in mat]) == ell:
            return Kernel(mat)


def sample_pool(ell: int, size: int, seed: int) -> list[Kernel]:
    """``size`` kernels, the k-th drawn from the k-th child of ``seed``."""
    children = np.random.SeedSequence(seed).spawn(size)
    return [sample_invertible(ell, c) for c in children]


@lru_cache(maxsize=None)
def _bit_table(ell: int) -> np.ndarray:
    # row idx -> bits, most significant first, so u_0 is the top bit
    idx = np.arange(1 << ell)
    return ((idx[:, None] >> np.arange(ell - 1, -1, -1)) & 1).astype(np.uint8)


def _mismatch(G: Kernel) -> np.ndarray:
    """Boolean array [y, u, j]: does output bit y_j differ from (uG)_j."""
    bits = _bit_table(G.ell)
    X = (bits.astype(np.int64) @ G.matrix.astype(np.int64)) % 2
    return bits[:, None, :] != X[None, :, :]


def polar_transform(W: BmsChannel, G: Kernel, max_work: int = MAX_WORK) -> list[BmsChannel]:
    """Exact virtual channels ``W_G^(1..ell)`` as BSC mixtures.

    Every assignment of atoms to the ``ell`` channel uses is enumerated (the
    atom is revealed to the receiver), and for each output word the
    posterior of ``u_i`` given the outputs and ``u_{<i}`` becomes one atom.
    By symmetry the all-zero input is assumed throughout.
    """
    ell = G.ell
    k = len(W)
    work = k**ell * 4**ell
    if work > max_work:
        raise CapacityError(
            f"transform needs {k}^{ell} atom assignments x 4^{ell} words = {work} > {max_work}; "
            "merge() the channel to fewer atoms first"
        )
    mismatch = _mismatch(G)
    size = 1 << ell
    assign = np.array(list(itertools.product(range(k), repeat=ell)), dtype=np.int64).reshape(-1, ell)
    per_chunk = max(1, _CHUNK // (size * size))
    out_p: list[list[np.ndarray]] = [[] for _ in range(ell)]
    out_m: list[list[np.ndarray]] = [[] for _ in range(ell)]
    for start in range(0, assign.shape[0], per_chunk):
        a = assign[start : start + per_chunk]
        P = W.p[a]
        weight = np.prod(W.mass[a], axis=1)
        lik = np.ones((a.shape[0], size, size))
        for j in range(ell):
            pj = P[:, j, None, None]
            lik *= np.where(mismatch[None, :, :, j], pj, 1.0 - pj)
        event = weight[:, None] * lik[:, :, 0]
        live = event > 0.0
        for i in range(ell):
            half = 1 << (ell - 1 - i)
            l0 = lik[:, :, :half].sum(axis=2)
            l1 = lik[:, :, half : 2 * half].sum(axis=2)
            q = l1[live] / (l0[live] + l1[live])
            out_p[i].append(np.minimum(q, 1.0 - q))
            out_m[i].append(event[live])
    return [_aggregate(np.concatenate(out_p[i]), np.concatenate(out_m[i])) for i in range(ell)]


def _aggregate(p: np.ndarray, m: np.ndarray) -> BmsChannel:
    key = np.round(p, 12)
    uniq, inv = np.unique(key, return_inverse=True)
    mass = np.bincount(inv, weights=m)
    return BmsChannel.from_arrays(np.clip(uniq, 0.0, 0.5), mass, normalize=True)


def transform_entropies(W: BmsChannel, G: Kernel) -> list[float]:
    return [c.entropy for c in polar_transform(W, G)]


def bec_transform(eps: float, G: Kernel) -> list[float]:
    """Erasure probabilities of the virtual channels of ``BEC(eps)``.

    ``u_i`` is erased exactly when ``e_i`` is outside the span of the known
    prefix ``e_0..e_{i-1}`` and the columns of ``G`` that were not erased.
    """
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"erasure probability {eps!r} outside [0, 1]")
    ell = G.ell
    cols = [G.column(j) for j in range(ell)]
    unit = [1 << (ell - 1 - r) for r in range(ell)]
    out = [0.0] * ell
    for erased in range(1 << ell):
        seen = [cols[j] for j in range(ell) if not (erased >> j) & 1]
        s = ell - len(seen)
        prob = eps**s * (1.0 - eps) ** (ell - s)
        if prob == 0.0:
            continue
        for i in range(ell):
            known = seen + unit[:i]
            if gf2_rank(known + [unit[i]]) > gf2_rank(known):
                out[i] += prob
    return out
