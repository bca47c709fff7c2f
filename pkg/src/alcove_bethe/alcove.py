"""Type-A root system combinatorics on the center-of-mass plane.

Lattice points are stored as integer coordinates ``(k_1, ..., k_{n-1})`` in
the basis of fundamental weights; the point is ``sum_j k_j * omega_j``.  All
membership tests and reflections work on these integers, floats only appear
when a point is embedded in R^n.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import NamedTuple, Sequence

import numpy as np

LatticePoint = tuple[int, ...]
Root = tuple[int, int]

COM_TOL = 1e-12
LATTICE_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    n: int
    m: int
    t: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"particle count n must be an integer >= 2, got {self.n}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"dilation m must be an integer >= 1, got {self.m}")

    @property
    def repulsive(self) -> bool:
        return -1.0 < self.t < 1.0

    def require_repulsive(self):
        if not self.repulsive:
            raise ValueError(f"t={self.t} outside repulsive regime (-1, 1)")


class FoldResult(NamedTuple):
    target: LatticePoint
    length: int


def lattice_dimension(n: int, m: int) -> int:
    return comb(n + m - 1, m)


@lru_cache(maxsize=None)
def enumerate_lattice(n: int, m: int) -> tuple[LatticePoint, ...]:
    """All points of the dilated alcove grid, in lexicographic order.

    The position in this tuple is the basis index used by every operator
    matrix in the package.
    """
    points = [
        ks
        for ks in itertools.product(range(m + 1), repeat=n - 1)
        if sum(ks) <= m
    ]
    return tuple(points)


@lru_cache(maxsize=None)
def lattice_index(n: int, m: int) -> dict[LatticePoint, int]:
    return {p: i for i, p in enumerate(enumerate_lattice(n, m))}


def in_grid(ks: Sequence[int], m: int) -> bool:
    return all(k >= 0 for k in ks) and sum(ks) <= m


def standard_parts(ks: Sequence[int]) -> np.ndarray:
    """Integer n-vector p with p_j = k_j + ... + k_{n-1} (and p_n = 0).

    p differs from the embedded point only by a multiple of (1, ..., 1), so
    pairings with roots can be read off exactly as p_j - p_k.
    """
    ks = np.asarray(ks, dtype=np.int64)
    return np.append(np.cumsum(ks[::-1])[::-1], 0)


def weight_to_com(ks: Sequence[int], n: int | None = None) -> np.ndarray:
    if n is not None and len(ks) != n - 1:
        raise ValueError(f"expected {n - 1} coordinates, got {len(ks)}")
    p = standard_parts(ks).astype(float)
    return p - p.mean()


def fundamental_weight(j: int, n: int) -> np.ndarray:
    """omega_j = e_1 + ... + e_j - (j/n) e, for 1 <= j <= n-1."""
    if not 1 <= j <= n - 1:
        raise ValueError(f"weight index must lie in 1..{n - 1}, got {j}")
    w = np.full(n, -j / n)
    w[:j] += 1.0
    return w


def rho(n: int) -> np.ndarray:
    return weight_to_com((1,) * (n - 1))


def check_com(x, tol: float = COM_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if abs(x.sum()) > tol * max(1.0, np.abs(x).max()):
        raise ValueError("vector does not lie in the center-of-mass plane")
    return x


def positive_roots(n: int) -> list[Root]:
    """Positive roots e_j - e_k (j < k) as 0-based index pairs."""
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


def roots(n: int) -> list[Root]:
    return [(j, k) for j in range(n) for k in range(n) if j != k]


def rho_height(root: Root) -> int:
    """<rho, e_j - e_k> = k - j, exact."""
    j, k = root
    return k - j


def pairing(x, root: Root) -> float:
    j, k = root
    return x[j] - x[k]


def simple_pairings(x) -> np.ndarray:
    """<x, alpha_j> for j = 1..n-1."""
    x = np.asarray(x)
    return x[:-1] - x[1:]


def com_to_weight(x, tol: float = LATTICE_TOL) -> LatticePoint:
    """Inverse of weight_to_com for vectors of the weight lattice."""
    x = check_com(x, tol)
    c = simple_pairings(x)
    r = np.rint(c)
    if np.any(np.abs(c - r) > tol):
        raise ValueError("not a weight-lattice vector")
    return tuple(int(v) for v in r)


@lru_cache(maxsize=None)
def orbit_steps(k: int, n: int) -> tuple[LatticePoint, ...]:
    """The S_n-orbit of omega_k in weight coordinates.

    An orbit element is e_S - (k/n) e for a k-subset S; its pairing with
    alpha_i is [i in S] - [i+1 in S].  Subsets are listed in lexicographic
    order.
    """
    if not 1 <= k <= n - 1:
        raise ValueError(f"orbit index k must lie in 1..{n - 1}, got {k}")
    steps = []
    for subset in itertools.combinations(range(n), k):
        s = [1 if i in subset else 0 for i in range(n)]
        steps.append(tuple(s[i] - s[i + 1] for i in range(n - 1)))
    return tuple(steps)


def orbit_of_weight(k: int, n: int) -> list[np.ndarray]:
    return [weight_to_com(step) for step in orbit_steps(k, n)]


@lru_cache(maxsize=None)
def _wall_normals(n: int) -> tuple[tuple[int, ...], ...]:
    """alpha_0, alpha_1, ..., alpha_{n-1} expressed in weight coordinates."""
    cartan = []
    for j in range(n - 1):
        row = [0] * (n - 1)
        row[j] = 2
        if j > 0:
            row[j - 1] = -1
        if j < n - 2:
            row[j + 1] = -1
        cartan.append(tuple(row))
    a0 = [0] * (n - 1)
    a0[0] += 1
    a0[-1] += 1
    return (tuple(a0), *cartan)


def fold_coords(ks: Sequence[int], m: int) -> FoldResult:
    """Reflect an integer weight into the dilated alcove, counting steps.

    Walls are scanned alpha_1, ..., alpha_{n-1}, then alpha_0; the first
    violated wall is reflected in.  Each reflection crosses exactly one
    hyperplane separating the point from the alcove, so the count is the
    length of the shortest folding affine permutation.
    """
    c = [int(v) for v in ks]
    normals = _wall_normals(len(c) + 1)
    length = 0
    while True:
        for j, cj in enumerate(c):
            if cj < 0:
                c = [ci - cj * a for ci, a in zip(c, normals[j + 1])]
                break
        else:
            excess = sum(c) - m
            if excess <= 0:
                return FoldResult(tuple(c), length)
            c = [ci - excess * a for ci, a in zip(c, normals[0])]
        length += 1


def reflect(ks: Sequence[int], wall: int, m: int) -> LatticePoint:
    """Apply r_wall^(m) (wall 0 is the affine one) in weight coordinates."""
    n = len(ks) + 1
    normal = _wall_normals(n)[wall]
    if wall == 0:
        shift = m - sum(ks)
        return tuple(int(c + shift * a) for c, a in zip(ks, normal))
    cj = ks[wall - 1]
    return tuple(int(c - cj * a) for c, a in zip(ks, normal))


def violated_wall(ks: Sequence[int], m: int) -> int | None:
    for j, c in enumerate(ks):
        if c < 0:
            return j + 1
    if sum(ks) > m:
        return 0
    return None


def fold_into_alcove(x, params: ModelParams) -> FoldResult:
    return fold_coords(com_to_weight(x), params.m)
