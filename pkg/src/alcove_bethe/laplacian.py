"""Discrete Laplacians, weights and the Hamiltonian on the alcove grid.

Matrices are dense and indexed by ``enumerate_lattice(n, m)``.  Two routes to
``L_k`` exist: :func:`build_laplacian` uses the closed product formula for
the boundary coefficients, :func:`apply_laplacian_by_definition` sums over
the whole orbit and folds outside points back with a power of ``t``.  The
second one is slow and exists to cross-check the first.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .alcove import (
    LatticePoint,
    ModelParams,
    com_to_weight,
    enumerate_lattice,
    fold_coords,
    in_grid,
    lattice_index,
    orbit_steps,
    positive_roots,
    rho_height,
    standard_parts,
)


def tpow(t: float, k: int) -> float:
    # integer exponents only; keeps t < 0 and t = 0 well defined
    out = 1.0
    for _ in range(k):
        out *= t
    return out


def poincare_ratio(t: float, h: int) -> float:
    """(1 - t^{h+1}) / (1 - t^h) for a positive integer h."""
    th = tpow(t, h)
    return (1.0 - th * t) / (1.0 - th)


def _coefficient(p: np.ndarray, q: np.ndarray, n: int, m: int, t: float) -> float:
    # p: standard parts of lambda, q: standard parts of the step nu
    v = 1.0
    for a, b in positive_roots(n):
        lam = p[a] - p[b]
        nu = q[a] - q[b]
        h = rho_height((a, b))
        if lam == 0 and nu == 1:
            v *= poincare_ratio(t, h)
        elif lam == m and nu == -1:
            v *= poincare_ratio(t, n - h)
    return v


def boundary_coefficient(lam: Sequence[int], nu, params: ModelParams) -> float:
    """V_{lambda,nu}: weight of psi_{lambda+nu} in (L_k psi)_lambda.

    ``nu`` is either a vector in the center-of-mass plane or integer weight
    coordinates.
    """
    n, m, t = params.n, params.m, params.t
    step = tuple(nu) if _is_int_coords(nu, n) else com_to_weight(nu)
    target = tuple(a + b for a, b in zip(lam, step))
    if not in_grid(lam, m) or not in_grid(target, m):
        raise ValueError(f"lambda + nu = {target} lies outside the grid P^({m})")
    return _coefficient(standard_parts(lam), standard_parts(step), n, m, t)


def _is_int_coords(v, n: int) -> bool:
    return len(v) == n - 1 and all(isinstance(c, (int, np.integer)) for c in v)


def build_laplacian(k: int, params: ModelParams) -> np.ndarray:
    n, m, t = params.n, params.m, params.t
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in 1..{n - 1}, got {k}")
    points = enumerate_lattice(n, m)
    index = lattice_index(n, m)
    steps = [(s, standard_parts(s)) for s in orbit_steps(k, n)]
    mat = np.zeros((len(points), len(points)))
    for row, lam in enumerate(points):
        p = standard_parts(lam)
        for step, q in steps:
            target = tuple(a + b for a, b in zip(lam, step))
            col = index.get(target)
            if col is not None:
                mat[row, col] = _coefficient(p, q, n, m, t)
    return mat


def build_laplacians(params: ModelParams) -> dict[int, np.ndarray]:
    return {k: build_laplacian(k, params) for k in range(1, params.n)}


def apply_laplacian_by_definition(psi, k: int, params: ModelParams) -> np.ndarray:
    """(L_k psi)_lambda as the raw orbit sum with psi_mu := t^len psi_fold(mu)."""
    n, m, t = params.n, params.m, params.t
    psi = np.asarray(psi)
    points = enumerate_lattice(n, m)
    index = lattice_index(n, m)
    out = np.zeros(len(points), dtype=np.result_type(psi, float))
    for row, lam in enumerate(points):
        acc = 0.0
        for step in orbit_steps(k, n):
            target, length = fold_coords([a + b for a, b in zip(lam, step)], m)
            acc = acc + tpow(t, length) * psi[index[target]]
        out[row] = acc
    return out


def _weight(lam: LatticePoint, n: int, m: int, t: float) -> float:
    p = standard_parts(lam)
    w = 1.0
    for a, b in positive_roots(n):
        d = p[a] - p[b]
        h = rho_height((a, b))
        if d == 0:
            w /= poincare_ratio(t, h)
        if d == m:
            w /= poincare_ratio(t, n - h)
    return w


def build_weights(params: ModelParams) -> np.ndarray:
    """Positive weights Delta_lambda defining the Hilbert space inner product."""
    params.require_repulsive()
    n, m, t = params.n, params.m, params.t
    return np.array([_weight(lam, n, m, t) for lam in enumerate_lattice(n, m)])


def inner_product(psi, phi, w) -> complex:
    psi, phi, w = np.asarray(psi), np.asarray(phi), np.asarray(w)
    if not psi.shape == phi.shape == w.shape:
        raise ValueError(f"length mismatch: {psi.shape}, {phi.shape}, {w.shape}")
    return complex(np.sum(psi * np.conj(phi) * w))


def weighted_norm(psi, w) -> float:
    return float(np.sqrt(np.real(inner_product(psi, psi, w))))


def self_adjoint_combinations(params: ModelParams) -> list[tuple[str, np.ndarray]]:
    """[("R1", L_R1), ..., ("I1", L_I1), ...]; each is self-adjoint."""
    params.require_repulsive()
    n = params.n
    lap = build_laplacians(params)
    out = []
    for k in range(1, n // 2 + 1):
        out.append((f"R{k}", 0.5 * (lap[k] + lap[n - k])))
    for k in range(1, (n - 1) // 2 + 1):
        out.append((f"I{k}", (lap[k] - lap[n - k]) / 2j))
    return out


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """H = n Id - (L_1 + L_{n-1}) / 2."""
    params.require_repulsive()
    n = params.n
    lr1 = 0.5 * (build_laplacian(1, params) + build_laplacian(n - 1, params))
    return n * np.eye(lr1.shape[0]) - lr1


def build_hamiltonian_standard(params: ModelParams) -> np.ndarray:
    """Same operator assembled from hops lambda -> lambda +- nu_j, nu_j = e_j - e/n.

    Works in standard coordinates; kept as an independent construction of
    the Hamiltonian.
    """
    params.require_repulsive()
    n, m, t = params.n, params.m, params.t
    points = enumerate_lattice(n, m)
    index = lattice_index(n, m)
    ham = n * np.eye(len(points))
    for row, lam in enumerate(points):
        p = standard_parts(lam)
        for j in range(n):
            up = p.copy()
            up[j] += 1
            col = index.get(_from_standard(up))
            if col is not None:
                v = 1.0
                for k in range(j + 1, n):
                    if p[k] == p[j]:
                        v *= poincare_ratio(t, k - j)
                for k in range(j):
                    if p[k] == p[j] + m:
                        v *= poincare_ratio(t, n + k - j)
                ham[row, col] -= 0.5 * v
            down = p.copy()
            down[j] -= 1
            col = index.get(_from_standard(down))
            if col is not None:
                v = 1.0
                for k in range(j):
                    if p[k] == p[j]:
                        v *= poincare_ratio(t, j - k)
                for k in range(j + 1, n):
                    if p[k] == p[j] - m:
                        v *= poincare_ratio(t, n + j - k)
                ham[row, col] -= 0.5 * v
    return ham


def _from_standard(p: np.ndarray) -> LatticePoint:
    return tuple(int(a - b) for a, b in zip(p[:-1], p[1:]))


def operator_to_json(matrix, params: ModelParams, k: int | str | None = None) -> dict:
    matrix = np.asarray(matrix, dtype=complex)
    return {
        "n": params.n,
        "m": params.m,
        "t": params.t,
        "k": k,
        "basis": [list(p) for p in enumerate_lattice(params.n, params.m)],
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in matrix],
    }


def operator_from_json(data: dict) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
