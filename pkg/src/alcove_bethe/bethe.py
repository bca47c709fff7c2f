"""Bethe vectors of the lattice model via damped Newton on the convex potential.

The additive Bethe system

    m * xi_j + sum_{l != j} theta(xi_j - xi_l) = 2 pi m_j

is the gradient of a strictly convex function, so its Jacobian is symmetric
positive definite (eigenvalues >= m) and Newton with step halving on the
residual norm converges from any start.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .alcove import LatticePoint, ModelParams, enumerate_lattice, in_grid

TWO_PI = 2.0 * np.pi
NEWTON_TOL = 1e-12
NEWTON_MAXITER = 200
MULTIPLICATIVE_TOL = 1e-10


class BetheConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


def _check_t(t: float):
    if not -1.0 < t < 1.0:
        raise ValueError(f"t={t} outside repulsive regime (-1, 1)")


def theta(x, t: float):
    """Scattering phase, continuous and odd with theta(x + 2 pi) = theta(x) + 2 pi.

    Evaluated on the reduced argument y = x - 2 pi k in [-pi, pi] through the
    half-angle atan2, which is smooth across y = +-pi where tan(y/2) blows up.
    """
    _check_t(t)
    x = np.asarray(x, dtype=float)
    k = np.round(x / TWO_PI)
    y = x - TWO_PI * k
    return 2.0 * np.arctan2((1.0 + t) * np.sin(y / 2), (1.0 - t) * np.cos(y / 2)) + TWO_PI * k


def theta_prime(x, t: float):
    _check_t(t)
    x = np.asarray(x, dtype=float)
    return (1.0 - t * t) / (1.0 - 2.0 * t * np.cos(x) + t * t)


def kappa_bounds(t: float) -> tuple[float, float]:
    """(kappa_+, kappa_-): the infimum and supremum of theta'."""
    a = abs(t)
    return (1.0 - t * t) / (1.0 + a) ** 2, (1.0 - t * t) / (1.0 - a) ** 2


def mu_to_mtuple(mu: Sequence[int], n: int | None = None) -> np.ndarray:
    """Quantum numbers m_j = k_j + ... + k_{n-1} + n - j (strictly decreasing)."""
    mu = tuple(int(k) for k in mu)
    if n is not None and len(mu) != n - 1:
        raise ValueError(f"expected {n - 1} coordinates, got {len(mu)}")
    n = len(mu) + 1
    tail = np.append(np.cumsum(mu[::-1])[::-1], 0)
    return tail + np.arange(n - 1, -1, -1)


def project_com(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x - x.mean()


def damped_newton(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tol: float = NEWTON_TOL,
    maxiter: int = NEWTON_MAXITER,
    on_jacobian: Callable[[np.ndarray], None] | None = None,
) -> tuple[np.ndarray, float, int]:
    """Newton iteration with step halving until the residual 2-norm drops.

    Returns (x, max-norm residual, iterations).  ``on_jacobian`` sees every
    Jacobian that is factorized; tests use it to watch positivity.
    """
    x = np.array(x0, dtype=float)
    f = residual(x)
    fnorm = np.linalg.norm(f)
    for it in range(maxiter + 1):
        if np.abs(f).max() <= tol:
            return x, float(np.abs(f).max()), it
        if it == maxiter:
            break
        jac = jacobian(x)
        if on_jacobian is not None:
            on_jacobian(jac)
        step = np.linalg.solve(jac, -f)
        lam = 1.0
        while True:
            trial = x + lam * step
            ft = residual(trial)
            ftnorm = np.linalg.norm(ft)
            if ftnorm < fnorm or lam < 1e-12:
                break
            lam *= 0.5
        if ftnorm >= fnorm:
            break
        x, f, fnorm = trial, ft, ftnorm
    raise BetheConvergenceError(
        f"Newton did not converge in {maxiter} iterations", float(np.abs(f).max())
    )


def additive_residual(xi, mtuple, m: float, t: float) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    diff = xi[:, None] - xi[None, :]
    th = theta(diff, t)
    return m * xi + th.sum(axis=1) - TWO_PI * np.asarray(mtuple, dtype=float)


def additive_jacobian(xi, m: float, t: float) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    diff = xi[:, None] - xi[None, :]
    tp = theta_prime(diff, t)
    np.fill_diagonal(tp, 0.0)
    return np.diag(m + tp.sum(axis=1)) - tp


def free_solution(mtuple, m: float) -> np.ndarray:
    """Exact solution at t = 0: (m + n) xi_j - sum(xi) = 2 pi m_j."""
    mt = np.asarray(mtuple, dtype=float)
    n = len(mt)
    return TWO_PI * (mt + mt.sum() / m) / (n + m)


def solve_additive_system(
    mtuple,
    params: ModelParams,
    tol: float = NEWTON_TOL,
    maxiter: int = NEWTON_MAXITER,
    full_output: bool = False,
    on_jacobian=None,
):
    """Unique solution xi(m) of the additive Bethe system for integer m_j.

    Starts at the t = 0 solution.  With ``full_output`` returns
    (xi, residual, iterations).
    """
    params.require_repulsive()
    m, t = params.m, params.t
    mtuple = np.asarray(mtuple, dtype=float)
    if len(mtuple) != params.n:
        raise ValueError(f"expected {params.n} quantum numbers, got {len(mtuple)}")
    xi, res, its = damped_newton(
        lambda x: additive_residual(x, mtuple, m, t),
        lambda x: additive_jacobian(x, m, t),
        free_solution(mtuple, m),
        tol,
        maxiter,
        on_jacobian,
    )
    return (xi, res, its) if full_output else xi


def multiplicative_residual(xi, m: int, t: float) -> float:
    """max_j |e^{i m xi_j} - prod_l (1 - t e^{i(xi_j - xi_l)}) / (e^{i(xi_j - xi_l)} - t)|."""
    xi = np.asarray(xi, dtype=float)
    z = np.exp(1j * (xi[:, None] - xi[None, :]))
    ratio = (1.0 - t * z) / (z - t)
    np.fill_diagonal(ratio, 1.0)
    rhs = ratio.prod(axis=1)
    return float(np.abs(np.exp(1j * m * xi) - rhs).max())


def pairwise_residual(xi, m: int, t: float) -> float:
    """Residual of the c-free form e^{i m (xi_j - xi_k)} = P_j / P_k, P_j = prod_{l != j} S(xi_j - xi_l)."""
    xi = np.asarray(xi, dtype=float)
    z = np.exp(1j * (xi[:, None] - xi[None, :]))
    ratio = (1.0 - t * z) / (z - t)
    np.fill_diagonal(ratio, 1.0)
    row = ratio.prod(axis=1)
    lhs = np.exp(1j * m * (xi[:, None] - xi[None, :]))
    rhs = row[:, None] / row[None, :]
    mask = ~np.eye(len(xi), dtype=bool)
    return float(np.abs(lhs - rhs)[mask].max())


@dataclass
class BetheSolution:
    mu: LatticePoint
    mtuple: np.ndarray
    xi: np.ndarray
    residual: float
    iterations: int
    xi_full: np.ndarray = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {
            "mu": list(self.mu),
            "mtuple": [int(v) for v in self.mtuple],
            "xi": [float(v) for v in self.xi],
            "residual": float(self.residual),
            "iterations": int(self.iterations),
        }


def bethe_vector(mu: Sequence[int], params: ModelParams, tol: float = NEWTON_TOL) -> BetheSolution:
    params.require_repulsive()
    mu = tuple(int(k) for k in mu)
    if len(mu) != params.n - 1 or not in_grid(mu, params.m):
        raise ValueError(f"mu={mu} is not a point of P^({params.m}) for n={params.n}")
    mt = mu_to_mtuple(mu)
    xi_full, res, its = solve_additive_system(mt, params, tol=tol, full_output=True)
    mres = multiplicative_residual(xi_full, params.m, params.t)
    if mres > MULTIPLICATIVE_TOL:
        raise BetheConvergenceError("multiplicative Bethe system not satisfied", mres)
    return BetheSolution(mu, mt, project_com(xi_full), res, its, xi_full)


def default_workers() -> int:
    env = os.environ.get("ALCOVE_BETHE_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def solve_all(params: ModelParams, workers: int | None = None) -> list[BetheSolution]:
    """Bethe vectors for every mu in the grid, in basis order."""
    points = enumerate_lattice(params.n, params.m)
    workers = workers or default_workers()
    if workers == 1:
        return [bethe_vector(mu, params) for mu in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda mu: bethe_vector(mu, params), points))
