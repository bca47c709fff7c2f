"""Lieb-Liniger limit of the lattice model.

With the coupling rescaled as t = exp(-g/m), the lattice Bethe vectors
multiplied by m approach the continuum Bethe vectors, and the staircase
embedding of the lattice wave functions approaches the Lieb-Liniger wave
function on the alcove.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .alcove import ModelParams, enumerate_lattice, in_grid, lattice_index, positive_roots, simple_pairings
from .bethe import (
    NEWTON_MAXITER,
    NEWTON_TOL,
    TWO_PI,
    bethe_vector,
    damped_newton,
    mu_to_mtuple,
    project_com,
)
from .laplacian import build_weights
from .wavefunction import evaluate_psi_many, permutations


@dataclass(frozen=True)
class ContinuumParams:
    n: int
    g: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"particle count n must be an integer >= 2, got {self.n}")
        if not self.g > 0:
            raise ValueError(f"coupling g must be positive, got {self.g}")


def _check_g(g: float):
    if not g > 0:
        raise ValueError(f"coupling g must be positive, got {g}")


def theta_inf(x, g: float):
    _check_g(g)
    return 2.0 * np.arctan(np.asarray(x, dtype=float) / g)


def theta_inf_prime(x, g: float):
    _check_g(g)
    x = np.asarray(x, dtype=float)
    return 2.0 * g / (x * x + g * g)


def continuum_residual(xi, mtuple, g: float) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    th = theta_inf(xi[:, None] - xi[None, :], g)
    return xi + th.sum(axis=1) - TWO_PI * np.asarray(mtuple, dtype=float)


def continuum_jacobian(xi, g: float) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    tp = theta_inf_prime(xi[:, None] - xi[None, :], g)
    np.fill_diagonal(tp, 0.0)
    return np.diag(1.0 + tp.sum(axis=1)) - tp


def solve_continuum_bethe(
    mu: Sequence[int],
    cp: ContinuumParams,
    tol: float = NEWTON_TOL,
    maxiter: int = NEWTON_MAXITER,
    full_output: bool = False,
):
    """Continuum Bethe vector for mu in P^(infinity), projected onto the plane.

    Newton starts from the infinite-coupling solution 2 pi m.  With
    ``full_output`` returns (xi, unprojected xi, residual, iterations).
    """
    mu = tuple(int(k) for k in mu)
    if len(mu) != cp.n - 1 or any(k < 0 for k in mu):
        raise ValueError(f"mu={mu} is not a dominant weight for n={cp.n}")
    mt = mu_to_mtuple(mu)
    xi_full, res, its = damped_newton(
        lambda x: continuum_residual(x, mt, cp.g),
        lambda x: continuum_jacobian(x, cp.g),
        TWO_PI * mt.astype(float),
        tol,
        maxiter,
    )
    xi = project_com(xi_full)
    return (xi, xi_full, res, its) if full_output else xi


def lieb_liniger_psi(x, xi, g: float) -> complex:
    """sum_s prod_{alpha > 0} (<alpha, xi_s> - i g) / <alpha, xi_s> * e^{i <x, xi_s>}."""
    xi = np.asarray(xi, dtype=float)
    x = np.asarray(x, dtype=float)
    n = len(xi)
    for a, b in positive_roots(n):
        if xi[a] - xi[b] == 0.0:
            raise ValueError("degenerate spectral point")
    xs = xi[permutations(n)]
    coef = np.ones(len(xs), dtype=complex)
    for a, b in positive_roots(n):
        d = xs[:, a] - xs[:, b]
        coef *= (d - 1j * g) / d
    terms = coef * np.exp(1j * (xs @ x))
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def fd_laplacian(f, x, h: float = 1e-3) -> complex:
    """Second-order central-difference Laplacian of f on R^n at x."""
    x = np.asarray(x, dtype=float)
    f0 = f(x)
    acc = 0.0
    for j in range(len(x)):
        e = np.zeros(len(x))
        e[j] = h
        acc += f(x + e) - 2.0 * f0 + f(x - e)
    return acc / (h * h)


def rescaled_coupling(g: float, m: int) -> float:
    return math.exp(-g / m)


def rescaled_lattice_vector(mu: Sequence[int], m: int, cp: ContinuumParams) -> np.ndarray:
    """m * xi_mu^(m) computed at t = exp(-g/m)."""
    mu = tuple(int(k) for k in mu)
    if not in_grid(mu, m):
        raise ValueError(f"mu={mu} does not lie in P^({m}); pick m >= {sum(mu)}")
    sol = bethe_vector(mu, ModelParams(cp.n, m, rescaled_coupling(cp.g, m)))
    return m * sol.xi


def staircase_constant(n: int, m: int) -> float:
    """Volume of one staircase cell: 1 / (m^{n-1} sqrt(n))."""
    return 1.0 / (m ** (n - 1) * math.sqrt(n))


def staircase_point(x, m: int) -> tuple[int, ...]:
    """[m x]: truncated pairings of m x with the simple roots."""
    return tuple(int(math.floor(c)) for c in m * simple_pairings(np.asarray(x, dtype=float)))


def staircase_psi(x, xi, m: int, g: float) -> complex:
    """Staircase embedding sqrt(Delta_[mx]) Psi_[mx](xi) at t = exp(-g/m), zero off the grid."""
    n = len(xi)
    lam = staircase_point(x, m)
    if not in_grid(lam, m):
        return 0.0
    params = ModelParams(n, m, rescaled_coupling(g, m))
    w = build_weights(params)[lattice_index(n, m)[lam]]
    return complex(math.sqrt(w) * evaluate_psi_many([lam], xi, params.t)[0])


def staircase_gram(mu, mu2, m: int, cp: ContinuumParams) -> complex:
    """Integral of J Psi(xi_mu) * conj(J Psi(xi_mu2)) over the chamber, as a weighted lattice sum."""
    params = ModelParams(cp.n, m, rescaled_coupling(cp.g, m))
    points = enumerate_lattice(cp.n, m)
    w = build_weights(params)
    a = evaluate_psi_many(points, bethe_vector(mu, params).xi, params.t)
    b = evaluate_psi_many(points, bethe_vector(mu2, params).xi, params.t)
    return complex(staircase_constant(cp.n, m) * np.sum(a * np.conj(b) * w))


def gauss_legendre_composite(panels: int, order: int, lo: float = 0.0, hi: float = 1.0):
    """Nodes and weights of a composite Gauss-Legendre rule on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def continuum_gram_quadrature(xi, xi2, g: float, panels: int = 16, order: int = 16) -> complex:
    """Integral over the alcove of Psi(x, xi) conj(Psi(x, xi2)) for n = 2.

    The alcove is the segment s * omega_1, 0 <= s <= 1, of length 1/sqrt(2).
    """
    if len(xi) != 2:
        raise NotImplementedError("alcove quadrature is implemented for n = 2 only")
    s, w = gauss_legendre_composite(panels, order)
    omega = np.array([0.5, -0.5])
    vals = np.array(
        [lieb_liniger_psi(si * omega, xi, g) * np.conj(lieb_liniger_psi(si * omega, xi2, g)) for si in s]
    )
    return complex(np.sum(w * vals) / math.sqrt(2.0))


def convergence_table(n: int, g: float, mu: Sequence[int], m_list: Sequence[int]) -> list[dict]:
    """One row per m: Bethe-vector error and (n = 2) diagonal Gram error."""
    cp = ContinuumParams(n, g)
    mu = tuple(int(k) for k in mu)
    xi_inf = solve_continuum_bethe(mu, cp)
    gram_inf = continuum_gram_quadrature(xi_inf, xi_inf, g).real if n == 2 else None
    rows = []
    for m in m_list:
        start = time.perf_counter()
        err_xi = float(np.linalg.norm(rescaled_lattice_vector(mu, m, cp) - xi_inf))
        err_gram = (
            abs(staircase_gram(mu, mu, m, cp).real - gram_inf) if gram_inf is not None else float("nan")
        )
        rows.append(
            {
                "n": n,
                "g": g,
                "mu": mu,
                "m": m,
                "t": rescaled_coupling(g, m),
                "err_xi": err_xi,
                "err_gram_diag": err_gram,
                "runtime_ms": 1000.0 * (time.perf_counter() - start),
                "xi_inf": xi_inf,
            }
        )
    return rows
