"""Hall-Littlewood form of the Bethe wave function and the eigenvalue symbols.

Psi_lambda(xi) is evaluated as the plain n!-term symmetrized sum over
permutations in lexicographic order.  Near the alcove walls the terms are
large and cancel, so each term is formed in extended precision (numpy
longdouble) and the sum is taken exactly with math.fsum over the double
head and tail of every term.  On platforms where longdouble is plain
double this degrades gracefully to double-precision terms.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .alcove import ModelParams, orbit_of_weight, positive_roots, rho_height, standard_parts
from .laplacian import poincare_ratio

WALL_EPS = 1e-9


@lru_cache(maxsize=None)
def permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp)


def check_spectral_point(xi, eps: float = WALL_EPS) -> np.ndarray:
    """Reject xi for which some root pairing is within eps of 2 pi Z.

    Inside the open alcove 2 pi Int(A) this is the same as keeping distance
    eps from the walls; the condition is permutation invariant, so permuted
    spectral points are accepted as well.
    """
    xi = np.asarray(xi, dtype=float)
    n = len(xi)
    for a, b in positive_roots(n):
        d = xi[a] - xi[b]
        if abs(d - 2 * np.pi * round(d / (2 * np.pi))) < eps:
            raise ValueError("degenerate spectral point")
    return xi


def _coefficients_ext(xs: np.ndarray, t: float) -> np.ndarray:
    # xs: longdouble array of permuted spectral points, one row per permutation
    coef = np.ones(len(xs), dtype=np.clongdouble)
    tt = np.longdouble(t)
    for a, b in positive_roots(xs.shape[1]):
        d = xs[:, a] - xs[:, b]
        z = np.cos(d) - 1j * np.sin(d)
        coef *= (1 - tt * z) / (1 - z)
    return coef


def hl_coefficients(xi, t: float) -> np.ndarray:
    """prod_{alpha > 0} (1 - t e^{-i<alpha, xi_s>}) / (1 - e^{-i<alpha, xi_s>}) for every permutation s."""
    xi = np.asarray(xi, dtype=float)
    xs = xi.astype(np.longdouble)[permutations(len(xi))]
    return _coefficients_ext(xs, t).astype(complex)


def _exact_sum(terms: np.ndarray) -> complex:
    out = []
    for part in (terms.real, terms.imag):
        head = part.astype(float)
        tail = (part - head).astype(float)
        out.append(math.fsum(np.concatenate([head, tail])))
    return complex(*out)


def _csum(terms: np.ndarray) -> complex:
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def evaluate_psi(lam: Sequence[int], xi, params: ModelParams) -> complex:
    """Psi_lambda(xi) for a weight lambda (any integer weight coordinates)."""
    return evaluate_psi_many([lam], xi, params.t)[0]


def evaluate_psi_many(lams: Iterable[Sequence[int]], xi, t: float) -> np.ndarray:
    xi = check_spectral_point(xi)
    n = len(xi)
    xs = xi.astype(np.longdouble)[permutations(n)]
    coef = _coefficients_ext(xs, t)
    # <lambda, xi_s> from the integer parts p of lambda: p . xi_s - mean(p) * sum(xi_s)
    total = xs.sum(axis=1)
    out = []
    for lam in lams:
        p = standard_parts(lam)
        arg = xs @ p.astype(np.longdouble) - (np.longdouble(int(p.sum())) / n) * total
        out.append(_exact_sum(coef * (np.cos(arg) + 1j * np.sin(arg))))
    return np.array(out)


def psi_zero_product(n: int, t: float) -> float:
    """Poincare polynomial of S_n: prod_{alpha > 0} (1 - t^{1+ht}) / (1 - t^{ht})."""
    out = 1.0
    for root in positive_roots(n):
        out *= poincare_ratio(t, rho_height(root))
    return out


def eigenvalue_symbol(k: int, xi) -> complex:
    """E_k(xi) = sum over the orbit of omega_k of e^{i<nu, xi>}."""
    xi = np.asarray(xi, dtype=float)
    n = len(xi)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in 1..{n - 1}, got {k}")
    phases = np.exp(1j * np.array([nu @ xi for nu in orbit_of_weight(k, n)]))
    return _csum(phases)


def hamiltonian_symbol(xi) -> float:
    xi = np.asarray(xi, dtype=float)
    return float(np.sum(1.0 - np.cos(xi)))
