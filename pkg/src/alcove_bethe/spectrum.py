"""Joint eigenbasis of the Laplacians and the checks built on it."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .alcove import ModelParams, enumerate_lattice
from .bethe import BetheSolution, default_workers, solve_all
from .laplacian import build_hamiltonian, build_laplacians, build_weights, weighted_norm
from .wavefunction import eigenvalue_symbol, evaluate_psi_many, hamiltonian_symbol

SEPARATION_TOL = 1e-8


@dataclass
class SpectralData:
    params: ModelParams
    solutions: list[BetheSolution]
    eigenmatrix: np.ndarray  # column mu holds (Psi_lambda(xi_mu))_lambda
    eigenvalues: np.ndarray  # eigenvalues[k - 1, mu] = E_k(xi_mu)
    weights: np.ndarray
    residuals: np.ndarray  # residuals[k - 1, mu], weighted relative

    @property
    def dim(self) -> int:
        return len(self.solutions)


def eigen_residuals(laplacians, vectors, eigenvalues, weights) -> np.ndarray:
    """||L_k v - E_k v|| / ||v|| in the weighted norm, per k and column."""
    out = np.zeros(eigenvalues.shape)
    for k, lap in laplacians.items():
        for j in range(vectors.shape[1]):
            v = vectors[:, j]
            out[k - 1, j] = weighted_norm(lap @ v - eigenvalues[k - 1, j] * v, weights) / weighted_norm(
                v, weights
            )
    return out


def assemble_spectrum(params: ModelParams, workers: int | None = None) -> SpectralData:
    params.require_repulsive()
    n, t = params.n, params.t
    points = enumerate_lattice(n, params.m)
    workers = workers or default_workers()
    solutions = solve_all(params, workers)

    def column(sol):
        return evaluate_psi_many(points, sol.xi, t)

    if workers == 1:
        cols = [column(s) for s in solutions]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cols = list(pool.map(column, solutions))
    vectors = np.array(cols).T
    eigenvalues = np.array([[eigenvalue_symbol(k, s.xi) for s in solutions] for k in range(1, n)])
    weights = build_weights(params)
    residuals = eigen_residuals(build_laplacians(params), vectors, eigenvalues, weights)
    return SpectralData(params, solutions, vectors, eigenvalues, weights, residuals)


def gram_matrix(sd: SpectralData) -> np.ndarray:
    """G[mu, mu'] = <Psi(xi_mu), Psi(xi_mu')> in the weighted inner product."""
    v = sd.eigenmatrix
    return v.T @ (np.conj(v) * sd.weights[:, None])


def orthogonality_ratio(gram: np.ndarray) -> float:
    """max |off-diagonal| / min diagonal."""
    diag = np.real(np.diag(gram))
    off = gram - np.diag(np.diag(gram))
    return float(np.abs(off).max() / diag.min()) if len(diag) > 1 else 0.0


def separation_check(sd: SpectralData, tol: float = SEPARATION_TOL) -> bool:
    """True iff the vectors (E_1, ..., E_{n-1})(xi_mu) are pairwise distinct."""
    ev = sd.eigenvalues.T
    for a in range(sd.dim):
        gaps = np.abs(ev[a + 1 :] - ev[a]).max(axis=1) if a + 1 < sd.dim else np.array([])
        if np.any(gaps <= tol):
            return False
    return True


def sorted_spectrum(values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    order = np.lexsort((values.imag, values.real))
    return values[order]


def multisets_close(a, b, tol: float) -> bool:
    a, b = sorted_spectrum(a), sorted_spectrum(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= tol))


def hamiltonian_eigenvalues(sd: SpectralData) -> np.ndarray:
    return np.array([hamiltonian_symbol(s.xi) for s in sd.solutions])


def hamiltonian_mismatch(sd: SpectralData) -> float:
    """Largest gap between the dense spectrum of H and sum_j (1 - cos xi_j)."""
    h = build_hamiltonian(sd.params)
    w = np.sqrt(sd.weights)
    # symmetrize in the weighted inner product before calling eigvalsh
    sym = w[:, None] * h / w[None, :]
    dense = np.sort(np.linalg.eigvalsh(0.5 * (sym + sym.T)))
    return float(np.abs(dense - np.sort(hamiltonian_eigenvalues(sd))).max())


def report(sd: SpectralData, ks=None) -> dict:
    gram = gram_matrix(sd)
    ks = list(ks) if ks else list(range(1, sd.params.n))
    return {
        "params": {"n": sd.params.n, "m": sd.params.m, "t": sd.params.t},
        "dim": sd.dim,
        "max_eigen_residual": float(sd.residuals.max()),
        "max_offdiag_gram": orthogonality_ratio(gram),
        "spectra": {
            str(k): [[float(z.real), float(z.imag)] for z in sd.eigenvalues[k - 1]] for k in ks
        },
        "hamiltonian_eigenvalues": [float(e) for e in hamiltonian_eigenvalues(sd)],
    }
