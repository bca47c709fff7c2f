"""Command-line runner: spectrum, bethe, verify and continuum subcommands.

Exit codes: 0 when every check passes, 1 for configuration errors, 2 when a
numerical check fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .alcove import ModelParams, enumerate_lattice
from .bethe import BetheConvergenceError, default_workers, solve_all
from .continuum import convergence_table
from .laplacian import (
    apply_laplacian_by_definition,
    build_laplacians,
    build_weights,
    inner_product,
    self_adjoint_combinations,
)
from .spectrum import assemble_spectrum, gram_matrix, hamiltonian_mismatch, orthogonality_ratio, report

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

RESIDUAL_TOL = 1e-9
GRAM_TOL = 1e-8
IDENTITY_TOL = 1e-12
COMMUTATOR_TOL = 1e-10
HAMILTONIAN_TOL = 1e-9
RANDOM_PAIRS = 100


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int
    m: int | None = None
    m_list: list[int] = field(default_factory=list)
    t: float | None = None
    g: float | None = None
    mu: tuple[int, ...] = ()
    ks: list[int] = field(default_factory=list)
    fmt: str = "json"
    output: str | None = None
    seed: int = 0
    tol: float | None = None

    def validate(self):
        if self.n < 2:
            raise ConfigError(f"--n must be >= 2, got {self.n}")
        if self.command in ("spectrum", "bethe", "verify"):
            if self.t is None:
                raise ConfigError("--t is required for lattice commands")
            if self.g is not None:
                raise ConfigError("supply exactly one of --t and --g")
            if not -1.0 < self.t < 1.0:
                raise ConfigError(f"t={self.t} outside repulsive regime (-1, 1)")
            if self.m is None or self.m < 1:
                raise ConfigError("--m must be a positive integer")
            bad = [k for k in self.ks if not 1 <= k <= self.n - 1]
            if bad:
                raise ConfigError(f"--k values {bad} outside 1..{self.n - 1}")
        else:
            if self.g is None:
                raise ConfigError("--g is required for the continuum command")
            if self.t is not None:
                raise ConfigError("supply exactly one of --t and --g")
            if not self.g > 0:
                raise ConfigError(f"g={self.g} must be positive")
            if not self.m_list:
                raise ConfigError("--m-list must be a non-empty comma-separated list")
            if any(b <= a for a, b in zip(self.m_list, self.m_list[1:])) or self.m_list[0] < 1:
                raise ConfigError(f"--m-list must be strictly ascending positive integers, got {self.m_list}")
            if len(self.mu) != self.n - 1 or any(k < 0 for k in self.mu):
                raise ConfigError(f"--mu needs {self.n - 1} nonnegative coordinates, got {self.mu}")
            if sum(self.mu) > self.m_list[0]:
                raise ConfigError(f"mu={self.mu} does not lie in P^({self.m_list[0]}); raise the m-list")
        return self


def _int_list(text: str | None) -> list[int]:
    if text is None or text.strip() == "":
        return []
    try:
        return [int(s) for s in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alcove-bethe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, hlp in [
        ("spectrum", "joint spectrum of the Laplacians via Bethe vectors"),
        ("bethe", "Bethe vectors for every point of the grid"),
        ("verify", "invariant suite with a pass/fail table"),
        ("continuum", "convergence table towards the Lieb-Liniger limit"),
    ]:
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--m", type=int)
        p.add_argument("--m-list")
        p.add_argument("--t", type=float)
        p.add_argument("--g", type=float)
        p.add_argument("--mu", help="comma-separated fundamental-weight coordinates")
        p.add_argument("--k", help="comma-separated operator indices")
        p.add_argument("--format", choices=["json", "csv"], default="json" if name in ("spectrum", "bethe") else "csv")
        p.add_argument("-o", "--output")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol-override", type=float)
    return parser


def config_from_args(args) -> RunConfig:
    mu = tuple(_int_list(args.mu))
    if not mu and args.command == "continuum":
        mu = (0,) * (args.n - 1)
    return RunConfig(
        command=args.command,
        n=args.n,
        m=args.m,
        m_list=_int_list(args.m_list),
        t=args.t,
        g=args.g,
        mu=mu,
        ks=_int_list(args.k),
        fmt=args.format,
        output=args.output,
        seed=args.seed,
        tol=args.tol_override,
    ).validate()


def _emit(text: str, cfg: RunConfig):
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _params(cfg: RunConfig) -> ModelParams:
    return ModelParams(cfg.n, cfg.m, cfg.t)


def cmd_spectrum(cfg: RunConfig) -> int:
    sd = assemble_spectrum(_params(cfg), default_workers())
    rep = report(sd, cfg.ks or None)
    if cfg.fmt == "json":
        _emit(json.dumps(rep, indent=2) + "\n", cfg)
    else:
        rows = []
        for k, vals in rep["spectra"].items():
            for sol, (re, im) in zip(sd.solutions, vals):
                rows.append([int(k), ";".join(map(str, sol.mu)), re, im])
        _emit(_csv_text(["k", "mu", "re", "im"], rows), cfg)
    ok = rep["max_eigen_residual"] <= _pick(cfg.tol, RESIDUAL_TOL) and rep["max_offdiag_gram"] <= GRAM_TOL
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_bethe(cfg: RunConfig) -> int:
    sols = solve_all(_params(cfg), default_workers())
    if cfg.fmt == "json":
        _emit(json.dumps([s.to_json() for s in sols], indent=2) + "\n", cfg)
    else:
        header = ["mu", "residual", "iterations"] + [f"xi_{j + 1}" for j in range(cfg.n)]
        rows = [[";".join(map(str, s.mu)), s.residual, s.iterations, *map(float, s.xi)] for s in sols]
        _emit(_csv_text(header, rows), cfg)
    return EXIT_OK


def _pick(override: float | None, default: float) -> float:
    return default if override is None else override


def _random_vectors(rng, dim: int, count: int):
    return rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))


def verification_table(params: ModelParams, seed: int = 0, tol: float | None = None) -> list[tuple[str, float, float]]:
    """Rows (check, worst value, threshold) for the invariant suite."""
    rng = np.random.default_rng(seed)
    n, m = params.n, params.m
    lap = build_laplacians(params)
    w = build_weights(params)
    points = enumerate_lattice(n, m)
    dim = len(points)
    rows = []

    def rel(a: complex, b: complex) -> float:
        return abs(a - b) / max(1.0, abs(a), abs(b))

    # <L_k psi, phi> = <psi, L_{n-k} phi>
    worst = 0.0
    for psi, phi in zip(_random_vectors(rng, dim, RANDOM_PAIRS), _random_vectors(rng, dim, RANDOM_PAIRS)):
        for k in range(1, n):
            worst = max(worst, rel(inner_product(lap[k] @ psi, phi, w), inner_product(psi, lap[n - k] @ phi, w)))
    rows.append(("adjointness", worst, _pick(tol, IDENTITY_TOL)))

    worst = 0.0
    for name, op in self_adjoint_combinations(params):
        for psi, phi in zip(_random_vectors(rng, dim, RANDOM_PAIRS), _random_vectors(rng, dim, RANDOM_PAIRS)):
            worst = max(worst, rel(inner_product(op @ psi, phi, w), inner_product(psi, op @ phi, w)))
    rows.append(("self-adjoint combinations", worst, _pick(tol, IDENTITY_TOL)))

    # Delta_lambda (L_k)_{lambda, mu} = Delta_mu (L_{n-k})_{mu, lambda}
    worst = 0.0
    for k in range(1, n):
        lhs = w[:, None] * lap[k]
        rhs = (w[:, None] * lap[n - k]).T
        worst = max(worst, float(np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max())))
    rows.append(("detailed balance", worst, _pick(tol, IDENTITY_TOL)))

    worst = 0.0
    for j in range(1, n):
        for k in range(j + 1, n):
            worst = max(worst, float(np.abs(lap[j] @ lap[k] - lap[k] @ lap[j]).max()))
    rows.append(("commutators", worst, _pick(tol, COMMUTATOR_TOL)))

    worst = 0.0
    for psi in _random_vectors(rng, dim, 10):
        for k in range(1, n):
            ref = lap[k] @ psi
            diff = apply_laplacian_by_definition(psi, k, params) - ref
            worst = max(worst, float(np.abs(diff).max() / max(1.0, np.abs(ref).max())))
    rows.append(("definition vs matrix", worst, _pick(tol, IDENTITY_TOL)))

    sd = assemble_spectrum(params, default_workers())
    rows.append(("eigen-residuals", float(sd.residuals.max()), _pick(tol, RESIDUAL_TOL)))
    rows.append(("gram orthogonality", orthogonality_ratio(gram_matrix(sd)), _pick(tol, GRAM_TOL)))
    rows.append(("hamiltonian spectrum", hamiltonian_mismatch(sd), _pick(tol, HAMILTONIAN_TOL)))
    return rows


def cmd_verify(cfg: RunConfig) -> int:
    rows = verification_table(_params(cfg), cfg.seed, cfg.tol)
    ok = all(v <= thr for _, v, thr in rows)
    if cfg.fmt == "json":
        text = json.dumps(
            [{"check": c, "value": v, "threshold": thr, "pass": v <= thr} for c, v, thr in rows], indent=2
        ) + "\n"
    else:
        body = [[c, "PASS" if v <= thr else "FAIL", v, thr] for c, v, thr in rows]
        text = _csv_text(["check", "status", "value", "threshold"], body)
    _emit(text, cfg)
    return EXIT_OK if ok else EXIT_NUMERIC


CONTINUUM_COLUMNS = ["n", "g", "mu", "m", "t", "err_xi", "err_gram_diag", "runtime_ms", "xi_inf"]


def cmd_continuum(cfg: RunConfig) -> int:
    rows = convergence_table(cfg.n, cfg.g, cfg.mu, cfg.m_list)
    if cfg.fmt == "csv":
        body = [
            [
                r["n"],
                float(r["g"]),
                ";".join(map(str, r["mu"])),
                r["m"],
                r["t"],
                r["err_xi"],
                r["err_gram_diag"],
                r["runtime_ms"],
                ";".join(f"{v:.17g}" for v in r["xi_inf"]),
            ]
            for r in rows
        ]
        _emit(_csv_text(CONTINUUM_COLUMNS, body), cfg)
    else:
        out = [{**r, "mu": list(r["mu"]), "xi_inf": [float(v) for v in r["xi_inf"]]} for r in rows]
        _emit(json.dumps(out, indent=2) + "\n", cfg)
    errs = [r["err_xi"] for r in rows]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    return EXIT_OK if decreasing else EXIT_NUMERIC


COMMANDS = {"spectrum": cmd_spectrum, "bethe": cmd_bethe, "verify": cmd_verify, "continuum": cmd_continuum}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[cfg.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BetheConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
