"""Sweep (n, m, t) and tabulate eigen-residuals, orthogonality and conditioning.

Usage: python scripts/spectrum_sweep.py [--n-max 4] [--m-max 5] [--t -0.7,0,0.3,0.9]
"""
import argparse
import time

import numpy as np

from alcove_bethe.alcove import ModelParams
from alcove_bethe.spectrum import (
    assemble_spectrum,
    gram_matrix,
    hamiltonian_mismatch,
    orthogonality_ratio,
    separation_check,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=4)
    ap.add_argument("--m-max", type=int, default=5)
    ap.add_argument("--t", default="-0.7,0,0.3,0.9")
    args = ap.parse_args(argv)

    print(f"{'n':>2} {'m':>2} {'t':>5} {'dim':>4} {'resid':>9} {'gram':>9} {'ham':>9} {'cond':>8} sep  ms")
    for n in range(2, args.n_max + 1):
        for m in range(1, args.m_max + 1):
            for t in (float(v) for v in args.t.split(",")):
                start = time.perf_counter()
                sd = assemble_spectrum(ModelParams(n, m, t))
                ratio = orthogonality_ratio(gram_matrix(sd))
                ham = hamiltonian_mismatch(sd)
                cond = np.linalg.cond(sd.eigenmatrix)
                ms = 1000 * (time.perf_counter() - start)
                print(
                    f"{n:>2} {m:>2} {t:>5g} {sd.dim:>4} {sd.residuals.max():>9.1e} {ratio:>9.1e} "
                    f"{ham:>9.1e} {cond:>8.1f} {'yes' if separation_check(sd) else 'NO ':<4} {ms:.0f}"
                )


if __name__ == "__main__":
    main()
