#!/usr/bin/env python3
"""Sweep the operator-identity checks over the built-in masses and a grid of
(lambda, gamma) values, printing one row per system.

Usage:
    python scripts/identity_sweep.py [--nmax 3] [--json out.json]
"""

import argparse
import json
import sys
import time

from pdml.massmodel import exp_up_mass, gaussian_mass, lorentzian_mass
from pdml.numerics import SampledFunction
from pdml.spectrum import auto_grid, eigen_residual, ladder_residuals, phi_n_array
from pdml.system import SystemParams, commutator_residual, factorization_residual, gaussian_probes

LAMBDAS = (-2.0 + 0j, -2.0 + 2j)
GAMMAS = (1.0 + 0j, 1.0 + 2j)
TOLS = {"gaussian": 1e-5, "lorentzian": 1e-5, "exp-up": 1e-4}


def sweep(nmax: int):
    rows = []
    for mass in (gaussian_mass(), lorentzian_mass(), exp_up_mass()):
        for lam in LAMBDAS:
            for gam in GAMMAS:
                sys_ = SystemParams(lam, gam, mass)
                grid = auto_grid(sys_, "residual")
                probes = gaussian_probes(grid)
                probes += [SampledFunction(grid, phi_n_array(sys_, n, grid.points, 1.0))
                           for n in range(3)]
                t0 = time.time()
                row = {
                    "mass": mass.kind,
                    "lambda": [lam.real, lam.imag],
                    "gamma": [gam.real, gam.imag],
                    "commutator_H_A": commutator_residual(sys_, "H_A", probes),
                    "commutator_A_B": commutator_residual(sys_, "A_B", probes),
                    "factorization": factorization_residual(sys_, probes),
                    "ladder": max(ladder_residuals(sys_, nmax, grid).values()),
                    "eigen": max(eigen_residual(sys_, side, n, grid)
                                 for side in ("phi", "psi") for n in range(nmax + 1)),
                    "seconds": time.time() - t0,
                }
                row["pass"] = all(row[k] < TOLS[mass.kind] for k in
                                  ("commutator_H_A", "commutator_A_B", "factorization",
                                   "ladder", "eigen"))
                rows.append(row)
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nmax", type=int, default=3)
    parser.add_argument("--json", help="also dump the table as JSON")
    args = parser.parse_args()

    rows = sweep(args.nmax)
    header = f"{'mass':<11}{'lambda':<12}{'gamma':<12}{'[H,A]':>10}{'[A,B]':>10}" \
             f"{'BA':>10}{'ladder':>10}{'eigen':>10}  ok"
    print(header)
    print("-" * len(header))
    for r in rows:
        lam = f"{r['lambda'][0]:g}{r['lambda'][1]:+g}i"
        gam = f"{r['gamma'][0]:g}{r['gamma'][1]:+g}i"
        print(f"{r['mass']:<11}{lam:<12}{gam:<12}"
              f"{r['commutator_H_A']:>10.2e}{r['commutator_A_B']:>10.2e}"
              f"{r['factorization']:>10.2e}{r['ladder']:>10.2e}{r['eigen']:>10.2e}"
              f"  {'yes' if r['pass'] else 'NO'}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if all(r["pass"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
