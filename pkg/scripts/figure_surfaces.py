#!/usr/bin/env python3
"""Regenerate the bi-coherent-state surface data in the figure regime
(z_r = 3, gamma = 1, lambda_R = -2, hbar = m0 = 1): for each mass, the
|psi(z;x)|^2 and |alpha(z,lambda) phi(z1;x)|^2 surfaces over (x, z_i), in a
self-adjoint variant (lambda_I = 0, the two surfaces coincide) and a
non-self-adjoint one (lambda_I = 2, they split).

Usage:
    python scripts/figure_surfaces.py [--outdir surfaces/]

Note: the third model's surfaces use the exponentially growing mass, the
subject of that worked example (its figure caption text repeats the
rational-mass wording).
"""

import argparse
import pathlib
import sys

from pdml.cli import RunConfig, cmd_surface

CASES = [
    ("gaussian", None), ("lorentzian", None), ("exp-up", None),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="surfaces")
    args = parser.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for mass, _ in CASES:
        for lam_i, tag in ((0.0, "selfadjoint"), (2.0, "nonselfadjoint")):
            for which in ("psi_sq", "alpha_phi_sq"):
                cfg = RunConfig(mass=mass, lam=complex(-2.0, lam_i), gamma=1.0 + 0j,
                                z=3.0 + 0j, which=which, axes="x_zi")
                csv_text = cmd_surface(cfg)
                path = outdir / f"{mass.replace('-', '_')}_{tag}_{which}.csv"
                path.write_text(csv_text, encoding="utf-8")
                print(f"wrote {path}")
    print(f"done: {4 * len(CASES)} surfaces in {outdir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
