"""Command-line front end.

    pdml classify  --mass gaussian --lambda -2,0 --gamma 1,0
    pdml verify    --suite all --mass lorentzian --lambda -2,1
    pdml table     --what phi --nmax 3 --mass exp-up
    pdml surface   --which psi_sq --axes x_zi --z 3,0 --mass gaussian

Complex flags take "re,im" pairs; --grid takes "min,max,n".  A JSON config
file (--config) may supply any flag value; explicit flags override it.
Exit codes: 0 all checks passed, 1 check failure, 2 configuration error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys as _sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import altspectral, coherent, spectrum
from .massmodel import F_limits, MassModelError, make_mass
from .mexpr import MassExprError
from .numerics import Grid, SampledFunction
from .spectrum import NonIntegrableError, Verdict
from .system import SystemParams, commutator_residual, factorization_residual, gaussian_probes

__all__ = ["RunConfig", "main", "cmd_classify", "cmd_verify", "cmd_table", "cmd_surface"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3

SUITES = ("commutators", "factorization", "ladder", "eigen", "biortho", "coherent", "alt", "all")

# residual tolerances per mass kind: the exp-up coefficients grow like e^x,
# so its finite-difference checks run coarser
_RESIDUAL_TOL = {"constant": 1e-6, "gaussian": 1e-5, "lorentzian": 1e-5, "exp-up": 1e-4, "custom": 1e-4}
_BIORTHO_TOL = {"constant": 1e-8, "gaussian": 1e-7}
_BIORTHO_TOL_DEFAULT = 1e-6
_SERIES_TOL = 1e-8
_SHIFT_TOL = 1e-8
_RATIO_TOL = 1e-8
_ENERGY_TOL = 1e-12


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    mass: str = "gaussian"
    mass_expr: Optional[str] = None
    m0: float = 1.0
    lam: complex = -2.0 + 0j
    gamma: complex = 1.0 + 0j
    hbar: float = 1.0
    nmax: int = 6
    z: complex = 3.0 + 0j
    grid: Optional[Grid] = None
    suite: str = "all"
    what: str = "phi"
    which: str = "psi_sq"
    axes: str = "x_zi"
    x: Optional[float] = None
    out: Optional[str] = None
    format: str = ""


def _parse_complex(text: str) -> complex:
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"expected a complex value as 're,im', got {text!r}")


def _parse_grid(raw) -> Grid:
    parts = list(raw) if isinstance(raw, (list, tuple)) else str(raw).split(",")
    if len(parts) != 3:
        raise ConfigError(f"expected grid as 'min,max,n', got {raw!r}")
    try:
        return Grid(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"invalid grid {raw!r}: {exc}") from exc


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _fmt_complex(v: complex) -> str:
    v = complex(v)
    return f"{_fmt(v.real)},{_fmt(v.imag)}"


# let option values such as "-2,0" or "-8,4,2001" parse as values, not flags
_NEGATIVE_VALUE = re.compile(r"^-\d")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdml", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser._negative_number_matcher = _NEGATIVE_VALUE
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("classify", "verify", "table", "surface"):
        p = sub.add_parser(name)
        p._negative_number_matcher = _NEGATIVE_VALUE
        p.add_argument("--config", help="JSON file with RunConfig fields; flags override")
        p.add_argument("--mass", help="built-in mass name: constant|gaussian|lorentzian|exp-up")
        p.add_argument("--mass-expr", dest="mass_expr", help="custom mass expression in x")
        p.add_argument("--m0", type=float, help="positive mass scale (default 1)")
        p.add_argument("--lambda", dest="lam", help="ladder shift, 're,im' (default -2,0)")
        p.add_argument("--gamma", help="integration constant, 're,im' (default 1,0)")
        p.add_argument("--hbar", type=float, help="positive hbar (default 1)")
        p.add_argument("--nmax", type=int, help="highest family index (default 6)")
        p.add_argument("--z", help="coherent-state label, 're,im' (default 3,0)")
        p.add_argument("--grid", help="'min,max,n' grid override")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        if name == "verify":
            p.add_argument("--suite", choices=SUITES, help="check suite (default all)")
        if name == "table":
            p.add_argument("--what", choices=("phi", "psi", "potential", "vacua"))
        if name == "surface":
            p.add_argument("--which", choices=("psi_sq", "alpha_phi_sq"))
            p.add_argument("--axes", choices=("x_zi", "zr_zi"))
            p.add_argument("--x", type=float, help="fixed x for zr_zi surfaces")
    return parser


_COMPLEX_KEYS = ("lam", "gamma", "z")
_FILE_KEY_ALIASES = {"lambda": "lam"}


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    valid = {f.name for f in fields(RunConfig)}
    file_values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        for key, value in raw.items():
            key = _FILE_KEY_ALIASES.get(key, key)
            if key not in valid:
                raise ConfigError(f"unknown config key {key!r}")
            file_values[key] = value
    merged = dict(file_values)
    for f in fields(RunConfig):
        flag_val = getattr(args, f.name, None)
        if flag_val is not None:
            merged[f.name] = flag_val
    for key, value in merged.items():
        if key in _COMPLEX_KEYS:
            value = _parse_complex(value)
        elif key == "grid" and not isinstance(value, Grid):
            value = _parse_grid(value)
        elif key in ("m0", "hbar") and value is not None:
            value = float(value)
        elif key == "x" and value is not None:
            value = float(value)
        elif key == "nmax" and value is not None:
            value = int(value)
        setattr(cfg, key, value)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.lam == 0:
        raise ConfigError("lambda must be nonzero (H and the ladder operator would commute)")
    if not cfg.m0 > 0:
        raise ConfigError(f"m0 must be positive, got {cfg.m0}")
    if not cfg.hbar > 0:
        raise ConfigError(f"hbar must be positive, got {cfg.hbar}")
    if cfg.nmax < 0:
        raise ConfigError(f"nmax must be non-negative, got {cfg.nmax}")
    if cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}")
    if cfg.mass_expr is None and cfg.mass not in ("constant", "gaussian", "lorentzian", "exp-up"):
        raise ConfigError(f"unknown mass {cfg.mass!r} (use --mass-expr for custom profiles)")


def make_system(cfg: RunConfig) -> SystemParams:
    try:
        if cfg.mass_expr is not None:
            mass = make_mass(cfg.mass_expr, cfg.m0, is_expr=True)
        else:
            mass = make_mass(cfg.mass, cfg.m0)
    except (MassExprError, MassModelError) as exc:
        raise ConfigError(f"invalid mass profile: {exc}") from exc
    try:
        return SystemParams(cfg.lam, cfg.gamma, mass, cfg.hbar)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# classify --------------------------------------------------------------------


def _json_extended_real(v: float):
    # strict JSON has no Infinity token
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def cmd_classify(cfg: RunConfig) -> dict:
    sys_ = make_system(cfg)
    cls = spectrum.classify(sys_)
    rng = F_limits(sys_.mass)
    report = {
        "verdict": cls.verdict.value,
        "case": cls.case,
        "heuristic": cls.heuristic,
        "F_limits": {"f_minus": _json_extended_real(rng.f_minus),
                     "f_plus": _json_extended_real(rng.f_plus),
                     "heuristic": rng.heuristic},
        "E0": _fmt_complex(spectrum.eigen_E0(sys_)),
        "E_n": [{"n": n, "value": _fmt_complex(spectrum.eigen_En(sys_, n))}
                for n in range(cfg.nmax + 1)],
    }
    return report


# verify ----------------------------------------------------------------------


def _check(name: str, residual: float, tolerance: float) -> dict:
    return {"name": name, "residual": float(residual), "tolerance": float(tolerance),
            "pass": bool(residual < tolerance)}


def _skip(name: str, reason: str) -> dict:
    return {"name": name, "skipped_reason": reason}


def _residual_probes(sys_: SystemParams, grid: Grid, integrable: bool):
    probes = gaussian_probes(grid)
    if integrable:
        xs = grid.points
        for n in range(3):
            probes.append(SampledFunction(grid, spectrum.phi_n_array(sys_, n, xs, 1.0)))
    return probes


def cmd_verify(cfg: RunConfig) -> dict:
    sys_ = make_system(cfg)
    kind = sys_.mass.kind
    tol = _RESIDUAL_TOL[kind]
    suites = [cfg.suite] if cfg.suite != "all" else list(SUITES[:-1])
    grid = cfg.grid if cfg.grid is not None else spectrum.auto_grid(sys_, "residual")
    cls = spectrum.classify(sys_, trust_heuristic_limits=True)
    integrable = cls.verdict is Verdict.INTEGRABLE
    checks: list[dict] = []

    for suite in suites:
        if suite == "commutators":
            probes = _residual_probes(sys_, grid, integrable)
            checks.append(_check("commutator_H_A", commutator_residual(sys_, "H_A", probes), tol))
            checks.append(_check("commutator_A_B", commutator_residual(sys_, "A_B", probes), tol))
        elif suite == "factorization":
            probes = _residual_probes(sys_, grid, integrable)
            checks.append(_check("factorization_BA", factorization_residual(sys_, probes), tol))
        elif suite == "ladder":
            for name, res in spectrum.ladder_residuals(sys_, min(cfg.nmax, 4), grid).items():
                checks.append(_check(f"ladder_{name}", res, tol))
        elif suite == "eigen":
            for side in ("phi", "psi"):
                for n in range(cfg.nmax + 1):
                    checks.append(_check(f"eigen_{side}_{n}",
                                         spectrum.eigen_residual(sys_, side, n, grid), tol))
        elif suite == "biortho":
            if not integrable:
                checks.append(_skip("biorthonormality",
                                    f"family not square-integrable (case {cls.case})"))
            else:
                tol_b = _BIORTHO_TOL.get(kind, _BIORTHO_TOL_DEFAULT)
                gram = spectrum.biorthonormality_matrix(sys_, cfg.nmax)
                checks.append(_check("pairing_psi0_phi0", abs(gram[0, 0] - 1.0), tol_b))
                rng = F_limits(sys_.mass)
                if math.isinf(rng.f_minus) and math.isinf(rng.f_plus):
                    dev = float(np.max(np.abs(gram - np.eye(cfg.nmax + 1))))
                    checks.append(_check("biorthonormality", dev, tol_b))
                else:
                    # the ladder integration by parts picks up boundary terms at
                    # finite F endpoints, so the full Gram identity does not hold
                    checks.append(_skip("biorthonormality",
                                        "finite F endpoint: Gram matrix is not the identity "
                                        "beyond the vacuum pairing"))
        elif suite == "coherent":
            if not integrable:
                checks.append(_skip("coherent_series_equivalence",
                                    f"family not square-integrable (case {cls.case})"))
            elif sys_.lam.imag != 0 or sys_.gamma.imag != 0:
                # complex parameters give the Hermite recurrence a complex
                # argument, and |H_n| then grows like exp(|Im arg| sqrt(2n)):
                # the 60-term tail is not numerically comparable in doubles
                checks.append(_skip("coherent_series_equivalence",
                                    "truncated series comparable only for real lambda, gamma"))
            else:
                z_eq = cfg.z if abs(cfg.z) <= 2.0 else 2.0 * cfg.z / abs(cfg.z)
                for side in ("phi", "psi"):
                    dev = coherent.series_equivalence_deviation(sys_, z_eq, grid, 60, side)
                    checks.append(_check(f"coherent_series_{side}", dev, _SERIES_TOL))
            checks.append(_check("coherent_eigen",
                                 coherent.coherent_eigen_residual(sys_, cfg.z, grid), tol))
            if sys_.lam.imag == 0 and sys_.gamma.imag == 0:
                checks.append(_check("coherent_shift_relation",
                                     coherent.shift_relation_residual(sys_, cfg.z, grid), _SHIFT_TOL))
            else:
                checks.append(_skip("coherent_shift_relation",
                                    "defined only for real lambda and gamma"))
        elif suite == "alt":
            xs = grid.points
            for n in range(min(cfg.nmax, 5) + 1):
                main_vals = spectrum.phi_n_array(sys_, n, xs, 1.0)
                alt_vals = altspectral.phi_n_alt_array(sys_, n, xs)
                mask = np.abs(main_vals) >= 1e-2 * np.max(np.abs(main_vals))
                ratio = alt_vals[mask] / main_vals[mask]
                center = np.median(ratio.real) + 1j * np.median(ratio.imag)
                dev = float(np.max(np.abs(ratio - center)) / abs(center))
                checks.append(_check(f"alt_ratio_constancy_{n}", dev, _RATIO_TOL))
                rot = altspectral.rotated_oscillator(sys_)
                e_alt = altspectral.htheta_energy(rot, n) - sys_.hbar ** 2 * sys_.gamma ** 2 / 2.0
                e_main = spectrum.eigen_En(sys_, n)
                checks.append(_check(f"alt_energy_{n}",
                                     abs(e_alt - e_main) / max(abs(e_main), 1e-12), _ENERGY_TOL))
    all_pass = all(c.get("pass", True) for c in checks)
    return {"system": {"mass": kind, "m0": sys_.mass.m0, "lambda": _fmt_complex(sys_.lam),
                       "gamma": _fmt_complex(sys_.gamma), "hbar": sys_.hbar},
            "checks": checks, "all_pass": all_pass}


# table -----------------------------------------------------------------------


def _plot_grid(cfg: RunConfig, sys_: SystemParams) -> Grid:
    if cfg.grid is not None:
        return cfg.grid
    base = spectrum.auto_grid(sys_, "residual")
    return Grid(base.x_min, base.x_max, 401)


def cmd_table(cfg: RunConfig) -> str:
    sys_ = make_system(cfg)
    grid = _plot_grid(cfg, sys_)
    xs = grid.points
    cls = spectrum.classify(sys_, trust_heuristic_limits=True)
    norm = spectrum.norm_constant(sys_) if cls.verdict is Verdict.INTEGRABLE else 1.0 + 0j
    lines = ["quantity,n,x,re,im"]

    def block(name: str, n: int, values: np.ndarray):
        for x, v in zip(xs, values):
            lines.append(f"{name},{n},{_fmt(x)},{_fmt(v.real)},{_fmt(v.imag)}")

    if cfg.what == "potential":
        from .system import potential_array
        block("potential", 0, potential_array(sys_, xs))
    elif cfg.what == "vacua":
        block("phi0", 0, spectrum.vacuum_phi0_array(sys_, xs, norm))
        block("psi0", 0, spectrum.vacuum_psi0_array(sys_, xs, np.conj(norm)))
    elif cfg.what == "phi":
        for n in range(cfg.nmax + 1):
            block("phi", n, spectrum.phi_n_array(sys_, n, xs, norm))
    elif cfg.what == "psi":
        for n in range(cfg.nmax + 1):
            block("psi", n, spectrum.psi_n_array(sys_, n, xs, np.conj(norm)))
    else:
        raise ConfigError(f"unknown table kind {cfg.what!r}")
    return "\n".join(lines) + "\n"


# surface ---------------------------------------------------------------------


def cmd_surface(cfg: RunConfig) -> str:
    sys_ = make_system(cfg)
    cls = spectrum.classify(sys_, trust_heuristic_limits=True)
    norm = spectrum.norm_constant(sys_) if cls.verdict is Verdict.INTEGRABLE else 1.0 + 0j
    grid = _plot_grid(cfg, sys_)
    xs = grid.points
    z_axis = np.linspace(-3.0, 3.0, 61)

    if cfg.axes == "x_zi":
        zs = cfg.z.real + 1j * z_axis
        header = "x\\zi," + ",".join(_fmt(v) for v in z_axis)
        s_psi, s_alpha = coherent.bicoherent_surfaces(sys_, xs, zs, norm)
        surf = s_psi if cfg.which == "psi_sq" else s_alpha
        rows = [header]
        for j, x in enumerate(xs):
            rows.append(_fmt(x) + "," + ",".join(_fmt(v) for v in surf[:, j]))
        return "\n".join(rows) + "\n"

    if cfg.axes == "zr_zi":
        if cfg.x is None:
            raise ConfigError("zr_zi surfaces need a fixed x (--x)")
        x_fixed = np.array([cfg.x])
        header = "zr\\zi," + ",".join(_fmt(v) for v in z_axis)
        rows = [header]
        for zr in z_axis:
            zs = zr + 1j * z_axis
            s_psi, s_alpha = coherent.bicoherent_surfaces(sys_, x_fixed, zs, norm)
            surf = s_psi if cfg.which == "psi_sq" else s_alpha
            rows.append(_fmt(zr) + "," + ",".join(_fmt(v) for v in surf[:, 0]))
        return "\n".join(rows) + "\n"

    raise ConfigError(f"unknown surface axes {cfg.axes!r}")


# entry point -------------------------------------------------------------------


def _emit(payload: str, out: Optional[str]) -> int:
    if out is None:
        _sys.stdout.write(payload)
        return EXIT_OK
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    except OSError as exc:
        _sys.stderr.write(f"pdml: cannot write {out}: {exc}\n")
        return EXIT_IO
    return EXIT_OK


_NATIVE_FORMAT = {"classify": "json", "verify": "json", "table": "csv", "surface": "csv"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if cfg.format and cfg.format != _NATIVE_FORMAT[args.command]:
            raise ConfigError(
                f"{args.command} emits {_NATIVE_FORMAT[args.command]}, not {cfg.format}")
        if args.command == "classify":
            payload = json.dumps(cmd_classify(cfg), indent=2) + "\n"
            code = EXIT_OK
        elif args.command == "verify":
            report = cmd_verify(cfg)
            payload = json.dumps(report, indent=2) + "\n"
            code = EXIT_OK if report["all_pass"] else EXIT_CHECK_FAILED
        elif args.command == "table":
            payload = cmd_table(cfg)
            code = EXIT_OK
        else:
            payload = cmd_surface(cfg)
            code = EXIT_OK
    except ConfigError as exc:
        _sys.stderr.write(f"pdml: configuration error: {exc}\n")
        return EXIT_CONFIG
    except NonIntegrableError as exc:
        _sys.stderr.write(f"pdml: {exc}\n")
        return EXIT_CONFIG
    emit_code = _emit(payload, cfg.out)
    return emit_code if emit_code != EXIT_OK else code


if __name__ == "__main__":
    raise SystemExit(main())
