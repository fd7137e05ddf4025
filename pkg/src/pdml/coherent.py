"""Bi-coherent states: closed forms, truncated series, eigenvalue and
shift-relation residuals, and the resolution-of-identity quadrature.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .massmodel import F_array
from .numerics import Grid, SampledFunction, residual_against, simpson_weights
from .spectrum import (
    norm_constant,
    phi_n_array,
    psi_n_array,
    vacuum_phi0_array,
    vacuum_psi0_array,
)
from .system import SystemParams, apply_first_order, op_a, op_b_dagger

__all__ = [
    "CoherentLabel",
    "CoherentNormalizers",
    "FamilyTerm",
    "SERIES_MAX_TERMS",
    "alpha_shift",
    "bicoherent_surfaces",
    "coherent_eigen_residual",
    "coherent_normalizers",
    "coherent_phi",
    "coherent_phi_array",
    "coherent_psi",
    "coherent_psi_array",
    "coherent_series",
    "coherent_series_array",
    "m_phi",
    "m_psi",
    "resolution_of_identity",
    "series_equivalence_deviation",
    "shift_relation_residual",
    "shifted_argument",
]

SQRT2 = math.sqrt(2.0)
SERIES_MAX_TERMS = 200

# one term of a finite linear combination over the eigenfamilies:
# (side, index, coefficient)
FamilyTerm = Tuple[str, int, complex]


@dataclass(frozen=True)
class CoherentLabel:
    """Complex label z of a coherent state on one family side."""

    z: complex
    side: str = "phi"

    def __post_init__(self):
        if self.side not in ("phi", "psi"):
            raise ValueError(f"side must be 'phi' or 'psi', got {self.side!r}")


@dataclass(frozen=True)
class CoherentNormalizers:
    """The three z-dependent scalars of the closed forms; all equal 1 at z=0."""

    m_phi: complex
    m_psi: complex
    alpha_shift: complex


def coherent_normalizers(sys: SystemParams, z: complex) -> CoherentNormalizers:
    return CoherentNormalizers(m_phi(sys, z), m_psi(sys, z), alpha_shift(sys, z))


def m_phi(sys: SystemParams, z: complex) -> complex:
    """Normalizer exp(-|z|^2/2 + z sqrt(2) hbar^2 gamma + z^2 hbar^2 lam/2)."""
    hb2 = sys.hbar ** 2
    return cmath.exp(-0.5 * abs(z) ** 2 + z * SQRT2 * hb2 * sys.gamma + 0.5 * z * z * hb2 * sys.lam)


def m_psi(sys: SystemParams, z: complex) -> complex:
    """Normalizer exp(-|z|^2/2 - z sqrt(2) conj(gamma/lam) + z^2/(2 hbar^2 conj(lam)))."""
    hb2 = sys.hbar ** 2
    return cmath.exp(-0.5 * abs(z) ** 2
                     - z * SQRT2 * (sys.gamma / sys.lam).conjugate()
                     + z * z / (2.0 * hb2 * sys.lam.conjugate()))


def coherent_phi_array(sys: SystemParams, z: complex, xs: np.ndarray,
                       normalization: complex | None = None) -> np.ndarray:
    """phi(z; x) = M_phi exp(-z lam sqrt(2) F(x)) phi_0(x), eigenstate of a."""
    f = F_array(sys.mass, np.asarray(xs, float))
    return m_phi(sys, z) * np.exp(-z * sys.lam * SQRT2 * f) * vacuum_phi0_array(sys, xs, normalization)


def coherent_psi_array(sys: SystemParams, z: complex, xs: np.ndarray,
                       normalization: complex | None = None) -> np.ndarray:
    """psi(z; x) = M_psi exp(z sqrt(2) F(x)/hbar^2) psi_0(x), eigenstate of b-dagger."""
    f = F_array(sys.mass, np.asarray(xs, float))
    return (m_psi(sys, z) * np.exp(z * SQRT2 * f / sys.hbar ** 2)
            * vacuum_psi0_array(sys, xs, normalization))


def coherent_phi(sys: SystemParams, z: complex, x: float,
                 normalization: complex | None = None) -> complex:
    return complex(coherent_phi_array(sys, z, np.array([float(x)]), normalization)[0])


def coherent_psi(sys: SystemParams, z: complex, x: float,
                 normalization: complex | None = None) -> complex:
    return complex(coherent_psi_array(sys, z, np.array([float(x)]), normalization)[0])


def coherent_series_array(sys: SystemParams, z: complex, xs: np.ndarray, n_terms: int = 60,
                          side: str = "phi", normalization: complex | None = None
                          ) -> tuple[np.ndarray, float]:
    """Truncated exp(-|z|^2/2) sum z^n/sqrt(n!) (phi_n or psi_n).

    Returns (values, magnitude of the last term relative to the running
    maximum) as truncation telemetry.
    """
    if not 1 <= n_terms <= SERIES_MAX_TERMS:
        raise ValueError(f"n_terms must be in [1, {SERIES_MAX_TERMS}], got {n_terms}")
    family = phi_n_array if side == "phi" else psi_n_array
    xs = np.asarray(xs, dtype=float)
    if normalization is None:
        normalization = norm_constant(sys)
        if side == "psi":
            normalization = normalization.conjugate()
    total = np.zeros(xs.shape, dtype=complex)
    scale = cmath.exp(-0.5 * abs(z) ** 2)
    z_pow = 1.0 + 0j
    last_mag = 0.0
    for n in range(n_terms):
        term = z_pow * family(sys, n, xs, normalization)
        total += term
        last_mag = float(np.max(np.abs(term)))
        z_pow *= z / math.sqrt(n + 1)
    peak = float(np.max(np.abs(total)))
    telemetry = last_mag / peak if peak > 0 else 0.0
    return scale * total, telemetry


def coherent_series(sys: SystemParams, z: complex, x: float, n_terms: int = 60,
                    side: str = "phi", normalization: complex | None = None) -> tuple[complex, float]:
    vals, tel = coherent_series_array(sys, z, np.array([float(x)]), n_terms, side, normalization)
    return complex(vals[0]), tel


def series_equivalence_deviation(sys: SystemParams, z: complex, grid: Grid,
                                 n_terms: int = 60, side: str = "phi",
                                 arg_cap: float | None = None) -> float:
    """Sup-relative deviation between the closed form and the truncated series.

    With arg_cap set, points whose Hermite-recurrence argument exceeds the
    cap are excluded: there the truncated series is not converged (and its
    partial sums cancel catastrophically for complex parameters), so a
    comparison would measure floating-point noise rather than the identity.
    """
    xs = grid.points
    closed_fn = coherent_phi_array if side == "phi" else coherent_psi_array
    closed = closed_fn(sys, z, xs, 1.0)
    series, _ = coherent_series_array(sys, z, xs, n_terms, side, 1.0)
    if arg_cap is not None:
        f = F_array(sys.mass, xs)
        arg_mag = np.abs(sys.lam * f - sys.hbar ** 2 * sys.gamma) / (sys.hbar * math.sqrt(abs(sys.lam)))
        mask = arg_mag <= arg_cap
        if not mask.any():
            raise ValueError(f"no grid points with Hermite argument below {arg_cap}")
        closed, series = closed[mask], series[mask]
    scale = float(np.max(np.abs(closed)))
    return float(np.max(np.abs(closed - series))) / max(scale, 1e-300)


def coherent_eigen_residual(sys: SystemParams, z: complex, grid: Grid) -> float:
    """Worst of the two eigenvalue residuals a phi(z) = z phi(z) and
    b-dagger psi(z) = z psi(z) (unit-mode normalization; scale-free)."""
    xs = grid.points
    phi = SampledFunction(grid, coherent_phi_array(sys, z, xs, 1.0))
    psi = SampledFunction(grid, coherent_psi_array(sys, z, xs, 1.0))
    lhs_phi = apply_first_order(op_a(sys), phi)
    rhs_phi = SampledFunction(grid, z * phi.values)
    lhs_psi = apply_first_order(op_b_dagger(sys), psi)
    rhs_psi = SampledFunction(grid, z * psi.values)
    return max(residual_against(lhs_phi, rhs_phi, phi),
               residual_against(lhs_psi, rhs_psi, psi))


def alpha_shift(sys: SystemParams, z: complex) -> complex:
    """alpha(z, lam) = exp(|z|^2/2 (1/(|lam|^2 hbar^4) - 1))."""
    return cmath.exp(0.5 * abs(z) ** 2 * (1.0 / (abs(sys.lam) ** 2 * sys.hbar ** 4) - 1.0))


def shifted_argument(sys: SystemParams, z: complex) -> complex:
    """z1 = -z/(hbar^2 lam), the label at which phi matches psi(z)."""
    return -z / (sys.hbar ** 2 * sys.lam)


def shift_relation_residual(sys: SystemParams, z: complex, grid: Grid) -> float:
    """Max pointwise relative deviation of psi(z;x) = alpha(z, lam)
    phi(-z/(hbar^2 lam); x); defined only for real lam and gamma.

    Real parameters make the two normalization constants equal, so the
    identity is checked in unit mode and stays usable for non-normalizable
    diagnostics.
    """
    if sys.lam.imag != 0.0 or sys.gamma.imag != 0.0:
        raise ValueError("shift relation requires real lam and gamma")
    xs = grid.points
    lhs = coherent_psi_array(sys, z, xs, 1.0)
    rhs = alpha_shift(sys, z) * coherent_phi_array(sys, shifted_argument(sys, z), xs, 1.0)
    scale = float(np.max(np.abs(lhs)))
    return float(np.max(np.abs(lhs - rhs))) / max(scale, 1e-300)


def bicoherent_surfaces(sys: SystemParams, xs: np.ndarray, zs: np.ndarray,
                        normalization: complex | None = None) -> tuple[np.ndarray, np.ndarray]:
    """|psi(z;x)|^2 and |alpha(z,lam) phi(z1;x)|^2 on the (z, x) product grid.

    Rows index z, columns index x.  The two surfaces coincide exactly when
    lam and gamma are real.
    """
    if normalization is None:
        normalization = norm_constant(sys)
    n_psi = complex(normalization).conjugate()
    s_psi = np.empty((len(zs), len(xs)))
    s_alpha = np.empty_like(s_psi)
    for i, z in enumerate(zs):
        z = complex(z)
        s_psi[i] = np.abs(coherent_psi_array(sys, z, xs, n_psi)) ** 2
        shifted = coherent_phi_array(sys, shifted_argument(sys, z), xs, normalization)
        s_alpha[i] = np.abs(alpha_shift(sys, z) * shifted) ** 2
    return s_psi, s_alpha


def _combination(sys: SystemParams, terms: Sequence[FamilyTerm], xs: np.ndarray,
                 norm: complex) -> np.ndarray:
    out = np.zeros(len(xs), dtype=complex)
    for side, n, coeff in terms:
        if side == "phi":
            out += complex(coeff) * phi_n_array(sys, n, xs, norm)
        elif side == "psi":
            out += complex(coeff) * psi_n_array(sys, n, xs, norm.conjugate())
        else:
            raise ValueError(f"family side must be 'phi' or 'psi', got {side!r}")
    return out


def resolution_of_identity(sys: SystemParams, f_spec: Sequence[FamilyTerm],
                           g_spec: Sequence[FamilyTerm], radius: float,
                           n_r: int, n_theta: int, grid: Grid | None = None,
                           check_radius: bool = False, tol: float = 1e-3) -> complex:
    """(1/pi) int_{|z|<=radius} <f, phi(z;.)> <psi(z;.), g> d2z.

    Polar tensor quadrature: Gauss-Legendre in r, trapezoid in the angle;
    inner products by Simpson on the grid.  Approaches <f, g> for f, g in
    the span of the eigenfamilies.  With check_radius=True the radius is
    doubled once and a drift beyond 10x tol raises.
    """
    from .spectrum import auto_grid  # local import to keep module load light

    g = auto_grid(sys, "quadrature") if grid is None else grid
    xs = g.points
    w = simpson_weights(g.n_points, g.h)
    norm = norm_constant(sys)
    f_vals = _combination(sys, f_spec, xs, norm)
    g_vals = _combination(sys, g_spec, xs, norm)
    phi0 = vacuum_phi0_array(sys, xs, norm)
    psi0 = vacuum_psi0_array(sys, xs, norm.conjugate())
    f_arr = F_array(sys.mass, xs)

    nodes, weights = np.polynomial.legendre.leggauss(n_r)

    def lhs_value(rad: float) -> complex:
        rs = 0.5 * rad * (nodes + 1.0)
        wr = 0.5 * rad * weights
        thetas = 2.0 * math.pi * np.arange(n_theta) / n_theta
        w_theta = 2.0 * math.pi / n_theta
        # <f, phi(z;.)> = M_phi(z) * sum w conj(f) e^{-z lam sqrt2 F} phi0
        fbar_w = w * np.conj(f_vals) * phi0
        g_w = w * g_vals * np.conj(psi0)
        total = 0j
        for r_val, r_weight in zip(rs, wr):
            zs = r_val * np.exp(1j * thetas)
            expo_phi = np.exp(np.outer(-zs * sys.lam * SQRT2, f_arr))
            expo_psi = np.exp(np.outer(zs * SQRT2 / sys.hbar ** 2, f_arr))
            inner_f = expo_phi @ fbar_w
            inner_g = np.conj(expo_psi) @ g_w
            m_phis = np.array([m_phi(sys, z) for z in zs])
            m_psis = np.array([m_psi(sys, z) for z in zs])
            contrib = np.sum(m_phis * inner_f * np.conj(m_psis) * inner_g)
            total += r_weight * w_theta * r_val * contrib
        return total / math.pi

    value = lhs_value(radius)
    if check_radius:
        wider = lhs_value(2.0 * radius)
        if abs(wider - value) > 10.0 * tol:
            raise ValueError(
                f"resolution-of-identity quadrature not converged: radius doubling moved "
                f"the value by {abs(wider - value):.3e} (> 10 x tol)")
    return value
