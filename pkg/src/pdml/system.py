"""One Hamiltonian instance: parameters, potential, and the first-order
raising/lowering operators that factorize it.

The operator coefficients are closed-form; only the probe's derivative is
numerical, so finite-difference error enters in exactly one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .massmodel import F_array, MassModel, mass_arrays
from .numerics import Grid, SampledFunction, fd_derivative, residual_against, sample
from .specfun import polar_angle

__all__ = [
    "FirstOrderOp",
    "SystemParams",
    "apply_H",
    "apply_first_order",
    "commutator_residual",
    "factorization_residual",
    "gaussian_probes",
    "op_A",
    "op_A_dagger",
    "op_B",
    "op_B_dagger",
    "op_a",
    "op_a_dagger",
    "op_b",
    "op_b_dagger",
    "potential",
    "potential_array",
]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SystemParams:
    """Parameters (lam, gamma, hbar, mass) fixing one Hamiltonian; the
    overall operator scale delta is fixed to 1."""

    lam: complex
    gamma: complex
    mass: MassModel
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "gamma", complex(self.gamma))
        if self.lam == 0:
            raise ValueError("lam = 0 makes H and the ladder operator commute; forbidden")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")

    @property
    def theta_lam(self) -> float:
        return polar_angle(self.lam).theta

    def conjugated(self) -> "SystemParams":
        """Parameters of the adjoint Hamiltonian."""
        return SystemParams(self.lam.conjugate(), self.gamma.conjugate(), self.mass, self.hbar)


@dataclass(frozen=True, eq=False)
class FirstOrderOp:
    """f -> scale * (alpha f' + beta f) / sqrt(2) with array-valued coefficients."""

    alpha: Callable[[np.ndarray], np.ndarray]
    beta: Callable[[np.ndarray], np.ndarray]
    scale: complex = 1.0 + 0j

    def alpha_total(self, xs: np.ndarray) -> np.ndarray:
        return self.scale * np.asarray(self.alpha(xs), dtype=complex)

    def beta_total(self, xs: np.ndarray) -> np.ndarray:
        return self.scale * np.asarray(self.beta(xs), dtype=complex)

    def rescaled(self, factor: complex) -> "FirstOrderOp":
        return FirstOrderOp(self.alpha, self.beta, self.scale * factor)


def _coefficients(sys: SystemParams, lam: complex, gamma: complex, derivative_sign: float):
    """alpha, beta closures of the (2.9)-shaped operators: derivative_sign/sqrt(m)
    and -derivative_sign*m'/(4 m^(3/2)) - lam F/hbar^2 + gamma."""

    def alpha(xs: np.ndarray) -> np.ndarray:
        m, _, _ = mass_arrays(sys.mass, xs)
        return derivative_sign / np.sqrt(m) + 0j

    def beta(xs: np.ndarray) -> np.ndarray:
        m, m1, _ = mass_arrays(sys.mass, xs)
        f = F_array(sys.mass, xs)
        return (-derivative_sign * m1 / (4.0 * m ** 1.5)
                - (lam / sys.hbar ** 2) * f + gamma)

    return alpha, beta


def op_A(sys: SystemParams) -> FirstOrderOp:
    """Lowering-side ladder operator satisfying [H, A] = lam A."""
    alpha, beta = _coefficients(sys, sys.lam, sys.gamma, +1.0)
    return FirstOrderOp(alpha, beta)


def op_B(sys: SystemParams) -> FirstOrderOp:
    """Raising-side factor of H - E0 = B A."""
    alpha, beta = _coefficients(sys, sys.lam, sys.gamma, -1.0)
    return FirstOrderOp(alpha, beta, scale=sys.hbar ** 2)


def op_A_dagger(sys: SystemParams) -> FirstOrderOp:
    """Formal adjoint of A: derivative sign flipped, parameters conjugated."""
    alpha, beta = _coefficients(sys, sys.lam.conjugate(), sys.gamma.conjugate(), -1.0)
    return FirstOrderOp(alpha, beta)


def op_B_dagger(sys: SystemParams) -> FirstOrderOp:
    alpha, beta = _coefficients(sys, sys.lam.conjugate(), sys.gamma.conjugate(), +1.0)
    return FirstOrderOp(alpha, beta, scale=sys.hbar ** 2)


def op_a(sys: SystemParams) -> FirstOrderOp:
    """Pseudo-bosonic lowering operator a = -A/lam; [a, b] = 1."""
    return op_A(sys).rescaled(-1.0 / sys.lam)


def op_b(sys: SystemParams) -> FirstOrderOp:
    """Pseudo-bosonic raising operator b = B."""
    return op_B(sys)


def op_a_dagger(sys: SystemParams) -> FirstOrderOp:
    return op_A_dagger(sys).rescaled(-1.0 / sys.lam.conjugate())


def op_b_dagger(sys: SystemParams) -> FirstOrderOp:
    return op_B_dagger(sys)


def apply_first_order(op: FirstOrderOp, f: SampledFunction) -> SampledFunction:
    xs = f.grid.points
    df = fd_derivative(f, 1)
    vals = op.scale * (op.alpha(xs) * df.values + op.beta(xs) * f.values) / SQRT2
    return SampledFunction(f.grid, vals, band=df.band)


def _ground_energy(sys: SystemParams) -> complex:
    return -0.5 * (sys.gamma ** 2 * sys.hbar ** 2 + sys.lam)


def potential(sys: SystemParams, x: float) -> complex:
    """Complex potential fixed by the ladder condition and factorization."""
    return complex(potential_array(sys, np.array([float(x)]))[0])


def potential_array(sys: SystemParams, xs: np.ndarray) -> np.ndarray:
    m, m1, m2 = mass_arrays(sys.mass, xs)
    f = F_array(sys.mass, xs)
    hb2 = sys.hbar ** 2
    kinetic_shape = hb2 / 8.0 * (m2 / m ** 2 - 7.0 * m1 ** 2 / (4.0 * m ** 3))
    return kinetic_shape + (sys.lam ** 2 / (2.0 * hb2)) * f ** 2 - sys.lam * sys.gamma * f


def apply_H(sys: SystemParams, f: SampledFunction) -> SampledFunction:
    xs = f.grid.points
    m, m1, _ = mass_arrays(sys.mass, xs)
    d1 = fd_derivative(f, 1)
    d2 = fd_derivative(f, 2)
    hb2 = sys.hbar ** 2
    vals = (-hb2 / (2.0 * m) * d2.values
            + hb2 * m1 / (2.0 * m ** 2) * d1.values
            + potential_array(sys, xs) * f.values)
    return SampledFunction(f.grid, vals, band=d2.band)


def gaussian_probes(grid: Grid, n_probes: int = 3, width: float | None = None) -> list[SampledFunction]:
    """Smooth decaying bump probes spread over the middle of the grid."""
    span = grid.x_max - grid.x_min
    w = width if width is not None else span / 10.0
    centers = [grid.x_min + span * (0.35 + 0.3 * k / max(n_probes - 1, 1)) for k in range(n_probes)]
    return [sample(grid, lambda x, c=c: np.exp(-((x - c) / w) ** 2)) for c in centers]


def _pad_band(f: SampledFunction, band: int) -> SampledFunction:
    return f.with_values(f.values, band=max(f.band, band))


def commutator_residual(sys: SystemParams, pair: str, probes: Sequence[SampledFunction]) -> float:
    """Max relative residual of [H,A]f = lam A f or [A,B]f = -lam f."""
    if pair not in ("H_A", "A_B"):
        raise ValueError(f"pair must be 'H_A' or 'A_B', got {pair!r}")
    a_op = op_A(sys)
    worst = 0.0
    for f in probes:
        if pair == "H_A":
            lhs_hi = apply_H(sys, apply_first_order(a_op, f))
            lhs_lo = apply_first_order(a_op, apply_H(sys, f))
            rhs = apply_first_order(a_op, f)
            band = max(lhs_hi.band, lhs_lo.band)
            lhs = lhs_hi.with_values(lhs_hi.values - lhs_lo.values, band=band)
            rhs = rhs.with_values(sys.lam * rhs.values, band=band)
        else:
            b_op = op_B(sys)
            ab = apply_first_order(a_op, apply_first_order(b_op, f))
            ba = apply_first_order(b_op, apply_first_order(a_op, f))
            band = max(ab.band, ba.band)
            lhs = ab.with_values(ab.values - ba.values, band=band)
            rhs = f.with_values(-sys.lam * f.values, band=band)
        worst = max(worst, residual_against(lhs, rhs, _pad_band(f, lhs.band)))
    return worst


def factorization_residual(sys: SystemParams, probes: Sequence[SampledFunction]) -> float:
    """Max relative residual of (H - E0) f = B (A f)."""
    a_op, b_op = op_A(sys), op_B(sys)
    e0 = _ground_energy(sys)
    worst = 0.0
    for f in probes:
        hf = apply_H(sys, f)
        lhs = hf.with_values(hf.values - e0 * f.values)
        rhs = apply_first_order(b_op, apply_first_order(a_op, f))
        worst = max(worst, residual_against(_pad_band(lhs, rhs.band), rhs, _pad_band(f, rhs.band)))
    return worst
