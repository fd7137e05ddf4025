"""Alternative eigenstate construction through the complex change of
variable y = F(x) - hbar^2 gamma / lam and the rotated-oscillator
Hamiltonian (p^2 + e^{2i theta} Omega^2 y^2)/2.

Cross-validates the main construction: the states built here agree with
phi_n up to an x-independent constant, and their energies reproduce the
ladder spectrum exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .massmodel import F_array, mass_arrays
from .specfun import hermite, polar_angle
from .system import SystemParams

__all__ = [
    "RotatedOscillator",
    "htheta_eigenstate",
    "htheta_energy",
    "phi_n_alt",
    "phi_n_alt_array",
    "psi_n_alt",
    "psi_n_alt_array",
    "rotated_oscillator",
    "y_of_x",
    "y_of_x_array",
]

MAX_INDEX = 200


@dataclass(frozen=True)
class RotatedOscillator:
    """Quadratic Hamiltonian (p^2 + e^{2i theta} Omega^2 y^2)/2."""

    omega: float
    theta: float
    hbar: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")


def rotated_oscillator(sys: SystemParams, conjugate: bool = False) -> RotatedOscillator:
    """Omega = |lam|/hbar and theta = theta_lam - pi, so -lam = |lam| e^{i theta};
    conjugate=True builds the adjoint-side oscillator."""
    lam = sys.lam.conjugate() if conjugate else sys.lam
    return RotatedOscillator(abs(lam) / sys.hbar, polar_angle(lam).theta - math.pi, sys.hbar)


def y_of_x_array(sys: SystemParams, xs: np.ndarray) -> np.ndarray:
    return F_array(sys.mass, np.asarray(xs, float)) - sys.hbar ** 2 * sys.gamma / sys.lam


def y_of_x(sys: SystemParams, x: float) -> complex:
    return complex(y_of_x_array(sys, np.array([float(x)]))[0])


def htheta_eigenstate(rot: RotatedOscillator, n: int, y):
    """phi_n^(theta)(y): Hermite function at the rotated complex argument.

    N^(theta)/sqrt(2^n n!) H_n(e^{i theta/2} sqrt(Omega/hbar) y)
    exp(-Omega e^{i theta} y^2 / (2 hbar)); reduces to the orthonormal
    oscillator eigenstates at theta = 0.
    """
    if not 0 <= n <= MAX_INDEX:
        raise ValueError(f"index must be in [0, {MAX_INDEX}], got {n}")
    scalar = not isinstance(y, np.ndarray)
    ys = np.asarray(y, dtype=complex)
    pref = (rot.omega / (rot.hbar * math.pi)) ** 0.25 * cmath.exp(0.25j * rot.theta)
    for k in range(1, n + 1):
        pref /= math.sqrt(2.0 * k)
    arg = cmath.exp(0.5j * rot.theta) * math.sqrt(rot.omega / rot.hbar) * ys
    envelope = np.exp(-(rot.omega / (2.0 * rot.hbar)) * cmath.exp(1j * rot.theta) * ys ** 2)
    vals = pref * hermite(n, arg) * envelope
    return complex(vals[()]) if scalar else vals


def htheta_energy(rot: RotatedOscillator, n: int) -> complex:
    """E_n^(theta) = hbar Omega e^{i theta} (n + 1/2)."""
    return rot.hbar * rot.omega * cmath.exp(1j * rot.theta) * (n + 0.5)


def _quarter_root_mass(sys: SystemParams, xs: np.ndarray) -> np.ndarray:
    m, _, _ = mass_arrays(sys.mass, xs)
    return m.astype(complex) ** 0.25


def phi_n_alt_array(sys: SystemParams, n: int, xs: np.ndarray) -> np.ndarray:
    """m^(1/4)(x) phi_n^(theta)(y(x)) with the ladder-matching prefactor
    (i hbar sqrt|lam| e^{i theta_lam/2}/sqrt(2))^n."""
    xs = np.asarray(xs, dtype=float)
    rot = rotated_oscillator(sys)
    pref = 1.0 + 0j
    unit = 1j * sys.hbar * math.sqrt(abs(sys.lam)) * cmath.exp(0.5j * sys.theta_lam) / math.sqrt(2.0)
    for _ in range(n):
        pref *= unit
    return pref * _quarter_root_mass(sys, xs) * htheta_eigenstate(rot, n, y_of_x_array(sys, xs))


def psi_n_alt_array(sys: SystemParams, n: int, xs: np.ndarray) -> np.ndarray:
    """Adjoint-side states: conjugate-parameter oscillator evaluated at
    conj(y), prefactor (i e^{i theta_lam/2}/(hbar sqrt(2|lam|)))^n."""
    xs = np.asarray(xs, dtype=float)
    rot = rotated_oscillator(sys, conjugate=True)
    pref = 1.0 + 0j
    unit = 1j * cmath.exp(0.5j * sys.theta_lam) / (sys.hbar * math.sqrt(2.0 * abs(sys.lam)))
    for _ in range(n):
        pref *= unit
    ys = np.conj(y_of_x_array(sys, xs))
    return pref * _quarter_root_mass(sys, xs) * htheta_eigenstate(rot, n, ys)


def phi_n_alt(sys: SystemParams, n: int, x: float) -> complex:
    return complex(phi_n_alt_array(sys, n, np.array([float(x)]))[0])


def psi_n_alt(sys: SystemParams, n: int, x: float) -> complex:
    return complex(psi_n_alt_array(sys, n, np.array([float(x)]))[0])
