"""Position-dependent-mass Hamiltonians with ladder-operator factorization.

Builds one-dimensional Hamiltonians whose potential is fixed by requiring a
first-order ladder operator and a factorization H - E0 = BA, evaluates the
resulting biorthogonal eigenfamilies and bi-coherent states in closed form,
and verifies every algebraic identity numerically on grids.
"""

from .massmodel import (
    FRange,
    MassModel,
    constant_mass,
    custom_mass,
    exp_up_mass,
    gaussian_mass,
    lorentzian_mass,
    make_mass,
)
from .numerics import Grid, Jet3, SampledFunction
from .spectrum import (
    Classification,
    EigenFamily,
    Verdict,
    classify,
    eigen_E0,
    eigen_En,
    norm_constant,
    phi_n,
    psi_n,
    vacuum_phi0,
    vacuum_psi0,
)
from .system import FirstOrderOp, SystemParams

__all__ = [
    "Classification",
    "EigenFamily",
    "FRange",
    "FirstOrderOp",
    "Grid",
    "Jet3",
    "MassModel",
    "SampledFunction",
    "SystemParams",
    "Verdict",
    "classify",
    "constant_mass",
    "custom_mass",
    "eigen_E0",
    "eigen_En",
    "exp_up_mass",
    "gaussian_mass",
    "lorentzian_mass",
    "make_mass",
    "norm_constant",
    "phi_n",
    "psi_n",
    "vacuum_phi0",
    "vacuum_psi0",
]

__version__ = "0.1.0"
