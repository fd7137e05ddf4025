"""Mass profiles m(x) > 0 with antiderivative F(x) = int sqrt(m) dx.

Built-ins carry their closed-form F and range; custom expressions get a
checkpointed numerical F anchored at F(0) = 0 and a heuristic range probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import mexpr
from .numerics import Jet3, quad_adaptive

__all__ = [
    "FRange",
    "MassModel",
    "MassModelError",
    "MassPositivityError",
    "RangeError",
    "BUILTIN_KINDS",
    "constant_mass",
    "gaussian_mass",
    "lorentzian_mass",
    "exp_up_mass",
    "custom_mass",
    "make_mass",
    "mass_jet",
    "mass_arrays",
    "F_of",
    "F_array",
    "F_limits",
    "F_inverse",
]

BUILTIN_KINDS = ("constant", "gaussian", "lorentzian", "exp-up")

_CACHE_STEP = 0.25
_CACHE_HALF = 96.0
_PROBE_LS = (10.0, 20.0, 40.0, 80.0)
_GROWTH_RATIO = 1.05


class MassModelError(Exception):
    pass


class MassPositivityError(MassModelError):
    """The profile evaluated to a non-positive value."""


class RangeError(MassModelError):
    """Requested F value outside (F(-inf), F(+inf))."""


@dataclass(frozen=True)
class FRange:
    """Extended-real limits of F; heuristic=True marks a numerical probe."""

    f_minus: float
    f_plus: float
    heuristic: bool = False

    def __post_init__(self):
        if not self.f_minus < self.f_plus:
            raise ValueError(f"F range must be increasing, got ({self.f_minus}, {self.f_plus})")


@dataclass(frozen=True)
class MassModel:
    """A positive mass profile; ``kind`` is a built-in name or "custom"."""

    kind: str
    m0: float = 1.0
    expr: Optional[mexpr.MassExpr] = None
    _f_checkpoints: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in BUILTIN_KINDS + ("custom",):
            raise MassModelError(f"unknown mass kind {self.kind!r}")
        if not self.m0 > 0:
            raise MassModelError(f"mass scale m0 must be positive, got {self.m0}")
        if (self.kind == "custom") != (self.expr is not None):
            raise MassModelError("custom masses need an expression; built-ins must not carry one")
        if self.kind == "custom":
            object.__setattr__(self, "_f_checkpoints", _build_checkpoints(self))


def constant_mass(m0: float = 1.0) -> MassModel:
    return MassModel("constant", m0)


def gaussian_mass(m0: float = 1.0) -> MassModel:
    return MassModel("gaussian", m0)


def lorentzian_mass(m0: float = 1.0) -> MassModel:
    return MassModel("lorentzian", m0)


def exp_up_mass(m0: float = 1.0) -> MassModel:
    return MassModel("exp-up", m0)


def custom_mass(expr_text: str, m0: float = 1.0) -> MassModel:
    """m(x) = m0 * expr(x); F is numeric, anchored at F(0) = 0."""
    return MassModel("custom", m0, mexpr.parse(expr_text))


def make_mass(name_or_expr: str, m0: float = 1.0, is_expr: bool = False) -> MassModel:
    if not is_expr and name_or_expr in BUILTIN_KINDS:
        return MassModel(name_or_expr, m0)
    if not is_expr:
        raise MassModelError(f"unknown built-in mass {name_or_expr!r}; choose from {BUILTIN_KINDS}")
    return custom_mass(name_or_expr, m0)


# Jets ---------------------------------------------------------------------


def mass_jet(model: MassModel, x: float) -> Jet3:
    """(m, m', m'', m''') at x."""
    m0 = model.m0
    if model.kind == "constant":
        return Jet3(complex(m0))
    if model.kind == "gaussian":
        e = m0 * math.exp(-x * x)
        return Jet3(e, -2.0 * x * e, (4.0 * x * x - 2.0) * e, (12.0 * x - 8.0 * x ** 3) * e)
    if model.kind == "lorentzian":
        u = 1.0 + x * x
        return Jet3(m0 / u, -2.0 * m0 * x / u ** 2, m0 * (6.0 * x * x - 2.0) / u ** 3,
                    m0 * (24.0 * x / u ** 3 - 48.0 * x ** 3 / u ** 4))
    if model.kind == "exp-up":
        e = m0 * math.exp(x)
        return Jet3(e, e, e, e)
    jet = mexpr.eval_jet(model.expr, x)
    if jet.v0.real <= 0.0 or jet.v0.imag != 0.0:
        raise MassPositivityError(f"mass expression non-positive at x={x}: m={jet.v0}")
    return Jet3(m0 * jet.v0, m0 * jet.v1, m0 * jet.v2, m0 * jet.v3)


def mass_arrays(model: MassModel, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(m, m', m'') on an array of points; built-ins are vectorized."""
    xs = np.asarray(xs, dtype=float)
    m0 = model.m0
    if model.kind == "constant":
        m = np.full_like(xs, m0)
        z = np.zeros_like(xs)
        return m, z, z
    if model.kind == "gaussian":
        e = m0 * np.exp(-xs * xs)
        return e, -2.0 * xs * e, (4.0 * xs * xs - 2.0) * e
    if model.kind == "lorentzian":
        u = 1.0 + xs * xs
        return m0 / u, -2.0 * m0 * xs / u ** 2, m0 * (6.0 * xs * xs - 2.0) / u ** 3
    if model.kind == "exp-up":
        e = m0 * np.exp(xs)
        return e, e.copy(), e.copy()
    return _custom_mass_arrays(model, xs.tobytes())


@lru_cache(maxsize=64)
def _custom_mass_arrays(model: MassModel, xs_bytes: bytes):
    """Per-grid memo; expression jets are interpreted pointwise."""
    xs = np.frombuffer(xs_bytes)
    jets = [mass_jet(model, float(x)) for x in xs]
    return (np.array([j.v0.real for j in jets]),
            np.array([j.v1.real for j in jets]),
            np.array([j.v2.real for j in jets]))


# F and its range -----------------------------------------------------------


def _sqrt_m(model: MassModel):
    def f(x: float) -> float:
        if model.kind == "custom":
            v = mexpr.eval_jet(model.expr, x).v0
            if v.imag != 0.0 or v.real < 0.0:
                raise MassPositivityError(f"mass expression negative at x={x}: m={v}")
            # exact zero here is double underflow of a decaying tail
            return math.sqrt(model.m0 * v.real)
        return math.sqrt(mass_jet(model, x).v0.real)

    return f


def _build_checkpoints(model: MassModel) -> np.ndarray:
    """Cumulative F at 0, +-step, ... out to +-_CACHE_HALF, built eagerly so
    later reads are concurrency-safe."""
    n_side = int(round(_CACHE_HALF / _CACHE_STEP))
    integrand = _sqrt_m(model)
    table = np.zeros(2 * n_side + 1)
    acc = 0.0
    for k in range(n_side):  # forward sweep
        a, b = k * _CACHE_STEP, (k + 1) * _CACHE_STEP
        val, _ = quad_adaptive(integrand, a, b, 1e-13)
        acc += val.real
        table[n_side + k + 1] = acc
    acc = 0.0
    for k in range(n_side):  # backward sweep
        a, b = -(k + 1) * _CACHE_STEP, -k * _CACHE_STEP
        val, _ = quad_adaptive(integrand, a, b, 1e-13)
        acc -= val.real
        table[n_side - k - 1] = acc
    return table


def _custom_F(model: MassModel, x: float) -> float:
    table = model._f_checkpoints
    n_side = (len(table) - 1) // 2
    k = int(math.floor(x / _CACHE_STEP))
    k = max(-n_side, min(n_side, k))
    anchor_x = k * _CACHE_STEP
    base = table[n_side + k]
    if x == anchor_x:
        return float(base)
    a, b = (anchor_x, x) if x > anchor_x else (x, anchor_x)
    val, _ = quad_adaptive(_sqrt_m(model), a, b, 1e-13)
    return float(base + (val.real if x > anchor_x else -val.real))


def F_of(model: MassModel, x: float) -> float:
    """Antiderivative of sqrt(m); built-ins use their closed forms (note the
    exp-up anchor F(0) = 2 sqrt(m0)), custom masses anchor F(0) = 0."""
    m0 = model.m0
    if model.kind == "constant":
        return math.sqrt(m0) * x
    if model.kind == "gaussian":
        return math.sqrt(m0 * math.pi / 2.0) * math.erf(x / math.sqrt(2.0))
    if model.kind == "lorentzian":
        return math.sqrt(m0) * math.asinh(x)
    if model.kind == "exp-up":
        return 2.0 * math.sqrt(m0) * math.exp(0.5 * x)
    return _custom_F(model, x)


def F_array(model: MassModel, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    m0 = model.m0
    if model.kind == "constant":
        return math.sqrt(m0) * xs
    if model.kind == "gaussian":
        root2 = math.sqrt(2.0)
        return math.sqrt(m0 * math.pi / 2.0) * np.array([math.erf(x / root2) for x in xs])
    if model.kind == "lorentzian":
        return math.sqrt(m0) * np.arcsinh(xs)
    if model.kind == "exp-up":
        return 2.0 * math.sqrt(m0) * np.exp(0.5 * xs)
    return _custom_F_array(model, xs.tobytes())


@lru_cache(maxsize=64)
def _custom_F_array(model: MassModel, xs_bytes: bytes) -> np.ndarray:
    xs = np.frombuffer(xs_bytes)
    return np.array([_custom_F(model, float(x)) for x in xs])


def _aitken(v1: float, v2: float, v3: float) -> float:
    denom = (v3 - v2) - (v2 - v1)
    if abs(denom) < 1e-14 * max(1.0, abs(v3)):
        return v3
    return v3 - (v3 - v2) ** 2 / denom


def F_limits(model: MassModel) -> FRange:
    """F(+-inf); closed-form for built-ins, probed (and flagged heuristic)
    for custom masses."""
    m0 = model.m0
    if model.kind == "constant":
        return FRange(-math.inf, math.inf)
    if model.kind == "gaussian":
        half = math.sqrt(m0 * math.pi / 2.0)
        return FRange(-half, half)
    if model.kind == "lorentzian":
        return FRange(-math.inf, math.inf)
    if model.kind == "exp-up":
        return FRange(0.0, math.inf)

    def probe(sign: float) -> float:
        vals = [F_of(model, sign * L) for L in _PROBE_LS]
        if abs(vals[-1]) > _GROWTH_RATIO * abs(vals[-2]) and abs(vals[-1]) > 1e-6:
            return sign * math.inf
        return _aitken(vals[-3], vals[-2], vals[-1])

    return FRange(probe(-1.0), probe(+1.0), heuristic=True)


def F_inverse(model: MassModel, f: float) -> float:
    """Solve F(x) = f on the monotone F; f must lie strictly inside the range."""
    rng = F_limits(model)
    if not rng.f_minus < f < rng.f_plus:
        raise RangeError(f"F target {f} outside range ({rng.f_minus}, {rng.f_plus})")
    lo, hi = -1.0, 1.0
    for _ in range(200):
        if F_of(model, lo) < f:
            break
        lo *= 2.0
    else:
        raise RangeError(f"could not bracket F target {f} from below")
    for _ in range(200):
        if F_of(model, hi) > f:
            break
        hi *= 2.0
    else:
        raise RangeError(f"could not bracket F target {f} from above")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if F_of(model, mid) < f:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, abs(lo) + abs(hi)):
            break
    x = 0.5 * (lo + hi)
    for _ in range(3):  # Newton polish, F' = sqrt(m) > 0
        slope = math.sqrt(mass_jet(model, x).v0.real)
        step = (F_of(model, x) - f) / slope
        if not math.isfinite(step):
            break
        x -= step
        if abs(step) < 1e-15 * max(1.0, abs(x)):
            break
    return x
