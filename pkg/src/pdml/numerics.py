"""Shared numerical kernels.

Uniform grids with complex-valued samples, order-3 truncated Taylor jets,
composite/adaptive/improper Simpson quadrature, and fourth-order finite
differences with a low-confidence boundary band.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

__all__ = [
    "BOUNDARY_BAND",
    "Grid",
    "GridMismatchError",
    "Jet3",
    "NumericsError",
    "QuadratureError",
    "SampledFunction",
    "fd_derivative",
    "inner_product",
    "l2_norm",
    "l2_residual",
    "quad_adaptive",
    "quad_improper",
    "residual_against",
    "sample",
]

BOUNDARY_BAND = 2          # points per end served by one-sided stencils
NORM_FLOOR = 1e-300        # guards division in relative residuals


class NumericsError(Exception):
    """Base class for numerical-kernel failures."""


class GridMismatchError(NumericsError):
    """Two sampled functions do not share the same grid."""


class QuadratureError(NumericsError):
    """Adaptive quadrature gave up; carries the best value and estimate."""

    def __init__(self, message: str, value: complex = 0j, err_est: float = math.inf):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D grid on [x_min, x_max] with n_points samples."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"grid needs x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n_points < 9:
            raise ValueError(f"grid needs at least 9 points for the widest stencil, got {self.n_points}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples on a Grid.

    ``band`` counts low-confidence points at each end (one-sided stencils,
    compounded by repeated differentiation); residuals exclude them.
    """

    grid: Grid
    values: np.ndarray
    band: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sampled values must be finite")
        object.__setattr__(self, "values", vals)

    def with_values(self, values: np.ndarray, band: int | None = None) -> "SampledFunction":
        return SampledFunction(self.grid, values, self.band if band is None else band)


def sample(grid: Grid, fn: Callable) -> SampledFunction:
    """Sample a scalar-or-vectorized callable on the grid."""
    xs = grid.points
    try:
        vals = np.asarray(fn(xs), dtype=complex)
        if vals.shape != xs.shape:
            raise TypeError
    except TypeError:
        vals = np.array([fn(x) for x in xs], dtype=complex)
    return SampledFunction(grid, vals)


def _require_same_grid(f: SampledFunction, g: SampledFunction):
    if f.grid != g.grid:
        raise GridMismatchError(f"incompatible sampling: {f.grid} vs {g.grid}")


def simpson_weights(n_points: int, h: float) -> np.ndarray:
    """Composite-Simpson weights; the last three panels switch to the 3/8
    rule when the panel count is odd, keeping fourth-order accuracy."""
    w = np.zeros(n_points)
    n_panels = n_points - 1
    if n_panels % 2 == 0:
        w[0] = w[-1] = 1.0
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w *= h / 3.0
    else:
        m = n_points - 3  # even panel count on [0, m-1]
        w[:m] = simpson_weights(m, h)
        w[m - 1] += 3.0 * h / 8.0
        w[m] += 9.0 * h / 8.0
        w[m + 1] += 9.0 * h / 8.0
        w[m + 2] += 3.0 * h / 8.0
    return w


def inner_product(f: SampledFunction, g: SampledFunction) -> complex:
    """Simpson approximation of the L2 pairing, antilinear in ``f``."""
    _require_same_grid(f, g)
    w = simpson_weights(f.grid.n_points, f.grid.h)
    return complex(np.sum(w * np.conj(f.values) * g.values))


def _interior(f: SampledFunction, band: int) -> np.ndarray:
    b = max(band, BOUNDARY_BAND)
    return f.values[b:-b]


def l2_norm(f: SampledFunction, band: int | None = None) -> float:
    """Grid L2 norm over the interior (rectangle weights)."""
    b = f.band if band is None else band
    v = _interior(f, b)
    return math.sqrt(f.grid.h) * float(np.linalg.norm(v))


def l2_residual(f: SampledFunction, g: SampledFunction) -> float:
    """Relative interior deviation ||f - g|| / max(||g||, floor)."""
    _require_same_grid(f, g)
    band = max(f.band, g.band)
    diff = math.sqrt(f.grid.h) * float(np.linalg.norm(_interior(f, band) - _interior(g, band)))
    return diff / max(l2_norm(g, band), NORM_FLOOR)


def residual_against(lhs: SampledFunction, rhs: SampledFunction, ref: SampledFunction) -> float:
    """Relative residual ||lhs - rhs|| / max(||ref||, floor) on the common interior."""
    _require_same_grid(lhs, rhs)
    _require_same_grid(lhs, ref)
    band = max(lhs.band, rhs.band, ref.band)
    diff = math.sqrt(lhs.grid.h) * float(np.linalg.norm(_interior(lhs, band) - _interior(rhs, band)))
    return diff / max(l2_norm(ref, band), NORM_FLOOR)


# Fourth-order stencils.  Rows: offsets into the array, divided by 12h or 12h^2.
_D1_EDGE = np.array([[-25.0, 48.0, -36.0, 16.0, -3.0],
                     [-3.0, -10.0, 18.0, -6.0, 1.0]])
_D2_EDGE = np.array([[45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
                     [10.0, -15.0, -4.0, 14.0, -6.0, 1.0]])


def fd_derivative(f: SampledFunction, order: int) -> SampledFunction:
    """Fourth-order finite difference; one-sided in a 2-point boundary band.

    Exact for polynomials of degree <= 4 (degree <= 5 at the edges); the
    output band grows by BOUNDARY_BAND per application.
    """
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    v = f.values
    h = f.grid.h
    out = np.empty_like(v)
    if order == 1:
        out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
        for i in (0, 1):
            out[i] = np.dot(_D1_EDGE[i], v[:5]) / (12.0 * h)
            out[-1 - i] = -np.dot(_D1_EDGE[i], v[-5:][::-1]) / (12.0 * h)
    else:
        out[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2] + 16.0 * v[3:-1] - v[4:]) / (12.0 * h * h)
        for i in (0, 1):
            out[i] = np.dot(_D2_EDGE[i], v[:6]) / (12.0 * h * h)
            out[-1 - i] = np.dot(_D2_EDGE[i], v[-6:][::-1]) / (12.0 * h * h)
    return SampledFunction(f.grid, out, band=f.band + BOUNDARY_BAND)


def _simpson(fa: complex, fm: complex, fb: complex, width: float) -> complex:
    return width / 6.0 * (fa + 4.0 * fm + fb)


def quad_adaptive(fn: Callable[[float], complex], a: float, b: float, tol: float,
                  max_intervals: int = 200_000) -> Tuple[complex, float]:
    """Bisection-adaptive Simpson with the standard |S2-S1|/15 estimate.

    Returns (value, error estimate).  Raises QuadratureError carrying the
    best value when the interval budget runs out or the integrand is not
    finite.
    """
    if not (a < b) or math.isinf(a) or math.isinf(b):
        raise ValueError(f"quad_adaptive needs finite a < b, got ({a}, {b})")
    if not tol > 0:
        raise ValueError("tol must be positive")

    def ev(x: float) -> complex:
        val = complex(fn(x))
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            raise QuadratureError(f"integrand not finite at x={x}")
        return val

    fa, fm, fb = ev(a), ev(0.5 * (a + b)), ev(b)
    whole = _simpson(fa, fm, fb, b - a)
    # stack entries: (a, b, fa, fm, fb, S, local tol)
    stack = [(a, b, fa, fm, fb, whole, tol)]
    total = 0j
    err_total = 0.0
    used = 0
    while stack:
        xa, xb, va, vm, vb, s, t = stack.pop()
        used += 1
        if used > max_intervals:
            best = total + s + sum(e[5] for e in stack)
            raise QuadratureError("adaptive quadrature subdivision limit exhausted",
                                  value=best, err_est=max(t, err_total))
        xm = 0.5 * (xa + xb)
        vl = ev(0.5 * (xa + xm))
        vr = ev(0.5 * (xm + xb))
        s_left = _simpson(va, vl, vm, xm - xa)
        s_right = _simpson(vm, vr, vb, xb - xm)
        delta = s_left + s_right - s
        if abs(delta) <= 15.0 * t or (xb - xa) < 1e-14 * max(1.0, abs(xa) + abs(xb)):
            total += s_left + s_right + delta / 15.0
            err_total += abs(delta) / 15.0
        else:
            stack.append((xa, xm, va, vl, vm, s_left, t / 2.0))
            stack.append((xm, xb, vm, vr, vb, s_right, t / 2.0))
    return total, err_total


def _stretch(t: float) -> float:
    return t / (1.0 - t * t)


def _stretch_weight(t: float) -> float:
    u = 1.0 - t * t
    return (1.0 + t * t) / (u * u)


def quad_improper(fn: Callable[[float], complex], a: float, b: float, tol: float,
                  max_intervals: int = 400_000) -> Tuple[complex, float]:
    """Quadrature with possibly infinite endpoints.

    Each infinite endpoint is mapped through x = t/(1 - t^2); the caller
    asserts decay there, and the transformed integrand is taken to vanish
    at the mapped endpoint.  Error-estimate blow-up or non-finite samples
    surface as QuadratureError (divergence).
    """
    if not a < b:
        raise ValueError(f"quad_improper needs a < b, got ({a}, {b})")
    a_inf, b_inf = math.isinf(a), math.isinf(b)
    if not a_inf and not b_inf:
        return quad_adaptive(fn, a, b, tol, max_intervals)

    if a_inf and b_inf:
        lo, hi, shift = -1.0, 1.0, 0.0
    elif b_inf:
        lo, hi, shift = 0.0, 1.0, a
    else:
        lo, hi, shift = -1.0, 0.0, b

    def g(t: float) -> complex:
        u = 1.0 - t * t
        if u <= 0.0:
            return 0j  # mapped endpoint; decay asserted by the caller
        try:
            val = complex(fn(shift + _stretch(t))) * _stretch_weight(t)
        except OverflowError as exc:
            raise QuadratureError(f"integrand overflow near t={t} (divergent?)") from exc
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            raise QuadratureError(f"transformed integrand not finite at t={t} (divergent?)")
        return val

    return quad_adaptive(g, lo, hi, tol, max_intervals)


# ---------------------------------------------------------------------------
# Order-3 jets


@dataclass(frozen=True)
class Jet3:
    """Value with derivatives of orders 1-3, propagated by the chain rule."""

    v0: complex
    v1: complex = 0j
    v2: complex = 0j
    v3: complex = 0j

    @staticmethod
    def seed(x: complex) -> "Jet3":
        """Jet of the identity function at x."""
        return Jet3(complex(x), 1.0 + 0j)

    @staticmethod
    def const(c: complex) -> "Jet3":
        return Jet3(complex(c))

    def __add__(self, other):
        o = _as_jet(other)
        return Jet3(self.v0 + o.v0, self.v1 + o.v1, self.v2 + o.v2, self.v3 + o.v3)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.v0, -self.v1, -self.v2, -self.v3)

    def __sub__(self, other):
        return self + (-_as_jet(other))

    def __rsub__(self, other):
        return _as_jet(other) + (-self)

    def __mul__(self, other):
        o = _as_jet(other)
        return Jet3(
            self.v0 * o.v0,
            self.v1 * o.v0 + self.v0 * o.v1,
            self.v2 * o.v0 + 2.0 * self.v1 * o.v1 + self.v0 * o.v2,
            self.v3 * o.v0 + 3.0 * self.v2 * o.v1 + 3.0 * self.v1 * o.v2 + self.v0 * o.v3,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * _reciprocal(_as_jet(other))

    def __rtruediv__(self, other):
        return _as_jet(other) * _reciprocal(self)

    def __pow__(self, p):
        return jet_pow(self, p)

    def compose(self, c0: complex, c1: complex, c2: complex, c3: complex) -> "Jet3":
        """Jet of F(self) given F and its first three derivatives at v0."""
        g1, g2, g3 = self.v1, self.v2, self.v3
        return Jet3(
            c0,
            c1 * g1,
            c2 * g1 * g1 + c1 * g2,
            c3 * g1 ** 3 + 3.0 * c2 * g1 * g2 + c1 * g3,
        )


def _as_jet(x) -> Jet3:
    return x if isinstance(x, Jet3) else Jet3.const(x)


def _reciprocal(j: Jet3) -> Jet3:
    u = j.v0
    if u == 0:
        raise ZeroDivisionError("jet division by zero")
    return j.compose(1.0 / u, -1.0 / u ** 2, 2.0 / u ** 3, -6.0 / u ** 4)


def jet_exp(j: Jet3) -> Jet3:
    e = cmath.exp(j.v0)
    return j.compose(e, e, e, e)


def jet_log(j: Jet3) -> Jet3:
    u = j.v0
    return j.compose(cmath.log(u), 1.0 / u, -1.0 / u ** 2, 2.0 / u ** 3)


def jet_sqrt(j: Jet3) -> Jet3:
    r = cmath.sqrt(j.v0)
    u = j.v0
    return j.compose(r, 0.5 / r, -0.25 / (u * r), 0.375 / (u * u * r))


def jet_sin(j: Jet3) -> Jet3:
    s, c = cmath.sin(j.v0), cmath.cos(j.v0)
    return j.compose(s, c, -s, -c)


def jet_cos(j: Jet3) -> Jet3:
    s, c = cmath.sin(j.v0), cmath.cos(j.v0)
    return j.compose(c, -s, -c, s)


def jet_sinh(j: Jet3) -> Jet3:
    s, c = cmath.sinh(j.v0), cmath.cosh(j.v0)
    return j.compose(s, c, s, c)


def jet_cosh(j: Jet3) -> Jet3:
    s, c = cmath.sinh(j.v0), cmath.cosh(j.v0)
    return j.compose(c, s, c, s)


def jet_pow(base: Jet3, p) -> Jet3:
    """base**p for integer p (any base) or real p (base with positive real value)."""
    if isinstance(p, Jet3):
        return jet_exp(p * jet_log(base))
    if isinstance(p, (int, float)) and float(p).is_integer():
        n = int(p)
        if n == 0:
            return Jet3.const(1.0)
        if n < 0:
            return _reciprocal(jet_pow(base, -n))
        out = base
        for _ in range(n - 1):
            out = out * base
        return out
    u = base.v0
    c0 = u ** p
    return base.compose(c0, p * c0 / u, p * (p - 1) * c0 / u ** 2, p * (p - 1) * (p - 2) * c0 / u ** 3)
