"""
The classical planar theory for the pair (f, i/f), used as a cross-check of the spatial one.

Operators (C is complex conjugation, f real and nonvanishing)::

    V  = d_zbar - (f_zbar/f) C      V̄  = d_z - (f_z/f) C
    V1 = d_zbar + (f_z/f) C         V̄1 = d_z + (f_zbar/f) C

with (1/4)(Δ - q) = V1 V̄ = V̄1 V on real functions, q = Δf/f. Derivatives share the
stencil of :mod:`grid_calculus` applied to a plane.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from numbers import Number
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from typing import Self

import numpy as np

from .errors import (
    CompatibilityViolated,
    DomainMismatch,
    DomainTooSmall,
    NonFiniteField,
    NonvanishingViolation,
    NotAGeneratingPair,
    NotASchrodingerSolution,
    NotAV1Solution,
    NotAVekuaSolution,
    PathNotOnGrid,
)
from .grid_calculus import MIN_NODES, axis_path_integral, difference, relative_residual
from .settings import SETTINGS

logger = logging.getLogger("pseudoanalytic")


@dataclass(frozen=True)
class PlaneDomain:
    origin: tuple[float, float]
    extent: tuple[float, float]
    resolution: tuple[int, int]

    def __post_init__(self) -> None:
        origin = tuple(float(v) for v in self.origin)
        extent = tuple(float(v) for v in self.extent)
        resolution = tuple(int(v) for v in self.resolution)
        if not (len(origin) == len(extent) == len(resolution) == 2):
            raise ValueError("origin, extent and resolution need two entries each")
        if any(v <= 0 for v in extent):
            raise ValueError(f"extent must be positive, got {extent}")
        if any(n < MIN_NODES for n in resolution):
            raise DomainTooSmall(f"resolution {resolution}: every axis needs at least {MIN_NODES} nodes")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "resolution", resolution)

    @classmethod
    def square(cls, origin: Sequence[float], extent: Sequence[float], n: int) -> PlaneDomain:
        return cls(tuple(origin), tuple(extent), (n, n))

    @property
    def shape(self) -> tuple[int, int]:
        return self.resolution

    @property
    def spacing(self) -> tuple[float, float]:
        return tuple(L / (n - 1) for L, n in zip(self.extent, self.resolution))

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.linspace(o, o + L, n) for o, L, n in zip(self.origin, self.extent, self.resolution))

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def index_of(self, point: Sequence[float]) -> tuple[int, int]:
        index = []
        for p, o, h, n in zip(point, self.origin, self.spacing, self.resolution):
            t = (float(p) - o) / h
            k = int(round(t))
            if abs(t - k) > 1e-9 * max(1.0, abs(t)) or not 0 <= k < n:
                raise PathNotOnGrid(f"point {tuple(point)} is not a node of {self}")
            index.append(k)
        return tuple(index)

    def node(self, index: Sequence[int]) -> complex:
        x, y = (o + k * h for o, k, h in zip(self.origin, index, self.spacing))
        return complex(x, y)


@dataclass(frozen=True, eq=False)
class ComplexField2D:
    domain: PlaneDomain
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.complex128)
        arr = np.broadcast_to(arr, self.domain.shape).copy() if arr.ndim == 0 else arr
        if arr.shape != self.domain.shape:
            raise ValueError(f"ComplexField2D expects shape {self.domain.shape}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteField("ComplexField2D contains NaN or Inf")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_function(cls, domain: PlaneDomain, fn: Callable[[np.ndarray, np.ndarray], object]) -> Self:
        x, y = domain.mesh()
        return cls(domain, np.broadcast_to(np.asarray(fn(x, y), dtype=np.complex128), domain.shape))

    def _other(self, other: object) -> np.ndarray | complex:
        if isinstance(other, Number):
            return complex(other)
        if isinstance(other, ComplexField2D):
            if other.domain != self.domain:
                raise DomainMismatch(f"fields live on different grids: {self.domain} vs {other.domain}")
            return other.values
        return NotImplemented

    def __add__(self, other: object) -> Self:
        o = self._other(other)
        return NotImplemented if o is NotImplemented else ComplexField2D(self.domain, self.values + o)

    __radd__ = __add__

    def __sub__(self, other: object) -> Self:
        o = self._other(other)
        return NotImplemented if o is NotImplemented else ComplexField2D(self.domain, self.values - o)

    def __rsub__(self, other: object) -> Self:
        o = self._other(other)
        return NotImplemented if o is NotImplemented else ComplexField2D(self.domain, o - self.values)

    def __mul__(self, other: object) -> Self:
        o = self._other(other)
        return NotImplemented if o is NotImplemented else ComplexField2D(self.domain, self.values * o)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> Self:
        o = self._other(other)
        return NotImplemented if o is NotImplemented else ComplexField2D(self.domain, self.values / o)

    def __rtruediv__(self, other: object) -> Self:
        o = self._other(other)
        return NotImplemented if o is NotImplemented else ComplexField2D(self.domain, o / self.values)

    def __neg__(self) -> Self:
        return ComplexField2D(self.domain, -self.values)

    def conj(self) -> Self:
        return ComplexField2D(self.domain, np.conj(self.values))

    @property
    def real(self) -> Self:
        return ComplexField2D(self.domain, self.values.real)

    @property
    def imag(self) -> Self:
        return ComplexField2D(self.domain, self.values.imag)


@dataclass(frozen=True)
class PlanePath:
    """Base node and real constant of the A / Ā integration path (x first, then y)."""

    base: tuple[float, float] | None = None
    c: float = 0.0
    axis_order: tuple[int, int] = (0, 1)

    def base_index(self, domain: PlaneDomain) -> tuple[int, int]:
        return (0, 0) if self.base is None else domain.index_of(self.base)


def _tol(tol: float | None) -> float:
    return SETTINGS.precondition_tol if tol is None else tol


def _exclude(exclude: int | None) -> int:
    return SETTINGS.exclude_boundary if exclude is None else exclude


def _rel(residual: np.ndarray, *terms: np.ndarray, exclude: int | None) -> float:
    return relative_residual(residual, *terms, exclude=_exclude(exclude), spatial_ndim=2)


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------


def _dx(W: ComplexField2D) -> np.ndarray:
    return difference(W.values, 0, W.domain.spacing[0])


def _dy(W: ComplexField2D) -> np.ndarray:
    return difference(W.values, 1, W.domain.spacing[1])


def d_z(W: ComplexField2D) -> ComplexField2D:
    """½(d_x - i d_y)."""
    return ComplexField2D(W.domain, 0.5 * (_dx(W) - 1j * _dy(W)))


def d_zbar(W: ComplexField2D) -> ComplexField2D:
    """½(d_x + i d_y)."""
    return ComplexField2D(W.domain, 0.5 * (_dx(W) + 1j * _dy(W)))


def _second_partials_2d(W: ComplexField2D) -> tuple[np.ndarray, np.ndarray]:
    hx, hy = W.domain.spacing
    v = W.values
    return difference(difference(v, 0, hx), 0, hx), difference(difference(v, 1, hy), 1, hy)


def laplacian_2d(W: ComplexField2D) -> ComplexField2D:
    return ComplexField2D(W.domain, sum(_second_partials_2d(W)))


# ---------------------------------------------------------------------------
# generating pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GeneratingPair:
    F: ComplexField2D
    G: ComplexField2D

    def __post_init__(self) -> None:
        if self.F.domain != self.G.domain:
            raise DomainMismatch("generating pair members live on different grids")
        im = np.imag(np.conj(self.F.values) * self.G.values)
        if np.min(im) <= 0:
            raise NotAGeneratingPair(f"Im(conj(F) G) must be positive, min is {np.min(im):.3e}")

    @property
    def domain(self) -> PlaneDomain:
        return self.F.domain


def _check_f(f: ComplexField2D, eps_f: float | None = None) -> None:
    eps_f = SETTINGS.eps_f if eps_f is None else eps_f
    min_abs = float(np.min(np.abs(f.values)))
    if min_abs < eps_f:
        raise NonvanishingViolation(min_abs, eps_f)


def generating_pair(f: ComplexField2D, eps_f: float | None = None) -> GeneratingPair:
    """(f, i/f) for a real nonvanishing f; positive f gives Im(conj(F) G) = 1 > 0."""
    _check_f(f, eps_f)
    return GeneratingPair(f, 1j / f)


def characteristic_coefficients(
    pair: GeneratingPair,
) -> tuple[ComplexField2D, ComplexField2D, ComplexField2D, ComplexField2D]:
    """(a, b, A, B) of the pair."""
    F, G = pair.F.values, pair.G.values
    Fc, Gc = np.conj(F), np.conj(G)
    den = F * Gc - Fc * G
    Fz, Fzb = d_z(pair.F).values, d_zbar(pair.F).values
    Gz, Gzb = d_z(pair.G).values, d_zbar(pair.G).values
    dom = pair.domain
    a = -(Fc * Gzb - Fzb * Gc) / den
    b = (F * Gzb - Fzb * G) / den
    A = -(Fc * Gz - Fz * Gc) / den
    B = (F * Gz - Fz * G) / den
    return tuple(ComplexField2D(dom, v) for v in (a, b, A, B))


def adjoint_pair(pair: GeneratingPair) -> tuple[ComplexField2D, ComplexField2D]:
    """(F*, G*) = (-2 conj(F) / den, 2 conj(G) / den), den = F conj(G) - conj(F) G."""
    F, G = pair.F.values, pair.G.values
    den = F * np.conj(G) - np.conj(F) * G
    return ComplexField2D(pair.domain, -2 * np.conj(F) / den), ComplexField2D(pair.domain, 2 * np.conj(G) / den)


def decompose(W: ComplexField2D, pair: GeneratingPair) -> tuple[ComplexField2D, ComplexField2D]:
    """Real φ, ψ with W = φF + ψG."""
    Wc = np.conj(W.values)
    den = np.imag(np.conj(pair.F.values) * pair.G.values)
    phi = np.imag(Wc * pair.G.values) / den
    psi = -np.imag(Wc * pair.F.values) / den
    return ComplexField2D(W.domain, phi), ComplexField2D(W.domain, psi)


def associated_potential(f: ComplexField2D) -> ComplexField2D:
    """r = 2 |grad f / f|^2 - q with q = Δf / f."""
    fv = f.values
    grad2 = np.abs(_dx(f)) ** 2 + np.abs(_dy(f)) ** 2
    q = laplacian_2d(f).values / fv
    return ComplexField2D(f.domain, 2 * grad2 / np.abs(fv) ** 2 - q)


# ---------------------------------------------------------------------------
# Vekua operators
# ---------------------------------------------------------------------------


def _log_derivatives(f: ComplexField2D) -> tuple[np.ndarray, np.ndarray]:
    return d_z(f).values / f.values, d_zbar(f).values / f.values


def _op_terms(W: ComplexField2D, f: ComplexField2D, which: str) -> tuple[np.ndarray, np.ndarray, float]:
    if W.domain != f.domain:
        raise DomainMismatch("W and f live on different grids")
    fz, fzb = _log_derivatives(f)
    Wc = np.conj(W.values)
    match which:
        case "V":
            return d_zbar(W).values, fzb * Wc, -1.0
        case "Vbar":
            return d_z(W).values, fz * Wc, -1.0
        case "V1":
            return d_zbar(W).values, fz * Wc, 1.0
        case "V1bar":
            return d_z(W).values, fzb * Wc, 1.0
    raise ValueError(f"unknown operator {which!r}")


def _apply(W: ComplexField2D, f: ComplexField2D, which: str) -> ComplexField2D:
    a, b, sign = _op_terms(W, f, which)
    return ComplexField2D(W.domain, a + sign * b)


def op_V_2d(W: ComplexField2D, f: ComplexField2D) -> ComplexField2D:
    return _apply(W, f, "V")


def op_Vbar_2d(W: ComplexField2D, f: ComplexField2D) -> ComplexField2D:
    return _apply(W, f, "Vbar")


def op_V1_2d(W: ComplexField2D, f: ComplexField2D) -> ComplexField2D:
    return _apply(W, f, "V1")


def op_V1bar_2d(W: ComplexField2D, f: ComplexField2D) -> ComplexField2D:
    return _apply(W, f, "V1bar")


def _op_residual(W: ComplexField2D, f: ComplexField2D, which: str, exclude: int | None) -> float:
    a, b, sign = _op_terms(W, f, which)
    return _rel(a + sign * b, a, b, exclude=exclude)


def main_vekua_residual(W: ComplexField2D, f: ComplexField2D, *, exclude: int | None = None) -> float:
    return _op_residual(W, f, "V", exclude)


def v1_residual_2d(W: ComplexField2D, f: ComplexField2D, *, exclude: int | None = None) -> float:
    return _op_residual(W, f, "V1", exclude)


def schrodinger_residual_2d(u: ComplexField2D, q: ComplexField2D, *, exclude: int | None = None) -> float:
    uxx, uyy = _second_partials_2d(u)
    qu = q.values * u.values
    return _rel(qu - uxx - uyy, uxx, uyy, qu, exclude=exclude)


def factorization_residual_2d(
    phi: ComplexField2D,
    f: ComplexField2D,
    *,
    order: str = "V1bar_V",
    reference: ComplexField2D | None = None,
    exclude: int | None = None,
) -> float:
    """Compare V̄1 V φ (or V1 V̄ φ) with ¼(Δ - q) φ."""
    if order == "V1bar_V":
        composite = op_V1bar_2d(op_V_2d(phi, f), f)
    elif order == "V1_Vbar":
        composite = op_V1_2d(op_Vbar_2d(phi, f), f)
    else:
        raise ValueError(f"unknown factorization order {order!r}")
    if reference is not None:
        return _rel(composite.values - reference.values, reference.values, exclude=exclude)
    lap = 0.25 * laplacian_2d(phi).values
    qphi = 0.25 * laplacian_2d(f).values / f.values * phi.values
    return _rel(composite.values - (lap - qphi), lap, qphi, exclude=exclude)


def bers_derivative_2d(
    W: ComplexField2D,
    f: ComplexField2D,
    *,
    tol: float | None = None,
    exclude: int | None = None,
    check: bool = True,
) -> ComplexField2D:
    """Ẇ = W_z - (f_z/f) conj(W) for a solution of the main Vekua equation."""
    _check_f(f)
    if check:
        r = main_vekua_residual(W, f, exclude=exclude)
        if r > _tol(tol):
            raise NotAVekuaSolution(r, _tol(tol))
    return op_Vbar_2d(W, f)


def bers_derivative_2d_second_form(W: ComplexField2D, f: ComplexField2D) -> ComplexField2D:
    """f d_z(W1 / f) + (i/f) d_z(f W2)."""
    W1 = ComplexField2D(W.domain, W.values.real)
    W2 = ComplexField2D(W.domain, W.values.imag)
    return f * d_z(W1 / f) + (1j / f) * d_z(f * W2)


# ---------------------------------------------------------------------------
# A, Ā and the planar antiderivative
# ---------------------------------------------------------------------------


def _line_integral(P: np.ndarray, Q: np.ndarray, domain: PlaneDomain, path: PlanePath) -> np.ndarray:
    """∫ P dx + Q dy along the staircase from the base node."""
    comps = np.stack([P, Q])
    return axis_path_integral(comps, domain.spacing, path.base_index(domain), path.axis_order, path.c)


def operator_A(
    Phi: ComplexField2D,
    path: PlanePath | None = None,
    *,
    tol: float | None = None,
    exclude: int | None = None,
    check: bool = True,
) -> ComplexField2D:
    """Real φ with φ_z = Φ: 2 ∫ Φ1 dx - Φ2 dy + c."""
    path = path or PlanePath()
    P, Q = Phi.values.real, Phi.values.imag
    if check:
        a, b = _dy(ComplexField2D(Phi.domain, P)), _dx(ComplexField2D(Phi.domain, Q))
        r = _rel(a + b, a, b, exclude=exclude)
        if r > _tol(tol):
            raise CompatibilityViolated(r, _tol(tol), "d_y Phi1 + d_x Phi2 = 0")
    out = _line_integral(2 * P, -2 * Q, Phi.domain, PlanePath(path.base, 0.0, path.axis_order)) + path.c
    return ComplexField2D(Phi.domain, out.real)


def operator_Abar(
    Phi: ComplexField2D,
    path: PlanePath | None = None,
    *,
    tol: float | None = None,
    exclude: int | None = None,
    check: bool = True,
) -> ComplexField2D:
    """Real φ with φ_zbar = Φ: 2 ∫ Φ1 dx + Φ2 dy + c."""
    path = path or PlanePath()
    P, Q = Phi.values.real, Phi.values.imag
    if check:
        a, b = _dy(ComplexField2D(Phi.domain, P)), _dx(ComplexField2D(Phi.domain, Q))
        r = _rel(a - b, a, b, exclude=exclude)
        if r > _tol(tol):
            raise CompatibilityViolated(r, _tol(tol), "d_y Phi1 - d_x Phi2 = 0")
    out = _line_integral(2 * P, 2 * Q, Phi.domain, PlanePath(path.base, 0.0, path.axis_order)) + path.c
    return ComplexField2D(Phi.domain, out.real)


def antiderivative_2d(
    Phi: ComplexField2D,
    f: ComplexField2D,
    path: PlanePath | None = None,
    *,
    tol: float | None = None,
    exclude: int | None = None,
) -> ComplexField2D:
    """w = ½(f A[Φ/f] + (i/f) A[-i f Φ]), the (f, i/f)-antiderivative of a V1 solution."""
    _check_f(f)
    r = v1_residual_2d(Phi, f, exclude=exclude)
    if r > _tol(tol):
        raise NotAV1Solution(r, _tol(tol))
    phi = operator_A(Phi / f, path, check=False)
    psi = operator_A(-1j * f * Phi, path, check=False)
    return 0.5 * (f * phi + (1j / f) * psi)


def conjugate_2d(
    W1: ComplexField2D,
    f: ComplexField2D,
    path: PlanePath | None = None,
    *,
    tol: float | None = None,
    exclude: int | None = None,
) -> ComplexField2D:
    """W = W1 + i W2 with W2 = f^-1 Ā[i f^2 d_zbar(W1 / f)]."""
    _check_f(f)
    q = laplacian_2d(f) / f
    r = schrodinger_residual_2d(W1, q, exclude=exclude)
    if r > _tol(tol):
        raise NotASchrodingerSolution(r, _tol(tol))
    W2 = operator_Abar(1j * f * f * d_zbar(W1 / f), path, check=False) / f
    return W1.real + 1j * W2


def conjugate_2d_inverse(
    W2: ComplexField2D,
    f: ComplexField2D,
    path: PlanePath | None = None,
    *,
    tol: float | None = None,
    exclude: int | None = None,
) -> ComplexField2D:
    """W = W1 + i W2 with W1 = -f Ā[i f^-2 d_zbar(f W2)]."""
    _check_f(f)
    r = schrodinger_residual_2d(W2, associated_potential(f), exclude=exclude)
    if r > _tol(tol):
        raise NotASchrodingerSolution(r, _tol(tol), "associated equation")
    W1 = -f * operator_Abar(1j / (f * f) * d_zbar(f * W2), path, check=False)
    return W1 + 1j * W2.real


# ---------------------------------------------------------------------------
# (F, G)-integral
# ---------------------------------------------------------------------------


def staircase_path(domain: PlaneDomain, start: Sequence[int], end: Sequence[int], first_axis: int = 0) -> list[tuple[int, int]]:
    """Node indices from ``start`` to ``end`` moving along ``first_axis`` first."""
    for idx in (start, end):
        if not all(0 <= k < n for k, n in zip(idx, domain.shape)):
            raise PathNotOnGrid(f"index {tuple(idx)} outside {domain.shape}")
    nodes = [tuple(start)]
    current = list(start)
    for axis in (first_axis, 1 - first_axis):
        step = 1 if end[axis] >= current[axis] else -1
        while current[axis] != end[axis]:
            current[axis] += step
            nodes.append(tuple(current))
    return nodes


def fg_integral(Wd: ComplexField2D, pair: GeneratingPair, nodes: Sequence[tuple[int, int]]) -> complex:
    """∫_Γ Ẇ d_(F,G) z = F(z1) Re ∫ G* Ẇ dz + G(z1) Re ∫ F* Ẇ dz along a grid polyline."""
    Fs, Gs = adjoint_pair(pair)
    idx = tuple(np.array(nodes).T)
    z = np.array([Wd.domain.node(n) for n in nodes])
    dz = np.diff(z)

    def trapezoid(g: np.ndarray) -> complex:
        vals = g[idx]
        return complex(np.sum(0.5 * (vals[1:] + vals[:-1]) * dz))

    end = tuple(nodes[-1])
    return (
        pair.F.values[end] * trapezoid(Gs.values * Wd.values).real
        + pair.G.values[end] * trapezoid(Fs.values * Wd.values).real
    )


def fg_antiderivative_residual(
    W: ComplexField2D,
    f: ComplexField2D,
    nodes: Sequence[tuple[int, int]],
    *,
    check: bool = True,
) -> float:
    """|∫ Ẇ d_(F,G) z - (W(z1) - φ(z0) F(z1) - ψ(z0) G(z1))| relative to |W(z1)|."""
    pair = generating_pair(f)
    Wd = bers_derivative_2d(W, f, check=check)
    phi, psi = decompose(W, pair)
    start, end = tuple(nodes[0]), tuple(nodes[-1])
    expected = W.values[end] - phi.values[start].real * pair.F.values[end] - psi.values[start].real * pair.G.values[end]
    got = fg_integral(Wd, pair, nodes)
    scale = abs(W.values[end]) or 1.0
    return abs(got - expected) / scale
