"""
Discrete fields on an axis-aligned box and the differential operators acting on them.

Fields store complex128 samples with a leading component axis:
``(1, n1, n2, n3)`` for scalars, ``(3, ...)`` for vectors and ``(4, ...)`` for
biquaternions. Every partial derivative is the same stencil, second-order central
in the interior and second-order one-sided on the two boundary layers
(``numpy.gradient`` with ``edge_order=2``). Composite operators (Laplacian, D o D)
are applied stage by stage, so discrete partials along different axes commute and
rot o grad, div o rot vanish to rounding.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from numbers import Number
from typing import TYPE_CHECKING, ClassVar

if TYPE_CHECKING:
    from typing import Self

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .biquaternion import hamilton_product, quat_conj_components
from .errors import DomainMismatch, DomainTooSmall, NonFiniteField, PathNotOnGrid

logger = logging.getLogger("pseudoanalytic")

MIN_NODES = 5
# terms whose RMS is below this are rounding noise; the residual is then reported absolutely
NOISE_RMS = 1e-11

# basis units e1, e2, e3 as broadcastable component arrays
_UNITS = tuple(np.eye(4, dtype=np.complex128)[k].reshape(4, 1, 1, 1) for k in (1, 2, 3))


@dataclass(frozen=True)
class GridDomain:
    """Uniform box grid: ``resolution[k]`` nodes spanning ``[origin[k], origin[k] + extent[k]]``."""

    origin: tuple[float, float, float]
    extent: tuple[float, float, float]
    resolution: tuple[int, int, int]

    def __post_init__(self) -> None:
        origin = tuple(float(v) for v in self.origin)
        extent = tuple(float(v) for v in self.extent)
        resolution = tuple(int(v) for v in self.resolution)
        if not (len(origin) == len(extent) == len(resolution) == 3):
            raise ValueError("origin, extent and resolution need three entries each")
        if any(not np.isfinite(v) for v in origin + extent):
            raise ValueError(f"non-finite box: origin={origin}, extent={extent}")
        if any(v <= 0 for v in extent):
            raise ValueError(f"extent must be positive, got {extent}")
        if any(n < MIN_NODES for n in resolution):
            raise DomainTooSmall(f"resolution {resolution}: every axis needs at least {MIN_NODES} nodes")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "resolution", resolution)

    @classmethod
    def cube(cls, origin: Sequence[float], extent: Sequence[float], n: int) -> GridDomain:
        return cls(tuple(origin), tuple(extent), (n, n, n))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.resolution

    @property
    def spacing(self) -> tuple[float, float, float]:
        return tuple(L / (n - 1) for L, n in zip(self.extent, self.resolution))

    @property
    def node_count(self) -> int:
        return int(np.prod(self.resolution))

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(
            np.linspace(o, o + L, n) for o, L, n in zip(self.origin, self.extent, self.resolution)
        )

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def with_resolution(self, resolution: int | Sequence[int]) -> GridDomain:
        if isinstance(resolution, int):
            resolution = (resolution,) * 3
        return GridDomain(self.origin, self.extent, tuple(resolution))

    def index_of(self, point: Sequence[float]) -> tuple[int, int, int]:
        """Grid index of ``point``; it must coincide with a node."""
        index = []
        for p, o, h, n in zip(point, self.origin, self.spacing, self.resolution):
            t = (float(p) - o) / h
            k = int(round(t))
            if abs(t - k) > 1e-9 * max(1.0, abs(t)) or not 0 <= k < n:
                raise PathNotOnGrid(f"point {tuple(point)} is not a node of {self}")
            index.append(k)
        return tuple(index)

    def node(self, index: Sequence[int]) -> tuple[float, float, float]:
        return tuple(o + k * h for o, k, h in zip(self.origin, index, self.spacing))


@dataclass(frozen=True, eq=False)
class _GridField:
    domain: GridDomain
    values: np.ndarray

    COMPONENTS: ClassVar[int] = 0

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.complex128)
        if self.COMPONENTS == 1 and arr.shape == self.domain.shape:
            arr = arr[np.newaxis]
        expected = (self.COMPONENTS, *self.domain.shape)
        if arr.shape != expected:
            raise ValueError(f"{type(self).__name__} expects values of shape {expected}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteField(f"{type(self).__name__} contains NaN or Inf")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, domain: GridDomain) -> Self:
        return cls(domain, np.zeros((cls.COMPONENTS, *domain.shape), dtype=np.complex128))

    @classmethod
    def from_function(cls, domain: GridDomain, fn: Callable[..., object]) -> Self:
        """Sample ``fn(x, y, z)``; vector and biquaternion fields expect a tuple of components."""
        x, y, z = domain.mesh()
        out = fn(x, y, z)
        if cls.COMPONENTS == 1:
            comps = [out]
        else:
            comps = list(out)
            if len(comps) != cls.COMPONENTS:
                raise ValueError(f"{cls.__name__}.from_function needs {cls.COMPONENTS} components")
        return cls(domain, np.stack([np.broadcast_to(np.asarray(c, dtype=np.complex128), domain.shape) for c in comps]))

    def _like(self, values: np.ndarray) -> Self:
        return type(self)(self.domain, values)

    def __add__(self, other: object) -> Self:
        if not isinstance(other, type(self)):
            return NotImplemented
        check_same_domain(self, other)
        return self._like(self.values + other.values)

    def __sub__(self, other: object) -> Self:
        if not isinstance(other, type(self)):
            return NotImplemented
        check_same_domain(self, other)
        return self._like(self.values - other.values)

    def __neg__(self) -> Self:
        return self._like(-self.values)

    def __mul__(self, other: object) -> Self:
        """Multiplication by a number or, node-wise, by a scalar field."""
        if isinstance(other, Number):
            return self._like(complex(other) * self.values)
        if isinstance(other, ScalarField):
            check_same_domain(self, other)
            return self._like(self.values * other.values)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> Self:
        if isinstance(other, Number):
            return self._like(self.values / complex(other))
        if isinstance(other, ScalarField):
            check_same_domain(self, other)
            return self._like(self.values / other.values)
        return NotImplemented

    def conj(self) -> Self:
        return self._like(np.conj(self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


class ScalarField(_GridField):
    COMPONENTS = 1

    @property
    def data(self) -> np.ndarray:
        return self.values[0]

    def as_biquaternion(self) -> BiquaternionField:
        comps = np.zeros((4, *self.domain.shape), dtype=np.complex128)
        comps[0] = self.values[0]
        return BiquaternionField(self.domain, comps)

    def reciprocal(self) -> ScalarField:
        return ScalarField(self.domain, 1.0 / self.values)


class VectorField(_GridField):
    COMPONENTS = 3

    def as_biquaternion(self) -> BiquaternionField:
        comps = np.zeros((4, *self.domain.shape), dtype=np.complex128)
        comps[1:] = self.values
        return BiquaternionField(self.domain, comps)


class BiquaternionField(_GridField):
    COMPONENTS = 4

    @classmethod
    def from_parts(cls, scalar: ScalarField | None, vector: VectorField | None) -> BiquaternionField:
        field = scalar if scalar is not None else vector
        if field is None:
            raise ValueError("need a scalar or a vector part")
        comps = np.zeros((4, *field.domain.shape), dtype=np.complex128)
        if scalar is not None:
            comps[0] = scalar.values[0]
        if vector is not None:
            if scalar is not None:
                check_same_domain(scalar, vector)
            comps[1:] = vector.values
        return cls(field.domain, comps)

    def as_biquaternion(self) -> BiquaternionField:
        return self

    def sc(self) -> ScalarField:
        return ScalarField(self.domain, self.values[:1])

    def vec(self) -> VectorField:
        return VectorField(self.domain, self.values[1:])

    def quat_conj(self) -> BiquaternionField:
        return BiquaternionField(self.domain, quat_conj_components(self.values))

    def complex_conj(self) -> BiquaternionField:
        return BiquaternionField(self.domain, np.conj(self.values))


AnyField = ScalarField | VectorField | BiquaternionField


def check_same_domain(*fields: _GridField) -> GridDomain:
    domain = fields[0].domain
    for other in fields[1:]:
        if other.domain != domain:
            raise DomainMismatch(f"fields live on different grids: {domain} vs {other.domain}")
    return domain


def field_mul(p: AnyField, q: AnyField) -> BiquaternionField:
    """Node-wise biquaternion product of two fields (scalars and vectors are promoted)."""
    check_same_domain(p, q)
    return BiquaternionField(
        p.domain, hamilton_product(p.as_biquaternion().values, q.as_biquaternion().values)
    )


def dot(a: VectorField, b: VectorField) -> ScalarField:
    check_same_domain(a, b)
    return ScalarField(a.domain, np.sum(a.values * b.values, axis=0, keepdims=True))


def cross(a: VectorField, b: VectorField) -> VectorField:
    check_same_domain(a, b)
    return VectorField(a.domain, np.cross(a.values, b.values, axis=0))


# ---------------------------------------------------------------------------
# stencils
# ---------------------------------------------------------------------------


def difference(values: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """Second-order derivative stencil of a raw array along ``axis``."""
    if values.shape[axis] < MIN_NODES:
        raise DomainTooSmall(f"axis {axis} has {values.shape[axis]} nodes, need at least {MIN_NODES}")
    return np.gradient(values, spacing, axis=axis, edge_order=2)


def partial(field: AnyField, k: int) -> AnyField:
    """d/dx_k of every component (k = 0, 1, 2)."""
    if k not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {k}")
    return field._like(difference(field.values, k + 1, field.domain.spacing[k]))


def _partials(field: AnyField) -> list[np.ndarray]:
    return [difference(field.values, k + 1, field.domain.spacing[k]) for k in range(3)]


def grad(phi: ScalarField) -> VectorField:
    return VectorField(phi.domain, np.concatenate(_partials(phi), axis=0))


def div(q: VectorField) -> ScalarField:
    d = _partials(q)
    return ScalarField(q.domain, d[0][0] + d[1][1] + d[2][2])


def div_terms(q: VectorField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three diagonal partials d_k Q_k whose sum is div Q."""
    d = _partials(q)
    return d[0][0], d[1][1], d[2][2]


def rot_terms(q: VectorField) -> tuple[np.ndarray, np.ndarray]:
    """The two halves of rot: rot Q = plus - minus (used for relative residual norms)."""
    d = _partials(q)
    plus = np.stack([d[1][2], d[2][0], d[0][1]])
    minus = np.stack([d[2][1], d[0][2], d[1][0]])
    return plus, minus


def rot(q: VectorField) -> VectorField:
    plus, minus = rot_terms(q)
    return VectorField(q.domain, plus - minus)


def second_partials(field: AnyField) -> list[np.ndarray]:
    """The composed d_k d_k of every component, k = 0, 1, 2."""
    out = []
    for k in range(3):
        h = field.domain.spacing[k]
        out.append(difference(difference(field.values, k + 1, h), k + 1, h))
    return out


def laplacian(field: AnyField) -> AnyField:
    return field._like(sum(second_partials(field)))


def dirac_left(q: AnyField) -> BiquaternionField:
    """D Q = sum_k e_k d_k Q."""
    comps = q.as_biquaternion()
    d = _partials(comps)
    return BiquaternionField(q.domain, sum(hamilton_product(_UNITS[k], d[k]) for k in range(3)))


def dirac_right(q: AnyField) -> BiquaternionField:
    """D_r Q = sum_k (d_k Q) e_k."""
    comps = q.as_biquaternion()
    d = _partials(comps)
    return BiquaternionField(q.domain, sum(hamilton_product(d[k], _UNITS[k]) for k in range(3)))


def leibniz_residual(p: AnyField, q: AnyField) -> ScalarField:
    """|D[PQ] - D[P]Q - C_H(P) D[Q] - 2 Sc(P D)[Q]| per node, Sc(P D)[Q] = -sum_k P_k d_k Q."""
    p = p.as_biquaternion()
    q = q.as_biquaternion()
    check_same_domain(p, q)
    lhs = dirac_left(field_mul(p, q)).values
    dq = _partials(q)
    sc_pd = -sum(p.values[k + 1] * dq[k] for k in range(3))
    rhs = (
        hamilton_product(dirac_left(p).values, q.values)
        + hamilton_product(quat_conj_components(p.values), dirac_left(q).values)
        + 2 * sc_pd
    )
    return ScalarField(p.domain, np.sqrt(np.sum(np.abs(lhs - rhs) ** 2, axis=0)))


# ---------------------------------------------------------------------------
# residual norms
# ---------------------------------------------------------------------------


def interior(values: np.ndarray, exclude: int, spatial_ndim: int = 3) -> np.ndarray:
    """Drop ``exclude`` nodes at both ends of each of the trailing ``spatial_ndim`` axes."""
    if exclude <= 0:
        return values
    spatial = values.shape[-spatial_ndim:]
    if any(n <= 2 * exclude for n in spatial):
        raise DomainTooSmall(f"no interior left in {spatial} after excluding {exclude} boundary nodes")
    lead = (slice(None),) * (values.ndim - spatial_ndim)
    return values[lead + (slice(exclude, -exclude),) * spatial_ndim]


def _raw(x: _GridField | np.ndarray) -> np.ndarray:
    return x.values if isinstance(x, _GridField) else np.asarray(x)


def interior_norm(x: _GridField | np.ndarray, exclude: int, spatial_ndim: int = 3) -> float:
    return float(np.linalg.norm(interior(_raw(x), exclude, spatial_ndim)))


def relative_residual(
    residual: _GridField | np.ndarray,
    *terms: _GridField | np.ndarray,
    exclude: int,
    spatial_ndim: int = 3,
) -> float:
    """Interior L2 norm of ``residual`` over the summed interior norms of the terms forming it.

    With no terms, or terms at rounding-noise level, the absolute norm is returned.
    """
    inner = interior(_raw(residual), exclude, spatial_ndim)
    num = float(np.linalg.norm(inner))
    den = sum(interior_norm(t, exclude, spatial_ndim) for t in terms)
    if den <= NOISE_RMS * np.sqrt(inner.size):
        return num
    return num / den


def laplacian_residual(field: AnyField, *, exclude: int) -> float:
    """Relative interior norm of Δ field against its three second partials."""
    seconds = second_partials(field)
    return relative_residual(sum(seconds), *seconds, exclude=exclude)


def axis_path_integral(
    components: np.ndarray,
    spacing: Sequence[float],
    base_index: Sequence[int],
    axis_order: Sequence[int],
    c: complex = 0.0,
) -> np.ndarray:
    """Trapezoid line integral of a gradient field along an axis-aligned staircase.

    ``components[a]`` is the a-th component sampled on the grid. Segment ``i`` runs
    along ``axis_order[i]`` with the earlier axes at the target node and the later
    ones at the base node; the result equals ``c`` at the base node.
    """
    result = np.full(components.shape[1:], complex(c), dtype=np.complex128)
    for i, a in enumerate(axis_order):
        segment = components[a]
        for b in axis_order[i + 1 :]:
            segment = np.take(segment, [base_index[b]], axis=b)
        cum = cumulative_trapezoid(segment, dx=spacing[a], axis=a, initial=0)
        result = result + (cum - np.take(cum, [base_index[a]], axis=a))
    return result
