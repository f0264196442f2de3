"""
Reconstruction operators: the potential 𝒜, the Newton potential 𝐁, the antiderivative
and the conjugate-solution constructions.

𝒜 integrates a conservative field along an axis-aligned three-segment path with the
composite trapezoid rule. 𝐁 is the volume potential (1/4π)∫ Q(y)/|x-y| dy over the box,
evaluated by a node-centred midpoint rule (cells clipped at the faces) with an
equivalent-sphere value for the singular self cell. Its cost is O(N^2) in the node
count; targets are processed in blocks and, optionally, in threads.

On a bounded box rot rot 𝐁[G] = G + grad div 𝐁[G], and the second term only vanishes
when G is interior-supported. :func:`solenoidal_potential` therefore builds the
divergence-free vector potential from the Cartesian line-integral potential and a
Newton-potential gradient; it differs from rot 𝐁[G] by the gradient of a harmonic
function, which is absorbed in the free gauge h.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.spatial.distance import cdist

from .errors import (
    DomainMismatch,
    NotAPhiSolution,
    NotASchrodingerSolution,
    NotAV1Solution,
    NotConservative,
    NotHarmonic,
    PotentialTooLarge,
    ScalarPartNonzero,
)
from .grid_calculus import (
    BiquaternionField,
    GridDomain,
    ScalarField,
    VectorField,
    axis_path_integral,
    check_same_domain,
    div,
    grad,
    laplacian_residual,
    relative_residual,
    rot,
    rot_terms,
)
from .settings import SETTINGS
from .vekua_ops import (
    FactorizingFunction,
    phi_div_residual,
    phi_rot_residual,
    schrodinger_residual,
    v1bar_residual,
)

logger = logging.getLogger("pseudoanalytic")


@dataclass(frozen=True)
class PotentialPath:
    """Base node, additive constant and axis order of the 𝒜 integration path.

    ``base=None`` means the domain origin. With the default order the path runs
    x0 -> x at (y0, z0), then y0 -> y at (x, z0), then z0 -> z at (x, y).
    """

    base: tuple[float, float, float] | None = None
    c: complex = 0.0
    axis_order: tuple[int, int, int] = (0, 1, 2)

    def __post_init__(self) -> None:
        if sorted(self.axis_order) != [0, 1, 2]:
            raise ValueError(f"axis_order must be a permutation of (0, 1, 2), got {self.axis_order}")

    def base_index(self, domain: GridDomain) -> tuple[int, int, int]:
        if self.base is None:
            return (0, 0, 0)
        return domain.index_of(self.base)


@dataclass(frozen=True, eq=False)
class HarmonicGauge:
    """The harmonic h of the gauge term; ``HarmonicGauge.ZERO`` stands for h = 0."""

    h: ScalarField | None = None

    ZERO: ClassVar[HarmonicGauge]

    @classmethod
    def from_field(cls, h: ScalarField, *, tol: float | None = None, exclude: int | None = None) -> HarmonicGauge:
        tol = SETTINGS.precondition_tol if tol is None else tol
        exclude = SETTINGS.exclude_boundary if exclude is None else exclude
        r = laplacian_residual(h, exclude=exclude)
        if r > tol:
            raise NotHarmonic(r, tol, "gauge function")
        return cls(h)

    def gradient(self, domain: GridDomain) -> VectorField:
        if self.h is None:
            return VectorField.zeros(domain)
        if self.h.domain != domain:
            raise DomainMismatch(f"gauge lives on {self.h.domain}, expected {domain}")
        return grad(self.h)


HarmonicGauge.ZERO = HarmonicGauge()


def _tol(tol: float | None) -> float:
    return SETTINGS.precondition_tol if tol is None else tol


def _exclude(exclude: int | None) -> int:
    return SETTINGS.exclude_boundary if exclude is None else exclude


# ---------------------------------------------------------------------------
# 𝒜
# ---------------------------------------------------------------------------


def _path_integral(components: np.ndarray, domain: GridDomain, path: PotentialPath) -> np.ndarray:
    return axis_path_integral(components, domain.spacing, path.base_index(domain), path.axis_order, path.c)


def potential_A(
    psi: VectorField,
    path: PotentialPath | None = None,
    *,
    tol: float | None = None,
    exclude: int | None = None,
    check: bool = True,
) -> ScalarField:
    """φ with grad φ = Ψ for a conservative Ψ, φ(base) = c."""
    path = path or PotentialPath()
    if check:
        plus, minus = rot_terms(psi)
        r = relative_residual(plus - minus, plus, minus, exclude=_exclude(exclude))
        if r > _tol(tol):
            raise NotConservative(r, _tol(tol))
    return ScalarField(psi.domain, _path_integral(psi.values, psi.domain, path))


# ---------------------------------------------------------------------------
# 𝐁
# ---------------------------------------------------------------------------


def cell_weights(domain: GridDomain) -> np.ndarray:
    """Volumes of node-centred cells clipped to the box, flattened in C order."""
    per_axis = []
    for h, n in zip(domain.spacing, domain.resolution):
        w = np.full(n, h)
        w[0] = w[-1] = h / 2
        per_axis.append(w)
    return np.einsum("i,j,k->ijk", *per_axis).ravel()


def check_potential_size(domain: GridDomain, *, force: bool = False, limit: int | None = None) -> None:
    limit = SETTINGS.potential_max_nodes if limit is None else limit
    if domain.node_count > limit and not force:
        raise PotentialTooLarge(
            f"{domain.node_count} nodes exceed the Newton-potential limit of {limit}; pass --force to run anyway"
        )


def newton_potential_B(
    Q: ScalarField | VectorField,
    *,
    chunk: int | None = None,
    workers: int | None = None,
) -> ScalarField | VectorField:
    """(1/4π) ∫ Q(y) / |x - y| dy at every node, component by component."""
    chunk = SETTINGS.potential_chunk if chunk is None else max(1, chunk)
    workers = SETTINGS.workers if workers is None else max(1, workers)
    domain = Q.domain
    coords = np.stack([a.ravel() for a in domain.mesh()], axis=1)
    weights = cell_weights(domain)
    values = Q.values.reshape(Q.values.shape[0], -1).T
    self_term = (3.0 * weights / (4.0 * math.pi)) ** (2.0 / 3.0) / 2.0
    out = np.empty_like(values)

    def block(start: int) -> None:
        stop = min(start + chunk, len(coords))
        dist = cdist(coords[start:stop], coords)
        with np.errstate(divide="ignore"):
            kernel = weights / (4.0 * math.pi * dist)
        rows = np.arange(stop - start)
        kernel[rows, rows + start] = 0.0
        out[start:stop] = kernel @ values.real + 1j * (kernel @ values.imag)
        out[start:stop] += self_term[start:stop, None] * values[start:stop]

    t0 = time.perf_counter()
    starts = range(0, len(coords), chunk)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(block, starts))
    else:
        for start in starts:
            block(start)
    logger.debug(
        "Newton potential: %d nodes, %d components, %.2fs", len(coords), values.shape[1], time.perf_counter() - t0
    )
    return type(Q)(domain, out.T.reshape(Q.values.shape))


# ---------------------------------------------------------------------------
# vector potentials
# ---------------------------------------------------------------------------


def cartesian_vector_potential(E: VectorField, path: PotentialPath | None = None) -> VectorField:
    """K with rot K = E for divergence-free E:

    K_x = 0, K_y = ∫ E_z dx, K_z = -∫ E_y dx + ∫ E_x(x0, η, z) dη.
    """
    path = path or PotentialPath()
    domain = E.domain
    i0, j0, _ = path.base_index(domain)
    hx, hy, _ = domain.spacing
    Ex, Ey, Ez = E.values

    def along_x(comp: np.ndarray) -> np.ndarray:
        cum = cumulative_trapezoid(comp, dx=hx, axis=0, initial=0)
        return cum - cum[i0 : i0 + 1]

    face = Ex[i0 : i0 + 1]
    cum_y = cumulative_trapezoid(face, dx=hy, axis=1, initial=0)
    cum_y = cum_y - cum_y[:, j0 : j0 + 1]
    K = np.stack([np.zeros(domain.shape, dtype=np.complex128), along_x(Ez), -along_x(Ey) + cum_y])
    return VectorField(domain, K)


def solenoidal_potential(
    G: VectorField,
    *,
    path: PotentialPath | None = None,
    boundary_correction: bool = True,
    chunk: int | None = None,
    workers: int | None = None,
) -> VectorField:
    """Divergence-free A with rot A = G for divergence-free G.

    ``boundary_correction=False`` returns the classical rot 𝐁[G], which only
    inverts rot for interior-supported G.
    """
    if not boundary_correction:
        return rot(newton_potential_B(G, chunk=chunk, workers=workers))
    K = cartesian_vector_potential(G, path)
    source = div(K)
    if not np.any(source.values):
        return K
    chi = newton_potential_B(source, chunk=chunk, workers=workers)
    return K + grad(chi)


# ---------------------------------------------------------------------------
# antiderivative and conjugates
# ---------------------------------------------------------------------------


def antiderivative(
    w: VectorField | BiquaternionField,
    F: FactorizingFunction,
    gauge: HarmonicGauge = HarmonicGauge.ZERO,
    path: PotentialPath | None = None,
    *,
    tol: float | None = None,
    exclude: int | None = None,
    boundary_correction: bool = True,
    chunk: int | None = None,
    workers: int | None = None,
) -> BiquaternionField:
    """W = ½(f 𝒜[w/f] - (1/f) A[f w] + grad h / f), A the solenoidal potential.

    ``w`` must solve (D + M^{Df/f}) w = 0; then VW = 0 and V̄W = w.

    A defaults to the divergence-free potential 𝐊 + ∇𝐁[div 𝐊], not the literal
    rot 𝐁[f w]: rot rot 𝐁[G] = G holds only for G supported inside the box, and
    otherwise leaves a harmonic gradient. ``boundary_correction=False`` uses rot 𝐁.
    """
    tol = _tol(tol)
    exclude = _exclude(exclude)
    check_same_domain(w, F.f)
    if isinstance(w, BiquaternionField):
        purity = relative_residual(w.values[:1], w.values, exclude=exclude)
        if purity > tol:
            raise ScalarPartNonzero(purity, tol, "antiderivative needs a purely vectorial field")
        w = w.vec()
    r = v1bar_residual(w, F, exclude=exclude)
    logger.debug("antiderivative: (D+M) residual %.3e", r)
    if r > tol:
        raise NotAV1Solution(r, tol)
    W0 = F.f * potential_A(w / F.f, path, check=False) * 0.5
    A = solenoidal_potential(w * F.f, path=path, boundary_correction=boundary_correction, chunk=chunk, workers=workers)
    W_vec = (A - gauge.gradient(F.domain)) / F.f * (-0.5)
    return BiquaternionField.from_parts(W0, W_vec)


def conjugate_vector(
    W0: ScalarField,
    F: FactorizingFunction,
    gauge: HarmonicGauge = HarmonicGauge.ZERO,
    *,
    path: PotentialPath | None = None,
    tol: float | None = None,
    exclude: int | None = None,
    boundary_correction: bool = True,
    chunk: int | None = None,
    workers: int | None = None,
) -> VectorField:
    """**W** = -(1/f)(A[f^2 grad(W0/f)] + grad h) completing W0 to a Vekua solution.

    As in :func:`antiderivative`, A is the divergence-free potential unless
    ``boundary_correction=False`` asks for rot 𝐁.
    """
    tol = _tol(tol)
    check_same_domain(W0, F.f)
    r = schrodinger_residual(W0, F.q, exclude=_exclude(exclude))
    logger.debug("conjugate_vector: Schrodinger residual %.3e", r)
    if r > tol:
        raise NotASchrodingerSolution(r, tol)
    E = grad(W0 / F.f) * (F.f * F.f)
    A = solenoidal_potential(E, path=path, boundary_correction=boundary_correction, chunk=chunk, workers=workers)
    return -(A + gauge.gradient(F.domain)) / F.f


def conjugate_scalar(
    W_vec: VectorField,
    F: FactorizingFunction,
    path: PotentialPath | None = None,
    *,
    tol: float | None = None,
    exclude: int | None = None,
) -> ScalarField:
    """W0 = -f 𝒜[f^-2 rot(f **W**)] completing a vector part to a Vekua solution."""
    tol = _tol(tol)
    exclude = _exclude(exclude)
    check_same_domain(W_vec, F.f)
    r = max(phi_rot_residual(W_vec, F, exclude=exclude), phi_div_residual(W_vec, F, exclude=exclude))
    logger.debug("conjugate_scalar: Phi residual %.3e", r)
    if r > tol:
        raise NotAPhiSolution(r, tol)
    psi = rot(W_vec * F.f) / (F.f * F.f)
    return -(F.f * potential_A(psi, path, check=False))
