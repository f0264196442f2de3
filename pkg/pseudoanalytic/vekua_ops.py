"""
Vekua operators of the factorized Schrodinger operator and the Bers derivative.

With a nonvanishing scalar f and g = Df/f = grad f / f (purely vectorial):

    V   = D   - g C_H          (main Vekua operator, VW = 0)
    V̄   = D_r - M^g C_H        (gives the derivative, V̄ W)
    V1  = D_r + g              (successor operator, left multiplication)
    V̄1  = D   + M^g            (V̄1 V = V1 V̄ = -Δ + q on scalars, q = Δf/f)

M^P is right multiplication by P. Each operator is exposed both as a field-valued
function (``op_*``) and, for checks, as a relative interior residual (``*_residual``)
normalised by the norms of the two terms that form it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .biquaternion import hamilton_product, quat_conj_components
from .errors import NonvanishingViolation, NotAVekuaSolution, ScalarPartNonzero
from .grid_calculus import (
    AnyField,
    BiquaternionField,
    ScalarField,
    VectorField,
    check_same_domain,
    dirac_left,
    dirac_right,
    div,
    div_terms,
    dot,
    grad,
    laplacian,
    relative_residual,
    rot,
    rot_terms,
    second_partials,
)
from .settings import SETTINGS

logger = logging.getLogger("pseudoanalytic")


@dataclass(frozen=True, eq=False)
class FactorizingFunction:
    """A validated nonvanishing f with Df/f and q = Δf/f cached."""

    f: ScalarField
    df_over_f: VectorField
    q: ScalarField

    @property
    def domain(self):
        return self.f.domain

    @property
    def g(self) -> np.ndarray:
        """Df/f as biquaternion components (zero scalar part)."""
        return self.df_over_f.as_biquaternion().values


def make_factorizer(f: ScalarField, eps_f: float | None = None) -> FactorizingFunction:
    eps_f = SETTINGS.eps_f if eps_f is None else eps_f
    min_abs = float(np.min(np.abs(f.data)))
    if min_abs < eps_f:
        raise NonvanishingViolation(min_abs, eps_f)
    df_over_f = grad(f) / f
    q = laplacian(f) / f
    logger.debug("Factorizer on %s: min|f|=%.3e, max|q|=%.3e", f.domain.resolution, min_abs, q.max_abs())
    return FactorizingFunction(f=f, df_over_f=df_over_f, q=q)


@dataclass(frozen=True, eq=False)
class GeneratingQuartet:
    """F0 = f, Fk = e_k / f."""

    F0: BiquaternionField
    F1: BiquaternionField
    F2: BiquaternionField
    F3: BiquaternionField

    @property
    def elements(self) -> tuple[BiquaternionField, ...]:
        return (self.F0, self.F1, self.F2, self.F3)


def generating_quartet(F: FactorizingFunction) -> GeneratingQuartet:
    inv = F.f.reciprocal().data
    elements = [F.f.as_biquaternion()]
    for k in (1, 2, 3):
        comps = np.zeros((4, *F.domain.shape), dtype=np.complex128)
        comps[k] = inv
        elements.append(BiquaternionField(F.domain, comps))
    return GeneratingQuartet(*elements)


# ---------------------------------------------------------------------------
# operators as (first term, second term) pairs
# ---------------------------------------------------------------------------


def _prepare(W: AnyField, F: FactorizingFunction) -> BiquaternionField:
    check_same_domain(W, F.f)
    return W.as_biquaternion()


def _v_terms(W: AnyField, F: FactorizingFunction) -> tuple[np.ndarray, np.ndarray]:
    W = _prepare(W, F)
    return dirac_left(W).values, hamilton_product(F.g, quat_conj_components(W.values))


def _vbar_terms(W: AnyField, F: FactorizingFunction) -> tuple[np.ndarray, np.ndarray]:
    W = _prepare(W, F)
    return dirac_right(W).values, hamilton_product(quat_conj_components(W.values), F.g)


def _v1_terms(w: AnyField, F: FactorizingFunction) -> tuple[np.ndarray, np.ndarray]:
    w = _prepare(w, F)
    return dirac_right(w).values, hamilton_product(F.g, w.values)


def _v1bar_terms(w: AnyField, F: FactorizingFunction) -> tuple[np.ndarray, np.ndarray]:
    w = _prepare(w, F)
    return dirac_left(w).values, hamilton_product(w.values, F.g)


def op_V(W: AnyField, F: FactorizingFunction) -> BiquaternionField:
    a, b = _v_terms(W, F)
    return BiquaternionField(F.domain, a - b)


def op_Vbar(W: AnyField, F: FactorizingFunction) -> BiquaternionField:
    a, b = _vbar_terms(W, F)
    return BiquaternionField(F.domain, a - b)


def op_V1(w: AnyField, F: FactorizingFunction) -> BiquaternionField:
    a, b = _v1_terms(w, F)
    return BiquaternionField(F.domain, a + b)


def op_V1bar(w: AnyField, F: FactorizingFunction) -> BiquaternionField:
    a, b = _v1bar_terms(w, F)
    return BiquaternionField(F.domain, a + b)


def op_D_minus_M(w: AnyField, F: FactorizingFunction) -> BiquaternionField:
    """(D - M^{Df/f}) w."""
    a, b = _v1bar_terms(w, F)
    return BiquaternionField(F.domain, a - b)


def _exclude(exclude: int | None) -> int:
    return SETTINGS.exclude_boundary if exclude is None else exclude


def vekua_residual(W: AnyField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    a, b = _v_terms(W, F)
    return relative_residual(a - b, a, b, exclude=_exclude(exclude))


def vbar_residual(W: AnyField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    a, b = _vbar_terms(W, F)
    return relative_residual(a - b, a, b, exclude=_exclude(exclude))


def v1_residual(w: AnyField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    a, b = _v1_terms(w, F)
    return relative_residual(a + b, a, b, exclude=_exclude(exclude))


def v1bar_residual(w: AnyField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    a, b = _v1bar_terms(w, F)
    return relative_residual(a + b, a, b, exclude=_exclude(exclude))


def d_minus_m_residual(w: AnyField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    a, b = _v1bar_terms(w, F)
    return relative_residual(a - b, a, b, exclude=_exclude(exclude))


# ---------------------------------------------------------------------------
# derivative
# ---------------------------------------------------------------------------


def bers_derivative(
    W: AnyField,
    F: FactorizingFunction,
    *,
    tol: float | None = None,
    exclude: int | None = None,
    check: bool = True,
) -> VectorField:
    """Ẇ = V̄W for a solution of VW = 0; the (vanishing) scalar part is verified and dropped.

    ``check=False`` skips both the Vekua precondition and the purity check.
    """
    tol = SETTINGS.precondition_tol if tol is None else tol
    exclude = _exclude(exclude)
    if check:
        r = vekua_residual(W, F, exclude=exclude)
        logger.debug("bers_derivative: Vekua residual %.3e (tol %.3e)", r, tol)
        if r > tol:
            raise NotAVekuaSolution(r, tol)
    a, b = _vbar_terms(W, F)
    res = a - b
    if check:
        purity = relative_residual(res[0], a[0], b[0], exclude=exclude)
        if purity > tol:
            raise ScalarPartNonzero(purity, tol)
    return VectorField(F.domain, res[1:])


def derivative_scalar_residual(W: AnyField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    """Sc V̄W relative to the scalar parts of its two terms; vanishes for Vekua solutions."""
    a, b = _vbar_terms(W, F)
    return relative_residual(a[0] - b[0], a[0], b[0], exclude=_exclude(exclude))


def phi_coords(W: AnyField, F: FactorizingFunction) -> tuple[ScalarField, ScalarField, ScalarField, ScalarField]:
    """φ0 = W0 / f and φk = f Wk."""
    W = _prepare(W, F)
    f = F.f.data
    return (
        ScalarField(F.domain, W.values[0] / f),
        ScalarField(F.domain, W.values[1] * f),
        ScalarField(F.domain, W.values[2] * f),
        ScalarField(F.domain, W.values[3] * f),
    )


def from_phi_coords(phis: tuple[ScalarField, ...], F: FactorizingFunction) -> BiquaternionField:
    f = F.f.data
    comps = np.stack([phis[0].data * f, phis[1].data / f, phis[2].data / f, phis[3].data / f])
    return BiquaternionField(F.domain, comps)


def bers_derivative_quartet(W: AnyField, F: FactorizingFunction) -> BiquaternionField:
    """Ẇ = Σ F_α D φ_α (coefficients on the right)."""
    quartet = generating_quartet(F)
    total = np.zeros((4, *F.domain.shape), dtype=np.complex128)
    for F_alpha, phi in zip(quartet.elements, phi_coords(W, F)):
        total += hamilton_product(F_alpha.values, dirac_left(phi).values)
    return BiquaternionField(F.domain, total)


def quartet_vekua_residual(W: AnyField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    """Relative norm of Σ (D φ_α) F_α, the Vekua equation in quartet coordinates."""
    quartet = generating_quartet(F)
    terms = [
        hamilton_product(dirac_left(phi).values, F_alpha.values)
        for F_alpha, phi in zip(quartet.elements, phi_coords(W, F))
    ]
    return relative_residual(sum(terms), *terms, exclude=_exclude(exclude))


def schrodinger_residual(u: ScalarField, q: ScalarField, *, exclude: int | None = None) -> float:
    """Relative interior norm of (-Δ + q) u against the second partials of u and q u."""
    check_same_domain(u, q)
    seconds = second_partials(u)
    qu = q.values * u.values
    return relative_residual(qu - sum(seconds), *seconds, qu, exclude=_exclude(exclude))


def factorization_residual(
    phi: ScalarField,
    F: FactorizingFunction,
    *,
    order: str = "V1bar_V",
    reference: ScalarField | None = None,
    exclude: int | None = None,
) -> float:
    """Compare V̄1 V φ (or V1 V̄ φ) with (-Δ + q) φ; ``reference`` replaces the discrete right side."""
    if order == "V1bar_V":
        composite = op_V1bar(op_V(phi, F), F)
    elif order == "V1_Vbar":
        composite = op_V1(op_Vbar(phi, F), F)
    else:
        raise ValueError(f"unknown factorization order {order!r}")
    lap = laplacian(phi).values
    qphi = F.q.values * phi.values
    rhs = np.zeros_like(composite.values)
    rhs[:1] = reference.values if reference is not None else qphi - lap
    terms = (reference.values,) if reference is not None else (lap, qphi)
    return relative_residual(composite.values - rhs, *terms, exclude=_exclude(exclude))


# ---------------------------------------------------------------------------
# consequences of VW = 0
# ---------------------------------------------------------------------------


def phi0_residual(W0: ScalarField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    """div(f^2 grad φ0) with φ0 = W0 / f."""
    phi0 = W0 / F.f
    gphi = grad(phi0)
    f2 = F.f * F.f
    lhs = div(gphi * f2).values
    terms = (f2.values * laplacian(phi0).values, 2 * F.f.values * dot(grad(F.f), gphi).values)
    return relative_residual(lhs, *terms, exclude=_exclude(exclude))


def phi_div_residual(W: AnyField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    """div Φ with Φ = f **W**."""
    Phi = _prepare(W, F).vec() * F.f
    return relative_residual(div(Phi).values, *div_terms(Phi), exclude=_exclude(exclude))


def phi_rot_residual(W: AnyField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    """rot(f^-2 rot Φ) with Φ = f **W**."""
    Phi = _prepare(W, F).vec() * F.f
    inner = rot(Phi) / (F.f * F.f)
    plus, minus = rot_terms(inner)
    return relative_residual(plus - minus, plus, minus, exclude=_exclude(exclude))


def derivative_div_residual(Wd: VectorField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    """div(f Ẇ)."""
    check_same_domain(Wd, F.f)
    fw = Wd * F.f
    return relative_residual(div(fw).values, *div_terms(fw), exclude=_exclude(exclude))


def derivative_rot_residual(Wd: VectorField, F: FactorizingFunction, *, exclude: int | None = None) -> float:
    """rot(Ẇ / f)."""
    check_same_domain(Wd, F.f)
    plus, minus = rot_terms(Wd / F.f)
    return relative_residual(plus - minus, plus, minus, exclude=_exclude(exclude))
