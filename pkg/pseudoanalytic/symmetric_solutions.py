"""
Exact solutions from symmetry.

If grad f is parallel to grad ρ for a harmonic ρ, then (1/f) Dρ solves (D + M^{Df/f}) and
f Dρ solves (D - M^{Df/f}); if they are orthogonal the roles swap. For f = f(r) in
cylindrical coordinates the harmonic functions log r, θ and z give three independent
solutions (a generating triplet), and ψ = f 𝒜[Dρ / f^2] solves (-Δ + Δf/f) ψ = 0.

Built-in harmonic functions and factorizer profiles are evaluated analytically at the
nodes; CUSTOM harmonic fields are validated by their Laplacian residual instead.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .antiderivative import PotentialPath, potential_A
from .biquaternion import hamilton_product
from .errors import AxisInDomain, DomainMismatch, NotHarmonic, NotOrthogonal, NotParallel
from .grid_calculus import (
    GridDomain,
    ScalarField,
    VectorField,
    check_same_domain,
    cross,
    dirac_left,
    dot,
    grad,
    laplacian_residual,
    relative_residual,
)
from .settings import SETTINGS
from .vekua_ops import FactorizingFunction, make_factorizer

logger = logging.getLogger("pseudoanalytic")


class HarmonicKind(enum.Enum):
    LOG_R_CYL = "log-r-cyl"
    THETA_CYL = "theta-cyl"
    Z_COORD = "z"
    INV_R_SPH = "inv-r-sph"
    LINEAR = "linear"
    CUSTOM = "custom"


_CYLINDRICAL = (HarmonicKind.LOG_R_CYL, HarmonicKind.THETA_CYL)


def axis_in_box(domain: GridDomain) -> bool:
    (x0, y0, _), (lx, ly, _) = domain.origin, domain.extent
    return x0 <= 0.0 <= x0 + lx and y0 <= 0.0 <= y0 + ly


def origin_in_box(domain: GridDomain) -> bool:
    return all(o <= 0.0 <= o + L for o, L in zip(domain.origin, domain.extent))


@dataclass(frozen=True, eq=False)
class HarmonicFunctionSpec:
    kind: HarmonicKind
    coefficients: tuple[float, float, float] = (1.0, 0.0, 0.0)
    field: ScalarField | None = None

    @classmethod
    def linear(cls, a: float, b: float, c: float) -> HarmonicFunctionSpec:
        return cls(HarmonicKind.LINEAR, (a, b, c))

    @classmethod
    def custom(cls, field: ScalarField) -> HarmonicFunctionSpec:
        return cls(HarmonicKind.CUSTOM, field=field)

    @classmethod
    def parse(cls, text: str) -> HarmonicFunctionSpec:
        """``log-r-cyl``, ``theta-cyl``, ``z``, ``inv-r-sph``, ``x1``..``x3`` or ``linear:a,b,c``."""
        text = text.strip()
        if text.startswith("linear:"):
            a, b, c = (float(v) for v in text.split(":", 1)[1].split(","))
            return cls.linear(a, b, c)
        coords = {"x1": (1.0, 0.0, 0.0), "x2": (0.0, 1.0, 0.0), "x3": (0.0, 0.0, 1.0)}
        if text in coords:
            return cls.linear(*coords[text])
        return cls(HarmonicKind(text))

    def _check_region(self, domain: GridDomain) -> None:
        if self.kind in _CYLINDRICAL and axis_in_box(domain):
            raise AxisInDomain(f"{self.kind.value} is singular on the axis r = 0, which meets {domain}")
        if self.kind is HarmonicKind.INV_R_SPH and origin_in_box(domain):
            raise AxisInDomain(f"{self.kind.value} is singular at the origin, which lies in {domain}")

    def evaluate(self, domain: GridDomain) -> ScalarField:
        self._check_region(domain)
        x, y, z = domain.mesh()
        match self.kind:
            case HarmonicKind.LOG_R_CYL:
                values = 0.5 * np.log(x**2 + y**2)
            case HarmonicKind.THETA_CYL:
                values = np.arctan2(y, x)
            case HarmonicKind.Z_COORD:
                values = z
            case HarmonicKind.INV_R_SPH:
                values = 1.0 / np.sqrt(x**2 + y**2 + z**2)
            case HarmonicKind.LINEAR:
                a, b, c = self.coefficients
                values = a * x + b * y + c * z
            case HarmonicKind.CUSTOM:
                if self.field.domain != domain:
                    raise DomainMismatch(f"custom harmonic field lives on {self.field.domain}, expected {domain}")
                return self.field
        return ScalarField(domain, values)

    def gradient(self, domain: GridDomain) -> VectorField:
        self._check_region(domain)
        x, y, z = domain.mesh()
        zero = np.zeros(domain.shape)
        match self.kind:
            case HarmonicKind.LOG_R_CYL:
                r2 = x**2 + y**2
                comps = (x / r2, y / r2, zero)
            case HarmonicKind.THETA_CYL:
                r2 = x**2 + y**2
                comps = (-y / r2, x / r2, zero)
            case HarmonicKind.Z_COORD:
                comps = (zero, zero, zero + 1.0)
            case HarmonicKind.INV_R_SPH:
                R3 = (x**2 + y**2 + z**2) ** 1.5
                comps = (-x / R3, -y / R3, -z / R3)
            case HarmonicKind.LINEAR:
                comps = tuple(zero + v for v in self.coefficients)
            case HarmonicKind.CUSTOM:
                return grad(self.evaluate(domain))
        return VectorField(domain, np.stack(comps))

    def validate(self, domain: GridDomain, *, tol: float | None = None, exclude: int | None = None) -> None:
        """Built-ins only need a region check; CUSTOM fields must have a small Laplacian."""
        self._check_region(domain)
        if self.kind is HarmonicKind.CUSTOM:
            tol = SETTINGS.precondition_tol if tol is None else tol
            exclude = SETTINGS.exclude_boundary if exclude is None else exclude
            r = laplacian_residual(self.evaluate(domain), exclude=exclude)
            if r > tol:
                raise NotHarmonic(r, tol, "custom harmonic function")


# ---------------------------------------------------------------------------
# factorizer profiles and domain templates
# ---------------------------------------------------------------------------


def _r(x, y, z):
    return np.sqrt(x**2 + y**2)


def _R(x, y, z):
    return np.sqrt(x**2 + y**2 + z**2)


FACTORIZER_PROFILES: dict[str, Callable[..., np.ndarray]] = {
    "one": lambda x, y, z: np.ones_like(x),
    "exp-x1": lambda x, y, z: np.exp(x),
    "x1": lambda x, y, z: x,
    "r-cyl": _r,
    "inv-r-sph": lambda x, y, z: 1.0 / _R(x, y, z),
}


def factorizer_from_profile(name: str, domain: GridDomain, eps_f: float | None = None) -> FactorizingFunction:
    try:
        profile = FACTORIZER_PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown factorizer profile {name!r}; known: {', '.join(FACTORIZER_PROFILES)}") from None
    if name == "r-cyl" and axis_in_box(domain):
        raise AxisInDomain(f"f = r vanishes on the axis, which meets {domain}")
    return make_factorizer(ScalarField.from_function(domain, profile), eps_f)


def radial_factorizer(
    domain: GridDomain,
    profile: Callable[[np.ndarray], np.ndarray],
    *,
    eps_f: float | None = None,
) -> FactorizingFunction:
    """f = profile(r) with r the distance to the x3 axis."""
    if axis_in_box(domain):
        raise AxisInDomain(f"radial profiles need a box away from the axis, got {domain}")
    x, y, _ = domain.mesh()
    return make_factorizer(ScalarField(domain, profile(np.sqrt(x**2 + y**2))), eps_f)


def cylindrical_shell(n: int) -> GridDomain:
    return GridDomain((1.0, 1.0, 0.0), (1.0, 1.0, 1.0), (n, n, n))


def spherical_shell(n: int) -> GridDomain:
    return GridDomain((1.0, 1.0, 1.0), (1.0, 1.0, 1.0), (n, n, n))


def closed_form_psi(
    profile: str, rho: HarmonicFunctionSpec, domain: GridDomain
) -> tuple[np.ndarray, np.ndarray] | None:
    """Known ψ = f 𝒜[Dρ / f^2] as (particular, kernel): ψ = particular + c * kernel."""
    x, y, z = domain.mesh()
    if profile == "r-cyl" and rho.kind is HarmonicKind.LOG_R_CYL:
        r = _r(x, y, z)
        return -0.5 / r, r
    if profile == "inv-r-sph" and rho.kind is HarmonicKind.INV_R_SPH:
        return -np.ones_like(x), 1.0 / _R(x, y, z)
    if profile == "exp-x1" and rho.kind is HarmonicKind.LINEAR and rho.coefficients == (1.0, 0.0, 0.0):
        return -0.5 * np.exp(-x), np.exp(x)
    if profile == "one" and rho.kind is not HarmonicKind.CUSTOM:
        return rho.evaluate(domain).data.real, np.ones_like(x)
    return None


# ---------------------------------------------------------------------------
# propositions
# ---------------------------------------------------------------------------


def _pairing_residual(values: np.ndarray, gf: VectorField, grho: VectorField, exclude: int) -> float:
    scale = np.linalg.norm(gf.values, axis=0) * np.linalg.norm(grho.values, axis=0)
    return relative_residual(values, scale[np.newaxis], exclude=exclude)


def parallel_solution(
    F: FactorizingFunction,
    rho: HarmonicFunctionSpec,
    *,
    tol: float | None = None,
    exclude: int | None = None,
) -> tuple[VectorField, VectorField]:
    """(𝐅, 𝐆) = ((1/f) Dρ, f Dρ) when grad f x grad ρ = 0."""
    tol = SETTINGS.precondition_tol if tol is None else tol
    exclude = SETTINGS.exclude_boundary if exclude is None else exclude
    rho.validate(F.domain, tol=tol, exclude=exclude)
    grho = rho.gradient(F.domain)
    gf = grad(F.f)
    r = _pairing_residual(cross(gf, grho).values, gf, grho, exclude)
    if r > tol:
        raise NotParallel(r, tol)
    return grho / F.f, grho * F.f


def orthogonal_solution(
    F: FactorizingFunction,
    rho: HarmonicFunctionSpec,
    *,
    tol: float | None = None,
    exclude: int | None = None,
) -> tuple[VectorField, VectorField]:
    """(𝐅, 𝐆) = (f Dρ, (1/f) Dρ) when <grad f, grad ρ> = 0."""
    tol = SETTINGS.precondition_tol if tol is None else tol
    exclude = SETTINGS.exclude_boundary if exclude is None else exclude
    rho.validate(F.domain, tol=tol, exclude=exclude)
    grho = rho.gradient(F.domain)
    gf = grad(F.f)
    r = _pairing_residual(dot(gf, grho).values, gf, grho, exclude)
    if r > tol:
        raise NotOrthogonal(r, tol)
    return grho * F.f, grho / F.f


# ---------------------------------------------------------------------------
# generating triplet
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GeneratingTriplet:
    F1: VectorField
    F2: VectorField
    F3: VectorField

    @property
    def elements(self) -> tuple[VectorField, VectorField, VectorField]:
        return (self.F1, self.F2, self.F3)

    def matrix(self) -> np.ndarray:
        """Node-wise 3x3 matrices whose columns are F1, F2, F3; shape (n1, n2, n3, 3, 3)."""
        cols = np.stack([F.values for F in self.elements], axis=1)  # (component, k, ...)
        return np.moveaxis(cols, (0, 1), (-2, -1))

    def determinant(self) -> np.ndarray:
        return np.linalg.det(self.matrix())

    def represent(self, w: VectorField) -> tuple[ScalarField, ScalarField, ScalarField]:
        """Scalars φk with w = Σ φk Fk (exact node-wise solve)."""
        check_same_domain(w, self.F1)
        rhs = np.moveaxis(w.values, 0, -1)[..., np.newaxis]
        phis = np.linalg.solve(self.matrix(), rhs)[..., 0]
        return tuple(ScalarField(w.domain, phis[..., k]) for k in range(3))

    def compose(self, phis: tuple[ScalarField, ScalarField, ScalarField]) -> VectorField:
        total = self.F1 * phis[0] + self.F2 * phis[1] + self.F3 * phis[2]
        return total


def cylindrical_triplet(F: FactorizingFunction, *, tol: float | None = None, exclude: int | None = None) -> GeneratingTriplet:
    """F1 = (1/f) D log r, F2 = f Dθ, F3 = f e3 for f = f(r)."""
    if axis_in_box(F.domain):
        raise AxisInDomain(f"the cylindrical triplet needs a box away from the axis, got {F.domain}")
    F1, _ = parallel_solution(F, HarmonicFunctionSpec(HarmonicKind.LOG_R_CYL), tol=tol, exclude=exclude)
    F2, _ = orthogonal_solution(F, HarmonicFunctionSpec(HarmonicKind.THETA_CYL), tol=tol, exclude=exclude)
    F3, _ = orthogonal_solution(F, HarmonicFunctionSpec(HarmonicKind.Z_COORD), tol=tol, exclude=exclude)
    return GeneratingTriplet(F1, F2, F3)


def triplet_vekua_residual(
    phi1: ScalarField,
    phi2: ScalarField,
    phi3: ScalarField,
    T: GeneratingTriplet,
    *,
    exclude: int | None = None,
) -> float:
    """Relative norm of Σ (D φk) Fk."""
    exclude = SETTINGS.exclude_boundary if exclude is None else exclude
    terms = [
        hamilton_product(dirac_left(phi).values, Fk.as_biquaternion().values)
        for phi, Fk in zip((phi1, phi2, phi3), T.elements)
    ]
    return relative_residual(sum(terms), *terms, exclude=exclude)


def schrodinger_from_symmetry(
    F: FactorizingFunction,
    rho: HarmonicFunctionSpec,
    path: PotentialPath | None = None,
    *,
    tol: float | None = None,
    exclude: int | None = None,
) -> ScalarField:
    """ψ = f 𝒜[Dρ / f^2]."""
    F_par, _ = parallel_solution(F, rho, tol=tol, exclude=exclude)
    psi = F.f * potential_A(F_par / F.f, path, tol=tol, exclude=exclude)
    logger.debug("schrodinger_from_symmetry: %s on %s", rho.kind.value, F.domain.resolution)
    return psi
