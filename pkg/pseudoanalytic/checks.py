"""
The verification flow behind ``pseudoanalytic verify``.

A scenario runs its checks in a fixed order. Stencil-limited checks are refinement
studies: the residual is computed at every scenario resolution and must stay below
K h^2 (or at the rounding floor) while the ratio between successive resolutions,
rescaled to a halving of h, stays in the ratio window. The excluded boundary layer
grows with the resolution so every level measures the same physical sub-box.
Checks that go through the vector potential are reported at the potential
resolutions and pass when the finest value is within the absolute bound and the
sequence does not grow.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .antiderivative import antiderivative, check_potential_size, conjugate_vector, solenoidal_potential
from .biquaternion import complex_conj_components, hamilton_product, quat_conj_components
from .errors import PseudoanalyticError
from .grid_calculus import (
    BiquaternionField,
    GridDomain,
    ScalarField,
    VectorField,
    dirac_left,
    interior_norm,
    relative_residual,
    rot,
)
from .scenarios import Scenario
from .settings import SETTINGS
from .symmetric_solutions import (
    closed_form_psi,
    cylindrical_triplet,
    parallel_solution,
    schrodinger_from_symmetry,
)
from .vekua2d import (
    ComplexField2D,
    PlaneDomain,
    bers_derivative_2d,
    conjugate_2d,
    fg_integral,
    generating_pair,
    main_vekua_residual,
    staircase_path,
    v1_residual_2d,
)
from .vekua_ops import (
    FactorizingFunction,
    bers_derivative,
    derivative_div_residual,
    derivative_rot_residual,
    derivative_scalar_residual,
    factorization_residual,
    generating_quartet,
    schrodinger_residual,
    v1_residual,
    v1bar_residual,
    vbar_residual,
    vekua_residual,
)

logger = logging.getLogger("pseudoanalytic")

MONOTONE_SLACK = 1.05
ALGEBRA_TOL = 1e-12
HARMONIC_CONJUGATE_TOL = 1e-10
POTENTIAL_CHECKS = frozenset({"conjugate", "antiderivative", "rot-inverse"})


@dataclass
class CheckResult:
    name: str
    residual: float
    bound: float
    passed: bool
    detail: str = ""


@dataclass
class RefinementRow:
    check: str
    n: int
    h: float
    residual: float
    ratio: float | None = None


@dataclass
class VerifyResult:
    scenario: str
    checks: list[CheckResult] = field(default_factory=list)
    refinement: list[RefinementRow] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)


@dataclass(frozen=True)
class RefinementOptions:
    tol_k: float
    ratio_window: tuple[float, float]
    floor: float
    exclude: int


# ---------------------------------------------------------------------------
# refinement studies
# ---------------------------------------------------------------------------


def scaled_exclude(base_exclude: int, n: int, n_coarse: int) -> int:
    """Boundary layer at ``n`` nodes covering the same width as ``base_exclude`` at ``n_coarse``."""
    return int(round(base_exclude * (n - 1) / (n_coarse - 1)))


def refinement_table(
    name: str,
    evaluate: Callable[[GridDomain, int], float],
    domains: list[GridDomain],
    options: RefinementOptions,
) -> tuple[CheckResult, list[RefinementRow]]:
    """Run ``evaluate(domain, exclude)`` on each domain and judge second-order convergence."""
    lo, hi = options.ratio_window
    n_coarse = domains[0].resolution[0]
    rows: list[RefinementRow] = []
    problems: list[str] = []
    for domain in domains:
        n = domain.resolution[0]
        h = max(domain.spacing)
        residual = evaluate(domain, scaled_exclude(options.exclude, n, n_coarse))
        row = RefinementRow(check=name, n=n, h=h, residual=residual)
        if rows:
            prev = rows[-1]
            if prev.residual > options.floor and residual > options.floor:
                row.ratio = prev.residual / residual * (2.0 * h / prev.h) ** 2
                if not lo <= row.ratio <= hi:
                    problems.append(f"ratio {row.ratio:.2f} at n={n} outside [{lo}, {hi}]")
        bound = options.tol_k * h * h
        if residual > bound and residual > options.floor:
            problems.append(f"residual {residual:.3e} at n={n} exceeds {bound:.3e}")
        rows.append(row)
        logger.debug("%s n=%d h=%.4g residual=%.3e ratio=%s", name, n, h, residual, row.ratio)
    last = rows[-1]
    result = CheckResult(
        name=name,
        residual=last.residual,
        bound=options.tol_k * last.h**2,
        passed=not problems,
        detail="; ".join(problems),
    )
    return result, rows


def bounded_sequence(
    name: str,
    evaluate: Callable[[GridDomain], float],
    domains: list[GridDomain],
    bound: float,
    floor: float = 1e-12,
) -> tuple[CheckResult, list[RefinementRow]]:
    """Absolute bound at the finest grid and no growth (within a small slack) above the floor."""
    rows: list[RefinementRow] = []
    for domain in domains:
        residual = evaluate(domain)
        row = RefinementRow(check=name, n=domain.resolution[0], h=max(domain.spacing), residual=residual)
        if rows and residual > 0:
            row.ratio = rows[-1].residual / residual
        rows.append(row)
    problems = []
    if rows[-1].residual > bound:
        problems.append(f"residual {rows[-1].residual:.3e} exceeds {bound:.3e}")
    for prev, row in zip(rows, rows[1:]):
        if row.residual > MONOTONE_SLACK * prev.residual and row.residual > floor:
            problems.append(f"residual grows from n={prev.n} to n={row.n}")
    result = CheckResult(name=name, residual=rows[-1].residual, bound=bound, passed=not problems, detail="; ".join(problems))
    return result, rows


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def manufactured_scalar(domain: GridDomain) -> ScalarField:
    """A smooth test function, nonzero in every box used by the scenarios."""
    return ScalarField.from_function(domain, lambda x, y, z: np.sin(x) * np.cos(y) * np.exp(0.5 * z) + 0.5 * x * y)


def quartet_residual(F: FactorizingFunction, exclude: int) -> float:
    """Worst V F_α and V̄ F_α residual over the generating quartet."""
    quartet = generating_quartet(F)
    return max(
        max(vekua_residual(Fa, F, exclude=exclude), vbar_residual(Fa, F, exclude=exclude))
        for Fa in quartet.elements
    )


def symmetry_residuals(scenario: Scenario, F: FactorizingFunction, exclude: int) -> tuple[float, float | None]:
    """(Schrodinger residual of ψ, distance to the closed form after anchoring c at the base node)."""
    rho = scenario.harmonic()
    path = scenario.path()
    psi = schrodinger_from_symmetry(F, rho, path, exclude=exclude)
    schro = schrodinger_residual(psi, F.q, exclude=exclude)
    known = closed_form_psi(scenario.f, rho, F.domain) if scenario.f_is_profile else None
    if known is None:
        return schro, None
    particular, kernel = known
    base = path.base_index(F.domain)
    c = -particular[base] / kernel[base]
    exact = particular + c * kernel
    error = interior_norm(psi.data - exact, exclude, spatial_ndim=3) / interior_norm(exact, exclude, spatial_ndim=3)
    return schro, error


def triplet_residual(F: FactorizingFunction, exclude: int) -> float:
    """Worst (D + M) residual over the cylindrical triplet."""
    T = cylindrical_triplet(F, exclude=exclude)
    return max(v1bar_residual(Fk, F, exclude=exclude) for Fk in T.elements)


def triplet_spread(F: FactorizingFunction) -> float:
    """max |det| / min |det| of the triplet matrix; finite means independent at every node."""
    det = np.abs(cylindrical_triplet(F).determinant())
    return float(np.max(det) / np.min(det))


def conjugate_pipeline(scenario: Scenario, F: FactorizingFunction, exclude: int) -> dict[str, float]:
    """Complete the closed-form ψ to a Vekua solution and measure its derivative."""
    known = closed_form_psi(scenario.f, scenario.harmonic(), F.domain)
    if known is None:
        raise PseudoanalyticError(f"no closed-form scalar solution for f={scenario.f}, rho={scenario.rho}")
    W0 = ScalarField(F.domain, known[0])
    W_vec = conjugate_vector(W0, F, scenario.gauge_for(F.domain), path=scenario.path(), exclude=exclude)
    W = BiquaternionField.from_parts(W0, W_vec)
    Wd = bers_derivative(W, F, check=False)
    return {
        "conjugate-vekua": vekua_residual(W, F, exclude=exclude),
        "conjugate-derivative-scalar": derivative_scalar_residual(W, F, exclude=exclude),
        "conjugate-derivative-v1": max(v1_residual(Wd, F, exclude=exclude), v1bar_residual(Wd, F, exclude=exclude)),
        "conjugate-derivative-div": derivative_div_residual(Wd, F, exclude=exclude),
        "conjugate-derivative-rot": derivative_rot_residual(Wd, F, exclude=exclude),
    }


def antiderivative_pipeline(scenario: Scenario, F: FactorizingFunction, exclude: int) -> dict[str, float]:
    """Antiderivative of the parallel-case solution and the derivative round trip."""
    w, _ = parallel_solution(F, scenario.harmonic(), exclude=exclude)
    W = antiderivative(w, F, scenario.gauge_for(F.domain), scenario.path(), exclude=exclude)
    back = bers_derivative(W, F, check=False)
    return {
        "antiderivative-vekua": vekua_residual(W, F, exclude=exclude),
        "antiderivative-roundtrip": interior_norm(back.values - w.values, exclude) / interior_norm(w.values, exclude),
    }


def algebra_residual(samples: int = 10_000, seed: int = 0) -> float:
    """Worst relative error of the algebra identities on random biquaternions."""
    rng = np.random.default_rng(seed)

    def draw() -> np.ndarray:
        return rng.normal(size=(4, samples)) + 1j * rng.normal(size=(4, samples))

    P, Q, R = draw(), draw(), draw()
    PQ = hamilton_product(P, Q)
    identities = [
        (hamilton_product(PQ, R), hamilton_product(P, hamilton_product(Q, R))),
        (quat_conj_components(PQ), hamilton_product(quat_conj_components(Q), quat_conj_components(P))),
        (complex_conj_components(PQ), hamilton_product(complex_conj_components(P), complex_conj_components(Q))),
        (PQ[:1], hamilton_product(Q, P)[:1]),
    ]
    worst = max(float(np.linalg.norm(a - b) / (np.linalg.norm(a) + np.linalg.norm(b))) for a, b in identities)
    units = np.eye(4, dtype=np.complex128)
    for a in range(1, 4):
        for b in range(1, 4):
            anti = hamilton_product(units[a], units[b]) + hamilton_product(units[b], units[a])
            anti[0] += 2.0 * (a == b)
            worst = max(worst, float(np.max(np.abs(anti))))
    return worst


def dirac_square_residual(domain: GridDomain, exclude: int) -> float:
    """D^2 of the manufactured scalar against its known -Δ."""
    phi = manufactured_scalar(domain)
    x, y, z = domain.mesh()
    expected = np.zeros((4, *domain.shape), dtype=np.complex128)
    # Δ(sin x cos y e^{z/2}) = -1.75 sin x cos y e^{z/2}; the xy term is harmonic
    expected[0] = 1.75 * np.sin(x) * np.cos(y) * np.exp(0.5 * z)
    d2 = dirac_left(dirac_left(phi)).values
    return relative_residual(d2 - expected, d2, expected, exclude=exclude)


def plane_cross_checks(tol_k: float, n: int = 33) -> list[CheckResult]:
    """Planar cross-checks for f = 1 and f = e^x on the unit square."""
    square = PlaneDomain.square((0.0, 0.0), (1.0, 1.0), 64)
    x, y = square.mesh()
    W = conjugate_2d(ComplexField2D.from_function(square, lambda x, y: x**2 - y**2), ComplexField2D(square, 1.0))
    err = float(np.max(np.abs(W.values.imag - 2 * x * y)))
    results = [CheckResult("plane-harmonic-conjugate", err, HARMONIC_CONJUGATE_TOL, err <= HARMONIC_CONJUGATE_TOL)]

    square = PlaneDomain.square((0.0, 0.0), (1.0, 1.0), n)
    h = max(square.spacing)
    bound = tol_k * h * h
    f = ComplexField2D.from_function(square, lambda x, y: np.exp(x) + 0 * y)
    W = conjugate_2d(ComplexField2D.from_function(square, lambda x, y: np.exp(np.sqrt(2.0) * x) * np.cos(y)), f)
    Wd = bers_derivative_2d(W, f)
    vekua = max(main_vekua_residual(W, f), v1_residual_2d(Wd, f))
    results.append(CheckResult("plane-vekua", vekua, bound, vekua <= bound))

    pair = generating_pair(f)
    start, end = (2, 3), (n - 5, n - 8)
    a = fg_integral(Wd, pair, staircase_path(square, start, end, first_axis=0))
    b = fg_integral(Wd, pair, staircase_path(square, start, end, first_axis=1))
    spread = float(abs(a - b) / abs(a))
    results.append(CheckResult("plane-path-independence", spread, bound, spread <= bound))
    return results


def rot_inverse_residual(domain: GridDomain, exclude: int) -> float:
    """rot 𝐁[G] against G for a field supported inside the box."""
    (ox, oy, oz), (lx, ly, lz) = domain.origin, domain.extent

    def s(t):
        return np.sin(np.pi * t) ** 2

    def ds(t):
        return np.pi * np.sin(2 * np.pi * t)

    # G = rot(0, 0, s s s) in box coordinates; it vanishes with its first derivatives on the faces
    G = VectorField.from_function(
        domain,
        lambda x, y, z: (
            s((x - ox) / lx) * ds((y - oy) / ly) / ly * s((z - oz) / lz),
            -ds((x - ox) / lx) / lx * s((y - oy) / ly) * s((z - oz) / lz),
            0 * z,
        ),
    )
    A = solenoidal_potential(G, boundary_correction=False)
    return interior_norm(rot(A) - G, exclude) / interior_norm(G, exclude)


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------


class VerifyFlow:
    """Runs the checks a scenario lists, in a fixed order, collecting results."""

    ORDER = (
        "algebra",
        "dirac-square",
        "quartet",
        "factorization",
        "symmetry",
        "triplet",
        "conjugate",
        "antiderivative",
        "plane",
        "rot-inverse",
    )

    def __init__(
        self,
        scenario: Scenario,
        *,
        resolutions: list[int] | None = None,
        tol_k: float | None = None,
        exclude: int | None = None,
        force: bool = False,
    ) -> None:
        self.scenario = scenario
        fixed = scenario.fixed_domain()
        if fixed is not None:
            self.domains = [fixed]
            self.potential_domains = [fixed] if scenario.potential_resolutions else []
        else:
            self.domains = [scenario.domain(n) for n in (resolutions or scenario.resolutions)]
            self.potential_domains = [scenario.domain(n) for n in scenario.potential_resolutions]
        self.options = RefinementOptions(
            tol_k=scenario.tol_k if tol_k is None else tol_k,
            ratio_window=scenario.ratio_window,
            floor=scenario.floor,
            exclude=SETTINGS.exclude_boundary if exclude is None else exclude,
        )
        self.potential_exclude = SETTINGS.potential_exclude
        if POTENTIAL_CHECKS & set(scenario.checks):
            for domain in self.potential_domains:
                check_potential_size(domain, force=force)
        self._factorizers: dict[GridDomain, FactorizingFunction] = {}

    def factorizer(self, domain: GridDomain) -> FactorizingFunction:
        if domain not in self._factorizers:
            self._factorizers[domain] = self.scenario.factorizer(domain)
        return self._factorizers[domain]

    def _stencil(self, name: str, fn: Callable[[FactorizingFunction, int], float]) -> tuple[CheckResult, list[RefinementRow]]:
        return refinement_table(name, lambda d, ex: fn(self.factorizer(d), ex), self.domains, self.options)

    def _potential(self, prefix: str, evaluate: Callable[[GridDomain], dict[str, float]]):
        values = {d: evaluate(d) for d in self.potential_domains}
        names = next(iter(values.values())).keys()
        out = []
        for name in names:
            out.append(
                bounded_sequence(
                    name,
                    lambda d, n=name: values[d][n],
                    self.potential_domains,
                    self.scenario.potential_bound,
                    self.scenario.floor,
                )
            )
        logger.info("%s: %d potential checks at n=%s", prefix, len(out), [d.resolution[0] for d in self.potential_domains])
        return out

    def run_check(self, check: str) -> list[tuple[CheckResult, list[RefinementRow]]]:
        match check:
            case "quartet":
                return [self._stencil("quartet", quartet_residual)]
            case "factorization":
                return [
                    self._stencil(
                        f"factorization-{order}",
                        lambda F, ex, o=order: factorization_residual(manufactured_scalar(F.domain), F, order=o, exclude=ex),
                    )
                    for order in ("V1bar_V", "V1_Vbar")
                ]
            case "symmetry":
                cache: dict[tuple[GridDomain, int], tuple[float, float | None]] = {}

                def cached(F: FactorizingFunction, ex: int) -> tuple[float, float | None]:
                    key = (F.domain, ex)
                    if key not in cache:
                        cache[key] = symmetry_residuals(self.scenario, F, ex)
                    return cache[key]

                results = [self._stencil("symmetry-schrodinger", lambda F, ex: cached(F, ex)[0])]
                if cached(self.factorizer(self.domains[0]), self.options.exclude)[1] is not None:
                    results.append(self._stencil("symmetry-closed-form", lambda F, ex: cached(F, ex)[1]))
                return results
            case "triplet":
                spread = triplet_spread(self.factorizer(self.domains[-1]))
                independence = CheckResult("triplet-independence", spread, 1e3, bool(np.isfinite(spread) and spread <= 1e3))
                return [self._stencil("triplet-successor", triplet_residual), (independence, [])]
            case "conjugate":
                return self._potential(
                    "conjugate", lambda d: conjugate_pipeline(self.scenario, self.factorizer(d), self.potential_exclude)
                )
            case "antiderivative":
                return self._potential(
                    "antiderivative",
                    lambda d: antiderivative_pipeline(self.scenario, self.factorizer(d), self.potential_exclude),
                )
            case "rot-inverse":
                return self._potential(
                    "rot-inverse", lambda d: {"rot-inverse": rot_inverse_residual(d, self.potential_exclude)}
                )
            case "algebra":
                r = algebra_residual()
                return [(CheckResult("algebra", r, ALGEBRA_TOL, r <= ALGEBRA_TOL), [])]
            case "dirac-square":
                return [refinement_table("dirac-square", dirac_square_residual, self.domains, self.options)]
            case "plane":
                return [(result, []) for result in plane_cross_checks(self.options.tol_k)]
        raise ValueError(f"unknown check {check!r}")

    def run(self) -> VerifyResult:
        result = VerifyResult(scenario=self.scenario.name)
        t0 = time.perf_counter()
        logger.info(
            "Verifying %s on n=%s (potential n=%s)",
            self.scenario.name,
            [d.resolution[0] for d in self.domains],
            [d.resolution[0] for d in self.potential_domains],
        )
        for check in self.ORDER:
            if check not in self.scenario.checks:
                continue
            try:
                outcomes = self.run_check(check)
            except PseudoanalyticError as e:
                logger.warning("%s: %s", check, e)
                residual = getattr(e, "residual", float("nan"))
                bound = getattr(e, "tolerance", float("nan"))
                result.checks.append(CheckResult(check, residual, bound, False, f"{type(e).__name__}: {e}"))
                continue
            for check_result, rows in outcomes:
                result.checks.append(check_result)
                result.refinement.extend(rows)
                if not check_result.passed:
                    logger.warning("%s failed: %s", check_result.name, check_result.detail)
        result.wall_time = time.perf_counter() - t0
        return result


def verify(scenario: Scenario, **kwargs) -> VerifyResult:
    return VerifyFlow(scenario, **kwargs).run()
