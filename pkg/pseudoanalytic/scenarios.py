"""
Scenario files: INI sections of ``key = value`` lines, one section per scenario.

The shipped ``scenarios.ini`` is looked up by name; any other file can be passed
explicitly. Parsing errors of any kind surface as :class:`ScenarioError`.
"""

from __future__ import annotations

import configparser
import logging
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .antiderivative import HarmonicGauge, PotentialPath
from .errors import PseudoanalyticError, ScenarioError
from .grid_calculus import GridDomain, ScalarField
from .symmetric_solutions import FACTORIZER_PROFILES, HarmonicFunctionSpec, factorizer_from_profile
from .vekua_ops import FactorizingFunction, make_factorizer
from .vfld import read_field

logger = logging.getLogger("pseudoanalytic")

SHIPPED_SCENARIOS = Path(__file__).resolve().parent / "scenarios.ini"

CheckName = Literal[
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
]


def _floats(raw: str | list | tuple, count: int | None = None) -> tuple[float, ...]:
    if isinstance(raw, str):
        raw = [p for p in raw.replace(",", " ").split() if p]
    values = tuple(float(v) for v in raw)
    if count is not None and len(values) != count:
        raise ValueError(f"expected {count} numbers, got {len(values)}")
    return values


def _ints(raw: str | list | tuple) -> list[int]:
    if isinstance(raw, str):
        raw = [p for p in raw.replace(",", " ").split() if p]
    return [int(v) for v in raw]


class Scenario(BaseModel):
    """One verification scenario."""

    name: str
    origin: tuple[float, float, float]
    extent: tuple[float, float, float]
    f: str
    rho: str = "x1"
    gauge: str = "zero"
    base: tuple[float, float, float] | None = None
    resolutions: list[int] = Field(default_factory=lambda: [17, 33])
    potential_resolutions: list[int] = Field(default_factory=list)
    tol_k: float = 25.0
    ratio_window: tuple[float, float] = (3.5, 4.5)
    floor: float = 1e-9
    potential_bound: float = 0.05
    checks: list[CheckName] = Field(default_factory=lambda: ["quartet", "factorization"])
    source: Path | None = None

    @field_validator("origin", "extent", "base", mode="before")
    @classmethod
    def _split_triple(cls, v):
        if v is None or v == "":
            return None
        return _floats(v, 3)

    @field_validator("ratio_window", mode="before")
    @classmethod
    def _split_pair(cls, v):
        return _floats(v, 2)

    @field_validator("resolutions", "potential_resolutions", mode="before")
    @classmethod
    def _split_ints(cls, v):
        return _ints(v)

    @field_validator("checks", mode="before")
    @classmethod
    def _split_names(cls, v):
        if isinstance(v, str):
            return [p.strip() for p in v.split(",") if p.strip()]
        return v

    @model_validator(mode="after")
    def _consistent(self) -> Scenario:
        for key in ("resolutions", "potential_resolutions"):
            values = getattr(self, key)
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{key} must be strictly increasing, got {values}")
        if not self.resolutions:
            raise ValueError("resolutions must not be empty")
        if {"conjugate", "antiderivative", "rot-inverse"} & set(self.checks) and not self.potential_resolutions:
            raise ValueError("conjugate, antiderivative and rot-inverse checks need potential_resolutions")
        lo, hi = self.ratio_window
        if not 0 < lo < hi:
            raise ValueError(f"ratio_window must satisfy 0 < lo < hi, got {self.ratio_window}")
        if self.f not in FACTORIZER_PROFILES and not self.f_path.is_file():
            raise ValueError(f"f is neither a built-in profile nor an existing file: {self.f!r}")
        if self.gauge != "zero" and not self.gauge_path.is_file():
            raise ValueError(f"gauge file not found: {self.gauge!r}")
        return self

    def _resolve(self, value: str) -> Path:
        path = Path(value)
        if not path.is_absolute() and self.source is not None:
            path = self.source.parent / path
        return path

    @property
    def f_path(self) -> Path:
        return self._resolve(self.f)

    @property
    def gauge_path(self) -> Path:
        return self._resolve(self.gauge)

    @property
    def f_is_profile(self) -> bool:
        return self.f in FACTORIZER_PROFILES

    def harmonic(self) -> HarmonicFunctionSpec:
        return HarmonicFunctionSpec.parse(self.rho)

    def domain(self, n: int) -> GridDomain:
        return GridDomain(self.origin, self.extent, (n, n, n))

    def path(self) -> PotentialPath:
        return PotentialPath(base=self.base)

    def factorizer(self, domain: GridDomain, eps_f: float | None = None) -> FactorizingFunction:
        if self.f_is_profile:
            return factorizer_from_profile(self.f, domain, eps_f)
        field = read_field(self.f_path)
        if not isinstance(field, ScalarField):
            raise ScenarioError(f"{self.f_path}: f must be a scalar field")
        if field.domain != domain:
            raise ScenarioError(f"{self.f_path}: f lives on {field.domain}, the scenario needs {domain}")
        return make_factorizer(field, eps_f)

    def _field_files(self) -> list[Path]:
        files = [] if self.f_is_profile else [self.f_path]
        if self.gauge != "zero":
            files.append(self.gauge_path)
        return files

    def fixed_domain(self) -> GridDomain | None:
        """The grid of a file-based f or gauge; refinement is impossible then."""
        grids = {path: read_field(path).domain for path in self._field_files()}
        if not grids:
            return None
        domains = set(grids.values())
        if len(domains) > 1:
            listing = ", ".join(f"{path.name} on {d}" for path, d in grids.items())
            raise ScenarioError(f"scenario {self.name!r}: field files live on different grids ({listing})")
        return domains.pop()

    def gauge_for(self, domain: GridDomain) -> HarmonicGauge:
        if self.gauge == "zero":
            return HarmonicGauge.ZERO
        field = read_field(self.gauge_path)
        if not isinstance(field, ScalarField):
            raise ScenarioError(f"{self.gauge_path}: gauge must be a scalar field")
        if field.domain != domain:
            raise ScenarioError(f"{self.gauge_path}: gauge lives on {field.domain}, the scenario needs {domain}")
        return HarmonicGauge.from_field(field)


def _section_to_scenario(name: str, section: configparser.SectionProxy, source: Path) -> Scenario:
    data = {key: value for key, value in section.items()}
    try:
        return Scenario(name=name, source=source, **data)
    except ValidationError as e:
        raise ScenarioError(f"{source} [{name}]: {e}") from e


def load_scenarios(path: str | Path | None = None) -> dict[str, Scenario]:
    path = Path(path) if path is not None else SHIPPED_SCENARIOS
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e}") from e
    scenarios = {name: _section_to_scenario(name, parser[name], path) for name in parser.sections()}
    logger.debug("Loaded %d scenarios from %s", len(scenarios), path)
    return scenarios


def get_scenario(name: str, path: str | Path | None = None) -> Scenario:
    scenarios = load_scenarios(path)
    try:
        return scenarios[name]
    except KeyError:
        raise ScenarioError(f"unknown scenario {name!r}; known: {', '.join(scenarios) or 'none'}") from None


def resolve_scenario(ref: str) -> Scenario:
    """``name`` from the shipped file, ``path.ini`` with one section, or ``path.ini:name``."""
    file_part, _, name = ref.partition(":")
    candidate = Path(file_part)
    if candidate.suffix == ".ini" or candidate.is_file():
        scenarios = load_scenarios(candidate)
        if name:
            return get_scenario(name, candidate)
        if len(scenarios) != 1:
            raise ScenarioError(f"{candidate} holds {len(scenarios)} scenarios; use {candidate}:<name>")
        return next(iter(scenarios.values()))
    return get_scenario(ref)


def validate_references(scenario: Scenario) -> None:
    """Open the files a scenario points to, surfacing format problems early."""
    try:
        scenario.fixed_domain()
        scenario.harmonic()
    except (ValueError, PseudoanalyticError) as e:
        raise ScenarioError(f"scenario {scenario.name!r}: {e}") from e
