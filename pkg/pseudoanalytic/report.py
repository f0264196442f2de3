"""Report models: the JSON written by ``--json`` and the text printed to stdout."""

from __future__ import annotations

import json
import math
from pathlib import Path

from pydantic import BaseModel, Field

from .checks import VerifyResult


def _finite(value: float | None) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return value


class CheckEntry(BaseModel):
    name: str
    residual: float | None
    bound: float | None
    passed: bool = Field(serialization_alias="pass")
    detail: str = ""


class RefinementEntry(BaseModel):
    check: str
    n: int
    h: float
    residual: float
    ratio: float | None = None


class Report(BaseModel):
    """Outcome of one scenario; ``status`` is "pass" iff every check passed."""

    scenario: str
    checks: list[CheckEntry] = Field(default_factory=list)
    refinement: list[RefinementEntry] = Field(default_factory=list)
    status: str
    wall_time_s: float = 0.0

    @classmethod
    def from_result(cls, result: VerifyResult) -> Report:
        return cls(
            scenario=result.scenario,
            checks=[
                CheckEntry(
                    name=c.name,
                    residual=_finite(c.residual),
                    bound=_finite(c.bound),
                    passed=c.passed,
                    detail=c.detail,
                )
                for c in result.checks
            ],
            refinement=[
                RefinementEntry(check=r.check, n=r.n, h=r.h, residual=r.residual, ratio=r.ratio)
                for r in result.refinement
            ],
            status="pass" if result.passed else "fail",
            wall_time_s=round(result.wall_time, 3),
        )

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)


def write_report(path: str | Path, report: Report) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8")
    return out


def _num(value: float | None) -> str:
    return "-" if value is None else f"{value:.3e}"


def render_text(report: Report) -> str:
    lines = [f"scenario {report.scenario}"]
    width = max((len(c.name) for c in report.checks), default=10)
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        line = f"  {mark}  {c.name:<{width}}  residual {_num(c.residual)}  bound {_num(c.bound)}"
        if c.detail:
            line += f"  ({c.detail})"
        lines.append(line)
    if report.refinement:
        lines.append("  refinement:")
        for r in report.refinement:
            ratio = "" if r.ratio is None else f"  ratio {r.ratio:.2f}"
            lines.append(f"    {r.check:<{width}}  n={r.n:<3d} h={r.h:.4g}  residual {r.residual:.3e}{ratio}")
    lines.append(f"status {report.status.upper()} ({report.wall_time_s:.1f}s)")
    return "\n".join(lines)
