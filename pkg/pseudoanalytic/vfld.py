"""
VFLD v1 field files.

Layout::

    vfld 1
    rank scalar|vector|biquat|complex2d
    origin x y z        (two numbers for complex2d)
    extent x y z
    res n1 n2 n3
    <one row per node, x fastest: re im per component>
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .errors import DomainTooSmall, NonFiniteField, VfldFormatError
from .grid_calculus import BiquaternionField, GridDomain, ScalarField, VectorField
from .vekua2d import ComplexField2D, PlaneDomain

logger = logging.getLogger("pseudoanalytic")

_RANKS = {"scalar": ScalarField, "vector": VectorField, "biquat": BiquaternionField}
_RANK_OF = {ScalarField: "scalar", VectorField: "vector", BiquaternionField: "biquat"}

Field = ScalarField | VectorField | BiquaternionField | ComplexField2D


def _fmt(values: tuple[float, ...] | tuple[int, ...]) -> str:
    return " ".join(repr(v) for v in values)


def write_field(path: str | Path, field: Field) -> Path:
    path = Path(path)
    if isinstance(field, ComplexField2D):
        rank = "complex2d"
        domain = field.domain
        comps = field.values[np.newaxis]
    else:
        rank = _RANK_OF[type(field)]
        domain = field.domain
        comps = field.values
    rows = comps.reshape(comps.shape[0], -1, order="F").T
    table = np.empty((rows.shape[0], 2 * rows.shape[1]))
    table[:, 0::2] = rows.real
    table[:, 1::2] = rows.imag
    header = "\n".join(
        [
            "vfld 1",
            f"rank {rank}",
            f"origin {_fmt(domain.origin)}",
            f"extent {_fmt(domain.extent)}",
            f"res {_fmt(domain.resolution)}",
        ]
    )
    np.savetxt(path, table, fmt="%.17g", header=header, comments="")
    logger.debug("Wrote %s field %s to %s", rank, domain.resolution, path)
    return path


def _header_value(line: str, key: str, count: int, cast: type) -> tuple:
    parts = line.split()
    if not parts or parts[0] != key or len(parts) != count + 1:
        raise VfldFormatError(f"expected '{key}' with {count} values, got {line!r}")
    try:
        return tuple(cast(p) for p in parts[1:])
    except ValueError as e:
        raise VfldFormatError(f"bad '{key}' line {line!r}: {e}") from e


def read_field(path: str | Path) -> Field:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise VfldFormatError(f"cannot read {path}: {e}") from e
    if len(lines) < 5 or lines[0].split() != ["vfld", "1"]:
        raise VfldFormatError(f"{path}: missing 'vfld 1' header")
    rank_parts = lines[1].split()
    if len(rank_parts) != 2 or rank_parts[0] != "rank" or rank_parts[1] not in (*_RANKS, "complex2d"):
        raise VfldFormatError(f"{path}: bad rank line {lines[1]!r}")
    rank = rank_parts[1]
    dim = 2 if rank == "complex2d" else 3
    origin = _header_value(lines[2], "origin", dim, float)
    extent = _header_value(lines[3], "extent", dim, float)
    res = _header_value(lines[4], "res", dim, int)
    ncomp = 1 if rank == "complex2d" else _RANKS[rank].COMPONENTS
    try:
        domain = PlaneDomain(origin, extent, res) if dim == 2 else GridDomain(origin, extent, res)
    except (ValueError, DomainTooSmall) as e:
        raise VfldFormatError(f"{path}: invalid grid: {e}") from e

    body = [ln for ln in lines[5:] if ln.strip()]
    try:
        table = np.loadtxt(body, ndmin=2) if body else np.empty((0, 2 * ncomp))
    except ValueError as e:
        raise VfldFormatError(f"{path}: unreadable data rows: {e}") from e
    expected = (int(np.prod(res)), 2 * ncomp)
    if table.shape != expected:
        raise VfldFormatError(f"{path}: data block has shape {table.shape}, expected {expected}")
    rows = table[:, 0::2] + 1j * table[:, 1::2]
    comps = rows.T.reshape((ncomp, *res), order="F")
    try:
        if rank == "complex2d":
            return ComplexField2D(domain, comps[0])
        return _RANKS[rank](domain, comps)
    except NonFiniteField as e:
        raise VfldFormatError(f"{path}: {e}") from e
