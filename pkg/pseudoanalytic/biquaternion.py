"""
Complex quaternions (biquaternions) and their conjugations.

A biquaternion is Q = q0 e0 + q1 e1 + q2 e2 + q3 e3 with complex q_k, where e0 is
the unit, e_k^2 = -1, e1 e2 = e3, e2 e3 = e1, e3 e1 = e2, and the imaginary unit i
commutes with every e_k. The algebra has zero divisors, so no inverse is offered.

Component kernels work on arrays whose leading axis has length 4 (any trailing
shape), and are shared by the grid-field operators:

- hamilton_product : node-wise product of two component arrays
- quat_conj_components : C_H, negates the vector part
- complex_conj_components : conjugates the complex coefficients

The :class:`Biquaternion` value type wraps a single (4,) array.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import NonFiniteField

__all__ = [
    "Biquaternion",
    "E0",
    "E1",
    "E2",
    "E3",
    "add",
    "complex_conj",
    "complex_conj_components",
    "hamilton_product",
    "mul",
    "quat_conj",
    "quat_conj_components",
    "right_mul",
    "sc",
    "scale",
    "sub",
    "vec",
]


def hamilton_product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """
    Node-wise biquaternion product PQ = p0 q0 - p.q + p0 q + q0 p + p x q.

    The dot and cross products are bilinear (no complex conjugation).

    Parameters
    ----------
    p, q : ndarray
        Component arrays of shape (4, ...); trailing shapes must broadcast.

    Returns
    -------
    ndarray
        Components of the product, shape (4, ...).
    """
    p0, p1, p2, p3 = p[0], p[1], p[2], p[3]
    q0, q1, q2, q3 = q[0], q[1], q[2], q[3]
    return np.stack(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 + p2 * q0 + p3 * q1 - p1 * q3,
            p0 * q3 + p3 * q0 + p1 * q2 - p2 * q1,
        ]
    )


def quat_conj_components(q: np.ndarray) -> np.ndarray:
    out = np.array(q, dtype=np.complex128, copy=True)
    out[1:] *= -1
    return out


def complex_conj_components(q: np.ndarray) -> np.ndarray:
    return np.conj(q)


@dataclass(frozen=True, eq=False)
class Biquaternion:
    """One element of H(C), stored as four complex128 coefficients."""

    components: np.ndarray

    def __post_init__(self) -> None:
        comps = np.asarray(self.components, dtype=np.complex128).reshape(4).copy()
        if not np.all(np.isfinite(comps)):
            raise NonFiniteField(f"biquaternion has non-finite components: {comps}")
        comps.flags.writeable = False
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_parts(cls, q0: complex = 0, q1: complex = 0, q2: complex = 0, q3: complex = 0) -> Biquaternion:
        return cls(np.array([q0, q1, q2, q3], dtype=np.complex128))

    @classmethod
    def scalar(cls, value: complex) -> Biquaternion:
        return cls.from_parts(value)

    @classmethod
    def basis(cls, k: int) -> Biquaternion:
        if k not in (0, 1, 2, 3):
            raise ValueError(f"basis index must be 0..3, got {k}")
        comps = np.zeros(4, dtype=np.complex128)
        comps[k] = 1.0
        return cls(comps)

    @property
    def q0(self) -> complex:
        return complex(self.components[0])

    @property
    def vector(self) -> np.ndarray:
        return self.components[1:].copy()

    def isclose(self, other: Biquaternion, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.components, other.components, rtol=rtol, atol=atol))

    def __add__(self, other: Biquaternion) -> Biquaternion:
        return add(self, other)

    def __sub__(self, other: Biquaternion) -> Biquaternion:
        return sub(self, other)

    def __neg__(self) -> Biquaternion:
        return Biquaternion(-self.components)

    def __mul__(self, other: Biquaternion | Number) -> Biquaternion:
        if isinstance(other, Biquaternion):
            return mul(self, other)
        if isinstance(other, Number):
            return scale(self, other)
        return NotImplemented

    def __rmul__(self, other: Number) -> Biquaternion:
        if isinstance(other, Number):
            return scale(self, other)
        return NotImplemented

    def __repr__(self) -> str:
        q = self.components
        return f"Biquaternion({q[0]}, {q[1]}, {q[2]}, {q[3]})"


E0 = Biquaternion.basis(0)
E1 = Biquaternion.basis(1)
E2 = Biquaternion.basis(2)
E3 = Biquaternion.basis(3)


def mul(p: Biquaternion, q: Biquaternion) -> Biquaternion:
    return Biquaternion(hamilton_product(p.components, q.components))


def quat_conj(q: Biquaternion) -> Biquaternion:
    """C_H: Q0 + **Q** -> Q0 - **Q**."""
    return Biquaternion(quat_conj_components(q.components))


def complex_conj(q: Biquaternion) -> Biquaternion:
    """Conjugate the complex coefficients; the basis e_k is fixed."""
    return Biquaternion(complex_conj_components(q.components))


def right_mul(p: Biquaternion) -> Callable[[Biquaternion], Biquaternion]:
    """The operator M^P, Q -> Q P."""

    def operator(q: Biquaternion) -> Biquaternion:
        return mul(q, p)

    return operator


def sc(q: Biquaternion) -> complex:
    return q.q0


def vec(q: Biquaternion) -> Biquaternion:
    comps = q.components.copy()
    comps[0] = 0
    return Biquaternion(comps)


def add(p: Biquaternion, q: Biquaternion) -> Biquaternion:
    return Biquaternion(p.components + q.components)


def sub(p: Biquaternion, q: Biquaternion) -> Biquaternion:
    return Biquaternion(p.components - q.components)


def scale(q: Biquaternion, c: complex) -> Biquaternion:
    return Biquaternion(complex(c) * q.components)
