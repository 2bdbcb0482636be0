"""The traceless character variety M_{g,3} in holonomy coordinates.

Relator convention used everywhere: ``[A_1,B_1]...[A_g,B_g] C_1 C_2 C_3 = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import NotInStratumError, OutOfNeighborhoodError, ShapeError, SmoothnessConditionError
from .quaternion import (
    ONE,
    QI,
    QJ,
    QK,
    UnitQuaternion,
    qinv,
    qmul,
    standardize_triple,
)

PINNED = (QI, QJ, -QK)

# metadata only; never evaluated numerically
MONOTONICITY_CONSTANT = 0.25
PI2_RANK = 4


@dataclass(frozen=True)
class ModuliPoint:
    handles: tuple[UnitQuaternion, ...]
    punctures: tuple[UnitQuaternion, UnitQuaternion, UnitQuaternion]

    def __post_init__(self):
        object.__setattr__(self, "handles", tuple(self.handles))
        object.__setattr__(self, "punctures", tuple(self.punctures))
        if len(self.handles) % 2:
            raise ShapeError("handles must come in (A_j, B_j) pairs")
        if len(self.punctures) != 3:
            raise ShapeError("exactly three punctures")

    @property
    def genus(self) -> int:
        return len(self.handles) // 2

    def handle_array(self) -> np.ndarray:
        return np.array([h.as_array() for h in self.handles]).reshape(len(self.handles), 4)

    def punctures_traceless(self, tol: float = 1e-9) -> bool:
        return all(c.is_traceless(tol) for c in self.punctures)

    def conjugated(self, m: UnitQuaternion) -> "ModuliPoint":
        minv = m.inverse()
        return ModuliPoint(
            tuple(m * h * minv for h in self.handles),
            tuple(m * c * minv for c in self.punctures),
        )


class RepresentationPoint(ModuliPoint):
    """A moduli point whose punctures are exactly ``(i, j, -k)``."""

    def __init__(self, handles: Sequence[UnitQuaternion]):
        super().__init__(tuple(handles), PINNED)

    @classmethod
    def from_array(cls, X) -> "RepresentationPoint":
        X = np.asarray(X, dtype=float).reshape(-1, 4)
        return cls([UnitQuaternion.from_array(q) for q in X])

    def __reduce__(self):
        return (RepresentationPoint, (self.handles,))


def trivial_point(genus: int) -> RepresentationPoint:
    """theta = (I, ..., I, i, j, -k)."""
    return RepresentationPoint([UnitQuaternion.identity()] * (2 * genus))


def commutator_product(handles) -> np.ndarray:
    """``prod_j [A_j, B_j]`` for an ``(2g, 4)`` array (or ``(N, 2g, 4)``)."""
    H = np.asarray(handles, dtype=float)
    acc = np.broadcast_to(ONE, H.shape[:-2] + (4,)).copy()
    for j in range(H.shape[-2] // 2):
        a, b = H[..., 2 * j, :], H[..., 2 * j + 1, :]
        acc = qmul(acc, qmul(qmul(a, b), qmul(qinv(a), qinv(b))))
    return acc


def relation_residual(p: ModuliPoint) -> float:
    """``|prod [A_j,B_j] C_1 C_2 C_3 - 1|`` as a 4-vector norm."""
    acc = commutator_product(p.handle_array())
    for c in p.punctures:
        acc = qmul(acc, c.as_array())
    return float(np.linalg.norm(acc - ONE))


def pin_gauge(p: ModuliPoint, tol: float = 1e-8) -> RepresentationPoint:
    """Conjugate the whole tuple so the punctures become exactly ``(i, j, -k)``."""
    if relation_residual(p) > tol:
        raise NotInStratumError(f"relation residual {relation_residual(p):.3e} exceeds {tol}")
    m = standardize_triple(*p.punctures, tol=tol)
    q = p.conjugated(m)
    return RepresentationPoint(q.handles)


def moduli_dimension(g: int, n: int) -> int:
    """Dimension 6g - 6 + 2n of M_{g,n} with traceless labels and n odd."""
    if n % 2 == 0:
        raise SmoothnessConditionError(f"n = {n} is even; smoothness needs n odd")
    if g < 0 or n < 1:
        raise SmoothnessConditionError("need g >= 0 and n >= 1")
    return 6 * g - 6 + 2 * n


def ht_gamma(P: np.ndarray) -> float:
    """Rotation parameter used by the neighborhood map ``h_t``."""
    if np.allclose(P, ONE, atol=0.0, rtol=0.0):
        return 0.5
    t = 2.0 * P[0]
    qk = P[3]
    if qk == 0.0:
        return 0.25
    return math.atan(1.0 / math.tan(math.pi * t / 4.0) / qk) / (2.0 * math.pi)


@lru_cache(maxsize=None)
def insertion_uses_inverse() -> bool:
    """Whether ``h_t`` must insert ``P^-1`` (rather than ``P``) to satisfy the relator.

    Decided once by testing both choices on a fixed non-central tuple.
    """
    A = UnitQuaternion.from_axis_angle([1.0, 0.2, -0.3], 0.7)
    B = UnitQuaternion.from_axis_angle([-0.4, 1.0, 0.5], 0.9)
    P = commutator_product(np.array([A.as_array(), B.as_array()]))
    for use_inverse in (False, True):
        pt = _ht_point([A, B], P, qinv(P) if use_inverse else P)
        if relation_residual(pt) < 1e-12:
            return use_inverse
    raise AssertionError("neither insertion satisfies the relator")


def _ht_point(handles, P, inserted) -> ModuliPoint:
    gamma = ht_gamma(P)
    theta = 2.0 * math.pi * gamma
    rot = np.array([math.cos(theta), 0.0, 0.0, math.sin(theta)])
    c1 = QI.as_array()
    c2 = qmul(rot, c1)
    c3 = -qmul(rot, inserted)
    return ModuliPoint(tuple(handles), tuple(UnitQuaternion.from_array(c) for c in (c1, c2, c3)))


def ht_embed(handles: Sequence[UnitQuaternion]) -> ModuliPoint:
    """Image of a handle tuple under ``h_t``: ``(i, e^{2 pi gamma k} i, -e^{2 pi gamma k} P')``.

    ``P`` is the commutator product and ``P'`` is ``P`` or ``P^-1`` as fixed by
    :func:`insertion_uses_inverse`, so that ``C_1 C_2 C_3 = P'``.
    """
    handles = tuple(handles)
    if len(handles) % 2:
        raise ShapeError("handles must come in pairs")
    H = np.array([h.as_array() for h in handles]).reshape(len(handles), 4)
    P = commutator_product(H)
    t = 2.0 * P[0]
    if t <= 1.0:
        raise OutOfNeighborhoodError(f"trace {t:.6f} of the commutator product is not in (1, 2]")
    inserted = qinv(P) if insertion_uses_inverse() else P
    return _ht_point(handles, P, inserted)


def inserted_product(handles: Sequence[UnitQuaternion]) -> np.ndarray:
    H = np.array([h.as_array() for h in handles]).reshape(len(handles), 4)
    P = commutator_product(H)
    return qinv(P) if insertion_uses_inverse() else P
