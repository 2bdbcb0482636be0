"""SU(2) arithmetic on unit quaternions.

Arrays of shape ``(..., 4)`` hold ``(w, x, y, z)``; the vectorized helpers
(``qmul``, ``qinv``, ``qexp`` ...) are what the solvers use.  The
:class:`UnitQuaternion` value type wraps a single element for the public API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidElementError, MalformedWordError, NotInStratumError

UNIT_TOL = 1e-12
MEMBERSHIP_TOL = 1e-9
EQUALITY_TOL = 1e-9
INVALID_TOL = 1e-6

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])
BASIS = np.stack([I, J, K])


# -- vectorized kernels -------------------------------------------------------

def qmul(a, b):
    """Hamilton product, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qinv(q):
    """Inverse of a unit quaternion (its conjugate)."""
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qnormalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def qexp(v):
    """exp of a pure imaginary quaternion given by its ``(..., 3)`` vector part."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1, keepdims=True)
    # sin(t)/t without the 0/0 at t = 0
    small = theta < 1e-8
    safe = np.where(small, 1.0, theta)
    sinc = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
    return np.concatenate([np.cos(theta), sinc * v], axis=-1)


def qlog(q):
    """Vector part of the principal logarithm (inverse of :func:`qexp`)."""
    q = np.asarray(q, dtype=float)
    vec = q[..., 1:]
    s = np.linalg.norm(vec, axis=-1, keepdims=True)
    theta = np.arctan2(s, q[..., :1])
    small = s < 1e-12
    factor = np.where(small, 1.0, theta / np.where(small, 1.0, s))
    return factor * vec


def qconjugate_by(m, q):
    """``m q m^-1``."""
    return qmul(qmul(m, q), qinv(m))


def qdist(a, b):
    """Euclidean distance between two quaternions (or equal-shape tuples)."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(np.sqrt(np.sum(d * d)))


def rotation_matrix(q):
    """SO(3) matrix of ``v -> q v q^-1`` for a unit quaternion."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quaternion_from_rotation(R):
    """Unit quaternion ``q`` with ``rotation_matrix(q) == R`` (sign unspecified)."""
    R = np.asarray(R, dtype=float)
    tr = np.trace(R)
    if tr > 0:
        s = 2.0 * math.sqrt(tr + 1.0)
        q = [0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s]
    elif R[0, 0] > R[1, 1] and R[0, 0] > R[2, 2]:
        s = 2.0 * math.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2])
        q = [(R[2, 1] - R[1, 2]) / s, 0.25 * s, (R[0, 1] + R[1, 0]) / s, (R[0, 2] + R[2, 0]) / s]
    elif R[1, 1] > R[2, 2]:
        s = 2.0 * math.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2])
        q = [(R[0, 2] - R[2, 0]) / s, (R[0, 1] + R[1, 0]) / s, 0.25 * s, (R[1, 2] + R[2, 1]) / s]
    else:
        s = 2.0 * math.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1])
        q = [(R[1, 0] - R[0, 1]) / s, (R[0, 2] + R[2, 0]) / s, (R[1, 2] + R[2, 1]) / s, 0.25 * s]
    return qnormalize(np.array(q))


def canonical_sign(q, tie_tol=1e-12):
    """Representative of ``{q, -q}`` with ``w >= 0``; ties go to the first nonzero entry > 0."""
    q = np.asarray(q, dtype=float)
    if abs(q[0]) > tie_tol:
        return q if q[0] > 0 else -q
    for c in q[1:]:
        if abs(c) > tie_tol:
            return q if c > 0 else -q
    return q


def random_unit(rng, shape=()):
    """Haar-uniform unit quaternions."""
    g = rng.standard_normal(tuple(shape) + (4,))
    return qnormalize(g)


def kabsch_residual(X, Y):
    """Best simultaneous conjugation aligning two tuples of quaternions.

    ``X`` and ``Y`` have shape ``(n, S, 4)``.  Returns ``(residual, R)`` where
    ``residual[n]`` is the minimal ``sqrt(sum_s |M x_s M^-1 - y_s|^2)`` over
    ``M`` in SU(2) and ``R`` the optimal rotations of the imaginary parts.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    vx, vy = X[..., 1:], Y[..., 1:]
    H = np.einsum("nsi,nsj->nij", vx, vy)
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(np.einsum("nij,njk->nik", U, Vt)))
    d = np.where(d == 0, 1.0, d)
    D = np.zeros_like(H)
    D[:, 0, 0] = 1.0
    D[:, 1, 1] = 1.0
    D[:, 2, 2] = d
    R = np.einsum("nji,njk,nlk->nil", Vt, D, U)
    rotated = np.einsum("nij,nsj->nsi", R, vx)
    diff_vec = rotated - vy
    diff_re = X[..., 0] - Y[..., 0]
    res = np.sqrt(np.sum(diff_vec**2, axis=(1, 2)) + np.sum(diff_re**2, axis=1))
    return res, R


# -- value type ------------------------------------------------------------------

@dataclass(frozen=True)
class UnitQuaternion:
    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if not math.isfinite(n) or abs(n - 1.0) > INVALID_TOL:
            raise InvalidElementError(f"not a unit quaternion (norm {n!r})")
        if n != 1.0:
            object.__setattr__(self, "w", self.w / n)
            object.__setattr__(self, "x", self.x / n)
            object.__setattr__(self, "y", self.y / n)
            object.__setattr__(self, "z", self.z / n)

    @classmethod
    def from_array(cls, a) -> "UnitQuaternion":
        w, x, y, z = (float(c) for c in a)
        return cls(w, x, y, z)

    @classmethod
    def identity(cls) -> "UnitQuaternion":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> "UnitQuaternion":
        axis = np.asarray(axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        s = math.sin(angle / 2)
        return cls(math.cos(angle / 2), s * axis[0], s * axis[1], s * axis[2])

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def trace(self) -> float:
        return 2.0 * self.w

    def is_traceless(self, tol: float = MEMBERSHIP_TOL) -> bool:
        return abs(self.w) <= tol

    def inverse(self) -> "UnitQuaternion":
        return UnitQuaternion(self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: "UnitQuaternion") -> "UnitQuaternion":
        return quat_mul(self, other)

    def __neg__(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.w, -self.x, -self.y, -self.z)

    def conjugate_by(self, m: "UnitQuaternion") -> "UnitQuaternion":
        return m * self * m.inverse()

    def distance(self, other: "UnitQuaternion") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))

    def isclose(self, other: "UnitQuaternion", tol: float = EQUALITY_TOL) -> bool:
        return self.distance(other) <= tol


IDENTITY = UnitQuaternion.identity()
QI = UnitQuaternion(0.0, 1.0, 0.0, 0.0)
QJ = UnitQuaternion(0.0, 0.0, 1.0, 0.0)
QK = UnitQuaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class ClassLabel:
    """Conjugacy class label ``mu`` in the alcove ``[0, 1/2]``."""

    mu: float

    def __post_init__(self):
        if not 0.0 <= self.mu <= 0.5:
            raise ValueError(f"class label {self.mu} outside [0, 1/2]")

    @property
    def trace(self) -> float:
        return 2.0 * math.cos(2.0 * math.pi * self.mu)

    def contains(self, q: UnitQuaternion, tol: float = MEMBERSHIP_TOL) -> bool:
        return abs(q.trace - self.trace) <= tol


TRACELESS = ClassLabel(0.25)


def _check_unit(q: UnitQuaternion, tol: float = INVALID_TOL) -> None:
    n = math.sqrt(q.w**2 + q.x**2 + q.y**2 + q.z**2)
    if abs(n - 1.0) > tol:
        raise InvalidElementError(f"not a unit quaternion (norm {n!r})")


def quat_mul(a: UnitQuaternion, b: UnitQuaternion) -> UnitQuaternion:
    """Hamilton product of two unit quaternions, renormalized."""
    _check_unit(a)
    _check_unit(b)
    p = qmul(a.as_array(), b.as_array())
    return UnitQuaternion.from_array(p / np.linalg.norm(p))


def holonomy(word: Iterable[tuple[int, int]], assignment: Sequence[UnitQuaternion]) -> UnitQuaternion:
    """Evaluate a word left to right; letter ``(n, s)`` is ``assignment[n-1] ** s``."""
    acc = ONE.copy()
    for index, sign in word:
        if not 1 <= index <= len(assignment):
            raise MalformedWordError(f"generator {index} outside 1..{len(assignment)}")
        q = assignment[index - 1].as_array()
        acc = qmul(acc, q if sign > 0 else qinv(q))
    return UnitQuaternion.from_array(acc / np.linalg.norm(acc))


def holonomy_array(word, X):
    """Vectorized holonomy: ``X`` has shape ``(N, S, 4)``; word letters are 1-based."""
    X = np.asarray(X, dtype=float)
    acc = np.broadcast_to(ONE, X.shape[:-2] + (4,)).copy()
    for index, sign in word:
        if not 1 <= index <= X.shape[-2]:
            raise MalformedWordError(f"generator {index} outside 1..{X.shape[-2]}")
        q = X[..., index - 1, :]
        acc = qmul(acc, q if sign > 0 else qinv(q))
    return acc


def standardize_triple(c1: UnitQuaternion, c2: UnitQuaternion, c3: UnitQuaternion, tol: float = 1e-8) -> UnitQuaternion:
    """Conjugator ``M`` with ``M (c1, c2, c3) M^-1 = (i, j, -k)``.

    ``M`` is the rotation carrying the frame ``(c1, c2, c1 x c2)`` onto
    ``(i, j, k)``, with the sign fixed by :func:`canonical_sign`.
    """
    for c in (c1, c2, c3):
        if not c.is_traceless(tol):
            raise NotInStratumError(f"puncture holonomy not traceless (w = {c.w:.3e})")
    prod = qmul(qmul(c1.as_array(), c2.as_array()), c3.as_array())
    if np.linalg.norm(prod - ONE) > tol:
        raise NotInStratumError(f"puncture product differs from 1 by {np.linalg.norm(prod - ONE):.3e}")
    u, v = c1.as_array()[1:], c2.as_array()[1:]
    frame = np.stack([u, v, np.cross(u, v)], axis=1)
    # nearest rotation to the (approximately orthonormal) frame transpose
    U, _, Vt = np.linalg.svd(frame.T)
    R = U @ Vt
    if np.linalg.det(R) < 0:
        U[:, -1] *= -1
        R = U @ Vt
    m = canonical_sign(quaternion_from_rotation(R))
    return UnitQuaternion.from_array(m)


def random_in_class(label: ClassLabel, seed: int) -> UnitQuaternion:
    """Sample uniformly from the conjugacy class ``label``; deterministic per seed."""
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(3)
    u /= np.linalg.norm(u)
    angle = 2.0 * math.pi * label.mu
    return UnitQuaternion(math.cos(angle), *(math.sin(angle) * u))
