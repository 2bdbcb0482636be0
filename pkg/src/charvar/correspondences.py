"""Lagrangian correspondences of elementary bordisms as membership tests,
plus a sampling check that composing two of them agrees with the
correspondence of the glued bordism.

Every elementary piece here attaches (or removes) the top standard handle:
going from genus ``g`` to ``g + 1`` the new curve ``a_{g+1}`` must have
trivial holonomy and the first ``g`` handles must agree up to conjugation.
Punctures pass through every piece unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidParameterError, NotInStratumError, ShapeError, UnsupportedCompositionError
from .lm import QuaternionGroup, WordSystem, levenberg_marquardt
from .moduli import ModuliPoint, RepresentationPoint, pin_gauge, relation_residual
from .quaternion import holonomy, kabsch_residual
from .solver import greedy_dedup
from .words import FreeWord

RAISE = "genus-raising"
LOWER = "genus-lowering"
CYLINDER = "cylinder"

_GROUP = QuaternionGroup()


@dataclass(frozen=True)
class ElementaryBordism:
    kind: str
    source_genus: int
    target_genus: int
    attaching_word: Optional[FreeWord] = None

    def __post_init__(self):
        s, t = self.source_genus, self.target_genus
        if s < 0 or t < 0:
            raise InvalidParameterError("genera must be non-negative")
        expected = {RAISE: s + 1, LOWER: s - 1, CYLINDER: s}
        if self.kind not in expected:
            raise InvalidParameterError(f"unknown bordism kind {self.kind!r}")
        if t != expected[self.kind]:
            raise ShapeError(f"{self.kind} cannot go from genus {s} to {t}")
        if self.attaching_word is None:
            object.__setattr__(self, "attaching_word", self.standard_word())
        if self.kind == CYLINDER and len(self.attaching_word):
            raise InvalidParameterError("a cylinder has no attaching curve")

    @property
    def high_genus(self) -> int:
        return max(self.source_genus, self.target_genus)

    @property
    def low_genus(self) -> int:
        return min(self.source_genus, self.target_genus)

    def standard_word(self) -> FreeWord:
        if self.kind == CYLINDER:
            return FreeWord()
        return FreeWord.gen("a", self.high_genus)

    @property
    def is_standard(self) -> bool:
        return self.attaching_word == self.standard_word()

    @classmethod
    def raising(cls, g: int) -> "ElementaryBordism":
        return cls(RAISE, g, g + 1)

    @classmethod
    def lowering(cls, g: int) -> "ElementaryBordism":
        """From genus ``g`` down to ``g - 1``."""
        return cls(LOWER, g, g - 1)

    @classmethod
    def cylinder(cls, g: int) -> "ElementaryBordism":
        return cls(CYLINDER, g, g)


@dataclass(frozen=True)
class CorrespondencePair:
    left: ModuliPoint
    right: ModuliPoint


@dataclass
class Membership:
    member: bool
    residual: float
    parts: dict = field(default_factory=dict)

    def __bool__(self):
        return self.member


def _pinned_or_raw(p: ModuliPoint) -> ModuliPoint:
    try:
        return pin_gauge(p)
    except NotInStratumError:
        return p


def _tuple_array(p: ModuliPoint, n_handles: int) -> np.ndarray:
    parts = [h.as_array() for h in p.handles[:n_handles]] + [c.as_array() for c in p.punctures]
    return np.array(parts)


def correspondence_membership(b: ElementaryBordism, pair: CorrespondencePair, tol: float = 1e-9) -> Membership:
    """Membership of ``pair`` in the correspondence of ``b``.

    Combined residual: both relation residuals, the attaching-word holonomy on
    the higher side, and the best simultaneous-conjugation misfit of the shared
    handles and punctures.
    """
    left, right = pair.left, pair.right
    if left.genus != b.source_genus or right.genus != b.target_genus:
        raise ShapeError(f"pair has genera ({left.genus}, {right.genus}), bordism needs "
                         f"({b.source_genus}, {b.target_genus})")
    rel_l = relation_residual(left)
    rel_r = relation_residual(right)
    left_p, right_p = _pinned_or_raw(left), _pinned_or_raw(right)
    high = right_p if b.target_genus >= b.source_genus else left_p
    word_res = float(np.linalg.norm(holonomy(b.attaching_word, list(high.handles)).as_array() - np.array([1.0, 0, 0, 0])))
    n_common = 2 * b.low_genus
    X = _tuple_array(left_p, n_common)[None]
    Y = _tuple_array(right_p, n_common)[None]
    common, _ = kabsch_residual(X, Y)
    common = float(common[0])
    total = float(np.sqrt(rel_l**2 + rel_r**2 + word_res**2 + common**2))
    parts = {"relation_left": rel_l, "relation_right": rel_r, "attaching_word": word_res, "common": common}
    return Membership(total <= tol, total, parts)


# -- composite systems ---------------------------------------------------------------

def _relator(offset: int, genus: int):
    letters = []
    for j in range(genus):
        a, b = offset + 2 * j + 1, offset + 2 * j + 2
        letters += [(a, 1), (b, 1), (a, -1), (b, -1)]
    return letters


def _link_words(b: ElementaryBordism, off_src: int, off_tgt: int):
    """Pinned-gauge words expressing membership of (source block, target block) in ``b``."""
    words = []
    high_off = off_tgt if b.target_genus >= b.source_genus else off_src
    if b.kind != CYLINDER:
        words.append([(high_off + 2 * b.high_genus - 1, 1)])
    for s in range(1, 2 * b.low_genus + 1):
        words.append([(off_src + s, 1), (off_tgt + s, -1)])
    return words


def composite_words(b1: ElementaryBordism, b2: ElementaryBordism):
    """Direct constraint system for the glued bordism on slots ``(x, z)``.

    With ``low = min(s, m, t)``, the left block kills ``a_k`` for
    ``low < k <= s``, the right block kills ``a_k`` for ``low < k <= t``, and
    the first ``low`` handles agree.
    """
    s, m, t = b1.source_genus, b1.target_genus, b2.target_genus
    low = min(s, m, t)
    words = [_relator(0, s), _relator(2 * s, t)]
    for k in range(low + 1, s + 1):
        words.append([(2 * k - 1, 1)])
    for k in range(low + 1, t + 1):
        words.append([(2 * s + 2 * k - 1, 1)])
    for i in range(1, 2 * low + 1):
        words.append([(i, 1), (2 * s + i, -1)])
    return words


def _check_composable(b1: ElementaryBordism, b2: ElementaryBordism):
    if b1.target_genus != b2.source_genus:
        raise UnsupportedCompositionError(
            f"target genus {b1.target_genus} of the first piece differs from source genus {b2.source_genus}")
    if not (b1.is_standard and b2.is_standard):
        raise UnsupportedCompositionError("only standard top-handle attaching curves can be composed")


@dataclass
class CompositionReport:
    samples: int
    backward_passed: int
    forward_passed: int
    max_backward_residual: float
    max_forward_residual: float
    distinct_composite_points: int
    tol: float
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.backward_passed == self.samples and self.forward_passed == self.samples
                and self.max_backward_residual <= self.tol and self.max_forward_residual <= self.tol)

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "backward_passed": self.backward_passed,
            "forward_passed": self.forward_passed,
            "max_backward_residual": self.max_backward_residual,
            "max_forward_residual": self.max_forward_residual,
            "distinct_composite_points": self.distinct_composite_points,
            "checks": [
                {"name": "composite-points-factor", "pass": self.backward_passed == self.samples
                 and self.max_backward_residual <= self.tol,
                 "detail": f"{self.backward_passed}/{self.samples}"},
                {"name": "composable-pairs-land-in-composite", "pass": self.forward_passed == self.samples
                 and self.max_forward_residual <= self.tol,
                 "detail": f"{self.forward_passed}/{self.samples}"},
            ],
            "warnings": list(self.notes),
        }


def _sample(system: WordSystem, n: int, rng, max_rounds: int = 20, tol: float = 1e-12) -> np.ndarray:
    """``n`` converged solutions of ``system`` from Haar-random starts, in start order."""
    found = []
    for _ in range(max_rounds):
        X0 = _GROUP.random(rng, (2 * n, system.n_slots))
        out = levenberg_marquardt(system, X0, tol=tol)
        found.append(out.X[out.converged])
        if sum(f.shape[0] for f in found) >= n:
            break
    return np.concatenate(found)[:n]


def _points(block: np.ndarray) -> RepresentationPoint:
    return RepresentationPoint.from_array(block) if block.size else RepresentationPoint([])


def composition_check(b1: ElementaryBordism, b2: ElementaryBordism, samples: int = 200, seed: int = 0,
                      tol: float = 1e-6, restarts: int = 50) -> CompositionReport:
    _check_composable(b1, b2)
    s, m, t = b1.source_genus, b1.target_genus, b2.target_genus
    rng = np.random.default_rng(seed)
    notes = []

    # backward: composite members factor through an intermediate point
    comp = WordSystem(_GROUP, composite_words(b1, b2), 2 * (s + t))
    Z = _sample(comp, samples, rng)
    if Z.shape[0] < samples:
        notes.append(f"only {Z.shape[0]} composite samples converged")
    keep, _ = greedy_dedup(Z, 1e-6)
    distinct = int(len(keep))

    # slots: x (frozen), y (free), z (frozen)
    ny = 2 * m
    link_words = (_link_words(b1, 0, 2 * s) + _link_words(b2, 2 * s, 2 * s + ny)
                  + [_relator(2 * s, m)])
    free = list(range(2 * s, 2 * s + ny))
    mid = WordSystem(_GROUP, link_words, 2 * (s + m + t), free=free)
    backward_ok, back_max = 0, 0.0
    for zrow in Z:
        x, z = zrow[:2 * s], zrow[2 * s:]
        best, best_y = np.inf, None
        for a in range(0, restarts, 10):
            k = min(10, restarts - a)
            Y0 = _GROUP.random(rng, (k, ny))
            state = np.concatenate([np.broadcast_to(x, (k,) + x.shape), Y0, np.broadcast_to(z, (k,) + z.shape)], axis=1)
            out = levenberg_marquardt(mid, state, tol=1e-12)
            i = int(np.argmin(out.residual))
            if out.residual[i] < best:
                best, best_y = float(out.residual[i]), out.X[i, 2 * s:2 * s + ny]
            if best <= tol:
                break
        if best <= tol:
            xp, yp, zp = _points(x), _points(best_y), _points(z)
            r1 = correspondence_membership(b1, CorrespondencePair(xp, yp), tol)
            r2 = correspondence_membership(b2, CorrespondencePair(yp, zp), tol)
            worst = max(best, r1.residual, r2.residual)
            back_max = max(back_max, worst)
            backward_ok += int(r1.member and r2.member)
        else:
            back_max = max(back_max, best)
            notes.append(f"no intermediate point within {tol} after {restarts} restarts (residual {best:.3e})")

    # forward: composable triples land in the composite
    joint = WordSystem(_GROUP, link_words, 2 * (s + m + t))
    T = _sample(joint, samples, rng)
    forward_ok, fwd_max = 0, 0.0
    if T.shape[0]:
        XZ = np.concatenate([T[:, :2 * s], T[:, 2 * s + ny:]], axis=1)
        res = comp.norms(XZ)
        fwd_max = float(res.max())
        forward_ok = int(np.sum(res <= tol))
    return CompositionReport(samples, backward_ok, forward_ok, back_max, fwd_max, distinct, tol, notes)
