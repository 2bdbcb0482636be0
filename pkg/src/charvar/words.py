"""Pointed Heegaard diagrams with attaching curves stored as free words.

Generator ``n`` (1-based) is ``a_j`` for ``n = 2j - 1`` and ``b_j`` for
``n = 2j``.  A curve is kept up to free homotopy; only the holonomy of its
word ever matters downstream.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DiagramValidationError,
    InvalidMoveError,
    InvalidParameterError,
    MalformedWordError,
)
from .snf import integer_rank, smith_normal_form


def gen_index(kind: str, j: int) -> int:
    if kind not in ("a", "b") or j < 1:
        raise MalformedWordError(f"bad generator {kind}{j}")
    return 2 * j - 1 if kind == "a" else 2 * j


def gen_name(n: int) -> tuple[str, int]:
    return ("a" if n % 2 else "b"), (n + 1) // 2


def _reduce(letters):
    out = []
    for n, s in letters:
        if out and out[-1][0] == n and out[-1][1] == -s:
            out.pop()
        else:
            out.append((n, s))
    return tuple(out)


class FreeWord:
    """Freely reduced word in the surface generators."""

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        clean = []
        for n, s in letters:
            n, s = int(n), int(s)
            if n < 1 or s not in (1, -1):
                raise MalformedWordError(f"bad letter ({n}, {s})")
            clean.append((n, s))
        self.letters = _reduce(clean)

    @classmethod
    def parse(cls, text: str) -> "FreeWord":
        """Parse ``"a1 b1^-1 a2^3"``; whitespace or ``*`` separates letters."""
        letters = []
        for tok in re.split(r"[\s*]+", text.strip()):
            if not tok:
                continue
            m = re.fullmatch(r"([ab])(\d+)(?:\^(-?\d+))?", tok)
            if not m:
                raise MalformedWordError(f"cannot parse letter {tok!r}")
            n = gen_index(m.group(1), int(m.group(2)))
            e = int(m.group(3)) if m.group(3) is not None else 1
            letters.extend([(n, 1 if e > 0 else -1)] * abs(e))
        return cls(letters)

    @classmethod
    def gen(cls, kind: str, j: int, power: int = 1) -> "FreeWord":
        n = gen_index(kind, j)
        return cls([(n, 1 if power > 0 else -1)] * abs(power))

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord([(n, -s) for n, s in reversed(self.letters)])

    def conjugate(self, w: "FreeWord") -> "FreeWord":
        """``w self w^-1``."""
        return w * self * w.inverse()

    def shifted(self, offset: int) -> "FreeWord":
        return FreeWord([(n + offset, s) for n, s in self.letters])

    def max_index(self) -> int:
        return max((n for n, _ in self.letters), default=0)

    def to_json(self):
        return [[*gen_name(n), s] for n, s in self.letters]

    @classmethod
    def from_json(cls, data) -> "FreeWord":
        return cls([(gen_index(k, int(j)), int(s)) for k, j, s in data])

    def __str__(self):
        if not self.letters:
            return "1"
        parts = []
        for n, s in self.letters:
            k, j = gen_name(n)
            parts.append(f"{k}{j}" + ("" if s > 0 else "^-1"))
        return " ".join(parts)

    def __repr__(self):
        return f"FreeWord({str(self)!r})"


def abelianize(word: FreeWord, genus: int) -> list[int]:
    """Exponent-sum vector of length ``2 * genus``."""
    v = [0] * (2 * genus)
    for n, s in word:
        if n > 2 * genus:
            raise MalformedWordError(f"generator {n} outside genus {genus}")
        v[n - 1] += s
    return v


@dataclass(frozen=True)
class HeegaardDiagram:
    genus: int
    alpha: tuple[FreeWord, ...]
    beta: tuple[FreeWord, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "beta", tuple(self.beta))

    @property
    def n_slots(self) -> int:
        return 2 * self.genus

    def relator(self) -> FreeWord:
        """Product of commutators ``[a_1, b_1] ... [a_g, b_g]``."""
        letters = []
        for j in range(1, self.genus + 1):
            a, b = 2 * j - 1, 2 * j
            letters += [(a, 1), (b, 1), (a, -1), (b, -1)]
        return FreeWord(letters)

    def constraint_words(self) -> list[FreeWord]:
        return [*self.alpha, *self.beta, self.relator()]

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "alpha": [w.to_json() for w in self.alpha],
            "beta": [w.to_json() for w in self.beta],
            "name": self.name,
        }

    @classmethod
    def from_json(cls, data: dict) -> "HeegaardDiagram":
        try:
            return cls(
                int(data["genus"]),
                tuple(FreeWord.from_json(w) for w in data["alpha"]),
                tuple(FreeWord.from_json(w) for w in data["beta"]),
                str(data.get("name", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DiagramValidationError(f"malformed diagram JSON: {exc}") from exc


def dumps_diagram(d: HeegaardDiagram) -> str:
    return json.dumps(d.to_json(), sort_keys=True)


def loads_diagram(text: str) -> HeegaardDiagram:
    return HeegaardDiagram.from_json(json.loads(text))


@dataclass
class ValidationReport:
    passed: bool
    reasons: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.passed


def validate_diagram(d: HeegaardDiagram) -> ValidationReport:
    reasons = []
    g = d.genus
    if g < 0:
        reasons.append(f"negative genus {g}")
        return ValidationReport(False, reasons)
    for fam, curves in (("alpha", d.alpha), ("beta", d.beta)):
        if len(curves) != g:
            reasons.append(f"{fam}: {len(curves)} curves for genus {g}")
            continue
        try:
            rows = [abelianize(w, g) for w in curves]
        except MalformedWordError as exc:
            reasons.append(f"{fam}: {exc}")
            continue
        if g:
            rank = integer_rank(rows)
            if rank != g:
                reasons.append(f"{fam}: homology rank {rank} < {g}")
    return ValidationReport(not reasons, reasons)


def _require_valid(d: HeegaardDiagram) -> None:
    report = validate_diagram(d)
    if not report:
        raise DiagramValidationError("; ".join(report.reasons))


def s3_genus(g: int) -> HeegaardDiagram:
    if g < 0:
        raise InvalidParameterError("genus must be non-negative")
    return HeegaardDiagram(
        g,
        tuple(FreeWord.gen("a", j) for j in range(1, g + 1)),
        tuple(FreeWord.gen("b", j) for j in range(1, g + 1)),
        f"s3_genus({g})",
    )


def s2xs1() -> HeegaardDiagram:
    a = FreeWord.gen("a", 1)
    return HeegaardDiagram(1, (a,), (a,), "s2xs1")


def lens(p: int, q: int) -> HeegaardDiagram:
    """alpha = a1, beta = a1^q b1^p."""
    if p < 1 or math.gcd(p, q) != 1:
        raise InvalidParameterError(f"lens({p},{q}) needs p >= 1 and gcd(p, q) = 1")
    beta = FreeWord.gen("a", 1, q) * FreeWord.gen("b", 1, p) if q else FreeWord.gen("b", 1, p)
    return HeegaardDiagram(1, (FreeWord.gen("a", 1),), (beta,), f"lens({p},{q})")


def make_standard(family: str, **params) -> HeegaardDiagram:
    if family in ("s3", "s3_genus"):
        return s3_genus(int(params.get("genus", params.get("g", 1))))
    if family == "s2xs1":
        return s2xs1()
    if family == "lens":
        return lens(int(params["p"]), int(params["q"]))
    raise InvalidParameterError(f"unknown family {family!r}")


def connected_sum(d1: HeegaardDiagram, d2: HeegaardDiagram) -> HeegaardDiagram:
    _require_valid(d1)
    _require_valid(d2)
    off = 2 * d1.genus
    if d2.genus == 0:
        name = d1.name
    elif d1.genus == 0:
        name = d2.name
    else:
        name = f"{d1.name}#{d2.name}"
    return HeegaardDiagram(
        d1.genus + d2.genus,
        d1.alpha + tuple(w.shifted(off) for w in d2.alpha),
        d1.beta + tuple(w.shifted(off) for w in d2.beta),
        name,
    )


def stabilize(d: HeegaardDiagram) -> HeegaardDiagram:
    g = d.genus + 1
    name = f"{d.name}#s3_genus(1)" if d.name else "s3_genus(1)"
    return HeegaardDiagram(g, d.alpha + (FreeWord.gen("a", g),), d.beta + (FreeWord.gen("b", g),), name)


def handleslide(d: HeegaardDiagram, family: str, j: int, k: int, path: FreeWord | None = None, sign: int = 1) -> HeegaardDiagram:
    """Replace curve ``j`` by ``curve_j * path * curve_k^sign * path^-1`` (1-based)."""
    if j == k:
        raise InvalidMoveError("cannot slide a curve over itself")
    if family not in ("alpha", "beta"):
        raise InvalidMoveError(f"unknown curve family {family!r}")
    if sign not in (1, -1):
        raise InvalidMoveError("sign must be +1 or -1")
    curves = list(getattr(d, family))
    if not (1 <= j <= len(curves) and 1 <= k <= len(curves)):
        raise InvalidMoveError(f"curve indices {j}, {k} out of range")
    path = path or FreeWord()
    if path.max_index() > 2 * d.genus:
        raise MalformedWordError("path uses generators outside the surface")
    ck = curves[k - 1] if sign > 0 else curves[k - 1].inverse()
    curves[j - 1] = curves[j - 1] * ck.conjugate(path)
    return HeegaardDiagram(d.genus, *(
        (tuple(curves), d.beta) if family == "alpha" else (d.alpha, tuple(curves))
    ), d.name)


def conjugate_curve(d: HeegaardDiagram, family: str, j: int, conjugator: FreeWord) -> HeegaardDiagram:
    """Isotopy model: replace curve ``j`` by a conjugate word (same free homotopy class)."""
    curves = list(getattr(d, family))
    curves[j - 1] = curves[j - 1].conjugate(conjugator)
    return HeegaardDiagram(d.genus, *(
        (tuple(curves), d.beta) if family == "alpha" else (d.alpha, tuple(curves))
    ), d.name)


@dataclass(frozen=True)
class AbelianGroupInvariants:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")
        if any(t < 2 for t in self.torsion):
            raise ValueError("torsion coefficients must be >= 2")

    @property
    def order(self) -> int:
        """|H| for a finite group, 0 when infinite."""
        return 0 if self.free_rank else math.prod(self.torsion)

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def presentation_matrix(d: HeegaardDiagram) -> list[list[int]]:
    return [abelianize(w, d.genus) for w in (*d.alpha, *d.beta)]


def h1_invariants(d: HeegaardDiagram) -> AbelianGroupInvariants:
    """H_1(Y) = Z^{2g} / span(alpha, beta), read off the Smith normal form."""
    _require_valid(d)
    if d.genus == 0:
        return AbelianGroupInvariants(0, ())
    factors, _, _ = smith_normal_form(presentation_matrix(d))
    nonzero = [f for f in factors if f]
    return AbelianGroupInvariants(2 * d.genus - len(nonzero), tuple(f for f in nonzero if f > 1))


def random_word(rng: np.random.Generator, genus: int, length: int) -> FreeWord:
    gens = rng.integers(1, 2 * genus + 1, size=length)
    signs = rng.choice([-1, 1], size=length)
    return FreeWord(zip(gens.tolist(), signs.tolist()))
