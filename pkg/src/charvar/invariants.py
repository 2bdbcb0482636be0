"""Checks that tie solver censuses to topology: expected component counts,
Euler-characteristic predictions, connected sums, Heegaard moves and the
blowup triple."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clustering import ISOLATED, SPHERE, ComponentReport, cluster_components, embed_samples, locate, match_reports
from .errors import InvalidMoveError
from .lm import levenberg_marquardt
from .solver import SolverConfig, solve_intersection
from .words import (
    AbelianGroupInvariants,
    FreeWord,
    HeegaardDiagram,
    conjugate_curve,
    connected_sum,
    h1_invariants,
    handleslide,
    stabilize,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "detail": self.detail}


def component_json(c) -> dict:
    sig = []
    for v in c.trace_signature:
        if isinstance(v, complex):
            sig.append([v.real, v.imag])
        else:
            sig.append(float(v))
    return {
        "dim": int(c.dimension),
        "classification": c.classification,
        "trace_signature": sig,
        "samples": len(c),
    }


@dataclass
class CensusReport:
    diagram: HeegaardDiagram
    components: ComponentReport
    h1: AbelianGroupInvariants
    euler_prediction: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def warnings(self) -> list:
        return list(self.components.warnings)

    def to_json(self) -> dict:
        return {
            "diagram": self.diagram.to_json(),
            "components": [component_json(c) for c in self.components.components],
            "h1": self.h1.to_json(),
            "euler_prediction": self.euler_prediction,
            "checks": [c.to_json() for c in self.checks],
            "warnings": self.warnings,
        }


# -- expected data keyed by constructor names ---------------------------------

_S3 = re.compile(r"s3_genus\((\d+)\)$")
_LENS = re.compile(r"lens\((\d+),(-?\d+)\)$")


def _summand_census(name: str) -> Optional[list[int]]:
    if _S3.match(name):
        return [0]
    if name == "s2xs1":
        return [3]
    m = _LENS.match(name)
    if m:
        p = int(m.group(1))
        isolated = 1 if p % 2 else 2
        return [0] * isolated + [2] * ((p - 1) // 2)
    return None


def expected_census(name: str) -> Optional[list[int]]:
    """Sorted component dimensions predicted for a diagram built by the constructors.

    Connected sums multiply: every pair of summand components gives one
    component of the summed dimension.  Unknown names give ``None``.
    """
    if not name:
        return None
    dims = [0]
    for part in name.split("#"):
        own = _summand_census(part)
        if own is None:
            return None
        dims = [a + b for a in dims for b in own]
    return sorted(dims)


def lens_parameter(name: str) -> Optional[int]:
    m = _LENS.match(name)
    return int(m.group(1)) if m else None


def lens_trace_set(p: int) -> list[float]:
    return [2.0 * math.cos(2.0 * math.pi * k / p) for k in range(p // 2 + 1)]


def predict_euler(d: HeegaardDiagram) -> int:
    """``|H_1(Y)|`` when ``b_1 = 0``, else 0."""
    return h1_invariants(d).order


def _is_theta(x) -> bool:
    return bool(np.allclose(x[..., 0], 1.0, atol=1e-9))


def generator_census(d: HeegaardDiagram, cfg: Optional[SolverConfig] = None) -> CensusReport:
    cfg = cfg or SolverConfig()
    sols = solve_intersection(d, cfg)
    report = cluster_components(sols, cfg)
    h1 = h1_invariants(d)
    euler = h1.order
    checks = []

    theta = [c for c in report.components if any(_is_theta(x) for x in c.sample_array)]
    checks.append(Check("trivial-representation-found", len(theta) == 1,
                        f"{len(theta)} component(s) contain the trivial representation"))
    if h1.free_rank == 0 and theta:
        dim = theta[0].dimension
        checks.append(Check("trivial-representation-transverse", dim == 0, f"kernel dimension {dim}"))

    expected = expected_census(d.name)
    if expected is not None:
        got = report.dims
        checks.append(Check("census-matches-family", got == expected, f"dimensions {got}, expected {expected}"))
    p = lens_parameter(d.name)
    if p is not None:
        oracle = lens_trace_set(p)
        found = sorted(c.trace_signature[1] for c in report.components)
        ok = len(found) == len(oracle) and all(abs(a - b) <= 1e-8 for a, b in zip(found, sorted(oracle)))
        checks.append(Check("lens-trace-signatures", ok,
                            "traces " + ", ".join(f"{t:.9f}" for t in found)))
        betti = report.betti_heuristic()
        checks.append(Check("betti-heuristic", betti == p, f"isolated + 2 * spheres = {betti}, p = {p}"))
        checks.append(Check("euler-equals-order", euler == p, f"euler prediction {euler}"))
    return CensusReport(d, report, h1, euler, checks)


# -- connected sums --------------------------------------------------------------

@dataclass
class KunnethReport:
    first: CensusReport
    second: CensusReport
    total: CensusReport
    assignment: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "diagram": self.total.diagram.to_json(),
            "components": [component_json(c) for c in self.total.components.components],
            "h1": self.total.h1.to_json(),
            "euler_prediction": self.total.euler_prediction,
            "factors": [self.first.to_json(), self.second.to_json()],
            "pairing": [[k, list(v)] for k, v in sorted(self.assignment.items())],
            "checks": [c.to_json() for c in self.checks],
            "warnings": self.total.warnings + self.first.warnings + self.second.warnings,
        }


def _combine_h1(a: AbelianGroupInvariants, b: AbelianGroupInvariants) -> AbelianGroupInvariants:
    from .snf import smith_normal_form

    diag = list(a.torsion) + list(b.torsion)
    if not diag:
        return AbelianGroupInvariants(a.free_rank + b.free_rank, ())
    M = [[diag[i] if i == j else 0 for j in range(len(diag))] for i in range(len(diag))]
    factors = [f for f in smith_normal_form(M)[0] if f > 1]
    return AbelianGroupInvariants(a.free_rank + b.free_rank, tuple(factors))


def kunneth_check(d1: HeegaardDiagram, d2: HeegaardDiagram, cfg: Optional[SolverConfig] = None,
                  per_component: int = 5) -> KunnethReport:
    """Split sum components along the handle slots and match them to factor pairs."""
    cfg = cfg or SolverConfig()
    total_d = connected_sum(d1, d2)
    c1 = generator_census(d1, cfg)
    c2 = generator_census(d2, cfg)
    ct = generator_census(total_d, cfg)
    r1, r2, rt = c1.components, c2.components, ct.components
    n1 = d1.n_slots
    group = rt.solutions.group
    checks = []
    assignment = {}
    witness = []
    for k, comp in enumerate(rt.components):
        X = comp.sample_array[:per_component]
        left = embed_samples(group, X, d1.n_slots, {s: s for s in range(1, n1 + 1)})
        right = embed_samples(group, X, d2.n_slots, {n1 + s: s for s in range(1, d2.n_slots + 1)})
        hits = set(zip(locate(r1, left, cfg), locate(r2, right, cfg)))
        if len(hits) != 1 or None in next(iter(hits)):
            witness.append(f"sum component {k} restricts to {sorted(hits, key=str)}")
            continue
        assignment[k] = next(iter(hits))
    pairs = {(a, b) for a in range(len(r1.components)) for b in range(len(r2.components))}
    image = list(assignment.values())
    bijective = not witness and len(set(image)) == len(image) and set(image) == pairs
    checks.append(Check("restriction-bijection", bijective,
                        "; ".join(witness) or f"{len(image)} sum components onto {len(pairs)} factor pairs"))
    additive = all(
        rt.components[k].dimension == r1.components[a].dimension + r2.components[b].dimension
        for k, (a, b) in assignment.items()
    )
    checks.append(Check("dimensions-additive", additive and bool(assignment), ""))
    counts = len(rt.components) == len(r1.components) * len(r2.components)
    checks.append(Check("counts-multiply", counts,
                        f"{len(rt.components)} = {len(r1.components)} x {len(r2.components)}"))
    h1_ok = ct.h1 == _combine_h1(c1.h1, c2.h1)
    checks.append(Check("h1-direct-sum", h1_ok, f"H1 free rank {ct.h1.free_rank}, torsion {list(ct.h1.torsion)}"))
    return KunnethReport(c1, c2, ct, assignment, checks)


# -- Heegaard moves ---------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    """A Heegaard move: ``isotopy`` (conjugate one curve word), ``handleslide`` or ``stabilize``."""

    kind: str
    family: str = "beta"
    j: int = 1
    k: int = 2
    path: FreeWord = field(default_factory=FreeWord)
    sign: int = 1
    conjugator: FreeWord = field(default_factory=FreeWord)

    def apply(self, d: HeegaardDiagram) -> HeegaardDiagram:
        if self.kind == "stabilize":
            return stabilize(d)
        if self.kind == "handleslide":
            return handleslide(d, self.family, self.j, self.k, self.path, self.sign)
        if self.kind == "isotopy":
            if not 1 <= self.j <= d.genus:
                raise InvalidMoveError(f"curve {self.j} out of range")
            return conjugate_curve(d, self.family, self.j, self.conjugator)
        raise InvalidMoveError(f"unknown move {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "stabilize":
            return "stabilize"
        if self.kind == "handleslide":
            return f"handleslide {self.family} {self.j} over {self.k} sign {self.sign:+d} path [{self.path}]"
        return f"isotopy {self.family} {self.j} conjugated by [{self.conjugator}]"


@dataclass
class MoveReport:
    move: Move
    before: CensusReport
    after: CensusReport
    matching: object
    hausdorff: Optional[float]
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        out = {
            "diagram": self.before.diagram.to_json(),
            "moved_diagram": self.after.diagram.to_json(),
            "move": self.move.describe(),
            "components": [component_json(c) for c in self.before.components.components],
            "moved_components": [component_json(c) for c in self.after.components.components],
            "h1": self.before.h1.to_json(),
            "euler_prediction": self.before.euler_prediction,
            "matching": [list(p) for p in self.matching.pairs],
            "checks": [c.to_json() for c in self.checks],
            "warnings": self.before.warnings + self.after.warnings,
        }
        if self.hausdorff is not None:
            out["hausdorff"] = self.hausdorff
        return out


def solution_set_distance(X, system, cfg) -> np.ndarray:
    """Distance from each tuple to the solution set of ``system``, estimated by
    the displacement of a local refinement (zero for exact solutions)."""
    if X.shape[0] == 0:
        return np.zeros(0)
    out = levenberg_marquardt(system, X, tol=cfg.converge_tol, max_iter=cfg.max_iterations)
    d = np.linalg.norm((out.X - X).reshape(X.shape[0], -1), axis=1)
    d[~out.converged] = np.inf
    return d


def verify_move(d: HeegaardDiagram, move: Move, cfg: Optional[SolverConfig] = None) -> MoveReport:
    cfg = cfg or SolverConfig()
    moved = move.apply(d)
    before = generator_census(d, cfg)
    after = generator_census(moved, cfg)
    gmap = {s: s for s in range(1, d.n_slots + 1)}
    matching = match_reports(before.components, after.components, gmap, cfg)
    checks = [Check("components-matched", matching.perfect,
                    f"{len(matching.pairs)} pairs, unmatched {matching.unmatched_first} / {matching.unmatched_second}"
                    + ("; " + "; ".join(matching.details) if matching.details else ""))]
    hausdorff = None
    if move.kind in ("handleslide", "isotopy"):
        s1 = before.components.solutions
        s2 = after.components.solutions
        forward = solution_set_distance(s1.X, s2.system, cfg)
        backward = solution_set_distance(s2.X, s1.system, cfg)
        hausdorff = float(max(forward.max(initial=0.0), backward.max(initial=0.0)))
        checks.append(Check("pointwise-equal", hausdorff <= 1e-9, f"Hausdorff estimate {hausdorff:.3e}"))
    return MoveReport(move, before, after, matching, hausdorff, checks)


# -- blowup triple ------------------------------------------------------------------

def blowup_diagrams() -> list[HeegaardDiagram]:
    """Genus-1 diagrams from the curve pairs (a, b), (b, b a^-1), (a, b a^-1)."""
    a = FreeWord.parse("a1")
    b = FreeWord.parse("b1")
    ba = FreeWord.parse("b1 a1^-1")
    return [
        HeegaardDiagram(1, (a,), (b,), "blowup(a,b)"),
        HeegaardDiagram(1, (b,), (ba,), "blowup(b,ba^-1)"),
        HeegaardDiagram(1, (a,), (ba,), "blowup(a,ba^-1)"),
    ]


@dataclass
class BlowupReport:
    censuses: list
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "diagrams": [c.to_json() for c in self.censuses],
            "checks": [c.to_json() for c in self.checks],
            "warnings": [w for c in self.censuses for w in c.warnings],
        }


def blowup_triple_check(cfg: Optional[SolverConfig] = None) -> BlowupReport:
    cfg = cfg or SolverConfig()
    censuses, checks = [], []
    for d in blowup_diagrams():
        c = generator_census(d, cfg)
        comps = c.components.components
        only_theta = (len(comps) == 1 and comps[0].classification == ISOLATED
                      and all(_is_theta(x) for x in comps[0].sample_array))
        checks.append(Check(f"{d.name}: single isolated trivial point", only_theta,
                            f"{len(comps)} component(s), dims {c.components.dims}"))
        censuses.append(c)
    return BlowupReport(censuses, checks)


__all__ = [
    "Check",
    "CensusReport",
    "KunnethReport",
    "Move",
    "MoveReport",
    "BlowupReport",
    "expected_census",
    "generator_census",
    "predict_euler",
    "kunneth_check",
    "verify_move",
    "blowup_triple_check",
    "blowup_diagrams",
    "lens_trace_set",
    "SPHERE",
]
