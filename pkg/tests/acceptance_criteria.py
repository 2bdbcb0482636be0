"""The acceptance criteria as plain functions returning ``(passed, report)``.

Reports hold only seed-determined data (no timings), so rerunning a criterion
must reproduce its canonical JSON byte for byte.
"""
from __future__ import annotations

import math
import time

import numpy as np

from charvar.correspondences import ElementaryBordism, composition_check
from charvar.invariants import (
    Move,
    blowup_triple_check,
    generator_census,
    kunneth_check,
    lens_trace_set,
    verify_move,
)
from charvar.moduli import commutator_product, ht_embed, inserted_product
from charvar.quaternion import UnitQuaternion, qmul
from charvar.report import canonical_json
from charvar.solver import SolverConfig
from charvar.sur import genus0_uniqueness, oracle_traces, solve_sur, sur_census, sur_dimension
from charvar.words import connected_sum, lens, random_word, s2xs1, s3_genus

SEED = 2024
LENS_CASES = [(2, 1), (3, 1), (4, 1), (5, 1), (5, 2), (7, 2), (8, 3)]


def cfg(**kw) -> SolverConfig:
    return SolverConfig(seed=SEED, **kw)


class Timer:
    def __init__(self):
        self.laps = {}

    def run(self, key, fn, *args, **kw):
        t = time.perf_counter()
        out = fn(*args, **kw)
        self.laps[key] = time.perf_counter() - t
        return out


def c1_s3(timer: Timer):
    report, ok = {}, True
    for g in range(4):
        rep = timer.run(g, generator_census, s3_genus(g), cfg(starts=4000 if g == 3 else None))
        comps = rep.components.components
        good = (len(comps) == 1 and comps[0].dimension == 0
                and int(comps[0].kernel_dims.max()) == 0 and rep.passed)
        ok &= good
        report[f"g{g}"] = rep.to_json()
    ok &= timer.laps[3] <= 60.0
    return ok, report


def c2_s2xs1(timer: Timer):
    rep = timer.run(0, generator_census, s2xs1(), cfg())
    comps = rep.components.components
    tb = np.array([2.0 * x[1, 0] for x in comps[0].sample_array]) if comps else np.zeros(0)
    ok = (len(comps) == 1 and comps[0].dimension == 3 and tb.min() <= -1.9 and tb.max() >= 1.9
          and rep.euler_prediction == 0 and rep.passed)
    out = rep.to_json()
    out["trace_b_range"] = [float(tb.min()), float(tb.max())]
    return ok, out


def c3_lens(timer: Timer):
    report, ok = {}, True
    for p, q in LENS_CASES:
        rep = timer.run((p, q), generator_census, lens(p, q), cfg())
        r = rep.components
        iso, sph = (1, (p - 1) // 2) if p % 2 else (2, (p - 2) // 2)
        sig = sorted(c.trace_signature[1] for c in r.components)
        oracle = sorted(lens_trace_set(p))
        good = (r.count("isolated") == iso and r.count("sphere") == sph and len(r.components) == iso + sph
                and len(sig) == len(oracle) and all(abs(a - b) <= 1e-8 for a, b in zip(sig, oracle))
                and r.betti_heuristic() == p and rep.euler_prediction == p
                and timer.laps[(p, q)] <= 120.0)
        ok &= good
        report[f"lens({p},{q})"] = rep.to_json()
    return ok, report


def c4_kunneth(timer: Timer):
    a = timer.run(0, kunneth_check, lens(2, 1), lens(3, 1), cfg())
    b = timer.run(1, kunneth_check, lens(3, 1), s2xs1(), cfg())
    ok = (a.passed and b.passed
          and a.total.h1.free_rank == 0 and a.total.h1.torsion == (6,)
          and b.total.h1.free_rank == 1 and b.total.h1.torsion == (3,))
    return ok, {"lens(2,1)#lens(3,1)": a.to_json(), "lens(3,1)#s2xs1": b.to_json()}


GENUS_TWO = [
    connected_sum(lens(3, 1), lens(2, 1)),
    connected_sum(lens(5, 2), s3_genus(1)),
    s3_genus(2),
    connected_sum(lens(4, 1), lens(3, 1)),
]


def _random_moves(rng, kind, n):
    moves = []
    for _ in range(n):
        d = GENUS_TWO[int(rng.integers(len(GENUS_TWO)))]
        family = "alpha" if rng.random() < 0.5 else "beta"
        j = int(rng.integers(1, 3))
        if kind == "isotopy":
            word = random_word(rng, 2, int(rng.integers(1, 5)))
            moves.append((d, Move("isotopy", family, j, conjugator=word)))
        else:
            path = random_word(rng, 2, int(rng.integers(0, 4)))
            sign = 1 if rng.random() < 0.5 else -1
            moves.append((d, Move("handleslide", family, j, 3 - j, path=path, sign=sign)))
    return moves


def c5_moves(timer: Timer):
    rng = np.random.default_rng(SEED)
    report, ok = {"isotopy": [], "handleslide": [], "stabilize": []}, True
    for kind in ("isotopy", "handleslide"):
        for n, (d, mv) in enumerate(_random_moves(rng, kind, 10)):
            rep = timer.run((kind, n), verify_move, d, mv, cfg())
            good = rep.passed and (kind != "handleslide" or rep.hausdorff <= 1e-9)
            ok &= good
            report[kind].append(rep.to_json())
    bases = [s3_genus(g) for g in range(4)] + [s2xs1()] + [lens(p, q) for p, q in LENS_CASES]
    for n, d in enumerate(bases):
        rep = timer.run(("stabilize", n), verify_move, d, Move("stabilize"), cfg())
        ok &= rep.passed
        report["stabilize"].append(rep.to_json())
    return ok, report


def c6_blowup(timer: Timer):
    rep = timer.run(0, blowup_triple_check, cfg())
    ok = rep.passed and all(c.components.dims == [0] for c in rep.censuses)
    return ok, rep.to_json()


def _tuples_near_identity(rng, g, n):
    out = []
    while len(out) < n:
        hs = []
        for _ in range(2 * g):
            v = rng.standard_normal(3) * rng.uniform(0.01, 0.8)
            a = np.linalg.norm(v)
            hs.append(UnitQuaternion(math.cos(a), *(math.sin(a) * v / a)))
        P = commutator_product(np.array([h.as_array() for h in hs]))
        if 1.0 < 2.0 * P[0] <= 2.0:
            out.append((hs, P))
    return out


def c7_ht(timer: Timer):
    rng = np.random.default_rng(SEED)
    report, ok = {}, True
    for g in (1, 2):
        worst_trace, worst_prod, worst_t = 0.0, 0.0, 0.0
        for hs, P in _tuples_near_identity(rng, g, 1000):
            c1, c2, c3 = (c.as_array() for c in ht_embed(hs).punctures)
            prod = qmul(qmul(c1, c2), c3)
            worst_trace = max(worst_trace, abs(c1[0]), abs(c2[0]))
            worst_prod = max(worst_prod, float(np.linalg.norm(prod - inserted_product(hs))))
            worst_t = max(worst_t, abs(2.0 * prod[0] - 2.0 * P[0]))
        ok &= max(worst_trace, worst_prod, worst_t) <= 1e-12
        report[f"genus{g}"] = {"max_traceless_error": worst_trace, "max_product_error": worst_prod,
                               "max_trace_error": worst_t, "samples": 1000}
    return ok, report


def c8_composition(timer: Timer):
    a = timer.run(0, composition_check, ElementaryBordism.raising(0), ElementaryBordism.lowering(1),
                  samples=200, seed=SEED, tol=1e-6)
    b = timer.run(1, composition_check, ElementaryBordism.cylinder(1), ElementaryBordism.cylinder(1),
                  samples=200, seed=SEED, tol=1e-6)
    ok = all(r.passed and r.max_backward_residual <= 1e-6 and r.max_forward_residual <= 1e-6 for r in (a, b))
    return ok, {"raise0-lower1": a.to_json(), "cylinder1-cylinder1": b.to_json()}


def c9_sur(timer: Timer):
    report, ok = {}, True
    for r in (2, 3):
        rep = timer.run(("genus0", r), genus0_uniqueness, r, cfg())
        ok &= rep.passed
        report[f"genus0_r{r}"] = rep.to_json()
    spots = {(2, 1, 1): 6, (3, 1, 0): 0, (3, 1, 1): 16}
    got = {k: sur_dimension(*k) for k in spots}
    ok &= got == spots
    report["dimensions"] = [[*k, v] for k, v in sorted(got.items())]
    s3 = timer.run("s3", sur_census, s3_genus(1), 3, cfg())
    s2 = timer.run("s2xs1", sur_census, s2xs1(), 3, cfg())
    ok &= s3.components.dims == [0] and s3.components.count("isolated") == 1
    ok &= s2.components.dims == [8]
    ok &= all(t <= 600.0 for t in timer.laps.values())
    report["s3_genus(1)"] = s3.to_json()
    report["s2xs1"] = s2.to_json()
    return ok, report


def c10_oracle(timer: Timer):
    report, ok = {}, True
    for r in (2, 3):
        for p in range(2, 9):
            rep = timer.run((r, p), solve_sur, lens(p, 1), r, cfg())
            oracle = np.array(oracle_traces(p, r))
            dist = max((float(np.min(np.abs(oracle - complex(c.trace_signature[1])))) for c in rep.components),
                       default=math.inf)
            good = dist <= 1e-8 and len(rep.components) == len(oracle)
            ok &= good
            report[f"r{r}_lens({p},1)"] = {"components": len(rep.components), "oracle_classes": len(oracle),
                                            "max_trace_distance": dist, "dims": rep.dims, "pass": bool(good)}
    return ok, report


CRITERIA = {
    1: ("S3 census", c1_s3),
    2: ("S2xS1 census", c2_s2xs1),
    3: ("lens censuses", c3_lens),
    4: ("connected sums", c4_kunneth),
    5: ("move invariance", c5_moves),
    6: ("blowup triple", c6_blowup),
    7: ("h_t identities", c7_ht),
    8: ("correspondence composition", c8_composition),
    9: ("SU(r) checks", c9_sur),
    10: ("SU(r) lens oracle", c10_oracle),
}


def run_criterion(number: int):
    """Returns ``(passed, canonical report text, seconds, per-step laps)``."""
    _, fn = CRITERIA[number]
    timer = Timer()
    t = time.perf_counter()
    ok, report = fn(timer)
    return bool(ok), canonical_json(report), time.perf_counter() - t, timer.laps
