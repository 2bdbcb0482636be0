"""Command-line front end.

Exit status: 0 when every check passes, 1 when a check fails, 2 for usage
errors, unreadable or malformed input, and unwritable output paths.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

from .correspondences import ElementaryBordism, composition_check
from .errors import CharvarError
from .invariants import Move, blowup_triple_check, generator_census, kunneth_check, predict_euler, verify_move
from .report import canonical_json, summary_table, write_report
from .solver import SolverConfig
from .sur import genus0_uniqueness, sur_census
from .words import FreeWord, HeegaardDiagram, h1_invariants, loads_diagram, make_standard

VERBS = ("census", "euler", "kunneth", "verify-move", "blowup", "compose-check", "sur-census", "genus0")
MAX_RANK = 4


class UsageError(Exception):
    pass


@dataclass
class Command:
    verb: str
    inputs: list = field(default_factory=list)
    family: Optional[str] = None
    params: dict = field(default_factory=dict)
    cfg: SolverConfig = field(default_factory=SolverConfig)
    out: Optional[str] = None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="charvar", description="SU(2) and SU(r) representation censuses of Heegaard diagrams")
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("--in", dest="inputs", action="append", default=[], metavar="PATH",
                    help="diagram JSON file (repeat twice for kunneth)")
    ap.add_argument("--family", choices=("s3", "s2xs1", "lens"))
    ap.add_argument("--p", type=int)
    ap.add_argument("--q", type=int)
    ap.add_argument("--genus", type=int, default=1)
    ap.add_argument("--summand", action="append", default=[], metavar="DIAGRAM",
                    help="kunneth summand: s3:G, s2xs1, lens:P:Q or a JSON path")
    ap.add_argument("--rank", type=int, default=3)
    ap.add_argument("--allow-large-rank", action="store_true", help=argparse.SUPPRESS)
    ap.add_argument("--starts", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, help="convergence tolerance on the residual")
    ap.add_argument("--out", metavar="PATH", help="write the JSON report here (default: standard output)")
    mv = ap.add_argument_group("verify-move")
    mv.add_argument("--move", choices=("stabilize", "handleslide", "isotopy"), default="stabilize")
    mv.add_argument("--curves", choices=("alpha", "beta"), default="beta")
    mv.add_argument("--slide", nargs=2, type=int, metavar=("J", "K"), default=(1, 2),
                    help="slide curve J over curve K")
    mv.add_argument("--sign", type=int, choices=(1, -1), default=1)
    mv.add_argument("--path", default="", help="path word for handleslides")
    mv.add_argument("--conjugator", default="", help="conjugating word for isotopies")
    cc = ap.add_argument_group("compose-check")
    cc.add_argument("--first", default="raise:0", metavar="KIND:GENUS")
    cc.add_argument("--second", default="lower:1", metavar="KIND:GENUS")
    cc.add_argument("--samples", type=int, default=200)
    return ap


def _cfg(ns) -> SolverConfig:
    kw = {"seed": ns.seed}
    if ns.starts is not None:
        kw["starts"] = ns.starts
    if ns.tol is not None:
        kw["converge_tol"] = ns.tol
    return SolverConfig(**kw)


def _read_diagram(path: str) -> HeegaardDiagram:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return loads_diagram(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except (CharvarError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _family_diagram(family: str, genus: int, p, q) -> HeegaardDiagram:
    if family == "lens":
        if p is None or q is None:
            raise UsageError("--family lens needs --p and --q")
        return make_standard("lens", p=p, q=q)
    if family == "s3":
        return make_standard("s3", genus=genus)
    return make_standard(family)


def _summand(text: str) -> HeegaardDiagram:
    parts = text.split(":")
    try:
        if parts[0] == "s3" and len(parts) <= 2:
            return make_standard("s3", genus=int(parts[1]) if len(parts) == 2 else 1)
        if parts[0] == "s2xs1" and len(parts) == 1:
            return make_standard("s2xs1")
        if parts[0] == "lens" and len(parts) == 3:
            return make_standard("lens", p=int(parts[1]), q=int(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad summand {text!r}: {exc}") from exc
    return _read_diagram(text)


def _single_diagram(cmd: Command) -> HeegaardDiagram:
    if cmd.inputs and cmd.family:
        raise UsageError("give either --in or --family, not both")
    if len(cmd.inputs) > 1:
        raise UsageError(f"{cmd.verb} takes one diagram")
    if cmd.inputs:
        return _read_diagram(cmd.inputs[0])
    if cmd.family:
        return _family_diagram(cmd.family, cmd.params["genus"], cmd.params["p"], cmd.params["q"])
    raise UsageError(f"{cmd.verb} needs --in or --family")


def _bordism(text: str) -> ElementaryBordism:
    kinds = {"raise": ElementaryBordism.raising, "lower": ElementaryBordism.lowering,
             "cylinder": ElementaryBordism.cylinder}
    try:
        kind, g = text.split(":")
        return kinds[kind](int(g))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad bordism {text!r}; expected raise:G, lower:G or cylinder:G") from exc


def _check_rank(cmd: Command) -> int:
    r = cmd.params["rank"]
    if r < 2:
        raise UsageError("--rank must be at least 2")
    if r > MAX_RANK and not cmd.params.get("allow_large_rank"):
        raise UsageError(f"--rank above {MAX_RANK} needs --allow-large-rank")
    return r


def dispatch(cmd: Command):
    """Run ``cmd``; returns ``(report dict, passed)``."""
    verb, cfg = cmd.verb, cmd.cfg
    if verb == "census":
        rep = generator_census(_single_diagram(cmd), cfg)
        return rep.to_json(), rep.passed
    if verb == "euler":
        d = _single_diagram(cmd)
        return {"diagram": d.to_json(), "h1": h1_invariants(d).to_json(),
                "euler_prediction": predict_euler(d), "checks": [], "warnings": []}, True
    if verb == "kunneth":
        sources = [(_read_diagram, p) for p in cmd.inputs] + [(_summand, s) for s in cmd.params["summands"]]
        if len(sources) != 2:
            raise UsageError("kunneth needs exactly two diagrams (--in or --summand)")
        d1, d2 = (f(x) for f, x in sources)
        rep = kunneth_check(d1, d2, cfg)
        return rep.to_json(), rep.passed
    if verb == "verify-move":
        p = cmd.params
        move = Move(p["move"], family=p["curves"], j=p["slide"][0], k=p["slide"][1],
                    path=FreeWord.parse(p["path"]), sign=p["sign"], conjugator=FreeWord.parse(p["conjugator"]))
        if p["move"] == "isotopy":
            move = Move("isotopy", family=p["curves"], j=p["slide"][0], conjugator=FreeWord.parse(p["conjugator"]))
        rep = verify_move(_single_diagram(cmd), move, cfg)
        return rep.to_json(), rep.passed
    if verb == "blowup":
        rep = blowup_triple_check(cfg)
        return rep.to_json(), rep.passed
    if verb == "compose-check":
        b1, b2 = _bordism(cmd.params["first"]), _bordism(cmd.params["second"])
        rep = composition_check(b1, b2, samples=cmd.params["samples"], seed=cfg.seed)
        return rep.to_json(), rep.passed
    if verb == "sur-census":
        r = _check_rank(cmd)
        rep = sur_census(_single_diagram(cmd), r, cfg)
        return rep.to_json(), rep.passed
    if verb == "genus0":
        rep = genus0_uniqueness(_check_rank(cmd), cfg)
        return rep.to_json(), rep.passed
    raise UsageError(f"unknown verb {verb!r}")


def run_command(cmd: Command) -> int:
    try:
        report, passed = dispatch(cmd)
    except UsageError as exc:
        print(f"charvar: error: {exc}", file=sys.stderr)
        return 2
    except CharvarError as exc:
        print(f"charvar: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if cmd.out:
        try:
            write_report(report, cmd.out)
        except OSError as exc:
            print(f"charvar: error: cannot write {cmd.out}: {exc.strerror or exc}", file=sys.stderr)
            return 2
        print(summary_table(report))
    else:
        sys.stdout.write(canonical_json(report))
        print(summary_table(report), file=sys.stderr)
    return 0 if passed else 1


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = _cfg(ns)
    except CharvarError as exc:
        print(f"charvar: error: {exc}", file=sys.stderr)
        return 2
    params = {
        "genus": ns.genus, "p": ns.p, "q": ns.q, "rank": ns.rank, "allow_large_rank": ns.allow_large_rank,
        "summands": ns.summand, "move": ns.move, "curves": ns.curves, "slide": tuple(ns.slide),
        "sign": ns.sign, "path": ns.path, "conjugator": ns.conjugator,
        "first": ns.first, "second": ns.second, "samples": ns.samples,
    }
    cmd = Command(ns.verb, ns.inputs, ns.family, params, cfg, ns.out)
    try:
        return run_command(cmd)
    except (ValueError, TypeError) as exc:
        print(f"charvar: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
