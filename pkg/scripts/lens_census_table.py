"""Census table for lens spaces L(p, q): component counts, trace signatures
and the isolated + 2 * spheres count against p."""
import argparse
import math
import time

from charvar.invariants import generator_census
from charvar.solver import SolverConfig
from charvar.words import lens


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pmax", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--starts", type=int)
    args = ap.parse_args()
    cfg = SolverConfig(seed=args.seed, starts=args.starts)
    print(f"{'p':>3} {'q':>3} {'iso':>4} {'sph':>4} {'betti':>6} {'euler':>6} {'ok':>4} {'sec':>6}  trace(B)")
    for p in range(2, args.pmax + 1):
        for q in range(1, p):
            if math.gcd(p, q) != 1:
                continue
            t = time.perf_counter()
            rep = generator_census(lens(p, q), cfg)
            r = rep.components
            sig = " ".join(f"{c.trace_signature[1]:+.4f}" for c in r.components)
            print(f"{p:>3} {q:>3} {r.count('isolated'):>4} {r.count('sphere'):>4} {r.betti_heuristic():>6} "
                  f"{rep.euler_prediction:>6} {'yes' if rep.passed else 'NO':>4} {time.perf_counter() - t:6.1f}  {sig}",
                  flush=True)


if __name__ == "__main__":
    main()
