"""Compare SU(r) lens-space censuses with the eigenvalue-multiset oracle."""
import argparse
import time

import numpy as np

from charvar.solver import SolverConfig
from charvar.sur import oracle_traces, solve_sur
from charvar.words import lens


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ranks", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--pmax", type=int, default=8)
    ap.add_argument("--starts", type=int)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = SolverConfig(seed=args.seed, starts=args.starts)
    print(f"{'r':>2} {'p':>3} {'found':>6} {'oracle':>7} {'max dist':>10} {'sec':>6}  dims")
    for r in args.ranks:
        for p in range(2, args.pmax + 1):
            t = time.perf_counter()
            rep = solve_sur(lens(p, 1), r, cfg)
            oracle = np.array(oracle_traces(p, r))
            dist = max(float(np.min(np.abs(oracle - complex(c.trace_signature[1])))) for c in rep.components)
            print(f"{r:>2} {p:>3} {len(rep.components):>6} {len(oracle):>7} {dist:10.2e} "
                  f"{time.perf_counter() - t:6.1f}  {rep.dims}", flush=True)


if __name__ == "__main__":
    main()
