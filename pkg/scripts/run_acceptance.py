"""Run the acceptance criteria outside pytest and print one line per criterion.

    python3 scripts/run_acceptance.py            # all criteria
    python3 scripts/run_acceptance.py 3 7        # a subset
    python3 scripts/run_acceptance.py --out DIR  # also keep the JSON reports
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from acceptance_criteria import CRITERIA, run_criterion  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("numbers", nargs="*", type=int)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--repeat", action="store_true", help="run twice and compare report bytes")
    args = ap.parse_args()
    numbers = args.numbers or sorted(CRITERIA)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for n in numbers:
        name = CRITERIA[n][0]
        ok, text, sec, _ = run_criterion(n)
        if args.repeat:
            ok2, text2, _, _ = run_criterion(n)
            same = text == text2
            ok = ok and ok2 and same
            name += ", repeated" + ("" if same else " (reports differ)")
        print(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {name}  ({sec:.1f} s)", flush=True)
        failed += not ok
        if args.out:
            (args.out / f"criterion_{n:02d}.json").write_text(text)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
