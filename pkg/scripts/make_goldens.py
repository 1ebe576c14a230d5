"""Regenerate the golden CLI reports under tests/golden/.

Run after changing the report schema, then review the diff before committing.
"""

import pathlib
import sys

from netbell.cli import main

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"

CASES = {
    "certify_chsh.json": ("certify", "--scenario", "chsh"),
    "certify_ghz_b.json": ("certify", "--scenario", "ghz-b"),
    "simulate_star2.json": ("simulate", "--scenario", "star", "--k", "2",
                            "--rounds", "2000", "--seed", "7"),
}


def regenerate() -> int:
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        target = GOLDEN / name
        code = main([*argv, "--out", str(target)])
        if code != 0:
            print(f"{name}: exit {code}", file=sys.stderr)
            return code
        print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    raise SystemExit(regenerate())
