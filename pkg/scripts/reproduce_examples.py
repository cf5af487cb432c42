"""Rerun the worked examples: E6 K0, dual-numbers K1, cusp K1.

Prints the generated reports and, for the cusp, the residue of omega(xi_h)
next to h(0) so the h(0)^-1 behaviour is visible.
"""
import argparse
import random
from pathlib import Path

from cmktheory import k1
from cmktheory.cli import main as cli
from cmktheory.rings import Cusp, Field, Support

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--precision", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cli(["k0", str(DATA / "e6_example.ar")])
    print()
    cli(["k1", "--family", "dual", "--p", str(args.p), "--seed", str(args.seed)])
    print()

    system = Cusp(Field(args.p), args.precision)
    rng = random.Random(args.seed)
    print(f"cusp over F{args.p}, N={args.precision}: residue of omega(xi_h)")
    for _ in range(8):
        h = k1.random_series(rng, system, Support.FULL, True)
        res, val = k1.omega(k1.xi_generator(system, h))
        print(f"  h = {h.format():<40} h(0) = {h.c0}  residue = {res}  h(0)^-1 = {system.field.inv(h.c0)}  second = {val.format()}")


if __name__ == "__main__":
    main()
