"""Commutator subgroup vs Ker theta across small matrix rings and products."""
import argparse
import time

from cmktheory.semilocal import SizeBoundExceeded, parse_ring_name, vaserstein_check

DEFAULT = ["F3", "F5", "F2xF2", "M2F2", "M2F3", "M2F5", "M3F2", "M2F2xF2", "M2F2xF3", "M2F3xF2", "M2F3xF3"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("rings", nargs="*", default=DEFAULT)
    ap.add_argument("--reverse", action="store_true", help="enumerate ring elements backwards")
    args = ap.parse_args()
    print(f"{'ring':<10} {'|A|':>6} {'|A*|':>6} {'|Ker|':>6} {'|[A*,A*]|':>9}  verdict   time")
    for name in args.rings:
        a = parse_ring_name(name)
        t0 = time.perf_counter()
        try:
            r = vaserstein_check(a, reverse=args.reverse)
        except SizeBoundExceeded as exc:
            print(f"{name:<10} skipped: {exc}")
            continue
        dt = time.perf_counter() - t0
        print(f"{r.ring:<10} {a.size:>6} {r.units:>6} {r.ker_theta:>6} {r.commutators:>9}  {r.verdict:<8} {dt:5.2f}s")


if __name__ == "__main__":
    main()
