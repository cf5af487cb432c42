"""K0 and AR-matrix data for the rational double points A1..E8."""
import argparse

from cmktheory.arquiver import ADE_TYPES, cartan_matrix, dynkin_upsilon
from cmktheory.intlinalg import cokernel, is_injective


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--show-matrices", action="store_true")
    args = ap.parse_args()
    print(f"{'type':<5} {'injective':<10} {'det C':>5}  K0")
    for kind, n in ADE_TYPES:
        ups = dynkin_upsilon(kind, n)
        print(f"{kind}{n:<4} {str(is_injective(ups)).lower():<10} {cartan_matrix(kind, n).determinant():>5}  {cokernel(ups)}")
        if args.show_matrices:
            print(ups.format(2))
            print()


if __name__ == "__main__":
    main()
