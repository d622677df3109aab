"""Invariants of the elliptic surfaces E(n) = E(1)(n) for n = 1..N."""

import argparse

from lefsum import fibresum as fs
from lefsum import lattice as lat
from lefsum import manifold as mf


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=6)
    args = parser.parse_args()
    E1 = mf.build_preset("E1")
    print(f"{'n':>3} {'e':>5} {'sigma':>6} {'div K':>6} {'spin':>5}  form")
    for n in range(1, args.max_n + 1):
        X = fs.iterated_fibre_sum(E1, n).manifold
        div = lat.divisibility(X.lattice, X.canonical)
        form = mf.classify_homeo(X).decomposition
        print(f"{n:>3} {X.euler:>5} {X.sigma:>6} {div:>6} {str(mf.is_spin(X)):>5}  {form}")


if __name__ == "__main__":
    main()
