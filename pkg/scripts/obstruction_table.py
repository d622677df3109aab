"""Tabulate which boundary gluings are obstructed from extending, for given d."""

import argparse

from lefsum import obstruction as ob


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, nargs="+", default=[0, 1, 2, 3, 4, 6, 8])
    parser.add_argument("--max-a", type=int, default=8)
    parser.add_argument("--max-n", type=int, default=6)
    args = parser.parse_args()
    for d in args.d:
        print(f"d = {d}   (X: obstructed, .: inconclusive; rows a, columns n)")
        print("      " + " ".join(f"{n:>2}" for n in range(1, args.max_n + 1)))
        for a in range(args.max_a + 1):
            marks = ("X" if ob.extension_obstructed(d, a, n).obstructed else "."
                     for n in range(1, args.max_n + 1))
            print(f"  a={a:<2} " + " ".join(f"{m:>2}" for m in marks))
        print()


if __name__ == "__main__":
    main()
