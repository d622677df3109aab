"""Quintic pencil: blow-up, iterated fibre sums, canonical divisibility and basic classes."""

import argparse
import time

from lefsum import canonical as cn
from lefsum import fibresum as fs
from lefsum import lattice as lat
from lefsum import manifold as mf
from lefsum import seibergwitten as sw


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=5)
    parser.add_argument("--sw-max-n", type=int, default=4)
    args = parser.parse_args()

    S = mf.build_preset("quintic")
    M = mf.blow_up(S, S.degree)
    print(f"surface: K²={S.K_squared} e={S.euler} degree={S.degree} section genus={S.section_genus}")
    print(f"blow-up: e={M.euler} sigma={M.sigma} g={M.genus} d={cn.d_of(M)}")

    SM = sw.basic_classes_blowup(M)
    top = sw.max_fibre_filter(SM, M.fibre, M.genus)
    print(f"basic classes of the blow-up: {len(SM)}, with maximal fibre pairing: {len(top)}")

    print(f"{'n':>3} {'rank':>5} {'K.Σ':>4} {'K.B':>4} {'div':>4} {'mst(K)':>7} {'cands':>6} {'sec':>6}")
    for n in range(2, args.max_n + 1):
        t = time.perf_counter()
        res = fs.iterated_fibre_sum(M, n)
        X = res.manifold
        div = lat.divisibility(X.lattice, X.canonical)
        assert div == cn.div_K_Mn(M, n)
        mst = cands = "-"
        if n <= args.sw_max_n:
            SN = sw.summand_basic_classes(M, n - 1)
            dec = sw.decompose_characteristic(res, X.canonical, basic_class_mode=True)
            mst = sw.mst_sum(dec, SM, SN, M.genus)
            cands = sum(1 for _ in sw.maximal_pairing_candidates(res, SM, SN))
        dt = time.perf_counter() - t
        print(f"{n:>3} {X.lattice.rank:>5} {X.canonical @ X.fibre:>4} {X.canonical @ X.section:>4} "
              f"{div:>4} {mst:>7} {cands:>6} {dt:>6.2f}")


if __name__ == "__main__":
    main()
