"""Shared structural check for fibre sums in normal form."""


def check_normal_form(res, M, N):
    X = res.manifold
    L = X.lattice
    g = M.genus
    pm, pn = M.lattice.rank - 2, N.lattice.rank - 2
    assert res.labels[:pm] == tuple(f"PM:{j}" for j in range(pm))
    assert res.labels[pm:pm + pn] == tuple(f"PN:{j}" for j in range(pn))
    assert res.labels[-2:] == ("B", "Sigma")
    assert len(res.s_indices) == len(res.r_indices) == 2 * g
    # no pairings between different blocks of the decomposition
    blocks = [range(0, pm), range(pm, pm + pn)]
    blocks += [range(s, s + 2) for s in res.s_indices] + [range(L.rank - 2, L.rank)]
    owner = {i: k for k, b in enumerate(blocks) for i in b}
    assert len(owner) == L.rank
    for i in range(L.rank):
        for j, x in L.sparse_rows[i]:
            assert owner[i] == owner[j], (i, j, x)
    for s, r in zip(res.s_indices, res.r_indices):
        assert L.gram[r][r] == 0 and L.gram[s][r] == 1
    B, S = X.section, X.fibre
    assert B @ S == 1 and S @ S == 0
    assert B @ B == M.section @ M.section + N.section @ N.section
