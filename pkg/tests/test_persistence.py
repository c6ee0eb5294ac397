import math

import numpy as np
import pytest

from phkit import (
    Simplex,
    betti_numbers,
    compute_persistence,
    make_complex,
    make_filtration,
    oracle_persistence,
    representative_cycle,
    tighten_cycle_1d,
)
from phkit.errors import EssentialPair, NotDegreeOne, TooLarge


def abstract_tetrahedron_filtration():
    """Full tetrahedron with the squared radii a regular unit tetra produces."""
    verts = [((i,), 0.0) for i in range(4)]
    edges = [((i, j), 0.25) for i in range(4) for j in range(i + 1, 4)]
    tris = [((i, j, k), 1.0 / 3.0)
            for i in range(4) for j in range(i + 1, 4) for k in range(j + 1, 4)]
    return make_filtration(verts + edges + tris + [((0, 1, 2, 3), 0.375)])


def square_two_step_filtration():
    """Square outline, then a diagonal, then the two triangles one by one."""
    return make_filtration([
        ((0,), 0.0), ((1,), 0.0), ((2,), 0.0), ((3,), 0.0),
        ((0, 1), 0.0), ((1, 2), 0.0), ((2, 3), 0.0),
        ((0, 3), 1.0),
        ((0, 2), 2.0),
        ((0, 1, 2), 3.0),
        ((0, 2, 3), 4.0),
    ])


def test_two_point_merge():
    f = make_filtration([((0,), 0.0), ((1,), 0.0), ((0, 1), 3.0)])
    _, dgms = compute_persistence(f)
    assert sorted(dgms[0].pairs) == [(0.0, 3.0), (0.0, math.inf)]


def test_single_vertex():
    f = make_filtration([((0,), 2.0)])
    _, dgms = compute_persistence(f)
    assert dgms[0].pairs == [(2.0, math.inf)]


def test_empty_filtration():
    f = make_filtration([])
    pairing, dgms = compute_persistence(f)
    assert pairing.pairs == [] and pairing.essential == []
    assert dgms == [] or all(len(d) == 0 for d in dgms)


def test_tetrahedron_diagrams():
    _, dgms = compute_persistence(abstract_tetrahedron_filtration())
    third = 1.0 / 3.0
    assert sorted(dgms[0].pairs) == [(0.0, 0.25)] * 3 + [(0.0, math.inf)]
    assert sorted(dgms[1].pairs) == [(0.25, third)] * 3
    assert dgms[2].pairs == [(third, 0.375)]
    assert dgms[3].pairs == []


def test_zero_persistence_dropped_but_paired():
    f = make_filtration([
        ((0,), 0.0), ((1,), 0.0), ((0, 1), 0.0)])
    pairing, dgms = compute_persistence(f)
    assert dgms[0].pairs == [(0.0, math.inf)]
    assert len(pairing.pairs) == 1  # the merge is still recorded


def test_square_two_step_pairs():
    _, dgms = compute_persistence(square_two_step_filtration())
    assert sorted(dgms[1].pairs) == [(1.0, 4.0), (2.0, 3.0)]


def test_square_two_step_prefix_hole_counts():
    f = square_two_step_filtration()
    counts = []
    for value in [0.0, 1.0, 2.0, 3.0, 4.0]:
        b = betti_numbers(f, prefix=f.prefix_length(value))
        counts.append(b[1] if len(b) > 1 else 0)
    assert counts == [0, 1, 2, 1, 0]


def test_betti_tetrahedron_skeleton():
    skel = make_complex([(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert betti_numbers(skel) == [1, 3]


def test_betti_skeleton_plus_one_triangle():
    c = make_complex(
        [(i, j) for i in range(4) for j in range(i + 1, 4)] + [(0, 1, 2)])
    assert betti_numbers(c)[1] == 2


def test_betti_full_tetrahedron():
    c = make_complex([(0, 1, 2, 3)])
    b = betti_numbers(c)
    assert b[:3] == [1, 0, 0]
    assert all(x == 0 for x in b[3:])


def test_twist_and_plain_reduction_agree():
    for f in [abstract_tetrahedron_filtration(), square_two_step_filtration()]:
        p1, d1 = compute_persistence(f, twist=True)
        p2, d2 = compute_persistence(f, twist=False)
        assert p1.pairs == p2.pairs
        assert p1.essential == p2.essential
        for a, b in zip(d1, d2):
            assert a.pairs == b.pairs


def test_pair_count_conservation():
    f = abstract_tetrahedron_filtration()
    pairing, _ = compute_persistence(f)
    seen = np.zeros(len(f), dtype=int)
    for i, j in pairing.pairs:
        seen[i] += 1
        seen[j] += 1
    for i in pairing.essential:
        seen[i] += 1
    assert (seen == 1).all()


def test_euler_characteristic_per_prefix():
    f = square_two_step_filtration()
    for prefix in range(1, len(f) + 1):
        dims = f.dims[:prefix]
        euler_cells = sum((-1) ** int(d) for d in dims)
        betti = betti_numbers(f, prefix=prefix)
        euler_betti = sum((-1) ** k * b for k, b in enumerate(betti))
        assert euler_cells == euler_betti


def rand_filtration(rng, n_vertices=6, n_top=5, max_dim=3):
    """Random face-closed filtration with deliberate value ties."""
    cells = {}
    for _ in range(n_top):
        size = int(rng.integers(1, max_dim + 2))
        vs = tuple(sorted(rng.choice(n_vertices, size=size, replace=False)))
        cells[vs] = None
    closure = make_complex(cells)
    values = {}
    for s in sorted(closure.cells, key=lambda s: (s.dimension, tuple(s))):
        base = max((values[f] for f in s.facets()), default=0.0)
        bump = float(rng.choice([0.0, 0.0, 0.5, 1.0]))
        values[s] = base + bump
    return make_filtration(list(values.items()))


def multiset(dgm):
    out = {}
    for p in dgm.pairs:
        out[p] = out.get(p, 0) + 1
    return out


def test_oracle_matches_engine_on_random_filtrations():
    rng = np.random.default_rng(7)
    for _ in range(40):
        f = rand_filtration(rng)
        _, dgms = compute_persistence(f)
        oracle = oracle_persistence(f)
        assert len(dgms) == len(oracle)
        for a, b in zip(dgms, oracle):
            assert multiset(a) == multiset(b)


def test_oracle_size_cap():
    cells = [((i,), 0.0) for i in range(301)]
    with pytest.raises(TooLarge):
        oracle_persistence(make_filtration(cells))


def test_oracle_trivial_cases():
    f = make_filtration([((0,), 1.5)])
    dgms = oracle_persistence(f)
    assert dgms[0].pairs == [(1.5, math.inf)]
    assert oracle_persistence(make_filtration([])) == []


def square_with_diagonals():
    """All cliques of the unit square under the full distance graph."""
    s2 = math.sqrt(2.0)
    return make_filtration([
        ((0,), 0.0), ((1,), 0.0), ((2,), 0.0), ((3,), 0.0),
        ((0, 1), 1.0), ((1, 2), 1.0), ((2, 3), 1.0), ((0, 3), 1.0),
        ((0, 2), s2), ((1, 3), s2),
        ((0, 1, 2), s2), ((0, 1, 3), s2), ((0, 2, 3), s2), ((1, 2, 3), s2),
    ])


def test_representative_cycle_square():
    f = square_with_diagonals()
    pairing, dgms = compute_persistence(f)
    [pair] = [p for p in dgms[1].pairs if p[1] > p[0]]
    assert pair == (1.0, math.sqrt(2.0))
    i = dgms[1].pairs.index(pair)
    cyc = representative_cycle(
        pairing, (int(dgms[1].birth_index[i]), int(dgms[1].death_index[i])))
    cells = {tuple(c) for c in cyc.cells}
    assert cells == {(0, 1), (1, 2), (2, 3), (0, 3)}


def test_representative_cycle_invariants():
    f = abstract_tetrahedron_filtration()
    pairing, dgms = compute_persistence(f)
    for dgm in dgms[1:]:
        for i in range(len(dgm)):
            if not np.isfinite(dgm.deaths[i]):
                continue
            b, d = int(dgm.birth_index[i]), int(dgm.death_index[i])
            cyc = representative_cycle(pairing, (b, d))
            assert max(cyc.cell_indices) == b  # newest cell is the birth cell
            # boundary of the chain vanishes over Z/2
            bm = f.boundary_matrix()
            counts = {}
            for c in cyc.cell_indices:
                for face in bm.column(c):
                    counts[int(face)] = counts.get(int(face), 0) + 1
            assert all(v % 2 == 0 for v in counts.values())


def test_representative_cycle_degree0():
    f = make_filtration([((0,), 0.0), ((1,), 0.0), ((0, 1), 3.0)])
    pairing, dgms = compute_persistence(f)
    [pair] = [p for p in pairing.pairs]
    cyc = representative_cycle(pairing, pair)
    assert [tuple(c) for c in cyc.cells] == [(1,)]  # the younger vertex


def test_essential_cycle_requires_flag_and_chains():
    f = make_filtration([
        ((0,), 0.0), ((1,), 0.0), ((2,), 0.0),
        ((0, 1), 1.0), ((1, 2), 1.0), ((0, 2), 1.0)])
    pairing, dgms = compute_persistence(f)
    ess = [i for i in pairing.essential if f.dims[i] == 1]
    assert len(ess) == 1
    with pytest.raises(EssentialPair):
        representative_cycle(pairing, (ess[0], None))
    with pytest.raises(EssentialPair):
        representative_cycle(pairing, (ess[0], None), allow_essential=True)
    pairing_v, _ = compute_persistence(f, with_v=True)
    cyc = representative_cycle(pairing_v, (ess[0], None), allow_essential=True)
    cells = {tuple(c) for c in cyc.cells}
    assert cells == {(0, 1), (1, 2), (0, 2)}


def hexagon_with_chord():
    cells = [((i,), 0.0) for i in range(6)]
    ring = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
    cells += [(e, 0.0) for e in ring]
    cells += [((0, 5), 1.0)]   # closes the hexagon: birth edge
    cells += [((0, 3), 2.0)]   # later chord
    return make_filtration(cells)


def test_tighten_cycle_hexagon():
    f = hexagon_with_chord()
    pairing, dgms = compute_persistence(f)
    ess = [i for i in pairing.essential if f.dims[i] == 1]
    # two independent rings by the end; the first is born when (0,5) closes
    born_at_one = [i for i in ess if f.values[i] == 1.0]
    assert len(born_at_one) == 1
    pairing_v, _ = compute_persistence(f, with_v=True)
    cyc = representative_cycle(pairing_v, (born_at_one[0], None),
                               allow_essential=True)
    tight = tighten_cycle_1d(pairing_v, cyc)
    assert len(tight) == 6  # the chord came later, so the hexagon is shortest
    assert tight.homologous_to_original is True
    assert tight.tightened


def test_tighten_rejects_wrong_degree():
    f = make_filtration([((0,), 0.0), ((1,), 0.0), ((0, 1), 3.0)])
    pairing, _ = compute_persistence(f)
    cyc = representative_cycle(pairing, pairing.pairs[0])
    with pytest.raises(NotDegreeOne):
        tighten_cycle_1d(pairing, cyc)
