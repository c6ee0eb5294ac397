import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phkit import (
    Cube,
    Simplex,
    SimplicialComplex,
    boundary,
    make_complex,
    make_filtration,
)
from phkit.errors import MissingFace, MonotonicityViolation


def test_simplex_canonical_form():
    assert tuple(Simplex([3, 1, 2])) == (1, 2, 3)
    assert Simplex([0]).dimension == 0
    assert Simplex([4, 7]).dimension == 1


def test_simplex_rejects_bad_input():
    with pytest.raises(ValueError):
        Simplex([])
    with pytest.raises(ValueError):
        Simplex([1, 1])
    with pytest.raises(ValueError):
        Simplex([-1, 2])


def test_boundary_of_triangle():
    assert boundary(Simplex([0, 1, 2])) == {
        Simplex([0, 1]), Simplex([0, 2]), Simplex([1, 2])}
    assert boundary(Simplex([5])) == set()


def test_make_complex_closure():
    c = make_complex([[0, 1, 2]])
    assert len(c) == 7
    assert [1, 2] in c
    assert [0] in c
    assert [0, 3] not in c


def test_make_complex_idempotent():
    c1 = make_complex([[0, 1, 2], [2, 3]])
    c2 = make_complex(c1.cells)
    assert c1.cells == c2.cells


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(0, 8), min_size=1, max_size=4),
                min_size=1, max_size=6))
def test_make_complex_closed_under_faces(cells):
    cells = [list(dict.fromkeys(c)) for c in cells]
    c = make_complex(cells)
    for s in c.cells:
        for f in s.facets():
            assert f in c


def test_complex_constructor_requires_closure():
    with pytest.raises(MissingFace):
        SimplicialComplex([Simplex([0, 1])])


def test_cube_facets():
    sq = Cube((2, 3), (1, 1))
    assert sq.dimension == 2
    fs = boundary(sq)
    assert fs == {
        Cube((2, 3), (0, 1)), Cube((3, 3), (0, 1)),
        Cube((2, 3), (1, 0)), Cube((2, 4), (1, 0))}
    assert boundary(Cube((0, 0), (0, 0))) == set()


def test_filtration_ordering_contract():
    f = make_filtration([
        (Simplex([0, 1]), 1.0),
        (Simplex([0]), 0.0),
        (Simplex([1]), 1.0),
        (Simplex([2]), 1.0),
        (Simplex([1, 2]), 1.0),
    ])
    cells = f.cells
    # ascending value, ties dimension-ascending then lexicographic
    assert cells == [Simplex([0]), Simplex([1]), Simplex([2]),
                     Simplex([0, 1]), Simplex([1, 2])]
    assert list(f.values) == [0.0, 1.0, 1.0, 1.0, 1.0]


def test_filtration_prefixes_are_closed():
    f = make_filtration([
        ((0,), 0.0), ((1,), 0.0), ((2,), 0.5),
        ((0, 1), 0.25), ((0, 2), 0.5), ((1, 2), 0.5),
        ((0, 1, 2), 0.75),
    ])
    bm = f.boundary_matrix()
    for j in range(len(f)):
        assert all(i < j for i in bm.column(j))


def test_filtration_missing_face():
    with pytest.raises(MissingFace) as exc:
        make_filtration([((0,), 0.0), ((0, 1), 1.0)])
    assert exc.value.cell == Simplex([0, 1])
    assert exc.value.face == Simplex([1])


def test_filtration_monotonicity_violation():
    with pytest.raises(MonotonicityViolation):
        make_filtration([
            ((0,), 0.0), ((1,), 2.0), ((0, 1), 1.0)])


def test_filtration_duplicate_cell():
    with pytest.raises(ValueError, match="duplicate"):
        make_filtration([((0,), 0.0), ((0,), 1.0)])


def test_filtration_boundary_columns():
    f = make_filtration([
        ((0,), 0.0), ((1,), 0.0), ((2,), 0.0),
        ((0, 1), 1.0), ((0, 2), 1.0), ((1, 2), 1.0),
        ((0, 1, 2), 2.0),
    ])
    bm = f.boundary_matrix()
    tri = len(f) - 1
    assert f.cell(tri) == Simplex([0, 1, 2])
    assert sorted(bm.column(tri)) == [3, 4, 5]
    assert len(bm.column(0)) == 0


def test_cubical_filtration_cells():
    f = make_filtration([
        (Cube((0,), (0,)), 1.0), (Cube((1,), (0,)), 1.0),
        (Cube((2,), (0,)), 5.0),
        (Cube((0,), (1,)), 1.0), (Cube((1,), (1,)), 5.0),
    ])
    assert len(f) == 5
    bm = f.boundary_matrix()
    last = len(f) - 1
    assert f.cell(last) == Cube((1,), (1,))
    cols = [int(x) for x in bm.column(last)]
    assert [f.cell(i) for i in cols] == [Cube((1,), (0,)), Cube((2,), (0,))]


def test_prefix_length():
    f = make_filtration([((0,), 0.0), ((1,), 1.0), ((0, 1), 2.0)])
    assert f.prefix_length(0.5) == 1
    assert f.prefix_length(1.0) == 2
    assert f.prefix_length(5.0) == 3
