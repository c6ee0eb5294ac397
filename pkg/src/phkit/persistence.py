"""Z/2 persistent homology by boundary-matrix column reduction.

The reducer runs left to right inside each dimension and processes
dimensions from the top down so that every pair found in dimension d clears
the matching birth column in dimension d-1 before it is ever reduced.
Diagrams drop zero-persistence pairs; the pairing keeps everything.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._gf2 import EchelonBasis, column_bitmask
from .complexes import Filtration, SimplicialComplex, _assemble
from .errors import EssentialPair, NotDegreeOne


@dataclass
class PersistenceDiagram:
    """Birth/death pairs of one degree; deaths of +inf mark essential classes.

    birth_index/death_index give the filtration positions of the cells that
    created and killed each class (death_index -1 for essential classes);
    they are absent for diagrams built directly from value arrays.
    """

    degree: int
    births: np.ndarray
    deaths: np.ndarray
    birth_index: np.ndarray | None = None
    death_index: np.ndarray | None = None
    filtration: Filtration | None = None

    @classmethod
    def from_pairs(cls, degree, pairs, essential_births=()) -> "PersistenceDiagram":
        finite = [(float(b), float(d)) for b, d in pairs]
        births = [b for b, _ in finite] + [float(b) for b in essential_births]
        deaths = [d for _, d in finite] + [np.inf] * len(tuple(essential_births))
        pd = cls(degree=int(degree),
                 births=np.asarray(births, dtype=np.float64),
                 deaths=np.asarray(deaths, dtype=np.float64))
        pd.sort()
        return pd

    def sort(self):
        order = np.lexsort((self.deaths, self.births))
        self.births = self.births[order]
        self.deaths = self.deaths[order]
        if self.birth_index is not None:
            self.birth_index = self.birth_index[order]
            self.death_index = self.death_index[order]

    def __len__(self):
        return len(self.births)

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return [(float(b), float(d)) for b, d in zip(self.births, self.deaths)]

    @property
    def finite_mask(self) -> np.ndarray:
        return np.isfinite(self.deaths)

    @property
    def finite_pairs(self) -> list[tuple[float, float]]:
        m = self.finite_mask
        return [(float(b), float(d))
                for b, d in zip(self.births[m], self.deaths[m])]

    @property
    def essential_births(self) -> list[float]:
        return [float(b) for b in self.births[~self.finite_mask]]

    def provenance(self, i: int):
        """(birth cell, death cell or None) for pair i."""
        if self.birth_index is None or self.filtration is None:
            raise ValueError("diagram carries no provenance")
        b = self.filtration.cell(int(self.birth_index[i]))
        di = int(self.death_index[i])
        return b, (self.filtration.cell(di) if di >= 0 else None)

    def scaled(self, transform) -> "PersistenceDiagram":
        """New diagram with transform applied to every finite value."""
        births = np.array([transform(b) for b in self.births])
        deaths = np.array([transform(d) if np.isfinite(d) else np.inf
                           for d in self.deaths])
        return PersistenceDiagram(self.degree, births, deaths,
                                  None if self.birth_index is None
                                  else self.birth_index.copy(),
                                  None if self.death_index is None
                                  else self.death_index.copy(),
                                  self.filtration)


@dataclass
class PersistencePairing:
    """Raw output of the reduction, including zero-persistence pairs.

    reduced[j] is the reduced column of each death cell j (the cycle that
    dies when j enters). chains[i], present when the reduction ran with
    with_v=True, is the chain whose boundary is the reduced column, keyed by
    column; for positive columns it is the created cycle itself.
    """

    filtration: Filtration
    pairs: list[tuple[int, int]]
    essential: list[int]
    reduced: dict[int, list[int]]
    pivot_of: np.ndarray
    chains: dict[int, list[int]] | None = None

    def degree_of_pair(self, pair) -> int:
        return int(self.filtration.dims[pair[0]])


def _xor_merge(a: list[int], b: list[int]) -> list[int]:
    """Symmetric difference of two sorted int lists."""
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x < y:
            out.append(x)
            i += 1
        elif y < x:
            out.append(y)
            j += 1
        else:
            i += 1
            j += 1
    if i < na:
        out.extend(a[i:])
    if j < nb:
        out.extend(b[j:])
    return out


def _reduce_columns(indptr, indices, dims, *, twist=True, with_v=False):
    n = len(dims)
    max_dim = int(dims.max(initial=0)) if n else 0
    pivot_of = np.full(n, -1, dtype=np.int64)
    cleared = np.zeros(n, dtype=bool)
    reduced: dict[int, list[int]] = {}
    chains: dict[int, list[int]] | None = {} if with_v else None
    pairs: list[tuple[int, int]] = []

    for d in range(max_dim, 0, -1):
        for j in np.flatnonzero(dims == d):
            j = int(j)
            if twist and cleared[j]:
                continue
            col = indices[indptr[j]:indptr[j + 1]].tolist()
            vj = [j] if with_v else None
            while col:
                low = col[-1]
                k = int(pivot_of[low])
                if k < 0:
                    break
                col = _xor_merge(col, reduced[k])
                if with_v:
                    vj = _xor_merge(vj, chains[k])
            if col:
                low = col[-1]
                pivot_of[low] = j
                cleared[low] = True
                reduced[j] = col
                pairs.append((low, j))
            if with_v:
                chains[j] = vj

    paired = np.zeros(n, dtype=bool)
    for i, j in pairs:
        paired[i] = True
        paired[j] = True
    essential = [int(i) for i in np.flatnonzero(~paired)]
    pairs.sort()
    return pairs, essential, reduced, pivot_of, chains


def compute_persistence(filtration: Filtration, *, with_v: bool = False,
                        twist: bool = True):
    """Reduce the filtration's boundary matrix.

    Returns (pairing, diagrams) where diagrams is a list indexed by degree
    0..max cell dimension. Pass with_v=True to record the chain columns
    needed for essential-cycle extraction.
    """
    bm = filtration.boundary_matrix()
    pairs, essential, reduced, pivot_of, chains = _reduce_columns(
        bm.indptr, bm.indices, filtration.dims, twist=twist, with_v=with_v)
    pairing = PersistencePairing(filtration=filtration, pairs=pairs,
                                 essential=essential, reduced=reduced,
                                 pivot_of=pivot_of, chains=chains)
    diagrams = _diagrams_from_pairing(pairing)
    return pairing, diagrams


def _diagrams_from_pairing(pairing: PersistencePairing) -> list[PersistenceDiagram]:
    f = pairing.filtration
    if not len(f):
        return []
    max_dim = f.max_dim
    by_degree: dict[int, list[tuple[float, float, int, int]]] = {
        d: [] for d in range(max_dim + 1)}
    vals = f.values
    for i, j in pairing.pairs:
        b, d = float(vals[i]), float(vals[j])
        if b == d:
            continue
        by_degree[int(f.dims[i])].append((b, d, i, j))
    for i in pairing.essential:
        by_degree[int(f.dims[i])].append((float(vals[i]), np.inf, i, -1))

    out = []
    for deg in range(max_dim + 1):
        entries = by_degree[deg]
        pd = PersistenceDiagram(
            degree=deg,
            births=np.array([e[0] for e in entries], dtype=np.float64),
            deaths=np.array([e[1] for e in entries], dtype=np.float64),
            birth_index=np.array([e[2] for e in entries], dtype=np.int64),
            death_index=np.array([e[3] for e in entries], dtype=np.int64),
            filtration=f)
        pd.sort()
        out.append(pd)
    return out


def betti_numbers(obj, prefix: int | None = None) -> list[int]:
    """Betti numbers over Z/2, one entry per dimension 0..max cell dim.

    Accepts a SimplicialComplex or a Filtration; pass prefix to restrict a
    filtration to its first `prefix` cells (which are always face-closed).
    """
    if isinstance(obj, SimplicialComplex):
        cells = sorted(obj.cells, key=lambda s: (s.dimension, tuple(s)))
        filt = _assemble(
            "simplicial",
            _group_tables(cells),
            {d: np.zeros(cnt) for d, cnt in _group_counts(cells).items()})
        return betti_numbers(filt)

    filtration: Filtration = obj
    n = len(filtration) if prefix is None else int(prefix)
    if not 0 <= n <= len(filtration):
        raise ValueError(f"prefix {n} out of range")
    if n == 0:
        return []
    bm = filtration.boundary_matrix()
    dims = filtration.dims[:n]
    max_dim = int(dims.max(initial=0))
    ranks = np.zeros(max_dim + 2, dtype=np.int64)
    counts = np.zeros(max_dim + 2, dtype=np.int64)
    bases = [EchelonBasis() for _ in range(max_dim + 2)]
    for j in range(n):
        d = int(dims[j])
        counts[d] += 1
        col = bm.indices[bm.indptr[j]:bm.indptr[j + 1]]
        if len(col) and bases[d].insert(column_bitmask(col)):
            ranks[d] += 1
    out = []
    for d in range(max_dim + 1):
        nullity = counts[d] - ranks[d]
        out.append(int(nullity - ranks[d + 1]))
    return out


def _group_tables(cells):
    tabs: dict[int, list] = {}
    for c in cells:
        tabs.setdefault(c.dimension, []).append(tuple(c))
    return {d: np.array(rows, dtype=np.int64) for d, rows in tabs.items()}


def _group_counts(cells):
    counts: dict[int, int] = {}
    for c in cells:
        counts[c.dimension] = counts.get(c.dimension, 0) + 1
    return counts


@dataclass
class RepresentativeCycle:
    """A cycle whose class is born at the pair's birth value."""

    degree: int
    birth_index: int
    death_index: int | None
    cell_indices: list[int]
    filtration: Filtration
    tightened: bool = False
    homologous_to_original: bool | None = None

    @property
    def cells(self) -> list:
        return [self.filtration.cell(i) for i in self.cell_indices]

    def __len__(self):
        return len(self.cell_indices)


def representative_cycle(pairing: PersistencePairing, pair,
                         allow_essential: bool = False) -> RepresentativeCycle:
    """Cycle representing the class of a pair from the pairing.

    For a finite pair the reduced death column is returned: a cycle made of
    cells no later than the birth, with the birth cell itself included. For
    degree 0 the convention is the single birth vertex. Essential classes
    need allow_essential and a pairing computed with with_v=True (degree 0
    essentials work without).
    """
    f = pairing.filtration
    if isinstance(pair, (int, np.integer)):
        pair = (int(pair), None)
    birth, death = int(pair[0]), pair[1]
    degree = int(f.dims[birth])

    if death is None or death < 0:
        if birth not in set(pairing.essential):
            raise ValueError(f"cell {birth} is not essential in this pairing")
        if not allow_essential:
            raise EssentialPair(
                f"class born at index {birth} never dies; "
                "pass allow_essential=True for its cycle")
        if degree == 0:
            return RepresentativeCycle(0, birth, None, [birth], f)
        if pairing.chains is None:
            raise EssentialPair(
                "essential cycles above degree 0 need a pairing computed "
                "with with_v=True")
        return RepresentativeCycle(degree, birth, None,
                                   sorted(pairing.chains[birth]), f)

    death = int(death)
    if pairing.pivot_of[birth] != death:
        raise ValueError(f"({birth}, {death}) is not a pair of this pairing")
    if degree == 0:
        return RepresentativeCycle(0, birth, death, [birth], f)
    return RepresentativeCycle(degree, birth, death,
                               list(pairing.reduced[death]), f)


def tighten_cycle_1d(pairing: PersistencePairing,
                     cycle: RepresentativeCycle) -> RepresentativeCycle:
    """Shortest cycle through the birth edge inside the birth-time complex.

    Runs a breadth-first search between the endpoints of the birth edge over
    all edges present at the birth, excluding the birth edge itself. Sets
    homologous_to_original by reducing the symmetric difference of the two
    cycles against the recorded death columns of the birth prefix.
    """
    if cycle.degree != 1:
        raise NotDegreeOne(f"cycle has degree {cycle.degree}")
    f = pairing.filtration
    birth = cycle.birth_index
    bm = f.boundary_matrix()
    u, v = (int(x) for x in bm.indices[bm.indptr[birth]:bm.indptr[birth + 1]])

    # adjacency over edges in the birth prefix (positions <= birth)
    adj: dict[int, list[tuple[int, int]]] = {}
    edge_positions = np.flatnonzero(f.dims[:birth + 1] == 1)
    for e in edge_positions:
        e = int(e)
        if e == birth:
            continue
        a, b = (int(x) for x in bm.indices[bm.indptr[e]:bm.indptr[e + 1]])
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    for nbrs in adj.values():
        nbrs.sort()

    prev: dict[int, tuple[int, int]] = {u: (-1, -1)}
    frontier = [u]
    while frontier and v not in prev:
        nxt = []
        for a in frontier:
            for b, e in adj.get(a, ()):
                if b not in prev:
                    prev[b] = (a, e)
                    nxt.append(b)
        frontier = nxt
    if v not in prev:
        # birth edge is a bridge at birth time; cannot happen for a real
        # degree-1 birth, but keep the original cycle rather than fail
        return RepresentativeCycle(1, birth, cycle.death_index,
                                   list(cycle.cell_indices), f, tightened=True,
                                   homologous_to_original=True)

    path_edges = [birth]
    node = v
    while node != u:
        node, e = prev[node]
        path_edges.append(e)
    tight = sorted(path_edges)

    diff = sorted(set(tight) ^ set(cycle.cell_indices))
    homologous = _is_boundary_in_prefix(pairing, diff, birth)
    return RepresentativeCycle(1, birth, cycle.death_index, tight, f,
                               tightened=True,
                               homologous_to_original=homologous)


def _is_boundary_in_prefix(pairing: PersistencePairing, chain: list[int],
                           prefix_index: int) -> bool:
    """Whether the 1-chain is a boundary using 2-cells at or before the index."""
    z = list(chain)
    while z:
        low = z[-1]
        k = int(pairing.pivot_of[low])
        if k < 0 or k > prefix_index:
            return False
        z = _xor_merge(z, pairing.reduced[k])
    return True
