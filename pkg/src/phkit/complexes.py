"""Cells, complexes, and filtrations.

A Filtration is the package's central structure: every builder (alpha,
clique, cubical) produces one and the persistence engine consumes one.
Cells are stored column-oriented in per-dimension integer tables so large
filtrations stay inside numpy; Simplex/Cube objects are materialized on
demand.

Ordering contract: cells are sorted by ascending filtration value, ties by
ascending dimension, remaining ties by lexicographic cell identity
(vertex tuple for simplices, anchor+extent tuple for cubes). Every prefix
of the resulting sequence is closed under faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingFace, MonotonicityViolation

# identity encoding falls back to hashing when base**width would overflow
_ENCODE_LIMIT = 1 << 62


class Simplex(tuple):
    """A simplex as a strictly increasing tuple of non-negative vertex ids."""

    __slots__ = ()

    def __new__(cls, vertices):
        vs = tuple(int(v) for v in vertices)
        if not vs:
            raise ValueError("a simplex needs at least one vertex")
        if any(b <= a for a, b in zip(vs, vs[1:])):
            ss = tuple(sorted(vs))
            if any(b == a for a, b in zip(ss, ss[1:])):
                raise ValueError(f"repeated vertex in simplex {vs}")
            vs = ss
        if vs[0] < 0:
            raise ValueError("vertex ids must be non-negative")
        return tuple.__new__(cls, vs)

    @property
    def dimension(self) -> int:
        return len(self) - 1

    @property
    def vertices(self) -> tuple:
        return tuple(self)

    def facets(self) -> list["Simplex"]:
        if len(self) == 1:
            return []
        return [Simplex(self[:i] + self[i + 1:]) for i in range(len(self))]

    def __repr__(self):
        return f"Simplex{tuple(self)!r}"


@dataclass(frozen=True)
class Cube:
    """An axis-aligned cube: integer anchor corner plus a 0/1 extent per axis.

    The cube spans [anchor_i, anchor_i + extent_i] along each axis; its
    dimension is the number of extent-1 axes.
    """

    anchor: tuple
    extent: tuple

    def __post_init__(self):
        object.__setattr__(self, "anchor", tuple(int(a) for a in self.anchor))
        object.__setattr__(self, "extent", tuple(int(e) for e in self.extent))
        if len(self.anchor) != len(self.extent):
            raise ValueError("anchor and extent lengths differ")
        if any(e not in (0, 1) for e in self.extent):
            raise ValueError("extent entries must be 0 or 1")
        if any(a < 0 for a in self.anchor):
            raise ValueError("anchor coordinates must be non-negative")

    @property
    def dimension(self) -> int:
        return sum(self.extent)

    def identity(self) -> tuple:
        return self.anchor + self.extent

    def facets(self) -> list["Cube"]:
        out = []
        for axis, e in enumerate(self.extent):
            if not e:
                continue
            ext = list(self.extent)
            ext[axis] = 0
            lo = list(self.anchor)
            hi = list(self.anchor)
            hi[axis] += 1
            out.append(Cube(tuple(lo), tuple(ext)))
            out.append(Cube(tuple(hi), tuple(ext)))
        return out

    def __repr__(self):
        return f"Cube(anchor={self.anchor}, extent={self.extent})"


def boundary(cell) -> set:
    """The set of codimension-1 faces of a simplex or cube."""
    return set(cell.facets())


class SimplicialComplex:
    """A finite simplicial complex with O(1) membership tests."""

    def __init__(self, cells):
        cs = frozenset(c if isinstance(c, Simplex) else Simplex(c) for c in cells)
        for c in cs:
            for f in c.facets():
                if f not in cs:
                    raise MissingFace(c, f)
        self._cells = cs

    @property
    def cells(self) -> frozenset:
        return self._cells

    @property
    def max_dim(self) -> int:
        return max((c.dimension for c in self._cells), default=-1)

    def __contains__(self, cell) -> bool:
        if not isinstance(cell, Simplex):
            try:
                cell = Simplex(cell)
            except (ValueError, TypeError):
                return False
        return cell in self._cells

    def __len__(self):
        return len(self._cells)

    def __iter__(self):
        return iter(self._cells)

    def counts_by_dim(self) -> list[int]:
        out = [0] * (self.max_dim + 1)
        for c in self._cells:
            out[c.dimension] += 1
        return out


def make_complex(cells) -> SimplicialComplex:
    """Close the given simplices under faces and return the complex."""
    closed = set()
    stack = [c if isinstance(c, Simplex) else Simplex(c) for c in cells]
    while stack:
        c = stack.pop()
        if c in closed:
            continue
        closed.add(c)
        stack.extend(c.facets())
    return SimplicialComplex(closed)


@dataclass
class BoundaryMatrix:
    """Sparse Z/2 boundary matrix in CSR-by-column form.

    Column j of the filtration holds the sorted filtration indices of the
    codimension-1 faces of cell j (empty for vertices / 0-cubes).
    """

    indptr: np.ndarray
    indices: np.ndarray

    def __len__(self):
        return len(self.indptr) - 1

    def column(self, j: int) -> np.ndarray:
        return self.indices[self.indptr[j]:self.indptr[j + 1]]


class Filtration:
    """Cells of a complex in filtration order with their values.

    Construct via make_filtration or one of the builders; the constructor
    arguments are the already-sorted internal tables.
    """

    def __init__(self, kind, dims, values, tables, rows, *, grid_shape=None,
                 info=None, boundary_matrix=None):
        self.kind = kind
        self.dims = dims
        self.values = values
        self._tables = tables
        self._rows = rows
        self.grid_shape = grid_shape
        self.info = info or {}
        self._bm = boundary_matrix
        for a in (dims, values, rows):
            a.setflags(write=False)

    def __len__(self):
        return len(self.values)

    @property
    def max_dim(self) -> int:
        return int(self.dims.max(initial=0)) if len(self) else -1

    def value(self, i: int) -> float:
        return float(self.values[i])

    def cell(self, i: int):
        d = int(self.dims[i])
        row = self._tables[d][self._rows[i]]
        if self.kind == "simplicial":
            return Simplex(row)
        k = len(self.grid_shape)
        return Cube(tuple(int(x) for x in row[:k]), tuple(int(x) for x in row[k:]))

    @property
    def cells(self) -> list:
        return [self.cell(i) for i in range(len(self))]

    def boundary_matrix(self) -> BoundaryMatrix:
        if self._bm is None:
            self._bm = _build_boundary(self.kind, self.dims, self._tables,
                                       self._rows, self.grid_shape)
        return self._bm

    def prefix_length(self, value: float) -> int:
        """Number of cells with filtration value <= value."""
        return int(np.searchsorted(self.values, value, side="right"))

    def __repr__(self):
        return (f"Filtration(kind={self.kind!r}, cells={len(self)}, "
                f"max_dim={self.max_dim})")


def _encode_rows(tab: np.ndarray, base: int):
    """Map each row to a single int64 key preserving lexicographic order.

    Returns None when the key range would overflow, in which case callers
    fall back to hashing tuples.
    """
    width = tab.shape[1]
    if width == 0 or base <= 0:
        return np.zeros(len(tab), dtype=np.int64)
    if base ** width >= _ENCODE_LIMIT:
        return None
    enc = np.zeros(len(tab), dtype=np.int64)
    for c in range(width):
        enc = enc * base + tab[:, c].astype(np.int64)
    return enc


def _lookup_rows(needles: np.ndarray, haystack: np.ndarray, base: int):
    """Row index in haystack for each row of needles, -1 where absent."""
    enc_h = _encode_rows(haystack, base)
    if enc_h is not None:
        enc_n = _encode_rows(needles, base)
        order = np.argsort(enc_h, kind="stable")
        sorted_h = enc_h[order]
        pos = np.searchsorted(sorted_h, enc_n)
        pos_clip = np.minimum(pos, len(sorted_h) - 1) if len(sorted_h) else pos
        found = np.zeros(len(needles), dtype=bool)
        if len(sorted_h):
            found = sorted_h[pos_clip] == enc_n
        out = np.full(len(needles), -1, dtype=np.int64)
        out[found] = order[pos_clip[found]]
        return out
    table = {tuple(r): i for i, r in enumerate(haystack.tolist())}
    out = np.array([table.get(tuple(r), -1) for r in needles.tolist()],
                   dtype=np.int64)
    return out


def _build_boundary(kind, dims, tables, rows, grid_shape) -> BoundaryMatrix:
    n = len(dims)
    if kind == "simplicial":
        counts = np.where(dims >= 1, dims.astype(np.int64) + 1, 0)
    else:
        counts = 2 * dims.astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(int(indptr[-1]), dtype=np.int64)

    max_dim = int(dims.max(initial=0)) if n else -1
    positions = {d: np.flatnonzero(dims == d) for d in range(max_dim + 1)}
    if kind == "simplicial":
        base = 0
        for d, t in tables.items():
            if len(t):
                base = max(base, int(t.max()) + 1)
    else:
        base = 0

    for d in range(1, max_dim + 1):
        pos_d = positions[d]
        if not len(pos_d):
            continue
        tab = tables[d]
        target = tables.get(d - 1)
        pos_t = positions.get(d - 1, np.empty(0, dtype=np.int64))
        if target is None or not len(target):
            i = int(pos_d[0])
            _raise_missing(kind, tab[0], d, grid_shape, i, tables)
        if kind == "simplicial":
            facet_blocks = [np.delete(tab, i, axis=1) for i in range(d + 1)]
        else:
            # collapse each extended axis to its two ends; slots stay grouped
            # per cell so the lookup reshapes to (cells, 2d)
            k = len(grid_shape)
            ext = tab[:, k:]
            rows_f, axes_f = np.nonzero(ext)
            ordinal = np.arange(len(rows_f)) - rows_f * d
            flat = np.repeat(tab, 2 * d, axis=0)
            slot_lo = rows_f * 2 * d + 2 * ordinal
            slot_hi = slot_lo + 1
            flat[slot_lo, k + axes_f] = 0
            flat[slot_hi, k + axes_f] = 0
            flat[slot_hi, axes_f] += 1
            cube_facets = flat

        if kind == "simplicial":
            m = len(tab)
            all_facets = np.concatenate(facet_blocks, axis=0)
            found = _lookup_rows(all_facets, target, base)
            if (found < 0).any():
                bad = int(np.flatnonzero(found < 0)[0])
                cell_row = bad % m
                _raise_missing(kind, tab[cell_row], d, grid_shape,
                               int(pos_d[cell_row]), tables)
            fpos = pos_t[found].reshape(d + 1, m).T
        else:
            found = _lookup_rows(cube_facets, target, _cube_base(grid_shape))
            if (found < 0).any():
                bad = int(np.flatnonzero(found < 0)[0])
                cell_row = bad // (2 * d)
                _raise_missing(kind, tab[cell_row], d, grid_shape,
                               int(pos_d[cell_row]), tables)
            fpos = pos_t[found].reshape(len(tab), 2 * d)
        fpos = np.sort(fpos, axis=1)
        slots = indptr[pos_d][:, None] + np.arange(fpos.shape[1])[None, :]
        indices[slots.ravel()] = fpos.ravel()

    return BoundaryMatrix(indptr=indptr, indices=indices)


def _cube_base(grid_shape) -> int:
    # identity columns are anchors (bounded by shape) then 0/1 extents
    return max(int(s) + 2 for s in grid_shape)


def _raise_missing(kind, row, d, grid_shape, position, tables):
    if kind == "simplicial":
        cell = Simplex(row)
        missing = None
        have = {tuple(r) for r in tables.get(d - 1, np.empty((0, d))).tolist()}
        for f in cell.facets():
            if tuple(f) not in have:
                missing = f
                break
        raise MissingFace(cell, missing)
    k = len(grid_shape)
    cell = Cube(tuple(int(x) for x in row[:k]), tuple(int(x) for x in row[k:]))
    have = {tuple(r) for r in tables.get(d - 1, np.empty((0, 2 * k))).tolist()}
    for f in cell.facets():
        if f.identity() not in have:
            raise MissingFace(cell, f)
    raise MissingFace(cell, None)


def _assemble(kind, tables_by_dim, values_by_dim, *, grid_shape=None,
              info=None, check=True) -> Filtration:
    """Sort cells into filtration order, build the boundary matrix, validate.

    tables_by_dim[d] is an integer identity table (one row per cell of
    dimension d); values_by_dim[d] the matching filtration values.
    """
    dims_parts, vals_parts, rank_parts, src = [], [], [], []
    clean_tables = {}
    for d in sorted(tables_by_dim):
        tab = np.asarray(tables_by_dim[d])
        if tab.ndim != 2:
            tab = tab.reshape(len(tab), -1)
        tab = np.ascontiguousarray(tab, dtype=np.int64)
        vals = np.asarray(values_by_dim[d], dtype=np.float64)
        if len(tab) == 0:
            continue
        perm = np.lexsort(tab.T[::-1])
        ordered = tab[perm]
        if len(ordered) > 1 and (np.diff(ordered, axis=0) == 0).all(axis=1).any():
            dup = int(np.flatnonzero((np.diff(ordered, axis=0) == 0).all(axis=1))[0])
            raise ValueError(f"duplicate cell with identity {tuple(ordered[dup])}")
        rank = np.empty(len(tab), dtype=np.int64)
        rank[perm] = np.arange(len(tab))
        clean_tables[d] = tab
        dims_parts.append(np.full(len(tab), d, dtype=np.int16))
        vals_parts.append(vals)
        rank_parts.append(rank)
        src.append((d, np.arange(len(tab))))

    if not dims_parts:
        empty = BoundaryMatrix(np.zeros(1, dtype=np.int64),
                               np.empty(0, dtype=np.int64))
        return Filtration(kind, np.empty(0, dtype=np.int16),
                          np.empty(0, dtype=np.float64), {},
                          np.empty(0, dtype=np.int64), grid_shape=grid_shape,
                          info=info, boundary_matrix=empty)

    dims_all = np.concatenate(dims_parts)
    vals_all = np.concatenate(vals_parts)
    rank_all = np.concatenate(rank_parts)
    src_dim = np.concatenate([np.full(len(r), d, dtype=np.int16) for d, r in src])
    src_row = np.concatenate([r for _, r in src])
    if not np.isfinite(vals_all).all():
        raise ValueError("filtration values must be finite")

    g = np.lexsort((rank_all, dims_all, vals_all))
    dims_sorted = dims_all[g]
    vals_sorted = vals_all[g]
    final_tables = {}
    rows = np.empty(len(g), dtype=np.int64)
    for d in clean_tables:
        sel = dims_sorted == d
        order_rows = src_row[g[sel]]
        final_tables[d] = clean_tables[d][order_rows]
        rows[sel] = np.arange(int(sel.sum()))

    filt = Filtration(kind, dims_sorted, vals_sorted, final_tables, rows,
                      grid_shape=grid_shape, info=info)
    bm = filt.boundary_matrix()
    if check:
        _check_monotone(filt, bm)
    return filt


def _check_monotone(filt: Filtration, bm: BoundaryMatrix):
    n = len(filt)
    if not n:
        return
    col_of = np.repeat(np.arange(n), np.diff(bm.indptr))
    face_vals = filt.values[bm.indices]
    cell_vals = filt.values[col_of]
    bad = face_vals > cell_vals
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        j = int(col_of[k])
        i = int(bm.indices[k])
        raise MonotonicityViolation(filt.cell(j), filt.cell(i),
                                    filt.value(j), filt.value(i))
    # prefix closure: faces must precede their cofaces
    if (bm.indices >= col_of).any():
        k = int(np.flatnonzero(bm.indices >= col_of)[0])
        raise AssertionError(
            f"ordering bug: face {int(bm.indices[k])} not before cell {int(col_of[k])}")


def make_filtration(weighted_cells, kind=None) -> Filtration:
    """Build a filtration from (cell, value) pairs.

    Cells may be Simplex instances, vertex-id tuples, or Cube instances
    (not mixed). Raises MissingFace when a face is absent and
    MonotonicityViolation when a face carries a larger value than a coface.
    """
    items = list(weighted_cells)
    if not items:
        return _assemble("simplicial", {}, {})
    first = items[0][0]
    if kind is None:
        kind = "cubical" if isinstance(first, Cube) else "simplicial"

    tables: dict[int, list] = {}
    values: dict[int, list] = {}
    if kind == "simplicial":
        for cell, v in items:
            s = cell if isinstance(cell, Simplex) else Simplex(cell)
            tables.setdefault(s.dimension, []).append(tuple(s))
            values.setdefault(s.dimension, []).append(float(v))
        tabs = {d: np.array(rows_, dtype=np.int64) for d, rows_ in tables.items()}
        return _assemble(kind, tabs, values)

    k = len(first.anchor)
    shape = [0] * k
    for cell, v in items:
        if not isinstance(cell, Cube):
            raise TypeError("cubical filtrations take Cube cells")
        if len(cell.anchor) != k:
            raise ValueError("mixed cube ranks")
        for a in range(k):
            shape[a] = max(shape[a], cell.anchor[a] + cell.extent[a])
        tables.setdefault(cell.dimension, []).append(cell.identity())
        values.setdefault(cell.dimension, []).append(float(v))
    tabs = {d: np.array(rows_, dtype=np.int64) for d, rows_ in tables.items()}
    return _assemble(kind, tabs, values, grid_shape=tuple(shape))
