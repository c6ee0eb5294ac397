"""Text and binary readers, plus the diagram file format.

Diagram files are single JSON documents with a version field, per-degree
finite pairs and essential births, optional cell provenance, and the
metadata needed to redo the computation (input path, kind, parameters).
Floats survive a write/read round trip bit-exactly via repr formatting.
"""

from __future__ import annotations

import json

import numpy as np

from .alpha import PointCloud
from .combinatorial import DistanceMatrix
from .cubical import Bitmap
from .errors import ParseError
from .persistence import PersistenceDiagram

DIAGRAM_FORMAT = "phkit-diagram"
DIAGRAM_VERSION = 1


def _tokenized_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            body = raw.split("#", 1)[0].strip()
            if not body:
                continue
            yield lineno, body.split()


def read_point_cloud(path, weighted: bool = False) -> PointCloud:
    """Whitespace-separated coordinates, one point per line.

    '#' starts a comment, blank lines are skipped; with weighted=True the
    last column is the point's weight.
    """
    rows = []
    weights = []
    width = None
    for lineno, tokens in _tokenized_lines(path):
        try:
            vals = [float(t) for t in tokens]
        except ValueError:
            bad = next(t for t in tokens if not _is_float(t))
            raise ParseError(lineno, f"bad number {bad!r}") from None
        if width is None:
            width = len(vals)
            min_cols = 3 if weighted else 2
            if not min_cols <= width <= min_cols + 1:
                raise ParseError(lineno,
                                 f"expected {min_cols} or {min_cols + 1} "
                                 f"columns, found {width}")
        elif len(vals) != width:
            raise ParseError(lineno,
                             f"expected {width} columns, found {len(vals)}")
        if weighted:
            rows.append(vals[:-1])
            weights.append(vals[-1])
        else:
            rows.append(vals)
    if not rows:
        raise ParseError(0, "no points in file")
    pts = np.array(rows)
    try:
        return PointCloud(pts, np.array(weights) if weighted else None)
    except ValueError as exc:
        raise ParseError(0, str(exc)) from None


def _is_float(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def read_distance_matrix(path) -> DistanceMatrix:
    """CSV matrix, n rows by n columns of decimal floats."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            body = raw.strip()
            if not body:
                continue
            cells = [c.strip() for c in body.split(",")]
            vals = []
            for c in cells:
                if not _is_float(c):
                    raise ParseError(lineno, f"bad number {c!r}")
                vals.append(float(c))
            rows.append((lineno, vals))
    if not rows:
        raise ParseError(0, "empty matrix file")
    n = len(rows[0][1])
    for lineno, vals in rows:
        if len(vals) != n:
            raise ParseError(lineno,
                             f"expected {n} columns, found {len(vals)}")
    if len(rows) != n:
        raise ParseError(rows[-1][0],
                         f"expected {n} rows, found {len(rows)}")
    try:
        return DistanceMatrix(np.array([vals for _, vals in rows]))
    except ValueError as exc:
        raise ParseError(0, str(exc)) from None


def _read_pgm(data: bytes, path) -> Bitmap:
    # header tokens may be separated by whitespace and '#' comments
    tokens = []
    pos = 0
    while len(tokens) < 4 and pos < len(data):
        ch = data[pos:pos + 1]
        if ch == b"#":
            pos = data.find(b"\n", pos)
            if pos < 0:
                break
            continue
        if ch.isspace():
            pos += 1
            continue
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if len(tokens) < 4:
        raise ParseError(1, "truncated PGM header")
    magic = tokens[0].decode("ascii", "replace")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise ParseError(1, "bad PGM header") from None
    if width <= 0 or height <= 0 or maxval <= 0:
        raise ParseError(1, "bad PGM dimensions")
    count = width * height
    if magic == "P2":
        body = data[pos:].split()
        if len(body) != count:
            raise ParseError(1, f"expected {count} pixels, "
                             f"found {len(body)}")
        try:
            vals = np.array([int(t) for t in body], dtype=np.float64)
        except ValueError:
            raise ParseError(1, "bad pixel value") from None
    else:
        pos += 1  # single whitespace after maxval
        wide = maxval > 255
        need = count * (2 if wide else 1)
        raw = data[pos:pos + need]
        if len(raw) != need:
            raise ParseError(1, f"expected {need} pixel bytes, "
                             f"found {len(raw)}")
        dtype = ">u2" if wide else np.uint8
        vals = np.frombuffer(raw, dtype=dtype).astype(np.float64)
    return Bitmap(vals.reshape(height, width))


def _read_ndbitmap(path) -> Bitmap:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "NDBITMAP v1":
        raise ParseError(1, "missing NDBITMAP v1 magic")
    body = [(i + 1, ln.strip()) for i, ln in enumerate(lines)
            if ln.strip() and i > 0]
    if len(body) < 2:
        raise ParseError(len(lines), "truncated bitmap")
    try:
        rank = int(body[0][1])
    except ValueError:
        raise ParseError(body[0][0], "bad rank") from None
    ext_line, ext_text = body[1]
    try:
        extents = [int(t) for t in ext_text.split()]
    except ValueError:
        raise ParseError(ext_line, "bad extents") from None
    if len(extents) != rank or any(e <= 0 for e in extents):
        raise ParseError(ext_line, f"expected {rank} positive extents")
    tokens = []
    for lineno, text in body[2:]:
        for t in text.split():
            if not _is_float(t):
                raise ParseError(lineno, f"bad number {t!r}")
            tokens.append(float(t))
    count = int(np.prod(extents))
    if len(tokens) != count:
        raise ParseError(len(lines),
                         f"expected {count} values, found {len(tokens)}")
    return Bitmap(np.array(tokens).reshape(extents))


def read_bitmap(path) -> Bitmap:
    """PGM (P2/P5) or NDBITMAP v1, chosen by the file's magic."""
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head in (b"P2", b"P5"):
        with open(path, "rb") as fh:
            return _read_pgm(fh.read(), path)
    return _read_ndbitmap(path)


def _cell_payload(cell) -> list:
    if hasattr(cell, "vertices"):
        return [int(v) for v in cell.vertices]
    return [list(cell.anchor), list(cell.extent)]


def write_diagram_file(path, diagrams, *, kind, squared, input_path,
                       params=None, with_provenance=True):
    """Serialize diagrams (optionally with birth/death cells) as JSON."""
    degrees = {}
    for pd in diagrams:
        pd.sort()
        finite = pd.finite_mask
        entry = {
            "pairs": [[float(b), float(d)] for b, d
                      in zip(pd.births[finite], pd.deaths[finite])],
            "essential": [float(b) for b in pd.births[~finite]],
        }
        if with_provenance and pd.birth_index is not None \
                and pd.filtration is not None:
            prov = {"birth_cells": [], "death_cells": [],
                    "essential_cells": []}
            for i in np.flatnonzero(finite):
                b, d = pd.provenance(int(i))
                prov["birth_cells"].append(_cell_payload(b))
                prov["death_cells"].append(_cell_payload(d))
            for i in np.flatnonzero(~finite):
                b, _ = pd.provenance(int(i))
                prov["essential_cells"].append(_cell_payload(b))
            entry["provenance"] = prov
        degrees[str(pd.degree)] = entry
    doc = {
        "format": DIAGRAM_FORMAT,
        "version": DIAGRAM_VERSION,
        "metadata": {
            "kind": kind,
            "squared": bool(squared),
            "input": str(input_path),
            "params": params or {},
        },
        "degrees": degrees,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


class DiagramFile:
    """Parsed diagram document: diagrams plus computation metadata."""

    def __init__(self, doc: dict):
        if doc.get("format") != DIAGRAM_FORMAT:
            raise ParseError(0, "not a diagram file")
        if doc.get("version") != DIAGRAM_VERSION:
            raise ParseError(0, f"unsupported version {doc.get('version')!r}")
        self.metadata = doc.get("metadata", {})
        self.degrees = {}
        self.provenance = {}
        for key, entry in doc.get("degrees", {}).items():
            degree = int(key)
            pd = PersistenceDiagram.from_pairs(
                degree, entry.get("pairs", []), entry.get("essential", []))
            self.degrees[degree] = pd
            if "provenance" in entry:
                self.provenance[degree] = entry["provenance"]

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=-1)

    def diagram(self, degree: int) -> PersistenceDiagram:
        if degree in self.degrees:
            return self.degrees[degree]
        return PersistenceDiagram.from_pairs(degree, [], [])


def read_diagram_file(path) -> DiagramFile:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, exc.msg) from None
    return DiagramFile(doc)
