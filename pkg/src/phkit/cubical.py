"""Cubical sublevel filtrations from bitmaps, plus the signed distance map.

Voxels are the top-dimensional cubes and carry their own gray value; every
lower cube gets the minimum over the voxels containing it, so the prefix
at level t covers exactly the voxels with value <= t. Binary bitmaps are
turned into gray ones by the signed Euclidean distance transform: negative
inside the object, positive outside, growing the object from its core.
"""

from __future__ import annotations

from itertools import product

import numpy as np
from scipy import ndimage

from .complexes import Filtration, _assemble
from .errors import UniformBitmap


class Bitmap:
    """A rank >= 1 array of voxel values, grayscale or boolean."""

    def __init__(self, values):
        arr = np.asarray(values)
        if arr.ndim < 1 or arr.size == 0:
            raise ValueError("bitmap must have rank >= 1 and be non-empty")
        self.binary = arr.dtype == bool
        if not self.binary:
            arr = np.ascontiguousarray(arr, dtype=np.float64)
            if not np.isfinite(arr).all():
                raise ValueError("bitmap values must be finite")
        self.values = arr

    @property
    def shape(self):
        return self.values.shape

    def __repr__(self):
        kind = "binary" if self.binary else "grayscale"
        return f"Bitmap(shape={self.shape}, {kind})"


def _min_pool(arr: np.ndarray, axis: int) -> np.ndarray:
    """Min over each adjacent voxel pair along axis, edges clamped.

    Output is one longer along the axis: entry a is the minimum of the
    voxels at a-1 and a, clipped to the array.
    """
    width = [(0, 0)] * arr.ndim
    width[axis] = (1, 0)
    lo = np.pad(arr, width, mode="edge")
    width[axis] = (0, 1)
    hi = np.pad(arr, width, mode="edge")
    return np.minimum(lo, hi)


def cubical_filtration(bitmap) -> Filtration:
    """Sublevel filtration of a grayscale bitmap (voxels = top cubes)."""
    if not isinstance(bitmap, Bitmap):
        bitmap = Bitmap(bitmap)
    vals = bitmap.values.astype(np.float64)
    k = vals.ndim
    shape = vals.shape
    tables: dict[int, list] = {}
    values: dict[int, list] = {}
    for extent in product((1, 0), repeat=k):
        arr = vals
        for axis in range(k):
            if extent[axis] == 0:
                arr = _min_pool(arr, axis)
        d = sum(extent)
        anchors = np.indices(arr.shape).reshape(k, -1).T
        ext = np.tile(np.array(extent, dtype=np.int64), (len(anchors), 1))
        tables.setdefault(d, []).append(np.hstack([anchors, ext]))
        values.setdefault(d, []).append(arr.ravel())
    merged_t = {d: np.concatenate(v) for d, v in tables.items()}
    merged_v = {d: np.concatenate(v) for d, v in values.items()}
    return _assemble("cubical", merged_t, merged_v, grid_shape=shape)


def distance_transform(bitmap, positive_inside: bool = False) -> Bitmap:
    """Signed exact Euclidean distance map of a binary bitmap.

    Foreground voxels get minus their distance to the nearest background
    voxel center, background voxels plus their distance to the nearest
    foreground; positive_inside flips the sign convention.
    """
    if not isinstance(bitmap, Bitmap):
        bitmap = Bitmap(bitmap)
    fg = bitmap.values.astype(bool)
    if fg.all() or not fg.any():
        raise UniformBitmap("bitmap has a single phase")
    inside = ndimage.distance_transform_edt(fg)
    outside = ndimage.distance_transform_edt(~fg)
    signed = outside - inside
    if positive_inside:
        signed = -signed
    return Bitmap(signed)
