"""Dense symbol grids, prefix sums and the FC2D/FC3D file formats.

Grids are immutable: the backing numpy array is copied on construction and
marked read-only. Linearization is row-major for 2D (``cells[row, col]``) and
x-then-y-then-z for 3D (``cells[x, y, z]``, C order); every other module
relies on this.
"""

from __future__ import annotations

import os
from functools import cached_property
from typing import Union

import numpy as np

from .errors import GridFormatError, OutOfRangeError

PathLike = Union[str, "os.PathLike[str]"]

# Largest grid accepted from a file header.
MAX_CELLS = 1 << 32
_MAX_HEADER = 128


def _frozen(cells, ndim: int, q: int) -> np.ndarray:
    arr = np.asarray(cells)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}D array, got shape {arr.shape}")
    if q < 2:
        raise ValueError(f"alphabet size must be >= 2, got {q}")
    if arr.size and (arr.min() < 0 or arr.max() >= q):
        raise ValueError(f"cell values must lie in [0, {q - 1}]")
    arr = np.array(arr, dtype=np.uint8 if q <= 256 else np.int64, copy=True)
    arr.setflags(write=False)
    return arr


class PrefixSum2D:
    """Inclusive cumulative count of nonzero cells, padded with a zero row/column."""

    def __init__(self, cells: np.ndarray):
        rows, cols = cells.shape
        table = np.zeros((rows + 1, cols + 1), dtype=np.int64)
        table[1:, 1:] = (cells != 0).cumsum(0).cumsum(1)
        table.setflags(write=False)
        self.table = table
        self.rows = rows
        self.cols = cols

    def query(self, top: int, left: int, height: int, width: int) -> int:
        _check_window((top, left), (height, width), (self.rows, self.cols))
        t = self.table
        b, r = top + height, left + width
        return int(t[b, r] - t[top, r] - t[b, left] + t[top, left])

    def window_sums(self, height: int, width: int) -> np.ndarray:
        """Weights of every ``height x width`` window, indexed by its top-left cell."""
        if not (1 <= height <= self.rows and 1 <= width <= self.cols):
            raise OutOfRangeError(
                f"window {height}x{width} does not fit in {self.rows}x{self.cols}"
            )
        t = self.table
        return t[height:, width:] - t[:-height, width:] - t[height:, :-width] + t[:-height, :-width]


class PrefixSum3D:
    """3D analogue of :class:`PrefixSum2D`."""

    def __init__(self, cells: np.ndarray):
        shape = cells.shape
        table = np.zeros(tuple(s + 1 for s in shape), dtype=np.int64)
        table[1:, 1:, 1:] = (cells != 0).cumsum(0).cumsum(1).cumsum(2)
        table.setflags(write=False)
        self.table = table
        self.shape = shape

    def query(self, x: int, y: int, z: int, dx: int, dy: int, dz: int) -> int:
        _check_window((x, y, z), (dx, dy, dz), self.shape)
        t = self.table
        X, Y, Z = x + dx, y + dy, z + dz
        return int(
            t[X, Y, Z] - t[x, Y, Z] - t[X, y, Z] - t[X, Y, z]
            + t[x, y, Z] + t[x, Y, z] + t[X, y, z] - t[x, y, z]
        )

    def window_sums(self, dx: int, dy: int, dz: int) -> np.ndarray:
        for size, extent in zip((dx, dy, dz), self.shape):
            if not 1 <= size <= extent:
                raise OutOfRangeError(f"window {(dx, dy, dz)} does not fit in {self.shape}")
        t = self.table
        hi_x, lo_x = slice(dx, None), slice(None, -dx)
        hi_y, lo_y = slice(dy, None), slice(None, -dy)
        hi_z, lo_z = slice(dz, None), slice(None, -dz)
        return (
            t[hi_x, hi_y, hi_z] - t[lo_x, hi_y, hi_z] - t[hi_x, lo_y, hi_z] - t[hi_x, hi_y, lo_z]
            + t[lo_x, lo_y, hi_z] + t[lo_x, hi_y, lo_z] + t[hi_x, lo_y, lo_z] - t[lo_x, lo_y, lo_z]
        )


def _check_window(origin, size, bounds) -> None:
    for o, s, b in zip(origin, size, bounds):
        if s < 1 or o < 0 or o + s > b:
            raise OutOfRangeError(
                f"window at {tuple(origin)} of size {tuple(size)} exceeds bounds {tuple(bounds)}"
            )


class BitGrid2D:
    """An immutable ``rows x cols`` grid of symbols over ``[0, q-1]``."""

    def __init__(self, cells, q: int = 2):
        self.cells = _frozen(cells, 2, q)
        self.q = q

    @classmethod
    def zeros(cls, rows: int, cols: int, q: int = 2) -> "BitGrid2D":
        return cls(np.zeros((rows, cols), dtype=np.uint8), q)

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    @cached_property
    def prefix(self) -> PrefixSum2D:
        return PrefixSum2D(self.cells)

    def crop(self, top: int, left: int, height: int, width: int) -> "BitGrid2D":
        _check_window((top, left), (height, width), self.shape)
        return BitGrid2D(self.cells[top:top + height, left:left + width], self.q)

    def weight(self) -> int:
        return int(np.count_nonzero(self.cells))

    def __eq__(self, other):
        if not isinstance(other, BitGrid2D):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.q, self.cells.shape, self.cells.tobytes()))

    def __repr__(self):
        return f"BitGrid2D(rows={self.rows}, cols={self.cols}, q={self.q})"


class BitGrid3D:
    """An immutable ``dim_x x dim_y x dim_z`` grid of symbols over ``[0, q-1]``."""

    def __init__(self, cells, q: int = 2):
        self.cells = _frozen(cells, 3, q)
        self.q = q

    @classmethod
    def zeros(cls, dim_x: int, dim_y: int, dim_z: int, q: int = 2) -> "BitGrid3D":
        return cls(np.zeros((dim_x, dim_y, dim_z), dtype=np.uint8), q)

    @property
    def dim_x(self) -> int:
        return self.cells.shape[0]

    @property
    def dim_y(self) -> int:
        return self.cells.shape[1]

    @property
    def dim_z(self) -> int:
        return self.cells.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.cells.shape

    @cached_property
    def prefix(self) -> PrefixSum3D:
        return PrefixSum3D(self.cells)

    def crop(self, x: int, y: int, z: int, dx: int, dy: int, dz: int) -> "BitGrid3D":
        _check_window((x, y, z), (dx, dy, dz), self.shape)
        return BitGrid3D(self.cells[x:x + dx, y:y + dy, z:z + dz], self.q)

    def weight(self) -> int:
        return int(np.count_nonzero(self.cells))

    def __eq__(self, other):
        if not isinstance(other, BitGrid3D):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.q, self.cells.shape, self.cells.tobytes()))

    def __repr__(self):
        return f"BitGrid3D(dims={self.shape}, q={self.q})"


def crop2d(g: BitGrid2D, top: int, left: int, height: int, width: int) -> BitGrid2D:
    """Cut out a sub-grid; the result carries no record of where it came from."""
    return g.crop(top, left, height, width)


def crop3d(g: BitGrid3D, x: int, y: int, z: int, dx: int, dy: int, dz: int) -> BitGrid3D:
    return g.crop(x, y, z, dx, dy, dz)


def window_weight2d(p: PrefixSum2D, top: int, left: int, height: int, width: int) -> int:
    return p.query(top, left, height, width)


def window_weight3d(p: PrefixSum3D, x: int, y: int, z: int, dx: int, dy: int, dz: int) -> int:
    return p.query(x, y, z, dx, dy, dz)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def encode_grid(g: BitGrid2D | BitGrid3D) -> bytes:
    """Serialize to FC2D/FC3D bytes.

    q=2 payloads are bit-packed MSB-first along the innermost axis, each run
    padded to a byte boundary; larger alphabets use one byte per symbol.
    """
    if g.q > 256:
        raise GridFormatError(f"alphabet size {g.q} does not fit one byte per symbol")
    dims = " ".join(str(s) for s in g.shape)
    magic = "FC2D" if isinstance(g, BitGrid2D) else "FC3D"
    header = f"{magic} {g.q} {dims}\n".encode("ascii")
    if g.q == 2:
        payload = np.packbits(g.cells, axis=-1).tobytes()
    else:
        payload = g.cells.astype(np.uint8).tobytes()
    return header + payload


def payload_size(q: int, shape: tuple[int, ...]) -> int:
    inner = shape[-1]
    outer = int(np.prod(shape[:-1], dtype=object))
    if q == 2:
        return outer * ((inner + 7) // 8)
    return outer * inner


def decode_grid(data: bytes) -> BitGrid2D | BitGrid3D:
    newline = data.find(b"\n", 0, _MAX_HEADER)
    if newline < 0:
        raise GridFormatError("missing or overlong header line")
    try:
        fields = data[:newline].decode("ascii").split(" ")
    except UnicodeDecodeError as exc:
        raise GridFormatError("header is not ASCII") from exc
    magic = fields[0]
    expected = {"FC2D": 4, "FC3D": 5}.get(magic)
    if expected is None:
        raise GridFormatError(f"unknown magic {magic!r}")
    if len(fields) != expected:
        raise GridFormatError(f"{magic} header needs {expected - 1} fields, got {len(fields) - 1}")
    try:
        numbers = [int(f) for f in fields[1:]]
    except ValueError as exc:
        raise GridFormatError(f"non-integer header field in {fields[1:]}") from exc
    if any(not f.isdigit() for f in fields[1:]):
        raise GridFormatError(f"header fields must be plain decimal: {fields[1:]}")
    q, shape = numbers[0], tuple(numbers[1:])
    if not 2 <= q <= 256:
        raise GridFormatError(f"alphabet size {q} outside [2, 256]")
    if any(s == 0 for s in shape):
        raise GridFormatError(f"degenerate dimensions {shape}")
    if int(np.prod(shape, dtype=object)) > MAX_CELLS:
        raise GridFormatError(f"dimension overflow: {shape} exceeds {MAX_CELLS} cells")

    payload = data[newline + 1:]
    need = payload_size(q, shape)
    if len(payload) < need:
        raise GridFormatError(f"truncated payload: {len(payload)} of {need} bytes")
    if len(payload) > need:
        raise GridFormatError(f"{len(payload) - need} trailing bytes after payload")

    raw = np.frombuffer(payload, dtype=np.uint8)
    if q == 2:
        packed = raw.reshape(shape[:-1] + ((shape[-1] + 7) // 8,))
        cells = np.unpackbits(packed, axis=-1, count=shape[-1])
    else:
        cells = raw.reshape(shape)
        if cells.max() >= q:
            raise GridFormatError(f"symbol {int(cells.max())} out of range for q={q}")
    cls = BitGrid2D if magic == "FC2D" else BitGrid3D
    return cls(cells, q)


def write_grid(path: PathLike, g: BitGrid2D | BitGrid3D) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_grid(g))


def read_grid(path: PathLike) -> BitGrid2D | BitGrid3D:
    with open(path, "rb") as fh:
        return decode_grid(fh.read())
