"""Van der Corput and Halton-Hammersley point sets plus exact empty-region oracles.

All point sets live on integer cells: a point ``(x, y)`` occupies the unit
cell ``[x, x+1) x [y, y+1)`` and an empty rectangle is a half-open range of
cells containing no point. The oracles below are exhaustive and meant for
desk-scale verification, not production discrepancy computation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from .errors import OutOfRangeError, ParameterError

log = logging.getLogger(__name__)

MAX_RECT_SIDE = 256
MAX_BOX_CELLS = 1 << 20


def _is_power_of(value: int, base: int) -> bool:
    if value < 1:
        return False
    while value % base == 0:
        value //= base
    return value == 1


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def log2_exact(w: int) -> int:
    if not _is_power_of(w, 2):
        raise ParameterError("power-of-two", f"{w} is not a power of two")
    return w.bit_length() - 1


def bit_reverse(z: int, c: int) -> int:
    """Reverse the ``c``-bit binary representation of ``z``.

    >>> bit_reverse(13, 5)
    22
    """
    if c < 0 or not 0 <= z < (1 << c):
        raise OutOfRangeError(f"bit_reverse needs 0 <= z < 2**c, got z={z}, c={c}")
    out = 0
    for _ in range(c):
        out = (out << 1) | (z & 1)
        z >>= 1
    return out


def radical_inverse(z: int, p: int) -> Fraction:
    """Mirror the base-``p`` digits of ``z`` about the radix point, exactly."""
    if not _is_prime(p):
        raise ParameterError("prime-base", f"radical inverse base {p} is not prime")
    if z < 0:
        raise OutOfRangeError(f"radical inverse needs z >= 0, got {z}")
    num, den = 0, 1
    while z:
        z, digit = divmod(z, p)
        num = num * p + digit
        den *= p
    return Fraction(num, den)


@dataclass(frozen=True)
class PointSet2D:
    bound_w: int
    bound_h: int
    points: frozenset

    def __post_init__(self):
        pts = frozenset((int(x), int(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        for x, y in pts:
            if not (0 <= x < self.bound_w and 0 <= y < self.bound_h):
                raise OutOfRangeError(f"point {(x, y)} outside {self.bound_w}x{self.bound_h}")

    def __len__(self):
        return len(self.points)

    def __contains__(self, pt):
        return tuple(pt) in self.points

    def occupancy(self) -> np.ndarray:
        occ = np.zeros((self.bound_w, self.bound_h), dtype=bool)
        if self.points:
            xs, ys = zip(*self.points)
            occ[list(xs), list(ys)] = True
        return occ

    def to_text(self) -> str:
        lines = [f"# PointSet2D {self.bound_w} {self.bound_h}"]
        lines += [f"{x} {y}" for x, y in sorted(self.points)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PointSet2D":
        header, *rows = [ln for ln in text.splitlines() if ln.strip()]
        _, kind, w, h = header.split()
        if kind != "PointSet2D":
            raise ValueError(f"not a 2D point set: {header!r}")
        return cls(int(w), int(h), frozenset(tuple(map(int, r.split())) for r in rows))


@dataclass(frozen=True)
class PointSet3D:
    bound_x: int
    bound_y: int
    bound_z: int
    points: frozenset

    def __post_init__(self):
        pts = frozenset((int(x), int(y), int(z)) for x, y, z in self.points)
        object.__setattr__(self, "points", pts)
        for x, y, z in pts:
            if not (0 <= x < self.bound_x and 0 <= y < self.bound_y and 0 <= z < self.bound_z):
                raise OutOfRangeError(f"point {(x, y, z)} outside {self.bounds}")

    @property
    def bounds(self) -> tuple[int, int, int]:
        return (self.bound_x, self.bound_y, self.bound_z)

    def __len__(self):
        return len(self.points)

    def __contains__(self, pt):
        return tuple(pt) in self.points

    def occupancy(self) -> np.ndarray:
        occ = np.zeros(self.bounds, dtype=bool)
        if self.points:
            xs, ys, zs = zip(*self.points)
            occ[list(xs), list(ys), list(zs)] = True
        return occ

    def to_text(self) -> str:
        lines = [f"# PointSet3D {self.bound_x} {self.bound_y} {self.bound_z}"]
        lines += [f"{x} {y} {z}" for x, y, z in sorted(self.points)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PointSet3D":
        header, *rows = [ln for ln in text.splitlines() if ln.strip()]
        _, kind, bx, by, bz = header.split()
        if kind != "PointSet3D":
            raise ValueError(f"not a 3D point set: {header!r}")
        return cls(int(bx), int(by), int(bz),
                   frozenset(tuple(map(int, r.split())) for r in rows))


# ---------------------------------------------------------------------------
# Van der Corput family
# ---------------------------------------------------------------------------

def vdc_set(w: int) -> PointSet2D:
    """``{(k, bit_reverse(k)) : 0 <= k < w}`` inside the ``w x w`` box."""
    c = log2_exact(w)
    return PointSet2D(w, w, frozenset((k, bit_reverse(k, c)) for k in range(w)))


def _reduce_shift(shift: int, w: int, strict: bool, warn: bool, name: str) -> int:
    if 0 <= shift < w:
        return shift
    if strict:
        raise OutOfRangeError(f"{name} shift {shift} outside [0, {w - 1}]")
    if warn:
        log.warning("%s shift %d reduced modulo %d", name, shift, w)
    return shift % w


def vdc_shifted(w: int, i: int, j: int = 0, *, strict: bool = False,
                warn: bool = False) -> PointSet2D:
    """Cyclically shift the VDC set by ``i`` along y, then by ``j`` along x.

    Out-of-range shifts are reduced modulo ``w`` unless ``strict`` is set.
    """
    i = _reduce_shift(i, w, strict, warn, "y")
    j = _reduce_shift(j, w, strict, warn, "x")
    base = vdc_set(w)
    return PointSet2D(w, w, frozenset(((x + j) % w, (y + i) % w) for x, y in base.points))


def vdc_tiled(w: int, z: int, shift: int = 0) -> PointSet2D:
    """Tile ``(z/w)**2`` copies of the VDC set over ``z x z``, then shift y by ``shift`` mod z."""
    c = log2_exact(w)
    if z < w or z % w:
        raise ParameterError("tile-divisibility", f"tiled side {z} is not a multiple of {w}")
    if not 0 <= shift < w:
        raise OutOfRangeError(f"tiling shift {shift} outside [0, {w - 1}]")
    reps = z // w
    pts = frozenset(
        (k + tx * w, (bit_reverse(k, c) + ty * w + shift) % z)
        for k in range(w)
        for tx in range(reps)
        for ty in range(reps)
    )
    return PointSet2D(z, z, pts)


# ---------------------------------------------------------------------------
# Halton-Hammersley family
# ---------------------------------------------------------------------------

def _hh_coordinates(w1: int, w3: int, strict: bool) -> list[tuple[int, int, int]]:
    c = log2_exact(w1)
    if not _is_power_of(w3, 3):
        raise ParameterError("power-of-three", f"{w3} is not a power of three")
    pts = []
    for k in range(w1):
        scaled = w3 * radical_inverse(k, 3)
        if scaled.denominator != 1 and strict:
            raise ParameterError(
                "hh-integrality",
                f"w3={w3} too coarse for w1={w1}: point {k} scales to {scaled}",
            )
        pts.append((k, bit_reverse(k, c), scaled.numerator // scaled.denominator))
    return pts


def hh_set(w1: int, w3: int, *, strict: bool = False) -> PointSet3D:
    """Scaled Halton-Hammersley set ``{(k, w1*phi2(k), w3*phi3(k))}`` in ``w1 x w1 x w3``.

    The z coordinate is exact whenever ``w3 >= 3**ceil(log3(w1))``. For a
    coarser ``w3`` it is truncated to ``floor(w3*phi3(k))`` (the leading
    base-3 digits), or rejected when ``strict`` is set.
    """
    return PointSet3D(w1, w1, w3, frozenset(_hh_coordinates(w1, w3, strict)))


def hh_shifted(w1: int, w3: int, d1: int, d2: int, *, strict: bool = False) -> PointSet3D:
    if not 0 <= d1 < w1 or not 0 <= d2 < w3:
        raise OutOfRangeError(f"HH shift {(d1, d2)} outside [0,{w1 - 1}]x[0,{w3 - 1}]")
    pts = _hh_coordinates(w1, w3, strict)
    return PointSet3D(
        w1, w1, w3, frozenset((x, (y + d1) % w1, (z + d2) % w3) for x, y, z in pts)
    )


def hh_tiled(w1: int, w3: int, v1: int, v2: int, d1: int = 0, d2: int = 0,
             *, strict: bool = False) -> PointSet3D:
    """Tile the HH set over ``v1 x v1 x v2`` and cyclically shift (y, z) by (d1, d2)."""
    if v1 < w1 or v1 % w1 or v2 < w3 or v2 % w3:
        raise ParameterError(
            "tile-divisibility", f"box {v1}x{v1}x{v2} is not tiled by {w1}x{w1}x{w3}"
        )
    if not 0 <= d1 < w1 or not 0 <= d2 < w3:
        raise OutOfRangeError(f"HH shift {(d1, d2)} outside [0,{w1 - 1}]x[0,{w3 - 1}]")
    base = _hh_coordinates(w1, w3, strict)
    r1, r2 = v1 // w1, v2 // w3
    pts = frozenset(
        (x + tx * w1, (y + ty * w1 + d1) % v1, (z + tz * w3 + d2) % v2)
        for x, y, z in base
        for tx in range(r1)
        for ty in range(r1)
        for tz in range(r2)
    )
    return PointSet3D(v1, v1, v2, pts)


def union_covers(sets: Iterable[PointSet2D | PointSet3D]) -> tuple[bool, bool]:
    """Return ``(disjoint, covering)`` for a family of point sets sharing one box."""
    sets = list(sets)
    first = sets[0]
    bounds = (first.bound_w, first.bound_h) if isinstance(first, PointSet2D) else first.bounds
    total = sum(len(s) for s in sets)
    union = frozenset().union(*(s.points for s in sets))
    return total == len(union), len(union) == int(np.prod(bounds))


# ---------------------------------------------------------------------------
# Exhaustive empty-region oracles
# ---------------------------------------------------------------------------

class EmptyRect(NamedTuple):
    x: int
    y: int
    width: int
    height: int

    @property
    def area(self) -> int:
        return self.width * self.height


class EmptyBox(NamedTuple):
    x: int
    y: int
    z: int
    dx: int
    dy: int
    dz: int

    @property
    def volume(self) -> int:
        return self.dx * self.dy * self.dz


def largest_empty_rect(ps: PointSet2D) -> tuple[int, EmptyRect]:
    """Exact largest empty cell rectangle plus one witness.

    Every column range ``[x0, x1]`` is visited; its row occupancy is the OR of
    the columns (built incrementally, all ``x1`` at once), and the tallest
    empty row run ending at each row gives the best rectangle for that range.
    Cost is ``O(W^2 H)``.
    """
    W, H = ps.bound_w, ps.bound_h
    if W > MAX_RECT_SIDE or H > MAX_RECT_SIDE:
        raise ParameterError("oracle-limit", f"bounds {W}x{H} exceed {MAX_RECT_SIDE} per axis")
    occ = ps.occupancy()
    best_area, best = 0, EmptyRect(0, 0, 0, 0)
    for x0 in range(W):
        empty = ~np.logical_or.accumulate(occ[x0:], axis=0)  # (W - x0, H)
        widths = np.arange(1, W - x0 + 1)
        run = np.zeros(W - x0, dtype=np.int64)
        for y in range(H):
            run = (run + 1) * empty[:, y]
            areas = run * widths
            t = int(np.argmax(areas))
            if areas[t] > best_area:
                best_area = int(areas[t])
                best = EmptyRect(x0, y - int(run[t]) + 1, t + 1, int(run[t]))
    return best_area, best


def largest_empty_box(ps: PointSet3D) -> tuple[int, EmptyBox]:
    """Exact largest empty cell box plus one witness, via nested range enumeration.

    x ranges and y ranges are enumerated (vectorized over the far end of each
    range), and the longest empty z run closes each candidate. Cost is
    ``O(X^2 Y^2 Z)`` elementary operations.
    """
    X, Y, Z = ps.bounds
    if X * Y * Z > MAX_BOX_CELLS:
        raise ParameterError("oracle-limit", f"box {ps.bounds} exceeds {MAX_BOX_CELLS} cells")
    occ = ps.occupancy()
    best_vol, best = 0, EmptyBox(0, 0, 0, 0, 0, 0)
    for x0 in range(X):
        acc_x = np.logical_or.accumulate(occ[x0:], axis=0)  # (T, Y, Z)
        T = X - x0
        dx = np.arange(1, T + 1)[:, None]
        for y0 in range(Y):
            empty = ~np.logical_or.accumulate(acc_x[:, y0:, :], axis=1)  # (T, S, Z)
            S = Y - y0
            base = dx * np.arange(1, S + 1)[None, :]
            run = np.zeros((T, S), dtype=np.int64)
            for z in range(Z):
                run = (run + 1) * empty[:, :, z]
                vols = run * base
                flat = int(np.argmax(vols))
                if vols.flat[flat] > best_vol:
                    t, s = divmod(flat, S)
                    r = int(run[t, s])
                    best_vol = int(vols.flat[flat])
                    best = EmptyBox(x0, y0, z - r + 1, t + 1, s + 1, r)
    return best_vol, best
