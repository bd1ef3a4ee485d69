"""The forensic code for ``n x n x n'`` cuboid codewords.

Same scheme as :mod:`forensic_codes.codec2d` one dimension up: cubic units of
side ``d`` with all eight corners marked, colored by shifted Halton-Hammersley
sets on an ``(a/8) x (a/8) x (b/3)`` small grid.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .codec2d import ceil_log, join_message, part_index, random_message, split_message
from .discrepancy import hh_set
from .errors import (
    CorruptFragmentError,
    DecodeError,
    IllegalFragmentError,
    LemmaViolationError,
    OutOfRangeError,
    ParameterError,
)
from .grid import BitGrid3D

__all__ = [
    "CodeParams3D", "derive_params_3d", "color3d", "color_map3d", "pack_unit3d",
    "unpack_unit3d", "encode3d", "find_zero_cube", "decode3d", "check_unit_grid_lemma_3d",
    "volume_threshold", "witness_volume", "random_message",
]


def dyadic_triadic(c: int) -> tuple[int, int]:
    """``(2**c, b)`` with ``b`` the smallest power of 3 that is at least ``2**c``."""
    a, b = 2 ** c, 1
    while b < a:
        b *= 3
    return a, b


def volume_threshold(d: int, ab: int) -> int:
    return (3 * d - 1) ** 2 * ((ab + 1) * d + d - 1)


def witness_volume(d: int, x: int, y: int, z: int) -> int:
    """Smallest cuboid volume that can miss an ``(x+1) x (y+1) x (z+1)`` unit grid, plus one."""
    return (x * d + 2 * d - 1) * (y * d + 2 * d - 1) * (z * d + 2 * d - 1)


@dataclass(frozen=True)
class CodeParams3D:
    q: int
    n: int
    n_prime: int
    M: int
    h: int
    d: int
    c: int
    a: int
    b: int
    color_count: int
    R: int
    idx_width: int
    k: int

    @property
    def unit_shape(self) -> tuple[int, int, int]:
        return self.n // self.d, self.n // self.d, self.n_prime // self.d

    @property
    def small_grid(self) -> tuple[int, int]:
        return self.a // 8, self.b // 3

    @property
    def parts(self) -> int:
        return self.color_count - 1

    @property
    def segment(self) -> int:
        return self.R - self.idx_width

    def as_dict(self) -> dict:
        return asdict(self)


def derive_params_3d(q: int, M: int, h: int, n: int | None = None,
                     n_prime: int | None = None) -> CodeParams3D:
    if q < 2:
        raise ParameterError("q>=2", f"alphabet size {q} < 2")
    if M < 1 or h < 2:
        raise ParameterError("M>=1,h>=2", f"M={M}, h={h}")
    d = (h + 1) // 3
    if d < 3:
        raise ParameterError("d>=3", f"h={h} gives unit side {d}; corner marks need d >= 3")
    c = -1
    while volume_threshold(d, int(np.prod(dyadic_triadic(c + 1), dtype=object))) <= M:
        c += 1
    if c < 3:
        raise ParameterError("colorCount>=2", f"M={M}, h={h} give c={c}; at least 3 is needed")
    a, b = dyadic_triadic(c)
    color_count = (a // 8) * (b // 3)
    R = d ** 3 - 8
    idx_width = ceil_log(q, color_count - 1)
    k = (color_count - 1) * (R - idx_width)
    if k < 1:
        raise ParameterError("k>=1", f"no room for message symbols (R={R}, index={idx_width})")
    n = a * d if n is None else n
    n_prime = b * d if n_prime is None else n_prime
    if n % (a * d):
        raise ParameterError("ad|n", f"n={n} is not a multiple of a*d={a * d}")
    if n_prime % (b * d):
        raise ParameterError("bd|n'", f"n'={n_prime} is not a multiple of b*d={b * d}")
    return CodeParams3D(q=q, n=n, n_prime=n_prime, M=M, h=h, d=d, c=c, a=a, b=b,
                        color_count=color_count, R=R, idx_width=idx_width, k=k)


def _small_grid_colors(params: CodeParams3D) -> np.ndarray:
    """Color of every cell of the small grid."""
    w1, w3 = params.small_grid
    out = np.empty((w1, w1, w3), dtype=np.int64)
    for x, y, z in sorted(hh_set(w1, w3).points):
        for d1 in range(w1):
            for d2 in range(w3):
                out[x, (y + d1) % w1, (z + d2) % w3] = d1 * w3 + d2
    return out


def color3d(params: CodeParams3D, i: int, j: int, l: int) -> int:
    shape = params.unit_shape
    if not all(0 <= v < s for v, s in zip((i, j, l), shape)):
        raise OutOfRangeError(f"unit {(i, j, l)} outside unit grid {shape}")
    w1, w3 = params.small_grid
    return int(_small_grid_colors(params)[i % w1, j % w1, l % w3])


def color_map3d(params: CodeParams3D) -> np.ndarray:
    w1, w3 = params.small_grid
    ux, uy, uz = params.unit_shape
    return np.tile(_small_grid_colors(params), (ux // w1, uy // w1, uz // w3))


def _corner_mask3d(d: int) -> np.ndarray:
    mask = np.zeros((d, d, d), dtype=bool)
    mask[::d - 1, ::d - 1, ::d - 1] = True
    return mask


def pack_unit3d(params, payload) -> np.ndarray:
    d = params.d
    if d < 3:
        raise ParameterError("d>=3", f"unit side {d} too small")
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.shape != (d ** 3 - 8,):
        raise ParameterError("len(payload)==R", f"payload length {payload.size} != {d ** 3 - 8}")
    unit = np.ones((d, d, d), dtype=np.uint8)
    unit[~_corner_mask3d(d)] = payload
    return unit


def unpack_unit3d(params, unit) -> np.ndarray:
    unit = np.asarray(unit)
    corners = _corner_mask3d(params.d)
    if not np.all(unit[corners] == 1):
        raise CorruptFragmentError("unit corners are not all set")
    return unit[~corners].astype(np.uint8)


def encode3d(params: CodeParams3D, msg) -> BitGrid3D:
    d = params.d
    units = np.zeros((params.color_count, d, d, d), dtype=np.uint8)
    for i, part in enumerate(split_message(params, msg), start=1):
        units[i] = pack_unit3d(params, part)
    tiles = units[color_map3d(params)]  # (ux, uy, uz, d, d, d)
    ux, uy, uz = params.unit_shape
    cells = tiles.transpose(0, 3, 1, 4, 2, 5).reshape(ux * d, uy * d, uz * d)
    return BitGrid3D(cells, params.q)


def zero_cubes(frag: BitGrid3D, d: int) -> np.ndarray:
    """Origins of all all-zero ``d^3`` windows in C order, shape ``(count, 3)``."""
    if min(frag.shape) < d:
        raise IllegalFragmentError(f"fragment {frag.shape} smaller than a {d}^3 unit")
    return np.argwhere(frag.prefix.window_sums(d, d, d) == 0)


def find_zero_cube(frag: BitGrid3D, d: int) -> tuple[int, int, int]:
    hits = zero_cubes(frag, d)
    if not len(hits):
        raise IllegalFragmentError("fragment illegal or corrupted: no all-zero cube")
    return tuple(int(v) for v in hits[0])


def _aligned_units3d(frag: BitGrid3D, d: int, offset) -> np.ndarray:
    r = [o % d for o in offset]
    counts = [(s - o) // d for s, o in zip(frag.shape, r)]
    nx, ny, nz = counts
    block = frag.cells[r[0]:r[0] + nx * d, r[1]:r[1] + ny * d, r[2]:r[2] + nz * d]
    return block.reshape(nx, d, ny, d, nz, d).transpose(0, 2, 4, 1, 3, 5).reshape(-1, d ** 3)


def _decode_aligned(params: CodeParams3D, frag: BitGrid3D, offset) -> np.ndarray:
    d = params.d
    distinct = np.unique(_aligned_units3d(frag, d, offset), axis=0)
    if len(distinct) < params.color_count:
        raise IllegalFragmentError(
            f"found {len(distinct)} distinct units, need {params.color_count}"
        )
    parts: dict[int, np.ndarray] = {}
    for flat in distinct:
        if not flat.any():
            continue
        payload = unpack_unit3d(params, flat.reshape(d, d, d))
        idx = part_index(params, payload)
        if not 1 <= idx <= params.parts:
            raise CorruptFragmentError(f"part index {idx} out of range")
        if idx in parts and not np.array_equal(parts[idx], payload):
            raise CorruptFragmentError(f"two different payloads claim part {idx}")
        parts[idx] = payload
    return join_message(params, parts.values())


def is_legal_fragment3d(params, dims) -> bool:
    return int(np.prod(dims, dtype=object)) >= params.M and min(dims) >= params.h


def decode3d(params: CodeParams3D, frag: BitGrid3D, *, enforce_legality: bool = True) -> np.ndarray:
    """Decode a cuboid fragment.

    Zero cubes are tried in C order, one per alignment class mod ``d``.
    When the small grid has ``a/8 == 1`` a whole layer of units shares one
    color, so zero cubes also occur off the unit grid; every class that
    decodes must agree, otherwise the fragment is reported as ambiguous.
    """
    if enforce_legality and not is_legal_fragment3d(params, frag.shape):
        raise IllegalFragmentError(
            f"fragment {frag.shape} is not legal for M={params.M}, h={params.h}"
        )
    d = params.d
    hits = zero_cubes(frag, d)
    if not len(hits):
        raise IllegalFragmentError("fragment illegal or corrupted: no all-zero cube")
    seen = set()
    results: list[np.ndarray] = []
    first_error: DecodeError | None = None
    for hit in hits:
        cls = tuple(int(v) % d for v in hit)
        if cls in seen:
            continue
        seen.add(cls)
        try:
            results.append(_decode_aligned(params, frag, cls))
        except DecodeError as exc:
            first_error = first_error or exc
    if not results:
        raise first_error
    if any(not np.array_equal(results[0], r) for r in results[1:]):
        raise CorruptFragmentError("fragment decodes ambiguously under different alignments")
    return results[0]


def check_unit_grid_lemma_3d(params: CodeParams3D, alpha: int, beta: int,
                             gamma: int) -> tuple[int, int, int]:
    """Find ``(x, y, z)`` with ``xyz == ab`` such that the cuboid holds an
    ``(x+1) x (y+1) x (z+1)`` grid of complete units at every alignment.
    """
    if not is_legal_fragment3d(params, (alpha, beta, gamma)):
        raise IllegalFragmentError(
            f"{alpha}x{beta}x{gamma} is not legal for M={params.M}, h={params.h}"
        )
    d, ab = params.d, params.a * params.b
    X, Y, Z = ((s + 1) // d - 2 for s in (alpha, beta, gamma))
    for x in range(1, X + 1):
        if ab % x:
            continue
        for y in range(1, Y + 1):
            if (ab // x) % y:
                continue
            z = ab // (x * y)
            if z <= Z:
                return x, y, z
    raise LemmaViolationError(f"no unit grid witness for {alpha}x{beta}x{gamma} at d={d}, ab={ab}")
