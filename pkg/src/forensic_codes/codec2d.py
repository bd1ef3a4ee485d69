"""The (q, n, M, h) forensic code for matrix codewords.

The ``n x n`` codeword is cut into ``d x d`` units. Units are colored with
``m' = m/4`` colors so that every color class is a shifted tiling of the
``m'``-point Van der Corput set; all units of one color carry the same part
of the message. Color 0 units are all zero and every other unit has its four
corners set to 1, so the only all-zero ``d x d`` windows in a codeword are the
color 0 units. A decoder holding any legal fragment finds such a window,
which fixes the unit grid, and then reads one copy of every part.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .discrepancy import bit_reverse, log2_exact
from .errors import (
    CorruptFragmentError,
    IllegalFragmentError,
    LemmaViolationError,
    OutOfRangeError,
    ParameterError,
)
from .grid import BitGrid2D


def ceil_log(q: int, value: int) -> int:
    """Smallest ``w >= 0`` with ``q**w >= value``."""
    w, power = 0, 1
    while power < value:
        power *= q
        w += 1
    return w


def to_digits(value: int, width: int, q: int) -> list[int]:
    """Base-``q`` digits of ``value``, most significant first, exactly ``width`` long."""
    out = []
    for _ in range(width):
        value, r = divmod(value, q)
        out.append(r)
    if value:
        raise OutOfRangeError(f"value does not fit in {width} base-{q} digits")
    return out[::-1]


def from_digits(digits, q: int) -> int:
    value = 0
    for s in digits:
        value = value * q + int(s)
    return value


def unit_area_threshold(d: int, m: int) -> int:
    """Smallest fragment area for which ``m`` is admissible at unit side ``d``."""
    return (4 * d - 1) * ((m + 1) * d + d - 1)


@dataclass(frozen=True)
class CodeParams2D:
    q: int
    n: int
    M: int
    h: int
    d: int
    m: int
    m_prime: int
    R: int
    idx_width: int
    k: int

    @property
    def units_per_side(self) -> int:
        return self.n // self.d

    @property
    def parts(self) -> int:
        return self.m_prime - 1

    @property
    def segment(self) -> int:
        return self.R - self.idx_width

    def as_dict(self) -> dict:
        return asdict(self)


def derive_params_2d(q: int, M: int, h: int, n: int | None = None) -> CodeParams2D:
    """Derive unit side, color budget and message length from ``(q, M, h)``.

    ``d`` is the largest integer with ``h >= 3d - 1`` and ``m`` the largest
    power of two with ``M >= (4d - 1)((m + 1)d + d - 1)``. With ``n`` omitted
    the codeword side defaults to ``d * m``.
    """
    if q < 2:
        raise ParameterError("q>=2", f"alphabet size {q} < 2")
    if M < 1:
        raise ParameterError("M>=1", f"minimum area {M} < 1")
    if h < 2:
        raise ParameterError("h>=2", f"minimum side {h} < 2")
    d = (h + 1) // 3
    if d < 3:
        raise ParameterError("d>=3", f"h={h} gives unit side {d}; corner marks need d >= 3")
    if unit_area_threshold(d, 1) > M:
        raise ParameterError("m>=8", f"M={M} admits no color budget at d={d}")
    m = 1
    while unit_area_threshold(d, 2 * m) <= M:
        m *= 2
    if m < 8:
        raise ParameterError("m>=8", f"M={M}, h={h} give m={m}; at least 8 is needed")
    m_prime = m // 4
    R = d * d - 4
    idx_width = ceil_log(q, m_prime - 1)
    k = (m_prime - 1) * (R - idx_width)
    if k < 1:
        raise ParameterError("k>=1", f"no room for message symbols (R={R}, index={idx_width})")
    if n is None:
        n = d * m
    if n % d:
        raise ParameterError("d|n", f"codeword side {n} is not a multiple of d={d}")
    if (n // d) % m_prime:
        raise ParameterError("m'|(n/d)", f"{n // d} units per side not a multiple of m'={m_prime}")
    return CodeParams2D(q=q, n=n, M=M, h=h, d=d, m=m, m_prime=m_prime, R=R,
                        idx_width=idx_width, k=k)


def color(params: CodeParams2D, i: int, j: int) -> int:
    u = params.units_per_side
    if not (0 <= i < u and 0 <= j < u):
        raise OutOfRangeError(f"unit ({i}, {j}) outside {u}x{u} unit grid")
    mp = params.m_prime
    return (j - bit_reverse(i % mp, log2_exact(mp))) % mp


def color_map(params: CodeParams2D) -> np.ndarray:
    """Colors of the whole unit grid, ``out[i, j] == color(params, i, j)``."""
    mp = params.m_prime
    c = log2_exact(mp)
    u = params.units_per_side
    rev = np.array([bit_reverse(r, c) for r in range(mp)])
    i = np.arange(u)[:, None]
    j = np.arange(u)[None, :]
    return (j - rev[i % mp]) % mp


def random_message(params, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, params.q, size=params.k, dtype=np.uint8)


def _as_message(params, msg) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.uint8)
    if msg.ndim != 1 or len(msg) != params.k:
        raise ParameterError("len(msg)==k", f"message length {msg.size} != k={params.k}")
    if msg.size and msg.max() >= params.q:
        raise ParameterError("symbols<q", f"message symbol out of range for q={params.q}")
    return msg


def split_message(params, msg) -> list[np.ndarray]:
    """Cut ``msg`` into indexed payloads, one per information color.

    Part ``i`` (1-based) is suffixed with ``i mod q**idx_width`` in
    ``idx_width`` base-q digits; since there are at most ``q**idx_width``
    parts the suffixes are distinct, and :func:`join_message` maps 0 back to
    ``q**idx_width``.
    """
    msg = _as_message(params, msg)
    seg, w, q = params.segment, params.idx_width, params.q
    out = []
    for i in range(params.parts):
        index = to_digits((i + 1) % q ** w, w, q)
        out.append(np.concatenate([msg[i * seg:(i + 1) * seg],
                                   np.array(index, dtype=np.uint8)]))
    return out


def part_index(params, payload) -> int:
    w, q = params.idx_width, params.q
    value = from_digits(payload[len(payload) - w:], q)
    return value if value else q ** w


def join_message(params, payloads) -> np.ndarray:
    by_index = {}
    for p in payloads:
        by_index[part_index(params, p)] = np.asarray(p, dtype=np.uint8)
    missing = [i for i in range(1, params.parts + 1) if i not in by_index]
    if missing:
        raise IllegalFragmentError(f"missing message parts {missing}")
    seg = params.segment
    return np.concatenate([by_index[i][:seg] for i in range(1, params.parts + 1)])


def _corner_mask(d: int) -> np.ndarray:
    mask = np.zeros((d, d), dtype=bool)
    mask[[0, 0, -1, -1], [0, -1, 0, -1]] = True
    return mask


def pack_unit(params, payload) -> np.ndarray:
    d = params.d
    if d < 3:
        raise ParameterError("d>=3", f"unit side {d} makes corner cells overlap")
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.shape != (d * d - 4,):
        raise ParameterError("len(payload)==R", f"payload length {payload.size} != {d * d - 4}")
    corners = _corner_mask(d)
    unit = np.ones((d, d), dtype=np.uint8)
    unit[~corners] = payload
    return unit


def unpack_unit(params, unit) -> np.ndarray:
    unit = np.asarray(unit)
    corners = _corner_mask(params.d)
    if not np.all(unit[corners] == 1):
        raise CorruptFragmentError("unit corners are not all set")
    return unit[~corners].astype(np.uint8)


def encode2d(params: CodeParams2D, msg) -> BitGrid2D:
    d, u = params.d, params.units_per_side
    units = np.zeros((params.m_prime, d, d), dtype=np.uint8)
    for i, part in enumerate(split_message(params, msg), start=1):
        units[i] = pack_unit(params, part)
    tiles = units[color_map(params)]  # (u, u, d, d)
    return BitGrid2D(tiles.transpose(0, 2, 1, 3).reshape(u * d, u * d), params.q)


def find_zero_square(frag: BitGrid2D, d: int) -> tuple[int, int]:
    """Lexicographically smallest all-zero ``d x d`` window."""
    if frag.rows < d or frag.cols < d:
        raise IllegalFragmentError(f"fragment {frag.shape} smaller than a {d}x{d} unit")
    zero = frag.prefix.window_sums(d, d) == 0
    if not zero.any():
        raise IllegalFragmentError("fragment illegal or corrupted: no all-zero square")
    top, left = np.unravel_index(int(np.argmax(zero)), zero.shape)
    return int(top), int(left)


def aligned_units(frag: BitGrid2D, d: int, top: int, left: int) -> np.ndarray:
    """All complete units on the grid through ``(top, left)``, flattened to ``(count, d*d)``."""
    r0, c0 = top % d, left % d
    nr, nc = (frag.rows - r0) // d, (frag.cols - c0) // d
    block = frag.cells[r0:r0 + nr * d, c0:c0 + nc * d]
    return block.reshape(nr, d, nc, d).transpose(0, 2, 1, 3).reshape(nr * nc, d * d)


def is_legal_fragment(params, rows: int, cols: int) -> bool:
    return rows * cols >= params.M and min(rows, cols) >= params.h


def decode2d(params: CodeParams2D, frag: BitGrid2D, *, enforce_legality: bool = True) -> np.ndarray:
    if enforce_legality and not is_legal_fragment(params, frag.rows, frag.cols):
        raise IllegalFragmentError(
            f"fragment {frag.rows}x{frag.cols} is not legal for M={params.M}, h={params.h}"
        )
    d = params.d
    top, left = find_zero_square(frag, d)
    distinct = np.unique(aligned_units(frag, d, top, left), axis=0)
    if len(distinct) < params.m_prime:
        raise IllegalFragmentError(
            f"found {len(distinct)} distinct units, need {params.m_prime}"
        )
    parts: dict[int, np.ndarray] = {}
    for flat in distinct:
        if not flat.any():
            continue
        payload = unpack_unit(params, flat.reshape(d, d))
        idx = part_index(params, payload)
        if not 1 <= idx <= params.parts:
            raise CorruptFragmentError(f"part index {idx} out of range")
        if idx in parts and not np.array_equal(parts[idx], payload):
            raise CorruptFragmentError(f"two different payloads claim part {idx}")
        parts[idx] = payload
    return join_message(params, parts.values())


# ---------------------------------------------------------------------------
# Unit-count lemma
# ---------------------------------------------------------------------------

def guaranteed_units(length: int, d: int) -> int:
    """Complete units along a side of ``length`` cells at the worst alignment."""
    return max(0, (length + 1) // d - 1)


def check_unit_grid_lemma(params: CodeParams2D, a: int, b: int) -> tuple[int, int]:
    """Return ``(x, y)`` with ``x * y == m`` such that an ``a x b`` fragment holds an
    ``(x+1) x (y+1)`` grid of complete units, following the case split on ``a``.
    """
    d, m = params.d, params.m
    if not is_legal_fragment(params, a, b):
        raise IllegalFragmentError(f"{a}x{b} is not legal for M={params.M}, h={params.h}")
    p = log2_exact(m)
    wide = (m + 1) * d + d - 1
    if a < 4 * d - 1:
        x, y = 1, m
    elif a <= wide:
        # (2^j + 1)d + d - 1 <= a < (2^{j+1} + 1)d + d - 1
        j = 1
        while j < p and (2 ** (j + 1) + 1) * d + d - 1 <= a:
            j += 1
        x, y = 2 ** j, 2 ** (p - j)
    else:
        x, y = m, 1
    if guaranteed_units(a, d) < x + 1 or guaranteed_units(b, d) < y + 1:
        raise LemmaViolationError(f"unit grid lemma failed for {a}x{b} at d={d}, m={m}")
    return x, y


def unit_grid_inequality(d: int, p: int, i: int) -> tuple[int, int]:
    """Both sides of ``((2^i+1)d+d-1)((2^{p+1-i}+1)d+d-1) <= (4d-1)((2^p+1)d+d-1)``."""
    lhs = ((2 ** i + 1) * d + d - 1) * ((2 ** (p + 1 - i) + 1) * d + d - 1)
    rhs = (4 * d - 1) * ((2 ** p + 1) * d + d - 1)
    return lhs, rhs
