"""Binary forensic code tolerating up to ``delta`` bit flips in the codeword.

Units carry a full border of ones instead of four corner marks, so a zero unit
stays far (in Hamming distance) from every other ``d x d`` window even after
flips, and the decoder aligns on the *lightest* window rather than an exactly
zero one. The unit interiors hold slices produced by a :class:`SlicedCodec`,
a code for unordered sets of strings with a global substitution budget.

The shipped codec is :class:`RepetitionSlicedCodec`, a small repetition code
that is easy to verify exhaustively; it is far from rate-optimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .codec2d import CodeParams2D, aligned_units, color_map, is_legal_fragment
from .errors import CorruptFragmentError, IllegalFragmentError, OutOfRangeError, ParameterError
from .grid import BitGrid2D


class SlicedCodec(Protocol):
    Q: int
    L: int
    K: int
    k: int

    def encode(self, msg: np.ndarray) -> list[np.ndarray]: ...

    def decode(self, slices: Sequence[np.ndarray]) -> np.ndarray: ...

    def slice_index(self, s: np.ndarray) -> int: ...


class RepetitionSlicedCodec:
    """Every index and message bit is repeated ``2K+1`` times; decoding is by majority.

    A slice is ``index_bits + payload``: the 0-based slice index in
    ``ceil(log2 max(Q, 2))`` bits, each bit written as a contiguous run, then a
    share of the repeated message stream (zero padded at the end).
    """

    def __init__(self, Q: int, L: int, K: int):
        if Q < 1 or L < 1 or K < 0:
            raise ParameterError("Q,L>=1,K>=0", f"Q={Q}, L={L}, K={K}")
        self.Q, self.L, self.K = Q, L, K
        self.rep = 2 * K + 1
        self.idx_width = math.ceil(math.log2(max(Q, 2)))
        self.idx_bits = self.idx_width * self.rep
        if self.idx_bits >= L:
            raise ParameterError("idxBits<L", f"index needs {self.idx_bits} bits, slices hold {L}")
        self.k = Q * (L - self.idx_bits) // self.rep
        if self.k < 1:
            raise ParameterError("k>=1", f"no message capacity at Q={Q}, L={L}, K={K}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, RepetitionSlicedCodec):
            return NotImplemented
        return (self.Q, self.L, self.K) == (other.Q, other.L, other.K)

    def __hash__(self) -> int:
        return hash((self.Q, self.L, self.K))

    def __repr__(self) -> str:
        return f"RepetitionSlicedCodec(Q={self.Q}, L={self.L}, K={self.K})"

    @property
    def payload_len(self) -> int:
        return self.L - self.idx_bits

    def encode(self, msg) -> list[np.ndarray]:
        msg = np.asarray(msg, dtype=np.uint8)
        if msg.shape != (self.k,) or (msg.size and msg.max() > 1):
            raise ParameterError("len(msg)==k", f"need {self.k} bits, got shape {msg.shape}")
        stream = np.zeros(self.Q * self.payload_len, dtype=np.uint8)
        stream[:self.k * self.rep] = np.repeat(msg, self.rep)
        out = []
        for i in range(self.Q):
            bits = [(i >> (self.idx_width - 1 - t)) & 1 for t in range(self.idx_width)]
            index = np.repeat(np.array(bits, dtype=np.uint8), self.rep)
            out.append(np.concatenate([index, stream[i * self.payload_len:(i + 1) * self.payload_len]]))
        return out

    def slice_index(self, s) -> int:
        s = np.asarray(s)
        votes = s[:self.idx_bits].reshape(self.idx_width, self.rep).sum(axis=1)
        value = 0
        for v in votes:
            value = 2 * value + int(v > self.K)
        return value

    def decode(self, slices) -> np.ndarray:
        slices = [np.asarray(s, dtype=np.uint8) for s in slices]
        if len(slices) != self.Q or any(s.shape != (self.L,) for s in slices):
            raise CorruptFragmentError(f"expected {self.Q} slices of length {self.L}")
        ordered: dict[int, np.ndarray] = {}
        for s in slices:
            i = self.slice_index(s)
            if i >= self.Q or i in ordered:
                raise CorruptFragmentError("corruption exceeds budget: slice indices collide")
            ordered[i] = s[self.idx_bits:]
        stream = np.concatenate([ordered[i] for i in range(self.Q)])
        votes = stream[:self.k * self.rep].reshape(self.k, self.rep).sum(axis=1)
        return (votes > self.K).astype(np.uint8)


@dataclass(frozen=True)
class RobustParams:
    base: CodeParams2D
    delta: int
    codec: RepetitionSlicedCodec

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def Q(self) -> int:
        return self.base.m_prime - 1

    @property
    def L(self) -> int:
        return (self.base.d - 2) ** 2

    @property
    def K(self) -> int:
        return self.delta

    @property
    def k(self) -> int:
        return self.codec.k

    @property
    def q(self) -> int:
        return 2


def optimal_profile_ok(Q: int, L: int, K: int) -> bool:
    """Length condition for a near-optimal sliced code at these dimensions."""
    lp = 3 * math.log2(Q) + 4 * K * K + 2
    tail = 2 * K * math.log2(4 * K * lp) if K else 0.0
    return lp + 4 * K * lp + tail <= L


def validate_params_robust(base: CodeParams2D, delta: int, *, profile: str = "reference") -> RobustParams:
    if base.q != 2:
        raise ParameterError("q==2", f"the flip-tolerant code is binary, got q={base.q}")
    if delta < 0:
        raise ParameterError("delta>=0", f"negative flip budget {delta}")
    if 2 * delta >= base.d:
        raise ParameterError("2*delta<d", f"delta={delta} is too large for unit side {base.d}")
    Q, L = base.m_prime - 1, (base.d - 2) ** 2
    if L <= 0:
        raise ParameterError("L>0", "unit has no interior")
    if profile == "optimal":
        if not optimal_profile_ok(Q, L, delta):
            raise ParameterError("optimal-profile", f"L={L} too short for Q={Q}, K={delta}")
    elif profile != "reference":
        raise ParameterError("profile", f"unknown codec profile {profile!r}")
    return RobustParams(base=base, delta=delta, codec=RepetitionSlicedCodec(Q, L, delta))


def ref_encode(params: RobustParams, msg) -> list[np.ndarray]:
    return params.codec.encode(msg)


def ref_decode(params: RobustParams, slices) -> np.ndarray:
    return params.codec.decode(slices)


def pack_bordered(d: int, interior) -> np.ndarray:
    unit = np.ones((d, d), dtype=np.uint8)
    unit[1:-1, 1:-1] = np.asarray(interior, dtype=np.uint8).reshape(d - 2, d - 2)
    return unit


def border_weight(units: np.ndarray, d: int) -> np.ndarray:
    """Border weights of flattened ``(count, d*d)`` units."""
    u = units.reshape(-1, d, d).astype(np.int64)
    total = u.sum(axis=(1, 2))
    return total - u[:, 1:-1, 1:-1].sum(axis=(1, 2))


def encode_robust(params: RobustParams, msg) -> BitGrid2D:
    base, d = params.base, params.d
    slices = sorted(params.codec.encode(msg), key=lambda s: s.tobytes())
    units = np.zeros((base.m_prime, d, d), dtype=np.uint8)
    for i, s in enumerate(slices, start=1):
        units[i] = pack_bordered(d, s)
    u = base.units_per_side
    tiles = units[color_map(base)]
    return BitGrid2D(tiles.transpose(0, 2, 1, 3).reshape(u * d, u * d), 2)


def find_min_weight_square(frag: BitGrid2D, d: int) -> tuple[int, int]:
    if frag.rows < d or frag.cols < d:
        raise OutOfRangeError(f"fragment {frag.shape} smaller than a {d}x{d} unit")
    w = frag.prefix.window_sums(d, d)
    top, left = np.unravel_index(int(np.argmin(w)), w.shape)
    return int(top), int(left)


def decode_robust(params: RobustParams, frag: BitGrid2D, *, enforce_legality: bool = True) -> np.ndarray:
    base, d = params.base, params.d
    if enforce_legality and not is_legal_fragment(base, frag.rows, frag.cols):
        raise IllegalFragmentError(
            f"fragment {frag.rows}x{frag.cols} is not legal for M={base.M}, h={base.h}"
        )
    top, left = find_min_weight_square(frag, d)
    units = aligned_units(frag, d, top, left)
    # a zero unit with <= delta flips is far below half the border
    keep = units[border_weight(units, d) >= 2 * d - 2]
    reps: dict[int, np.ndarray] = {}
    for flat in keep:
        interior = flat.reshape(d, d)[1:-1, 1:-1].ravel()
        i = params.codec.slice_index(interior)
        if i >= params.Q:
            raise CorruptFragmentError(f"corruption exceeds budget: slice index {i}")
        reps.setdefault(i, interior)
    if len(reps) < params.Q:
        raise IllegalFragmentError(f"found {len(reps)} slice indices, need {params.Q}")
    return params.codec.decode([reps[i] for i in sorted(reps)])
