"""Adversarial channel: tearing a codeword into pieces and flipping bits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import OutOfRangeError, ParameterError
from .grid import BitGrid2D
from .robust import find_min_weight_square

Rect = tuple[int, int, int, int]  # (top, left, height, width)

MODES = ("guillotine", "fixed-crop", "worst-case-enumeration")
STRATEGIES = ("random", "concentrate-on-zero-unit", "concentrate-on-borders")


def is_legal_2d(a: int, b: int, M: int, h: int) -> bool:
    return a * b >= M and min(a, b) >= h


def is_legal_3d(alpha: int, beta: int, gamma: int, M: int, h: int) -> bool:
    return alpha * beta * gamma >= M and min(alpha, beta, gamma) >= h


@dataclass(frozen=True)
class FragmentationPlan:
    seed: int
    mode: str = "guillotine"
    max_cuts: int = 4
    crop: Rect | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError("mode", f"unknown fragmentation mode {self.mode!r}")
        if self.max_cuts < 0:
            raise ParameterError("max_cuts>=0", f"max_cuts={self.max_cuts}")
        if self.mode == "fixed-crop" and self.crop is None:
            raise ParameterError("crop", "fixed-crop mode needs an explicit crop")


@dataclass
class FragmentResult:
    pieces: list[Rect]
    selected_rect: Rect | None
    selected: BitGrid2D | None = field(repr=False, default=None)


def guillotine_cuts(rows: int, cols: int, max_cuts: int, rng: np.random.Generator) -> list[Rect]:
    """Split the grid with up to ``max_cuts`` straight cuts, each through one existing piece."""
    pieces: list[Rect] = [(0, 0, rows, cols)]
    for _ in range(max_cuts):
        cuttable = [i for i, (_, _, a, b) in enumerate(pieces) if a > 1 or b > 1]
        if not cuttable:
            break
        top, left, a, b = pieces.pop(cuttable[int(rng.integers(len(cuttable)))])
        axes = [ax for ax, size in ((0, a), (1, b)) if size > 1]
        axis = axes[int(rng.integers(len(axes)))]
        if axis == 0:
            at = int(rng.integers(1, a))
            pieces += [(top, left, at, b), (top + at, left, a - at, b)]
        else:
            at = int(rng.integers(1, b))
            pieces += [(top, left, a, at), (top, left + at, a, b - at)]
    return sorted(pieces)


def minimal_legal_shapes(rows: int, cols: int, M: int, h: int) -> list[tuple[int, int]]:
    """For each height, the narrowest legal width that fits."""
    out = []
    for a in range(h, rows + 1):
        b = max(h, -(-M // a))
        if b <= cols:
            out.append((a, b))
    return out


def fragment(g: BitGrid2D, plan: FragmentationPlan, M: int, h: int) -> FragmentResult:
    """Tear ``g`` according to ``plan`` and hand back one legal piece.

    The selected piece is a fresh grid with no record of its position. In
    guillotine mode the largest legal piece wins, ties broken by position;
    ``selected`` is ``None`` when no piece is legal.
    """
    rng = np.random.default_rng(plan.seed)
    if plan.mode == "fixed-crop":
        top, left, a, b = plan.crop
        return FragmentResult([plan.crop], plan.crop, g.crop(top, left, a, b))
    if plan.mode == "guillotine":
        pieces = guillotine_cuts(g.rows, g.cols, plan.max_cuts, rng)
        legal = [p for p in pieces if is_legal_2d(p[2], p[3], M, h)]
    else:
        pieces = []
        for a, b in minimal_legal_shapes(g.rows, g.cols, M, h):
            top = int(rng.integers(g.rows - a + 1))
            left = int(rng.integers(g.cols - b + 1))
            pieces.append((top, left, a, b))
        legal = pieces
    if not legal:
        return FragmentResult(pieces, None, None)
    best = min(legal, key=lambda p: (-p[2] * p[3], p))
    return FragmentResult(pieces, best, g.crop(*best))


def enumerate_legal_crops(n: int, M: int, h: int, cols: int | None = None) -> Iterator[Rect]:
    """Every legal crop of an ``n x cols`` grid, by (top, left, height, width)."""
    cols = n if cols is None else cols
    for top in range(n):
        for left in range(cols):
            for a in range(h, n - top + 1):
                for b in range(h, cols - left + 1):
                    if a * b >= M:
                        yield top, left, a, b


def sample_legal_crops_3d(shape, M: int, h: int, count: int, rng: np.random.Generator,
                          include=()) -> list[tuple[tuple[int, int, int], tuple[int, int, int]]]:
    """``count`` random legal cuboid crops as ``(origin, dims)``.

    Shapes listed in ``include`` come first, each at a random offset.
    """
    X, Y, Z = shape
    if not is_legal_3d(X, Y, Z, M, h):
        raise ParameterError("legal-crop", f"{shape} has no legal crop for M={M}, h={h}")
    out = []
    for dims in include:
        if not is_legal_3d(*dims, M, h) or any(s > S for s, S in zip(dims, shape)):
            raise ParameterError("legal-crop", f"{dims} is not a legal crop of {shape}")
        out.append(dims)
    while len(out) < count:
        dims = tuple(int(rng.integers(h, S + 1)) for S in shape)
        if is_legal_3d(*dims, M, h):
            out.append(dims)
    return [
        (tuple(int(rng.integers(S - s + 1)) for s, S in zip(dims, shape)), dims)
        for dims in out
    ]


@dataclass(frozen=True)
class FlipBudget:
    delta: int
    strategy: str = "random"
    seed: int = 0
    region: Rect | None = None

    def __post_init__(self):
        if self.delta < 0:
            raise ParameterError("delta>=0", f"delta={self.delta}")
        if self.strategy not in STRATEGIES:
            raise ParameterError("strategy", f"unknown flip strategy {self.strategy!r}")


def _content_units(cells: np.ndarray, d: int) -> tuple[tuple[int, int], np.ndarray]:
    """Unit-grid offset and per-unit weights, aligned on the lightest window."""
    top, left = find_min_weight_square(BitGrid2D(cells, 2), d)
    r0, c0 = top % d, left % d
    nr, nc = (cells.shape[0] - r0) // d, (cells.shape[1] - c0) // d
    block = (cells[r0:r0 + nr * d, c0:c0 + nc * d] != 0)
    return (r0, c0), block.reshape(nr, d, nc, d).sum(axis=(1, 3))


def inject_flips(g: BitGrid2D, budget: FlipBudget, d: int | None = None
                 ) -> tuple[BitGrid2D, list[tuple[int, int]]]:
    """Toggle cells of a binary grid; returns the new grid and the flipped positions.

    Targeted strategies locate units from the content alone and need ``d``.
    """
    if g.q != 2:
        raise ParameterError("q==2", "bit flips need a binary grid")
    rng = np.random.default_rng(budget.seed)
    top, left, a, b = budget.region or (0, 0, g.rows, g.cols)
    if top < 0 or left < 0 or top + a > g.rows or left + b > g.cols:
        raise OutOfRangeError(f"flip region {budget.region} outside grid {g.shape}")
    if budget.delta > a * b:
        raise ParameterError("delta<=cells", f"delta={budget.delta} exceeds {a * b} cells")
    sub = g.cells[top:top + a, left:left + b]

    if budget.delta == 0:
        chosen: list[tuple[int, int]] = []
    elif budget.strategy == "random":
        flat = rng.choice(a * b, size=budget.delta, replace=False)
        chosen = [divmod(int(f), b) for f in flat]
    else:
        if d is None:
            raise ParameterError("d", f"strategy {budget.strategy} needs the unit side d")
        (r0, c0), weights = _content_units(sub, d)
        if budget.strategy == "concentrate-on-zero-unit":
            cand = np.argwhere(weights == 0)
            cells = [(i, j) for i in range(d) for j in range(d)]
        else:
            cand = np.argwhere(weights > 0)
            cells = [(i, j) for i in range(d) for j in range(d) if i in (0, d - 1) or j in (0, d - 1)]
        if not len(cand):
            cand = np.argwhere(weights >= 0)
        ui, uj = cand[int(rng.integers(len(cand)))]
        picks = rng.choice(len(cells), size=min(budget.delta, len(cells)), replace=False)
        chosen = [(r0 + int(ui) * d + cells[p][0], c0 + int(uj) * d + cells[p][1]) for p in picks]

    out = g.cells.copy()
    positions = sorted((top + r, left + c) for r, c in chosen)
    for r, c in positions:
        out[r, c] ^= 1
    return BitGrid2D(out, 2), positions


def hamming_distance(x: BitGrid2D, y: BitGrid2D) -> int:
    return int(np.count_nonzero(x.cells != y.cells))


def is_partition(pieces: list[Rect], rows: int, cols: int) -> bool:
    cover = np.zeros((rows, cols), dtype=np.int64)
    for top, left, a, b in pieces:
        cover[top:top + a, left:left + b] += 1
    return bool(np.all(cover == 1))


__all__ = [
    "FragmentationPlan", "FragmentResult", "FlipBudget", "fragment", "inject_flips",
    "enumerate_legal_crops", "sample_legal_crops_3d", "is_legal_2d", "is_legal_3d",
    "guillotine_cuts", "minimal_legal_shapes", "hamming_distance", "is_partition",
]
