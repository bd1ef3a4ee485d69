"""Code rates, published parameter tables and rate bounds.

Rates use a real-valued ``log_q`` for the index overhead, which is what the
reference tables were computed with; ``k_integer`` in a :class:`RateReport`
is the message length the codecs in this package actually achieve.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from math import comb

from .codec2d import derive_params_2d
from .codec3d import derive_params_3d
from .errors import ParameterError

VARIANTS = {"d2-2": 2, "d2-4": 4}

TABLE_INPUTS = {
    1: [(1024, 14), (2048, 14), (8192, 26), (16384, 11), (65536, 14), (262144, 155),
        (1048576, 68), (4194304, 626)],
    2: [(100045, 41), (1000825, 131), (9973111, 104), (99053215, 116), (971469531, 182)],
    3: [(209935, 11), (425124, 14), (752267, 17), (1836159, 23), (2639780, 26), (5082084, 14)],
}
TABLE_VARIANT = {1: "d2-2", 2: "d2-4"}


@dataclass(frozen=True)
class RateReport:
    M: int
    h: int
    q: int
    params: dict = field(repr=False)
    k_real: float
    k_integer: int
    rate: float
    rate_integer: float
    bound_sphere: float
    bound_lll: float


def _log(q: int, x: float) -> float:
    return math.log(x, q) if x > 0 else 0.0


def ball_size(q: int, M: int, delta: int) -> int:
    """Exact number of words within Hamming distance ``delta`` of a length-``M`` word."""
    return sum(comb(M, i) * (q - 1) ** i for i in range(delta + 1))


def sphere_packing_bound(q: int, M: int, delta: int) -> float:
    if not 0 <= delta <= M:
        raise ParameterError("0<=delta<=M", f"delta={delta}, M={M}")
    ball = ball_size(q, M, delta)
    if ball == 1:
        return 1.0
    # the ball never exceeds q**M, so only rounding can push this below zero
    return max(0.0, (M - math.log(ball) / math.log(q)) / M)


def lll_existence_bound(q: int, n: int, M: int, delta: int, exponent: float = 1.5) -> float:
    if n < 1 or M < 1:
        raise ParameterError("n,M>=1", f"n={n}, M={M}")
    if exponent not in (1.5, 1.25):
        raise ParameterError("exponent", f"exponent must be 1.5 or 1.25, got {exponent}")
    ball = ball_size(q, M, delta)
    lq = math.log(q)
    value = (M - 2 * (exponent * math.log(M) + math.log(n)) / lq - math.log(ball) / lq) / M
    return max(0.0, value)


def rate_2d(M: int, h: int, q: int = 2, variant: str = "d2-4") -> RateReport:
    if variant not in VARIANTS:
        raise ParameterError("variant", f"unknown payload variant {variant!r}")
    p = derive_params_2d(q, M, h)
    parts = p.m // 4 - 1
    k_real = parts * (p.d ** 2 - VARIANTS[variant] - _log(q, parts))
    return RateReport(
        M=M, h=h, q=q, params=p.as_dict(), k_real=k_real, k_integer=p.k,
        rate=k_real / M, rate_integer=p.k / M,
        bound_sphere=sphere_packing_bound(q, M, 0),
        bound_lll=lll_existence_bound(q, p.n, M, 0),
    )


def rate_3d(M: int, h: int, q: int = 2) -> RateReport:
    p = derive_params_3d(q, M, h)
    parts = p.color_count - 1
    k_real = parts * (p.d ** 3 - 8 - _log(q, parts))
    return RateReport(
        M=M, h=h, q=q, params=p.as_dict(), k_real=k_real, k_integer=p.k,
        rate=k_real / M, rate_integer=p.k / M,
        bound_sphere=sphere_packing_bound(q, M, 0),
        bound_lll=lll_existence_bound(q, p.n, M, 0),
    )


def table_rows(which: int) -> list[dict]:
    if which not in TABLE_INPUTS:
        raise ParameterError("table", f"no table {which}; choose 1, 2 or 3")
    rows = []
    for M, h in TABLE_INPUTS[which]:
        if which == 3:
            r = rate_3d(M, h)
            rows.append({"M": M, "h": h, "d": r.params["d"], "a": r.params["a"],
                         "b": r.params["b"], "rate": r.rate})
        else:
            r = rate_2d(M, h, 2, TABLE_VARIANT[which])
            rows.append({"M": M, "h": h, "d": r.params["d"], "m": r.params["m"], "rate": r.rate})
    return rows


def emit_table(which: int, fmt: str = "text") -> str:
    rows = table_rows(which)
    cols = list(rows[0])
    digits = 9 if which == 3 else 6
    cells = [[str(r[c]) if c != "rate" else f"{r[c]:.{digits}f}" for c in cols] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(cells)
        return buf.getvalue()
    if fmt != "text":
        raise ParameterError("format", f"unknown table format {fmt!r}")
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"
