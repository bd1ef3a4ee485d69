"""Batch checks behind ``forensic-codes verify`` and the acceptance tests.

Each ``criterion_N`` function runs one end-to-end check and returns a
:class:`CheckResult`; suites group them by topic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import channel, codec2d, codec3d, discrepancy as disc, rates, robust
from .grid import BitGrid2D

PUBLISHED = {
    1: [(1024, 14, 5, 8, 0.022461), (2048, 14, 5, 16, 0.031370), (8192, 26, 9, 16, 0.028350),
        (16384, 11, 4, 256, 0.030849), (65536, 14, 5, 512, 0.031028),
        (262144, 155, 52, 16, 0.030904), (1048576, 68, 23, 256, 0.031304),
        (4194304, 626, 209, 16, 0.031241)],
    2: [(100045, 41, 14, 128, 0.057958), (1000825, 131, 44, 128, 0.059689),
        (9973111, 104, 35, 2048, 0.062100), (99053215, 116, 39, 16384, 0.062219),
        (971469531, 182, 61, 65536, 0.062448)],
    3: [(209935, 11, 4, 16, 27, 0.004203745), (425124, 14, 5, 16, 27, 0.004515184),
        (752267, 17, 6, 16, 27, 0.004608089), (1836159, 23, 8, 16, 27, 0.004628419),
        (2639780, 26, 9, 16, 27, 0.004616867), (5082084, 14, 5, 64, 81, 0.004621950)],
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CheckResult(name, ok, detail, time.perf_counter() - t0)


def criterion_1() -> CheckResult:
    def run():
        worst, bad = 0.0, []
        for w in (2, 4, 8, 16, 32, 64):
            sets = [disc.vdc_set(w)]
            shifts = sorted({0, 1, w // 2, w - 1})
            sets += [disc.vdc_shifted(w, i, j) for i in shifts for j in shifts]
            if w <= 16:
                sets += [disc.vdc_tiled(w, z, s) for z in (2 * w, 4 * w) for s in range(w)]
            for ps in sets:
                area, _ = disc.largest_empty_rect(ps)
                worst = max(worst, area / (4 * w))
                if area >= 4 * w:
                    bad.append((w, area))
        return not bad, f"max area/4w = {worst:.3f}, violations {bad}"
    return _timed("1 VDC empty rectangles < 4w", run)


def criterion_2() -> CheckResult:
    def run():
        bad = []
        for w in (2, 4, 8, 16, 32, 64):
            if disc.union_covers([disc.vdc_shifted(w, i) for i in range(w)]) != (True, True):
                bad.append(("vdc", w))
        for w1, w3 in ((1, 3), (2, 9), (4, 9), (16, 27)):
            fam = [disc.hh_shifted(w1, w3, a, b) for a in range(w1) for b in range(w3)]
            if disc.union_covers(fam) != (True, True):
                bad.append(("hh", w1, w3))
        return not bad, f"non-partitions {bad}"
    return _timed("2 shifted VDC/HH sets partition", run)


def criterion_3() -> CheckResult:
    def run():
        vols = {}
        vols["base"] = disc.largest_empty_box(disc.hh_set(32, 27))[0]
        for d1 in (0, 1):
            for d2 in (0, 1):
                vols[(d1, d2)] = disc.largest_empty_box(disc.hh_shifted(32, 27, d1, d2))[0]
        worst = max(vols.values())
        return worst <= 20736, f"largest empty box {worst} (limit 20736 of 27648)"
    return _timed("3 HH empty box <= 20736", run)


def _params_for_m(m: int, n_units: int) -> codec2d.CodeParams2D:
    d = 3
    return codec2d.derive_params_2d(2, codec2d.unit_area_threshold(d, m), 3 * d - 1, n=d * n_units)


def criterion_4() -> CheckResult:
    def run():
        bad = []
        for mp in (2, 4, 8):
            for mult in (1, 2, 4):
                p = _params_for_m(4 * mp, mult * mp)
                cmap = codec2d.color_map(p)
                u = p.units_per_side
                for r in range(mp):
                    cls = {(int(i), int(j)) for i, j in np.argwhere(cmap == r)}
                    if cls != set(disc.vdc_tiled(mp, u, r).points):
                        bad.append((mp, u, r))
        return not bad, f"mismatched classes {bad}"
    return _timed("4 coloring classes are tiled VDC sets", run)


def zero_window_violations(g: BitGrid2D, p: codec2d.CodeParams2D) -> int:
    """Count all-zero ``d x d`` windows not sitting on a color-0 unit (naive scan)."""
    d = p.d
    sums = sliding_window_view(g.cells.astype(np.int64), (d, d)).sum(axis=(2, 3))
    cmap = codec2d.color_map(p)
    bad = 0
    for r, c in np.argwhere(sums == 0):
        if r % d or c % d or cmap[r // d, c // d] != 0:
            bad += 1
    return bad


def criterion_5() -> CheckResult:
    def run():
        rng = np.random.default_rng(5)
        total = 0
        for d in (3, 4, 5):
            p = codec2d.derive_params_2d(2, codec2d.unit_area_threshold(d, 16), 3 * d - 1)
            for _ in range(100):
                g = codec2d.encode2d(p, codec2d.random_message(p, rng))
                total += zero_window_violations(g, p)
        return total == 0, f"{total} misplaced zero windows over 300 codewords"
    return _timed("5 zero squares only at color-0 units", run)


def criterion_6() -> CheckResult:
    def run():
        p = codec2d.derive_params_2d(2, 319, 8)
        msg = codec2d.random_message(p, np.random.default_rng(6))
        g = codec2d.encode2d(p, msg)
        count = fails = 0
        for top, left, a, b in channel.enumerate_legal_crops(p.n, p.M, p.h):
            count += 1
            try:
                ok = np.array_equal(codec2d.decode2d(p, g.crop(top, left, a, b)), msg)
            except Exception:
                ok = False
            fails += not ok
        return fails == 0 and count > 0, f"{fails} failures over {count} legal crops"
    return _timed("6 2D round trip over every legal crop", run)


def criterion_7() -> CheckResult:
    def run():
        bad = []
        for which in (1, 2):
            for (M, h, d, m, rate), row in zip(PUBLISHED[which], rates.table_rows(which)):
                if (row["d"], row["m"]) != (d, m) or abs(row["rate"] - rate) > 1e-6:
                    bad.append((which, M))
        for (M, h, d, a, b, rate), row in zip(PUBLISHED[3], rates.table_rows(3)):
            if (row["d"], row["a"], row["b"]) != (d, a, b) or abs(row["rate"] - rate) > 1e-8:
                bad.append((3, M))
        return not bad, f"mismatched rows {bad}"
    return _timed("7 rate tables reproduce", run)


EXTREME_3D = ((24, 23, 26), (22, 24, 27), (24, 22, 27), (24, 24, 25))


def criterion_8() -> CheckResult:
    def run():
        p = codec3d.derive_params_3d(2, 14144, 8)
        rng = np.random.default_rng(8)
        msg = codec3d.random_message(p, rng)
        g = codec3d.encode3d(p, msg)
        crops = channel.sample_legal_crops_3d(g.shape, p.M, p.h, 200, rng, include=EXTREME_3D)
        fails = 0
        for origin, dims in crops:
            try:
                ok = np.array_equal(codec3d.decode3d(p, g.crop(*origin, *dims)), msg)
            except Exception:
                ok = False
            fails += not ok
        return fails == 0, f"{fails} failures over {len(crops)} crops"
    return _timed("8 3D round trip over sampled crops", run)


def single_substitution_failures(Q: int, L: int, K: int, trials: int, rng) -> int:
    codec = robust.RepetitionSlicedCodec(Q, L, K)
    fails = 0
    for _ in range(trials):
        msg = rng.integers(0, 2, codec.k).astype(np.uint8)
        slices = codec.encode(msg)
        for s in range(Q):
            for pos in range(L):
                noisy = [x.copy() for x in slices]
                noisy[s][pos] ^= 1
                order = rng.permutation(Q)
                try:
                    ok = np.array_equal(codec.decode([noisy[i] for i in order]), msg)
                except Exception:
                    ok = False
                fails += not ok
    return fails


ROBUST_B = dict(M=1691, h=14, delta=1, crop=(3, 2, 41, 42))
ROBUST_C = dict(M=3375, h=20, delta=2)


def criterion_9() -> CheckResult:
    def run():
        rng = np.random.default_rng(9)
        fa = sum(single_substitution_failures(Q, L, 1, 8, rng) for Q, L in ((2, 16), (3, 25)))

        base = codec2d.derive_params_2d(2, ROBUST_B["M"], ROBUST_B["h"])
        rp = robust.validate_params_robust(base, ROBUST_B["delta"])
        msg = rng.integers(0, 2, rp.k).astype(np.uint8)
        g = robust.encode_robust(rp, msg)
        cmap = codec2d.color_map(base)
        top0, left0, a, b = ROBUST_B["crop"]
        fb = 0
        d = base.d
        for r in range(g.rows):
            for c in range(g.cols):
                cells = g.cells.copy()
                cells[r, c] ^= 1
                frag = BitGrid2D(cells).crop(top0, left0, a, b)
                t, l = robust.find_min_weight_square(frag, d)
                R, C = t + top0, l + left0
                aligned = R % d == 0 and C % d == 0 and cmap[R // d, C // d] == 0
                try:
                    ok = aligned and np.array_equal(robust.decode_robust(rp, frag), msg)
                except Exception:
                    ok = False
                fb += not ok

        base = codec2d.derive_params_2d(2, ROBUST_C["M"], ROBUST_C["h"])
        rp = robust.validate_params_robust(base, ROBUST_C["delta"])
        fc = 0
        trials = 1000
        for t in range(trials):
            msg = rng.integers(0, 2, rp.k).astype(np.uint8)
            g = robust.encode_robust(rp, msg)
            strategy = ("concentrate-on-zero-unit", "concentrate-on-borders")[t % 2]
            noisy, _ = channel.inject_flips(g, channel.FlipBudget(rp.delta, strategy, seed=t), d=base.d)
            res = channel.fragment(noisy, channel.FragmentationPlan(seed=t, max_cuts=3), base.M, base.h)
            frag = res.selected if res.selected is not None else noisy
            try:
                ok = np.array_equal(robust.decode_robust(rp, frag), msg)
            except Exception:
                ok = False
            fc += not ok
        return fa == fb == fc == 0, (
            f"(a) {fa} sliced-codec failures, (b) {fb} single-flip failures, "
            f"(c) {fc} of {trials} delta=2 adversarial failures"
        )
    return _timed("9 flip-tolerant code", run)


def criterion_10() -> CheckResult:
    def run():
        problems = []
        if rates.sphere_packing_bound(2, 1024, 0) != 1:
            problems.append("sphere(delta=0) != 1")
        seq = [rates.lll_existence_bound(2, 2 ** t, 2 ** t, 0) for t in range(10, 21)]
        if any(b2 < b1 for b1, b2 in zip(seq, seq[1:])):
            problems.append("LLL sequence not monotone")
        if seq[-1] < 0.99:
            problems.append(f"LLL at t=20 is {seq[-1]:.5f}")
        for which, variant in ((1, "d2-2"), (2, "d2-4")):
            for M, h, *_ in PUBLISHED[which]:
                r = rates.rate_2d(M, h, 2, variant)
                if r.rate > rates.sphere_packing_bound(2, M, 0):
                    problems.append(f"rate above sphere bound at M={M}")
        return not problems, f"LLL(t=20)={seq[-1]:.5f}; problems {problems}"
    return _timed("10 rate bounds", run)


def criterion_11() -> CheckResult:
    def run():
        bad = checked = 0
        for d in range(1, 65):
            for p in range(1, 13):
                for i in range(1, p + 1):
                    lhs, rhs = codec2d.unit_grid_inequality(d, p, i)
                    checked += 1
                    bad += lhs > rhs
        return bad == 0, f"{bad} violations over {checked} cases"
    return _timed("11 unit-grid inequality", run)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}

SUITES = {
    "discrepancy": (1, 2, 3),
    "lemmas": (4, 5, 11),
    "roundtrip": (6, 8),
    "robust": (9,),
    "tables": (7, 10),
    "all": tuple(range(1, 12)),
}


def run_suite(name: str) -> list[CheckResult]:
    return [CRITERIA[i]() for i in SUITES[name]]
