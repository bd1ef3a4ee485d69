"""Command-line interface: ``forensic-codes <subcommand> ...``.

Exit codes: 0 ok, 1 verify suite failed, 2 infeasible parameters, 3 decode
failure, 4 malformed input or usage, 5 no legal fragment.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import channel, codec2d, codec3d, rates, robust, verify
from .errors import DecodeError, GridFormatError, OutOfRangeError, ParameterError
from .formats import message_from_hex, message_to_hex, params_from_doc, params_to_doc
from .grid import BitGrid2D, BitGrid3D, read_grid, write_grid

EXIT_OK, EXIT_SUITE, EXIT_INFEASIBLE, EXIT_DECODE, EXIT_FORMAT, EXIT_NO_FRAGMENT = range(6)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _sub(subparsers, name: str, help_text: str) -> argparse.ArgumentParser:
    # -h is taken by the minimum side, so help is --help only
    p = subparsers.add_parser(name, help=help_text, add_help=False)
    p.add_argument("--help", action="help", help="show this help and exit")
    return p


def _load_params(path: str, kind: type | tuple):
    p = params_from_doc(Path(path).read_text())
    if not isinstance(p, kind):
        raise GridFormatError(f"{path} does not describe the right kind of code")
    return p


def _read_message(args, q: int) -> np.ndarray:
    text = args.message if args.message is not None else Path(args.message_file).read_text()
    return message_from_hex(text, q)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_params(args) -> int:
    if args.three_d:
        p = codec3d.derive_params_3d(args.q, args.M, args.h, args.n, args.n_prime)
    else:
        p = codec2d.derive_params_2d(args.q, args.M, args.h, args.n)
        if args.delta is not None:
            p = robust.validate_params_robust(p, args.delta)
    _emit(params_to_doc(p), args.output)
    return EXIT_OK


def _encoder(kind, encode):
    def run(args) -> int:
        p = _load_params(args.params, kind)
        write_grid(args.output, encode(p, _read_message(args, p.q)))
        return EXIT_OK
    return run


def _decoder(kind, decode, grid_type):
    def run(args) -> int:
        p = _load_params(args.params, kind)
        frag = read_grid(args.fragment)
        if not isinstance(frag, grid_type):
            raise GridFormatError(f"{args.fragment} has the wrong dimensionality")
        print(message_to_hex(decode(p, frag), p.q))
        return EXIT_OK
    return run


def cmd_fragment(args) -> int:
    g = read_grid(args.input)
    if not isinstance(g, BitGrid2D):
        raise GridFormatError("fragment works on 2D grids")
    crop = tuple(int(v) for v in args.crop.split(",")) if args.crop else None
    if crop is not None and len(crop) != 4:
        raise UsageError("--crop needs top,left,height,width")
    plan = channel.FragmentationPlan(seed=args.seed, mode=args.mode, max_cuts=args.max_cuts, crop=crop)
    res = channel.fragment(g, plan, args.M, args.h)
    if args.pieces:
        Path(args.pieces).write_text("".join(f"{t} {l} {a} {b}\n" for t, l, a, b in res.pieces))
    if res.selected is None:
        print(f"no legal fragment among {len(res.pieces)} pieces", file=sys.stderr)
        return EXIT_NO_FRAGMENT
    write_grid(args.output, res.selected)
    return EXIT_OK


def cmd_flip(args) -> int:
    g = read_grid(args.input)
    if not isinstance(g, BitGrid2D):
        raise GridFormatError("flip works on 2D grids")
    budget = channel.FlipBudget(args.delta, args.strategy, args.seed)
    out, positions = channel.inject_flips(g, budget, d=args.d)
    write_grid(args.output, out)
    if args.log:
        Path(args.log).write_text("".join(f"{r} {c}\n" for r, c in positions))
    return EXIT_OK


def cmd_rates(args) -> int:
    sys.stdout.write(rates.emit_table(args.table, "csv" if args.csv else "text"))
    return EXIT_OK


def cmd_bounds(args) -> int:
    sphere = rates.sphere_packing_bound(args.q, args.M, args.delta)
    lll = rates.lll_existence_bound(args.q, args.n, args.M, args.delta, args.exponent)
    if args.csv:
        print("q,n,M,delta,exponent,sphere,lll")
        print(f"{args.q},{args.n},{args.M},{args.delta},{args.exponent},{sphere:.9f},{lll:.9f}")
    else:
        print(f"sphere_packing_upper={sphere:.9f}")
        print(f"lll_existence_lower={lll:.9f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_suite(args.suite)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_SUITE


def _pgm(values: np.ndarray) -> bytes:
    rows, cols = values.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + values.astype(np.uint8).tobytes()


def cmd_render(args) -> int:
    g = read_grid(args.grid)
    if isinstance(g, BitGrid3D):
        if not 0 <= args.layer < g.dim_z:
            raise OutOfRangeError(f"layer {args.layer} outside 0..{g.dim_z - 1}")
        cells = g.cells[:, :, args.layer]
    else:
        cells = g.cells
    if args.colors:
        p = _load_params(args.colors, codec2d.CodeParams2D)
        cmap = codec2d.color_map(p)
        img = cmap * 255 // max(p.m_prime - 1, 1)
    else:
        img = cells.astype(np.int64) * 255 // (g.q - 1)
    Path(args.output).write_bytes(_pgm(img))
    return EXIT_OK


def _message_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--message", help="message as k:hex")
    src.add_argument("--message-file", help="file holding k:hex")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="forensic-codes", description="Fragment-decodable matrix and cuboid codes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = _sub(sub, "params", "derive code parameters")
    p.add_argument("-q", type=int, default=2)
    p.add_argument("-M", type=int, required=True)
    p.add_argument("-h", type=int, required=True)
    p.add_argument("-n", type=int)
    p.add_argument("--n-prime", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--3d", dest="three_d", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_params)

    for name, kind, enc, dec, gt in (
        ("2d", codec2d.CodeParams2D, codec2d.encode2d, codec2d.decode2d, BitGrid2D),
        ("3d", codec3d.CodeParams3D, codec3d.encode3d, codec3d.decode3d, BitGrid3D),
        ("-robust", robust.RobustParams, robust.encode_robust, robust.decode_robust, BitGrid2D),
    ):
        p = _sub(sub, f"encode{name}", "encode a message into a codeword file")
        p.add_argument("--params", required=True)
        _message_args(p)
        p.add_argument("-o", "--output", required=True)
        p.set_defaults(func=_encoder(kind, enc))
        p = _sub(sub, f"decode{name}", "decode a fragment file and print k:hex")
        p.add_argument("--params", required=True)
        p.add_argument("fragment")
        p.set_defaults(func=_decoder(kind, dec, gt))

    p = _sub(sub, "fragment", "tear a codeword and keep one legal piece")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("-M", type=int, required=True)
    p.add_argument("-h", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=channel.MODES, default="guillotine")
    p.add_argument("--max-cuts", type=int, default=4)
    p.add_argument("--crop", help="top,left,height,width for fixed-crop mode")
    p.add_argument("--pieces", help="write every piece as 'top left height width' lines")
    p.set_defaults(func=cmd_fragment)

    p = _sub(sub, "flip", "flip up to delta bits")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--strategy", choices=channel.STRATEGIES, default="random")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-d", type=int, help="unit side, needed by targeted strategies")
    p.add_argument("--log", help="write flipped positions as 'row col' lines")
    p.set_defaults(func=cmd_flip)

    p = _sub(sub, "rates", "print a rate table")
    p.add_argument("--table", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_rates)

    p = _sub(sub, "bounds", "print the sphere-packing and existence bounds")
    p.add_argument("-q", type=int, default=2)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-M", type=int, required=True)
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--exponent", type=float, choices=(1.5, 1.25), default=1.5)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = _sub(sub, "verify", "run a check suite")
    p.add_argument("suite", choices=tuple(verify.SUITES))
    p.set_defaults(func=cmd_verify)

    p = _sub(sub, "render", "write a grid (or its unit coloring) as a PGM image")
    p.add_argument("grid")
    p.add_argument("output")
    p.add_argument("--colors", metavar="PARAMS", help="render the unit color map instead")
    p.add_argument("--layer", type=int, default=0, help="z layer for 3D grids")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_FORMAT
    except ParameterError as exc:
        print(f"infeasible parameters [{exc.constraint}]: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DecodeError as exc:
        print(f"decode failed: {exc}", file=sys.stderr)
        return EXIT_DECODE
    except (GridFormatError, OutOfRangeError, OSError, ValueError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
