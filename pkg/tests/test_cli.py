from __future__ import annotations

import numpy as np
import pytest

from forensic_codes import cli, verify
from forensic_codes.grid import BitGrid2D, read_grid, write_grid


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def doc(text: str) -> dict:
    return dict(line.split("=", 1) for line in text.splitlines())


@pytest.fixture
def small(tmp_path, capsys):
    params = tmp_path / "p.txt"
    assert run(capsys, "params", "-q", 2, "-M", 1024, "-h", 14, "-o", params)[0] == 0
    return params


def test_params_2d(capsys):
    code, out, _ = run(capsys, "params", "-q", 2, "-M", 1024, "-h", 14)
    assert code == 0
    fields = doc(out)
    assert (fields["kind"], fields["d"], fields["m"]) == ("2d", "5", "8")


def test_params_3d(capsys):
    code, out, _ = run(capsys, "params", "-q", 2, "-M", 209935, "-h", 11, "--3d")
    assert code == 0
    fields = doc(out)
    assert (fields["d"], fields["a"], fields["b"]) == ("4", "16", "27")


def test_params_robust(capsys):
    code, out, _ = run(capsys, "params", "-M", 3375, "-h", 20, "--delta", 2)
    assert code == 0
    assert doc(out)["k_robust"] == "9"


def test_params_infeasible(capsys):
    code, _, err = run(capsys, "params", "-q", 2, "-M", 10, "-h", 100)
    assert code == 2 and "infeasible" in err
    assert run(capsys, "params", "-M", 1691, "-h", 14, "--delta", 3)[0] == 2


@pytest.mark.parametrize("argv", [[], ["params"], ["nope"], ["params", "-M", "x", "-h", "1"],
                                  ["fragment", "a", "-o", "b", "-M", "1", "-h", "1",
                                   "--seed", "0", "--crop", "1,2"]])
def test_usage_errors_exit_4(capsys, argv, tmp_path):
    if argv and argv[0] == "fragment":
        write_grid(tmp_path / "g", BitGrid2D(np.zeros((4, 4), dtype=np.uint8)))
        argv = ["fragment", str(tmp_path / "g")] + argv[2:]
    assert run(capsys, *argv)[0] == 4


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["params", "--help"])
    assert exc.value.code == 0
    assert "-M" in capsys.readouterr().out


def test_encode_decode_full_codeword(small, tmp_path, capsys):
    cw = tmp_path / "cw.fc"
    assert run(capsys, "encode2d", "--params", small, "--message", "21:abcde0", "-o", cw)[0] == 0
    code, out, _ = run(capsys, "decode2d", "--params", small, cw)
    assert code == 0 and out.strip() == "21:abcde0"


def test_message_file_and_wrong_length(small, tmp_path, capsys):
    msg = tmp_path / "m.txt"
    msg.write_text("3:a0\n")
    code, _, err = run(capsys, "encode2d", "--params", small, "--message-file", msg,
                       "-o", tmp_path / "x")
    assert code == 2
    msg.write_text("3:zz\n")
    assert run(capsys, "encode2d", "--params", small, "--message-file", msg,
               "-o", tmp_path / "x")[0] == 4


def test_seeded_pipeline(tmp_path, capsys):
    params = tmp_path / "p.txt"
    run(capsys, "params", "-M", 1024, "-h", 14, "-n", 80, "-o", params)
    cw, frag = tmp_path / "cw.fc", tmp_path / "frag.fc"
    msg = "21:5a5a58"
    run(capsys, "encode2d", "--params", params, "--message", msg, "-o", cw)
    for seed in range(20):
        code = run(capsys, "fragment", cw, "-o", frag, "-M", 1024, "-h", 14, "--seed", seed,
                   "--max-cuts", 3)[0]
        if code == 0:
            break
    assert code == 0
    assert read_grid(frag).shape != read_grid(cw).shape or seed == 0
    code, out, _ = run(capsys, "decode2d", "--params", params, frag)
    assert code == 0 and out.strip() == msg


def test_decode_illegal_fragment_exit_3(small, tmp_path, capsys):
    cw, frag = tmp_path / "cw.fc", tmp_path / "frag.fc"
    run(capsys, "encode2d", "--params", small, "--message", "21:000008", "-o", cw)
    run(capsys, "fragment", cw, "-o", frag, "-M", 1, "-h", 1, "--seed", 0,
        "--mode", "fixed-crop", "--crop", "0,0,13,40")
    code, _, err = run(capsys, "decode2d", "--params", small, frag)
    assert code == 3 and "not legal" in err


def test_wrong_params_kind_and_missing_file(small, tmp_path, capsys):
    cw = tmp_path / "cw.fc"
    run(capsys, "encode2d", "--params", small, "--message", "21:000000", "-o", cw)
    assert run(capsys, "decode3d", "--params", small, cw)[0] == 4
    assert run(capsys, "decode2d", "--params", small, tmp_path / "missing")[0] == 4
    (tmp_path / "bad.fc").write_bytes(b"garbage")
    assert run(capsys, "decode2d", "--params", small, tmp_path / "bad.fc")[0] == 4


def test_zero_cuts_and_zero_flips_are_identity(small, tmp_path, capsys):
    cw = tmp_path / "cw.fc"
    run(capsys, "encode2d", "--params", small, "--message", "21:123450", "-o", cw)
    run(capsys, "fragment", cw, "-o", tmp_path / "f", "-M", 1024, "-h", 14, "--seed", 1,
        "--max-cuts", 0)
    assert (tmp_path / "f").read_bytes() == cw.read_bytes()
    run(capsys, "flip", cw, "-o", tmp_path / "g", "--delta", 0, "--seed", 1)
    assert (tmp_path / "g").read_bytes() == cw.read_bytes()


def test_no_legal_fragment_exit_5(small, tmp_path, capsys):
    cw = tmp_path / "cw.fc"
    run(capsys, "encode2d", "--params", small, "--message", "21:000000", "-o", cw)
    code, _, err = run(capsys, "fragment", cw, "-o", tmp_path / "f", "-M", 5000, "-h", 14,
                       "--seed", 0, "--pieces", tmp_path / "pieces.txt")
    assert code == 5 and "no legal fragment" in err
    assert (tmp_path / "pieces.txt").read_text().strip()


def test_runs_are_deterministic(small, tmp_path, capsys):
    cw = tmp_path / "cw.fc"
    run(capsys, "encode2d", "--params", small, "--message", "21:0f0f08", "-o", cw)
    outs = []
    for i in range(2):
        f, g, log = tmp_path / f"f{i}", tmp_path / f"g{i}", tmp_path / f"l{i}"
        run(capsys, "fragment", cw, "-o", f, "-M", 600, "-h", 14, "--seed", 7)
        run(capsys, "flip", f, "-o", g, "--delta", 3, "--seed", 7, "--log", log)
        outs.append((f.read_bytes(), g.read_bytes(), log.read_text()))
    assert outs[0] == outs[1]
    assert len(outs[0][2].splitlines()) == 3


def test_robust_pipeline(tmp_path, capsys):
    params = tmp_path / "rp.txt"
    run(capsys, "params", "-M", 3375, "-h", 20, "--delta", 2, "-o", params)
    cw, noisy, frag = tmp_path / "cw", tmp_path / "noisy", tmp_path / "frag"
    assert run(capsys, "encode-robust", "--params", params, "--message", "9:a580",
               "-o", cw)[0] == 0
    assert run(capsys, "flip", cw, "-o", noisy, "--delta", 2, "--seed", 3,
               "--strategy", "concentrate-on-zero-unit", "-d", 7)[0] == 0
    run(capsys, "fragment", noisy, "-o", frag, "-M", 1, "-h", 1, "--seed", 0,
        "--mode", "fixed-crop", "--crop", "5,9,60,61")
    code, out, _ = run(capsys, "decode-robust", "--params", params, frag)
    assert code == 0 and out.strip() == "9:a580"


def test_3d_pipeline(tmp_path, capsys):
    params = tmp_path / "p3.txt"
    run(capsys, "params", "-M", 209935, "-h", 11, "--3d", "-o", params)
    cw = tmp_path / "cw3"
    k = int(doc(params.read_text())["k"])
    bits = np.random.default_rng(0).integers(0, 2, k)
    msg = f"{k}:{np.packbits(bits).tobytes().hex()}"
    assert run(capsys, "encode3d", "--params", params, "--message", msg, "-o", cw)[0] == 0
    code, out, _ = run(capsys, "decode3d", "--params", params, cw)
    assert code == 0 and out.strip() == msg


def test_rates_and_bounds(capsys):
    code, out, _ = run(capsys, "rates", "--table", 1)
    assert code == 0 and "0.022461" in out
    code, out, _ = run(capsys, "rates", "--table", 3, "--csv")
    assert out.splitlines()[0] == "M,h,d,a,b,rate"
    code, out, _ = run(capsys, "bounds", "-n", 64, "-M", 64)
    assert "lll_existence_lower=0.531250000" in out
    code, out, _ = run(capsys, "bounds", "-n", 8, "-M", 8, "--delta", 1, "--csv")
    assert float(out.splitlines()[1].split(",")[5]) == pytest.approx(0.60376, abs=1e-5)
    assert run(capsys, "rates", "--table", 4)[0] == 4


def test_verify_exit_codes(capsys, monkeypatch):
    code, out, _ = run(capsys, "verify", "tables")
    assert code == 0
    assert [line.split()[0] for line in out.splitlines()] == ["PASS", "PASS"]
    failing = verify.CheckResult("fake", False, "forced")
    monkeypatch.setattr(verify, "run_suite", lambda name: [failing])
    code, out, _ = run(capsys, "verify", "lemmas")
    assert code == 1 and out.startswith("FAIL")


def _read_pgm(path):
    raw = path.read_bytes()
    magic, dims, maxval, body = raw.split(b"\n", 3)
    cols, rows = map(int, dims.split())
    assert (magic, maxval) == (b"P5", b"255")
    return np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)


def test_render_grid_and_colors(small, tmp_path, capsys):
    z = tmp_path / "z.fc"
    write_grid(z, BitGrid2D(np.zeros((6, 9), dtype=np.uint8)))
    assert run(capsys, "render", z, tmp_path / "z.pgm")[0] == 0
    img = _read_pgm(tmp_path / "z.pgm")
    assert img.shape == (6, 9) and not img.any()

    params = tmp_path / "p.txt"
    run(capsys, "params", "-M", 2048, "-h", 14, "-o", params)
    assert run(capsys, "render", z, tmp_path / "c.pgm", "--colors", params)[0] == 0
    cmap = _read_pgm(tmp_path / "c.pgm")
    assert sorted(set(cmap.ravel().tolist())) == [0, 85, 170, 255]
    run(capsys, "render", z, tmp_path / "c2.pgm", "--colors", params)
    assert (tmp_path / "c.pgm").read_bytes() == (tmp_path / "c2.pgm").read_bytes()
    assert run(capsys, "render", tmp_path / "nope", tmp_path / "x.pgm")[0] == 4
