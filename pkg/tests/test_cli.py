import json

import numpy as np
import pytest

from muchan import io
from muchan.cli import main
from muchan.gallery import corr_B3, weyl_channel, wh_sym3_decomposition


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip()
    lines = [ln for ln in out.splitlines() if ln]
    return code, json.loads(lines[-1])


# ------------------------------------------------------------------ file io

def test_channel_roundtrip(tmp_path):
    p = tmp_path / "weyl.json"
    phi = weyl_channel(3)
    io.save(phi, str(p))
    kind, loaded = io.load(str(p))
    assert kind == "kraus"
    assert loaded.dim_in == 3
    for a, b in zip(phi.kraus, loaded.kraus):
        assert np.array_equal(a, b)  # floats round-trip exactly


def test_decomposition_roundtrip(tmp_path):
    p = tmp_path / "d.json"
    d = wh_sym3_decomposition()
    io.save(d, str(p))
    kind, loaded = io.load(str(p))
    assert kind == "mixed-unitary"
    assert loaded.n_terms == 6
    for a, b in zip(d.unitaries, loaded.unitaries):
        assert np.array_equal(a, b)


def test_load_rejects_missing_format(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"kind": "correlation", "matrix": [[[1.0, 0.0]]]}))
    with pytest.raises(io.FileFormatError if hasattr(io, "FileFormatError") else Exception):
        io.load(str(p))


def test_load_rejects_garbage(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    from muchan import FileFormatError
    with pytest.raises(FileFormatError):
        io.load(str(p))


# ---------------------------------------------------------------------- gen

def test_gen_to_stdout(capsys):
    code, obj = run_cli(capsys, "gen", "weyl:3")
    assert code == 0
    assert obj["kind"] == "kraus" and obj["dim_in"] == 3
    assert obj["format"] == "muchan/1"


def test_gen_unknown_name(capsys):
    code, obj = run_cli(capsys, "gen", "nosuch:1")
    assert code == 2
    assert obj["error"]["code"] == "invalid"


def test_gen_all_stable_names(tmp_path, capsys):
    names = ["weyl:3", "gap:3:1", "wh0:5", "wh1:6", "mubcorr:3", "corrB3",
             "corrC4", "ctensor2", "wh0sym3", "wh0even:4", "wh0odd:3",
             "wh1anti:4", "mubdec:2"]
    for i, name in enumerate(names):
        out = tmp_path / f"g{i}.json"
        code, obj = run_cli(capsys, "gen", name, "-o", str(out))
        assert code == 0, name
        io.load(str(out))


# ------------------------------------------------------------------ analyze

def test_analyze_weyl3(tmp_path, capsys):
    p = tmp_path / "c.json"
    io.save(weyl_channel(3), str(p))
    code, obj = run_cli(capsys, "analyze", str(p))
    assert code == 0
    assert obj["r"] == 3 and obj["s"] == 7
    assert obj["uniqueness_certified"] is True
    assert obj["exact"] == 3
    assert obj["schur_equivalent"] is False


def test_analyze_malformed_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("[]")
    code, obj = run_cli(capsys, "analyze", str(p))
    assert code == 2
    assert obj["error"]["code"] == "format"
    assert obj["error"]["path"] == str(p)


# ------------------------------------------------------------ verify/search

def test_verify_wh0sym3_pipeline(tmp_path, capsys):
    cpath, dpath = tmp_path / "c.json", tmp_path / "d.json"
    code, _ = run_cli(capsys, "gen", "wh0:3", "-o", str(cpath))
    assert code == 0
    code, _ = run_cli(capsys, "gen", "wh0sym3", "-o", str(dpath))
    assert code == 0
    code, obj = run_cli(capsys, "verify", str(cpath), str(dpath))
    assert code == 0
    assert obj["ok"] is True and obj["choi_residual"] <= 1e-10


def test_verify_mismatch_exits_3(tmp_path, capsys):
    cpath, dpath = tmp_path / "c.json", tmp_path / "d.json"
    run_cli(capsys, "gen", "wh0:3", "-o", str(cpath))
    run_cli(capsys, "gen", "wh0even:4", "-o", str(dpath))
    code, obj = run_cli(capsys, "verify", str(cpath), str(dpath))
    assert code == 2  # dimension mismatch is an input error
    assert "error" in obj


def test_verify_wrong_decomposition_exits_3(tmp_path, capsys):
    import muchan
    cpath, dpath = tmp_path / "c.json", tmp_path / "d.json"
    io.save(muchan.dephasing_channel(3), str(cpath))
    d = muchan.MixedUnitaryDecomposition([1.0], [np.eye(3)])
    io.save(d, str(dpath))
    code, obj = run_cli(capsys, "verify", str(cpath), str(dpath))
    assert code == 3
    assert obj["ok"] is False


def test_search_fixed_n(tmp_path, capsys):
    p = tmp_path / "c.json"
    io.save(weyl_channel(3), str(p))
    code, obj = run_cli(capsys, "search", str(p), "--N", "3",
                        "--restarts", "5", "--seed", "0")
    assert code == 0
    assert obj["status"] == "found"
    assert obj["decomposition"]["kind"] == "mixed-unitary"
    assert len(obj["restart_log"]) >= 1


def test_search_not_found_exits_3(tmp_path, capsys):
    from muchan.gallery import gap_channel
    p = tmp_path / "c.json"
    io.save(gap_channel(3, 1), str(p))
    code, obj = run_cli(capsys, "search", str(p), "--N", "4",
                        "--restarts", "4", "--seed", "0")
    assert code == 3
    assert obj["status"] == "not_found"


def test_search_gap_at_six(tmp_path, capsys):
    p = tmp_path / "gap.json"
    code, _ = run_cli(capsys, "gen", "gap:3:1", "-o", str(p))
    assert code == 0
    code, obj = run_cli(capsys, "search", str(p), "--N", "6",
                        "--restarts", "10", "--seed", "0")
    assert code == 0
    assert obj["status"] == "found"
    assert len(obj["decomposition"]["unitaries"]) == 6


def test_search_scan(tmp_path, capsys):
    p = tmp_path / "c.json"
    io.save(weyl_channel(3), str(p))
    code, obj = run_cli(capsys, "search", str(p), "--scan",
                        "--restarts", "5", "--seed", "0")
    assert code == 0
    assert obj["N_found"] == 3
    assert obj["bounds"]["r"] == 3


def test_search_reports_reproducible(tmp_path, capsys, monkeypatch):
    p = tmp_path / "c.json"
    io.save(weyl_channel(3), str(p))
    outs = []
    for threads in ("1", "1", "3"):  # parallel run must match sequential
        monkeypatch.setenv("MUCHAN_THREADS", threads)
        code, obj = run_cli(capsys, "search", str(p), "--N", "3",
                            "--restarts", "4", "--seed", "7")
        assert code == 0
        obj.pop("timestamp")
        outs.append(json.dumps(obj, sort_keys=True))
    assert outs[0] == outs[1] == outs[2]


# ---------------------------------------------------------------- zero-diag

def test_zero_diag_command(tmp_path, capsys):
    p = tmp_path / "z.json"
    rng = np.random.default_rng(0)
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    z -= np.trace(z) / 4 * np.eye(4)
    with open(p, "w") as fh:
        json.dump(io.matrix_obj(z), fh)
    code, obj = run_cli(capsys, "zero-diag", str(p))
    assert code == 0
    u = io.matrix_from_literal(obj["unitary"])
    assert obj["residual"] <= 1e-8 * np.linalg.norm(z)
    assert np.max(np.abs(np.diag(u @ z @ u.conj().T))) <= 1e-8 * np.linalg.norm(z)


def test_zero_diag_rejects_nonzero_trace(tmp_path, capsys):
    p = tmp_path / "z.json"
    with open(p, "w") as fh:
        json.dump(io.matrix_obj(np.eye(2)), fh)
    code, obj = run_cli(capsys, "zero-diag", str(p))
    assert code == 2
    assert obj["error"]["code"] == "invalid"


def test_usage_error_is_json(capsys):
    code = main(["search"])  # missing required arguments
    out = capsys.readouterr().out.strip()
    assert code == 2
    assert json.loads(out)["error"]["code"] == "usage"


def test_correlation_file_kind(tmp_path, capsys):
    p = tmp_path / "b3.json"
    io.save(corr_B3(), str(p))
    kind, c = io.load(str(p))
    assert kind == "correlation"
    assert np.array_equal(c, corr_B3())
