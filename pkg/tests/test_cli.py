import json
import subprocess
import sys

import pytest

from polarlab.channel import BmsChannel
from polarlab.cli import load_kernel, run
from polarlab.exponents import GoodnessParams, is_good
from polarlab.hitting_set import badness_matrix, greedy_cover
from polarlab.kernels import ARIKAN, polar_transform, sample_pool
from polarlab.quantize import Pavement, bundle_endpoints, enumerate_pavements, quantize_pair


def call(capsys, *argv):
    code = run(list(argv))
    return code, capsys.readouterr()


def test_bundles_n3(capsys):
    code, out = call(capsys, "bundles", "--n", "3")
    assert code == 0
    js = json.loads(out.out)
    assert js["count"] == 6 and len(js["pavements"]) == 6
    code, out = call(capsys, "bundles", "--n", "3", "--include-vertex-connected")
    assert json.loads(out.out)["count"] == 13


def test_bec_transform_text(capsys):
    code, out = call(capsys, "bec-transform", "--eps", "0.5", "--kernel", "arikan")
    assert code == 0
    assert out.out.strip() == "0.75, 0.25"


def test_quantize_matches_library(capsys, tmp_path):
    plot = tmp_path / "q.png"
    code, out = call(capsys, "quantize", "--bsc", "0.11", "--n", "4", "--plot", str(plot))
    js = json.loads(out.out)
    q = quantize_pair(BmsChannel.bsc(0.11), 4)
    assert js["pavement"] == q.pavement.steps
    assert js["H_D"] == q.D.entropy and js["H_U"] == q.U.entropy
    assert plot.stat().st_size > 0


def test_transform_matches_library(capsys):
    code, out = call(capsys, "transform", "--channel", '{"bsc": 0.2}', "--kernel", "arikan2")
    js = json.loads(out.out)
    G = ARIKAN.kron(ARIKAN)
    assert js["entropies"] == [c.entropy for c in polar_transform(BmsChannel.bsc(0.2), G)]


def test_transform_csv(capsys):
    code, out = call(capsys, "transform", "--bec", "0.3", "--kernel", "10,11", "--format", "csv")
    lines = out.out.splitlines()
    assert lines[0] == "index,entropy,capacity,atoms" and len(lines) == 3


def test_goodness_matches_library(capsys):
    code, out = call(capsys, "goodness", "--kernel", "arikan2", "--bundle", "RU")
    js = json.loads(out.out)
    rep = is_good(load_kernel("arikan2"), bundle_endpoints(Pavement.parse("RU")), GoodnessParams())
    for key, val in rep.to_json().items():
        assert js[key] == val


def test_exponents(capsys, tmp_path):
    code, out = call(capsys, "exponents", "--bec", "0.5", "--rho-points", "3", "--rate-points", "3",
                     "--plot", str(tmp_path / "e.png"))
    js = json.loads(out.out)
    assert js["e0"][0] == [0.0, 0.0]
    assert js["e0"][-1][1] == pytest.approx(0.41504, abs=1e-5)
    assert (tmp_path / "e.png").exists()


def test_select_matches_library_and_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["select", "--ell", "4", "--mu", "3", "--pool", "30", "--seed", "7"]
    assert run(argv + ["--out", str(a), "--matrix-csv", str(tmp_path / "m.csv")]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    js = json.loads(a.read_text())
    bundles = [bundle_endpoints(p) for p in enumerate_pavements(2)]
    pool = sample_pool(4, 30, 7)
    M = badness_matrix(bundles, pool, GoodnessParams())
    cover = greedy_cover(M, pool)
    assert js["selected"] == cover.selected
    assert js["rounds"] == cover.rounds
    assert (tmp_path / "m.csv").read_text() == M.to_csv()


def test_simulate_with_table(capsys, tmp_path):
    table = tmp_path / "sel.json"
    assert run(["select", "--ell", "4", "--mu", "3", "--pool", "10", "--seed", "1", "--out", str(table)]) == 0
    code, out = call(capsys, "simulate", "--bec", "0.5", "--levels", "2", "--table", str(table),
                     "--kernel", "arikan2", "--plot", str(tmp_path / "s.png"))
    assert code == 0
    js = json.loads(out.out)
    assert [lv["leaves"] for lv in js["levels"]] == [1, 4, 16]
    assert (tmp_path / "s.png").exists()


def test_simulate_missing_kernel_is_error(capsys):
    code, out = call(capsys, "simulate", "--bsc", "0.11", "--levels", "1", "--table", "/nonexistent.json")
    assert code == 1


def test_bound(capsys, tmp_path):
    code, out = call(capsys, "bound", "--ell-grid", "16,64", "--mu-grid", "3", "--b", "0.01", "--B", "10000",
                     "--plot", str(tmp_path / "b.png"))
    js = json.loads(out.out)
    assert js["bound_m"] == pytest.approx(4.0)
    assert len(js["rows"]) == 2
    assert (tmp_path / "b.png").exists()


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["bec-transform"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["bec-transform", "--eps", "1.5"],
    ["quantize", "--bsc", "0.1", "--n", "1"],
    ["bundles", "--n", "15"],
    ["goodness", "--kernel", "arikan", "--bundle", "RU"],
    ["transform", "--bsc", "0.1", "--kernel", "11,11"],
])
def test_domain_errors_exit_1(capsys, argv):
    code, out = call(capsys, *argv)
    assert code == 1
    assert "error" in out.err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "polarlab", "bundles", "--n", "2"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["pavements"] == ["RU", "UR"]


def test_malformed_channel_json_exit_1(capsys):
    code, out = call(capsys, "transform", "--channel", '{"atoms": [{"q": 1}]}')
    assert code == 1 and "malformed" in out.err
