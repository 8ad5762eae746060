import subprocess
import sys

import pytest

from stableclust.cli import main

from conftest import HUB, TWO_TRIANGLES


@pytest.fixture
def hub_file(tmp_path):
    p = tmp_path / "hub.nsl"
    p.write_text(HUB)
    return p


def test_cluster(hub_file, tmp_path, capsys):
    assert main(["cluster", "-i", str(hub_file), "-o", str(tmp_path / "o1")]) == 0
    out = capsys.readouterr().out
    assert "levels: 1" in out and "clusters=3" in out and "Q=0.266667" in out
    assert main(["cluster", "-i", str(hub_file), "-o", str(tmp_path / "o2")]) == 0
    for name in ("level1.cnl", "manifest.txt"):
        assert (tmp_path / "o1" / name).read_bytes() == (tmp_path / "o2" / name).read_bytes()


def test_missing_file(tmp_path, capsys):
    assert main(["cluster", "-i", str(tmp_path / "nope.nsl"), "-o", str(tmp_path)]) == 2
    assert "cannot open" in capsys.readouterr().err


def test_parse_error_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.nsl"
    p.write_text("0 1\n0 x\n")
    assert main(["cluster", "-i", str(p), "-o", str(tmp_path / "o")]) == 1
    assert "line 2" in capsys.readouterr().err


def test_usage_error_exit_2(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["perturb", "-i", "x", "-f", "0.1"])  # seed is mandatory
    assert e.value.code == 2


def test_eval(tmp_path, capsys):
    a = tmp_path / "a.cnl"
    b = tmp_path / "b.cnl"
    a.write_text("1\n2\n3\n")
    b.write_text("1 2 3\n")
    assert main(["eval", str(a), str(a)]) == 0
    assert "F1h: 1.000000" in capsys.readouterr().out
    assert main(["eval", str(a), str(b)]) == 0
    out = capsys.readouterr().out
    assert "F1a: 0.500000" in out and "F1h: 0.500000" in out
    e = tmp_path / "e.cnl"
    e.write_text("")
    assert main(["eval", str(e), str(b)]) == 1


def test_perturb_deterministic(tmp_path):
    net = tmp_path / "n.nsl"
    net.write_text("".join(f"{i} {j}\n" for i in range(12) for j in range(i + 1, 12)))
    outs = []
    for k in range(2):
        o = tmp_path / f"p{k}.nsl"
        assert main(["perturb", "-i", str(net), "-f", "0.02", "-s", "1", "-o", str(o)]) == 0
        outs.append(o.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"# Nodes: 12 Links: 65")


def test_oracle(tmp_path, capsys):
    p = tmp_path / "tt.nsl"
    p.write_text(TWO_TRIANGLES)
    assert main(["oracle", "-i", str(p)]) == 0
    assert capsys.readouterr().out == "0 1 2\n3 4 5\nQ*: 0.357143\n"


def test_generate_and_protocol(tmp_path, capsys):
    g = tmp_path / "g"
    assert main(["generate", "-n", "120", "-k", "4", "--p-in", "0.4", "--p-out", "0.02",
                 "-s", "3", "-o", str(g)]) == 0
    assert (g / "truth.cnl").read_text().count("\n") == 4
    capsys.readouterr()
    out = tmp_path / "proto"
    assert main(["protocol", "-i", str(g / "network.nse"), "-s", "1", "--shuffles", "2",
                 "-o", str(out)]) == 0
    lines = (out / "protocol.csv").read_text().splitlines()
    assert len(lines) == 9
    assert (out / "protocol.png").stat().st_size > 0


def test_bench(tmp_path, capsys):
    assert main(["bench", "--links", "2000,4000", "-s", "1", "-o", str(tmp_path)]) == 0
    assert (tmp_path / "bench.csv").read_text().count("\n") == 3
    assert (tmp_path / "bench.png").exists()
    assert "loglog slope" in capsys.readouterr().out


def test_module_entry_point(hub_file, tmp_path):
    r = subprocess.run([sys.executable, "-m", "stableclust", "cluster", "-i", str(hub_file),
                        "-o", str(tmp_path / "m")], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.startswith("levels: 1")
