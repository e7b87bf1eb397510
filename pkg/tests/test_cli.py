"""CLI subcommands and their exit-code contract."""

import json

import pytest

from dtrealize.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main
from dtrealize.formats import certificate_from_json, graph_to_json
from dtrealize.plane_graph import build_triangulation


@pytest.fixture
def fan_file(tmp_path):
    path = tmp_path / "fan.json"
    assert main(["gen", "fan", "5", "--graph-out", str(path)]) == EXIT_OK
    return path


def test_gen_fan_and_check(fan_file, tmp_path):
    out = tmp_path / "report.json"
    assert main(["check", str(fan_file), "-o", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["ok"] is True
    assert doc["violations"] == []


def test_gen_random_with_points(tmp_path):
    g = tmp_path / "g.json"
    p = tmp_path / "p.txt"
    assert main(["gen", "random", "6", "--graph-out", str(g),
                 "--points-out", str(p)]) == EXIT_OK
    assert main(["check", str(g)]) == EXIT_OK
    assert len(p.read_text().strip().splitlines()) == 6


def test_gen_rejects_small_n(tmp_path):
    assert main(["gen", "fan", "3", "--graph-out", str(tmp_path / "x")]) == EXIT_USAGE


def test_check_invalid_graph(tmp_path):
    rot = {1: [2, 4], 2: [3, 1], 3: [4, 2], 4: [1, 3]}
    G = build_triangulation(4, rot, (1, 2, 3, 4))
    path = tmp_path / "bad.json"
    path.write_text(graph_to_json(G))
    assert main(["check", str(path)]) == EXIT_INVALID


def test_missing_file_is_usage_error():
    assert main(["check", "/nonexistent/graph.json"]) == EXIT_USAGE


def test_emit_json_and_smt2(fan_file, tmp_path, capsys):
    out = tmp_path / "sys.json"
    assert main(["emit", str(fan_file), "--flavor", "const",
                 "-o", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["flavor"] == "CONST"
    err = capsys.readouterr().err
    assert "variables" in err and "constraints" in err

    out2 = tmp_path / "sys.smt2"
    assert main(["emit", str(fan_file), "--flavor", "constsqu",
                 "--format", "smt2", "-o", str(out2)]) == EXIT_OK
    assert out2.read_text().startswith("(set-logic QF_NRA)")


def test_emit_face_index_out_of_range(fan_file):
    # a fan fixes its own outer face: only index 0 exists
    assert main(["emit", str(fan_file), "--face-index", "7"]) == EXIT_USAGE


def test_realize_verify_round_trip(fan_file, tmp_path):
    cert_path = tmp_path / "cert.json"
    svg_path = tmp_path / "plot.svg"
    assert main(["realize", str(fan_file), "-o", str(cert_path),
                 "--plot", str(svg_path)]) == EXIT_OK
    cert = certificate_from_json(cert_path.read_text())
    assert svg_path.read_text().startswith("<svg")

    pts_path = tmp_path / "pts.txt"
    pts_path.write_text("".join(f"{x} {y}\n" for x, y in cert.points))
    assert main(["verify", str(fan_file), str(pts_path)]) == EXIT_OK


def test_verify_rejects_wrong_points(fan_file, tmp_path):
    pts_path = tmp_path / "pts.txt"
    # collinear points cannot realize anything
    pts_path.write_text("".join(f"{i} {i}\n" for i in range(5)))
    out = tmp_path / "verdict.json"
    assert main(["verify", str(fan_file), str(pts_path), "-o", str(out)]) == EXIT_VERIFY
    doc = json.loads(out.read_text())
    assert doc["ok"] is False
    assert doc["failed_step"] == "NOT_GENERAL_POSITION"


def test_verify_requires_integer_points(fan_file, tmp_path):
    pts_path = tmp_path / "pts.txt"
    pts_path.write_text("1/2 0\n1 0\n2 0\n0 1\n0 2\n")
    assert main(["verify", str(fan_file), str(pts_path)]) == EXIT_USAGE


def test_verify_wrong_count(fan_file, tmp_path):
    pts_path = tmp_path / "pts.txt"
    pts_path.write_text("0 0\n1 0\n")
    assert main(["verify", str(fan_file), str(pts_path)]) == EXIT_USAGE


def test_realize_invalid_graph_exit(tmp_path):
    rot = {1: [2, 4], 2: [3, 1], 3: [4, 2], 4: [1, 3]}
    G = build_triangulation(4, rot, (1, 2, 3, 4))
    path = tmp_path / "bad.json"
    path.write_text(graph_to_json(G))
    out = tmp_path / "res.json"
    assert main(["realize", str(path), "-o", str(out)]) == EXIT_INVALID
    assert json.loads(out.read_text())["status"] == "INVALID_INPUT"


def test_seed_flag_deterministic(fan_file, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["--seed", "9", "realize", str(fan_file), "-o", str(a)]) == EXIT_OK
    assert main(["--seed", "9", "realize", str(fan_file), "-o", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
