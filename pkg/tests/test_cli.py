import io
import json

import pytest

from bipmaps import cli


def run(args, tmp_path=None):
    out = io.StringIO()
    code = cli.run(args, stdout=out)
    return code, out.getvalue()


def test_analyze_weights_reports_kappa_and_pi():
    code, out = run(["analyze-weights"])
    rec = json.loads(out)
    assert code == 0
    assert rec["result"]["kappa"] == 1.0
    assert rec["result"]["pi"][:3] == pytest.approx([0.5, 0.25, 0.125])
    assert rec["config"]["command"] == "analyze-weights" and rec["bipmaps"]


def test_sample_map_writes_one_map_per_line(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 500, "count": 3}))
    code, _ = run(["sample-map", "--config", str(cfg), "--out", str(tmp_path / "o")])
    lines = (tmp_path / "o" / "sample-map.ndjson").read_text().splitlines()
    assert code == 0 and len(lines) == 4
    assert all(len(json.loads(ln)["edges"]) == 500 for ln in lines[1:])


def test_spectral_run_reports_ds(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"maps": 1, "walkers": 50, "fit_window": [4, 32], "min_vertices": 500,
                               "weights": {"family": "power_law_kappa", "kappa": 0.5, "beta": 5}}))
    code, out = run(["spectral-run", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 0 and "d_s" in json.loads(out)["summary"]


@pytest.mark.parametrize("cfg,pointer", [
    ({"n": 0}, "/n"),
    ({"bogus": 1}, "/"),
    ({"weights": {"family": "power_law", "c": 1}}, "/weights/beta"),
    ({"seed": -1}, "/seed"),
])
def test_config_errors_exit_2_with_pointer(tmp_path, capsys, cfg, pointer):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    code, _ = run(["sample-map", "--config", str(p)])
    assert code == 2
    assert f"config error: {pointer}" in capsys.readouterr().err


def test_wrong_format_is_a_config_error():
    assert run(["sample-tree", "--format", "dot"])[0] == 2


def test_capacity_error_exit_3(monkeypatch):
    from bipmaps.errors import CapacityError

    def boom(cfg, jobs):
        raise CapacityError("too big")

    monkeypatch.setitem(cli.HANDLERS, "limit-ball", boom)
    assert run(["limit-ball"])[0] == 3


def test_verify_failure_exit_4(monkeypatch):
    from bipmaps import oracle

    def failing(max_n=5):
        return oracle.SuiteReport("bijection", 1, [("forced",)], {})

    monkeypatch.setattr(oracle, "bijection_suite", failing)
    code, out = run(["verify", "--format", "json"] + [])
    assert code == 4


def test_verify_passes_small(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"suites": ["bijection"], "max_n": 3}))
    assert run(["verify", "--config", str(p)])[0] == 0


def test_export_dot_from_sample_file(tmp_path):
    run(["sample-map", "--out", str(tmp_path)])
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"input": str(tmp_path / "sample-map.ndjson")}))
    code, out = run(["export-dot", "--config", str(p)])
    assert code == 0 and "graph map {" in out


def test_rerun_is_byte_identical(tmp_path):
    run(["limit-ball", "--seed", "5", "--out", str(tmp_path / "a")])
    run(["limit-ball", "--config", str(tmp_path / "a" / "config.json"), "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "limit-ball.ndjson").read_bytes() == (tmp_path / "b" / "limit-ball.ndjson").read_bytes()
