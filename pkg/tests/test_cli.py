import json

import pytest

from qdconsensus.cli import (
    ExperimentConfig,
    build_parser,
    main,
    run,
    write_table,
    _parse_set,
)
from qdconsensus.errors import ConfigError


def test_parse_set_json_and_string():
    out = _parse_set(["n=12", "p=[0.3,0.5]", "sampler=contiguous"])
    assert out == {"n": 12, "p": [0.3, 0.5], "sampler": "contiguous"}
    with pytest.raises(ConfigError):
        _parse_set(["novalue"])


def test_unknown_kind_and_keys():
    with pytest.raises(ConfigError):
        run(ExperimentConfig(kind="nope"))
    with pytest.raises(ConfigError):
        run(ExperimentConfig(kind="cmaybe-scan", params={"bogus": 1}))
    with pytest.raises(ConfigError):
        run(ExperimentConfig(kind="redundancy", params={"times": []}))


def test_cmaybe_scan_table():
    cfg = ExperimentConfig(
        kind="cmaybe-scan", params={"n": 6, "p": [0.5], "s": [0.3], "m": [0, 3, 6]}
    )
    table = run(cfg)
    assert table.columns == ["n", "p", "s", "m", "h_s", "i_sf", "c_fs"]
    assert len(table.rows) == 3
    assert table.metadata["experiment"] == "cmaybe-scan"
    assert table.metadata["seed"] == 0
    # m = 0 row snaps to zero information
    assert table.rows[0]["i_sf"] == pytest.approx(0.0, abs=1e-12)


def test_theorem_tables_report_bounds():
    for kind in ("theorem1", "lemma1"):
        table = run(ExperimentConfig(kind=kind, params={"n_states": 5}, seed=3))
        assert len(table.rows) == 5
        assert all(r["bound_ok"] for r in table.rows)
        assert all(r["identity_residual"] < 1e-9 for r in table.rows)


def test_theorem2_table():
    table = run(ExperimentConfig(kind="theorem2-stress", params={"n_states": 2, "n_povms": 2}))
    assert len(table.rows) == 4
    assert all(r["nonnegative"] for r in table.rows)


def test_spin_evolve_mean_rows():
    cfg = ExperimentConfig(
        kind="spin-evolve",
        params={"n": 8, "times": [1.0, 5.0], "m": [2], "mu": [0.0], "n_real": 2},
        seed=11,
    )
    table = run(cfg)
    mean_rows = [r for r in table.rows if r["realization"] == "mean"]
    assert len(mean_rows) == 2
    per_real = [r for r in table.rows if r["realization"] != "mean"]
    assert len(per_real) == 4


def test_write_table_format(tmp_path):
    cfg = ExperimentConfig(
        kind="cmaybe-scan", params={"n": 5, "p": [0.4], "s": [0.2], "m": [1, 2]}
    )
    path = tmp_path / "out.csv"
    write_table(run(cfg), path)
    lines = path.read_text().splitlines()
    meta_lines = [l for l in lines if l.startswith("#")]
    data_lines = [l for l in lines if not l.startswith("#")]
    assert meta_lines and data_lines[0] == "n,p,s,m,h_s,i_sf,c_fs"
    # metadata lines are 'key: json'
    for line in meta_lines:
        key, raw = line[1:].split(":", 1)
        json.loads(raw)
    # sidecar mirrors the metadata
    sidecar = json.loads((tmp_path / "out.csv.json").read_text())
    assert sidecar["experiment"] == "cmaybe-scan"


def test_determinism_across_runs(tmp_path):
    cfg = ExperimentConfig(
        kind="redundancy", params={"n": 8, "times": [1.0, 3.0]}, seed=5
    )
    texts = []
    for tag in ("a", "b"):
        path = tmp_path / f"{tag}.csv"
        write_table(run(cfg), path, sidecar=False)
        lines = path.read_text().splitlines()
        texts.append("\n".join(l for l in lines if not l.startswith("#")))
    assert texts[0] == texts[1]


def test_main_end_to_end(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    rc = main(
        [
            "cmaybe-scan",
            "--set", "n=5",
            "--set", "p=[0.5]",
            "--set", "s=[0.3]",
            "--set", "m=[1,2]",
            "--out", str(out),
            "--seed", "4",
        ]
    )
    assert rc == 0
    assert out.exists()
    assert "wrote 2 rows" in capsys.readouterr().out


def test_main_config_file_with_override(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"n": 5, "p": [0.5], "s": [0.3], "m": [1], "seed": 9}))
    out = tmp_path / "r.csv"
    rc = main(["cmaybe-scan", "--config", str(cfg_path), "--set", "m=[1,2,3]", "--out", str(out)])
    assert rc == 0
    data = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert len(data) == 1 + 3
    sidecar = json.loads((tmp_path / "r.csv.json").read_text())
    assert sidecar["seed"] == 9


def test_main_config_error_exit_code(tmp_path, capsys):
    rc = main(["cmaybe-scan", "--set", "bogus=1", "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError"


def test_qdc_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("QDC_THREADS", "2")
    out = tmp_path / "r.csv"
    rc = main(["redundancy", "--set", "n=8", "--set", "times=[1.0,2.0,3.0]", "--out", str(out)])
    assert rc == 0
    assert out.exists()


def test_parser_has_all_kinds():
    parser = build_parser()
    args = parser.parse_args(["verify", "fast"])
    assert args.kind == "verify" and args.suite == "fast"
