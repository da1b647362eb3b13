import csv
import json
import subprocess
import sys

import pytest

from wick_cutkosky.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    ConfigError,
    ResultRecord,
    RunConfig,
    format_config,
    load_config,
    main,
    parse_config_text,
    run,
    sweep,
    wick_window_ok,
)
from wick_cutkosky.model import ModelParams

SMALL = "mode = solve\ndelta = 0.6\nepsilon2 = 0.1\nn_p = 8\nn_theta = 3\nn_eigen = 3\n"


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_parse_config_text_types_and_comments():
    values = parse_config_text("# header\nmode = solve  # trailing\n\ndelta=0.6\nn_p = 20\nn_gc = auto\ndump_grid = yes\n")
    assert values == {"mode": "solve", "delta": 0.6, "n_p": 20, "n_gc": None, "dump_grid": True}


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("delta_x = 1", "delta_x"),
        ("n_p = 2.5", "n_p"),
        ("just words", "line 1"),
        ("dump_grid = maybe", "dump_grid"),
    ],
)
def test_parse_config_errors_name_the_field(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config_text(text)


def test_empty_config_lists_required_fields(tmp_path, capsys):
    path = write_config(tmp_path, "")
    assert main(["run", "--config", str(path)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    for key in ("mode", "delta", "epsilon2"):
        assert key in err


@pytest.mark.parametrize(
    "overrides, fragment",
    [
        (dict(mode="bogus", delta=0.6, epsilon2=0.1), "mode"),
        (dict(mode="solve", delta=1.2, epsilon2=0.1), "delta"),
        (dict(mode="solve", delta=0.6, epsilon2=0.1, n_p=2), "n_p"),
        (dict(mode="solve", delta=0.6, epsilon2=0.1, script_n=2), "script_n"),
        (dict(mode="solve", delta=0.6, epsilon2=0.1, n_eigen=0), "n_eigen"),
        (dict(mode="converge", delta=0.6, epsilon2=0.1, ladder="5,x"), "ladder"),
    ],
)
def test_validation_messages(overrides, fragment):
    with pytest.raises(ConfigError, match=fragment):
        RunConfig(**overrides).validate()


def test_table_modes_need_no_physics_keys():
    RunConfig(mode="table1").validate()


def test_flags_override_file(tmp_path):
    path = write_config(tmp_path, SMALL)
    config = load_config(path, {"n_p": "10", "xi": "0.7"})
    assert config.n_p == 10 and config.xi == 0.7 and config.n_theta == 3


def test_format_config_round_trip():
    config = RunConfig(mode="solve", delta=0.6, epsilon2=0.5, n_p=12, dump_grid=True)
    again = RunConfig(**parse_config_text(format_config(config)))
    assert again == config


def test_default_basis_size_by_energy():
    assert RunConfig(mode="solve", delta=0.6, epsilon2=0.0).basis_size() == (20, 1)
    assert RunConfig(mode="solve", delta=0.6, epsilon2=0.9).basis_size() == (25, 20)
    assert RunConfig(mode="solve", delta=0.6, epsilon2=0.99).basis_size() == (30, 30)


def test_default_ladder():
    specs = RunConfig(mode="converge", delta=0.6, epsilon2=0.0).ladder_specs()
    assert [s.n_p for s in specs] == [5, 10, 20]
    specs = RunConfig(mode="converge", delta=0.6, epsilon2=0.1, ladder="6:2, 8:3").ladder_specs()
    assert [(s.n_p, s.n_theta) for s in specs] == [(6, 2), (8, 3)]


def test_wick_window():
    assert wick_window_ok(ModelParams.from_epsilon2(0.6, 0.1, xi=0.5))
    assert wick_window_ok(ModelParams.from_epsilon2(0.6, 0.99, xi=0.8))
    assert not wick_window_ok(ModelParams.from_epsilon2(0.6, 0.99, xi=0.5))


def test_solve_writes_table_and_document(tmp_path):
    config = load_config(write_config(tmp_path, SMALL), {"out_dir": str(tmp_path / "out")})
    record, status = run(config)
    assert status == EXIT_OK
    rows = read_csv(tmp_path / "out" / "results.csv")
    assert len(rows) == 3
    assert list(rows[0])[:5] == ["index", "lambda_re", "lambda_im", "r", "max_resid"]
    doc = json.loads((tmp_path / "out" / "results.json").read_text())
    assert doc["config"]["n_p"] == 8
    assert doc["basis"]["size"] == 24
    assert [float(r["lambda_re"]) for r in rows] == [r["lambda_re"] for r in record.rows]
    assert all(float(r["r"]) > 0.99 for r in rows)


def test_result_record_round_trip(tmp_path):
    config = load_config(write_config(tmp_path, SMALL), {"out_dir": str(tmp_path)})
    record, _ = run(config, write=False)
    assert ResultRecord.from_json(record.to_json()) == record


def test_runs_are_reproducible(tmp_path):
    config = load_config(write_config(tmp_path, SMALL), {"out_dir": str(tmp_path / "a")})
    first, _ = run(config)
    config.out_dir = str(tmp_path / "b")
    second, _ = run(config)
    assert first.rows == second.rows
    assert (tmp_path / "a" / "results.csv").read_text() == (tmp_path / "b" / "results.csv").read_text()


def test_verify_mode_writes_reports_and_grid(tmp_path):
    config = load_config(write_config(tmp_path, SMALL.replace("solve", "verify")), {"out_dir": str(tmp_path)})
    run(config)
    for i in (1, 2, 3):
        assert (tmp_path / f"verify_{i}.tsv").exists()
        doc = json.loads((tmp_path / f"verify_{i}.json").read_text())
        assert len(doc["points"]) == 8 * (3 + 3)
    with open(tmp_path / "grid.tsv") as fh:
        header = fh.readline().split()
    assert header == ["index", "p", "z", "psi", "chi_R", "chi_I", "lhs", "rhs"]


def test_converge_mode_rows(tmp_path):
    config = RunConfig(mode="converge", delta=0.6, epsilon2=0.0, ladder="5,10", n_eigen=2, out_dir=str(tmp_path))
    record, status = run(config)
    assert status == EXIT_OK
    assert [(r["n_p"], r["index"]) for r in record.rows] == [(5, 1), (5, 2), (10, 1), (10, 2)]


def test_table1_mode_matches(tmp_path):
    record, status = run(RunConfig(mode="table1", out_dir=str(tmp_path)))
    assert status == EXIT_OK
    assert len(record.rows) == 6
    assert all(row["match"] for row in record.rows)


def test_sweep_serial_and_pool_agree(tmp_path):
    base = RunConfig(mode="solve", delta=0.6, epsilon2=0.1, n_p=6, n_theta=2, n_eigen=2, out_dir=str(tmp_path / "s"))
    serial = sweep(base, "epsilon2", ["0.0", "0.3"], workers=1)
    base.out_dir = str(tmp_path / "p")
    pooled = sweep(base, "epsilon2", ["0.0", "0.3"], workers=2)
    assert [r.rows for r in serial] == [r.rows for r in pooled]
    rows = read_csv(tmp_path / "s" / "sweep.csv")
    assert {row["epsilon2"] for row in rows} == {"0.0", "0.3"}
    assert (tmp_path / "s" / "epsilon2=0.3" / "results.json").exists()


def test_sweep_records_invalid_points(tmp_path):
    base = RunConfig(mode="solve", delta=0.6, epsilon2=0.1, n_p=6, n_theta=2, n_eigen=2, out_dir=str(tmp_path))
    records = sweep(base, "delta", ["0.5", "1.5"], workers=1)
    assert records[0].status == "ok" and records[1].status == "failed"
    assert "delta" in records[1].message


def test_sweep_axis_validated():
    with pytest.raises(ConfigError):
        sweep(RunConfig(mode="solve", delta=0.6, epsilon2=0.1), "mode", ["solve"])


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "wick_cutkosky", "run", "--mode", "solve", "--delta", "0.6", "--epsilon2", "0.0",
         "--n-p", "8", "--n-eigen", "2", "--out-dir", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "lambda/m^2" in proc.stdout
    assert (tmp_path / "results.csv").exists()
