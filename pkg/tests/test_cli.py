import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpst import cli
from hpst.config import ExperimentConfig
from hpst.errors import ConfigError

FOUR_NODE_INNER = {
    "kind": "peaks",
    "chain": {"n_nodes": 4},
    "field": {"omegas": [0, 175, 175, 0]},
    "source": 2,
    "target": 3,
    "window": 4.0,
}

TEN_NODE_PC = {
    "kind": "curve",
    "chain": {"n_nodes": 10},
    "field": {"symmetric": [2.314, -1.816, 0.916]},
    "source": 1,
    "target": 10,
    "window": 50.0,
}


def write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_peaks_table_row(tmp_path, capsys):
    code, out, _ = run(["peaks", "--config", write(tmp_path, FOUR_NODE_INNER)], capsys)
    assert code == cli.EXIT_OK
    row = out.splitlines()[1]
    p, tau_p, c, tau_c, cls = row.split()
    assert (p, c, cls) == ("1.000", "1.000", "HPST_PC")
    assert abs(float(tau_p) - 3.145) <= 0.01 and abs(float(tau_c) - 1.572) <= 0.01


def test_peaks_json(tmp_path, capsys):
    code, out, _ = run(["peaks", "--config", write(tmp_path, FOUR_NODE_INNER), "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["classification"] == "HPST_PC"
    assert data["probability"]["present"]


def test_curve_csv_columns_and_round_trip(tmp_path, capsys):
    out_path = tmp_path / "ten_node.csv"
    code, _, _ = run(["curve", "--config", write(tmp_path, TEN_NODE_PC), "--out", str(out_path)], capsys)
    assert code == 0
    assert out_path.read_text().splitlines()[0] == "tau,P_1_10,C_1_10"
    data = cli.read_curve_csv(out_path)
    assert len(data["tau"]) == 50001
    cfg = ExperimentConfig.from_dict(TEN_NODE_PC)
    with open(tmp_path / "again.csv", "w") as fh:
        cli.write_curve(cfg, fh)
    again = cli.read_curve_csv(tmp_path / "again.csv")
    for key in data:
        np.testing.assert_array_equal(data[key], again[key])
    # the file holds 12 significant digits of the in-memory curve
    i = int(np.argmax(data["P_1_10"]))
    assert data["tau"][i] == pytest.approx(46.728, abs=1e-9)
    assert data["P_1_10"][i] == pytest.approx(0.949, abs=0.005)


def test_curve_json(tmp_path, capsys):
    cfg = dict(TEN_NODE_PC, window=1.0, output={"format": "json"})
    code, out, _ = run(["curve", "--config", write(tmp_path, cfg)], capsys)
    assert code == 0
    data = json.loads(out)
    assert list(data) == ["tau", "P_1_10", "C_1_10"]
    assert len(data["tau"]) == 1001


def test_flag_overrides(tmp_path, capsys):
    code, out, _ = run(
        ["curve", "--config", write(tmp_path, TEN_NODE_PC), "--window", "1", "--tau-step", "0.5"], capsys
    )
    assert code == 0
    assert [line.split(",")[0] for line in out.splitlines()[1:]] == ["0", "0.5", "1"]


def test_machine_output_precision(tmp_path, capsys):
    cfg = dict(TEN_NODE_PC, window=0.01, tau_step=0.01)
    _, out, _ = run(["curve", "--config", write(tmp_path, cfg)], capsys)
    mantissa = out.splitlines()[2].split(",")[1].split("e")[0]
    assert sum(ch.isdigit() for ch in mantissa.lstrip("0.")) >= 9


def test_pst_check(tmp_path, capsys):
    cfg = {"kind": "pst-check", "chain": {"n_nodes": 2}, "field": {"omegas": [0, 0]},
           "pst": {"tau0": 3.141592653589793}}
    code, out, _ = run(["pst-check", "--config", write(tmp_path, cfg), "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["max_abs_residual"] < 1e-12


def test_currents_field(tmp_path, capsys):
    cfg = {"kind": "currents-field", "chain": {"n_nodes": 10}, "field": {"currents": [[1.0, 20.0]]}}
    code, out, _ = run(["currents", "field", "--config", write(tmp_path, cfg), "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["omegas"][0] == pytest.approx(1 / 20 + 1 / 29)


def test_currents_solve(tmp_path, capsys):
    cfg = {"kind": "currents-solve", "chain": {"n_nodes": 10}, "field": {"symmetric": [2.651]},
           "currents_solve": {"xis": [1.5, 3, 6, 12, 24]}}
    code, out, _ = run(["currents", "solve", "--config", write(tmp_path, cfg), "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["max_residual"] < 1e-8


def test_ill_conditioned_currents_exit_numerical(tmp_path, capsys):
    cfg = {"kind": "currents-solve", "chain": {"n_nodes": 10}, "field": {"symmetric": [2.651]},
           "currents_solve": {"xis": [20, 25, 30, 35, 40]}}
    code, _, err = run(["currents", "solve", "--config", write(tmp_path, cfg)], capsys)
    assert code == cli.EXIT_NUMERICAL
    assert err.startswith("hpst: numerical error")


def test_optimize(tmp_path, capsys):
    cfg = {"kind": "optimize", "chain": {"n_nodes": 3}, "source": 1, "target": 3, "window": 10.0,
           "threshold": 0.99,
           "search": {"parameters": [{"nodes": [1, 3], "lo": 1.0, "hi": 1.1, "step": 0.01}]}}
    code, out, _ = run(["optimize", "--config", write(tmp_path, cfg), "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["found"] and data["parameter_names"] == ["omega_1=3"]
    assert data["evaluations"] == 11


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d.update(kind="curve", targets=[]), "config.targets"),
        (lambda d: d.update(target=9), "config.target"),
        (lambda d: d.update(bogus=1), "config.bogus"),
        (lambda d: d["field"].update(symmetric=[1.0]), "config.field"),
        (lambda d: d.pop("chain"), "config.chain"),
        (lambda d: d.update(window="long"), "config.window"),
        (lambda d: d.update(field={"currents": [[1.0, -1.0]]}), "config.field"),
    ],
)
def test_config_errors(tmp_path, capsys, mutate, fragment):
    data = json.loads(json.dumps(FOUR_NODE_INNER))
    mutate(data)
    cmd = data.get("kind", "peaks")
    code, _, err = run([cmd, "--config", write(tmp_path, data)], capsys)
    assert code == cli.EXIT_CONFIG
    assert fragment in err
    assert len(err.strip().splitlines()) == 1


def test_missing_and_malformed_files(tmp_path, capsys):
    assert run(["peaks", "--config", str(tmp_path / "nope.json")], capsys)[0] == cli.EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["peaks", "--config", str(bad)], capsys)[0] == cli.EXIT_CONFIG
    assert run(["peaks"], capsys)[0] == cli.EXIT_CONFIG


def test_reproduce_subset(capsys):
    code, out, _ = run(["reproduce-tables", "--tables", "I,II"], capsys)
    assert code == cli.EXIT_OK
    assert "8 passed, 0 failed, 0 skipped" in out


def test_reproduce_reports_skip(capsys, monkeypatch):
    from hpst import reproduction

    monkeypatch.setattr(reproduction, "TABLE_ROWS", reproduction.TABLE_ROWS[-1:])
    code, out, _ = run(["reproduce-tables"], capsys)
    assert code == 0
    assert "SKIP" in out and "xi unspecified" in out


def test_reproduce_mismatch_exit_code(capsys, monkeypatch):
    from dataclasses import replace

    from hpst import reproduction

    row = replace(reproduction.TABLE_ROWS[0], probability=reproduction.E(0.5, 3.126))
    monkeypatch.setattr(reproduction, "TABLE_ROWS", (row,))
    code, out, _ = run(["reproduce-tables"], capsys)
    assert code == cli.EXIT_MISMATCH
    assert "NO" in out


finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=60)
@given(
    n=st.integers(2, 12),
    offset=finite,
    values=st.lists(finite, min_size=1, max_size=6),
    source=st.integers(1, 2),
    step=st.floats(1e-4, 1.0),
    window=st.floats(5.0, 1e4),
    field_kind=st.sampled_from(["omegas", "symmetric", "currents"]),
    fmt=st.sampled_from([None, "csv", "json"]),
)
def test_config_round_trip_is_byte_identical(n, offset, values, source, step, window, field_kind, fmt):
    if field_kind == "omegas":
        field = {"omegas": (values * n)[:n]}
    elif field_kind == "symmetric":
        field = {"symmetric": values[: (n + 1) // 2]}
    else:
        field = {"currents": [[v, 50.0 + i] for i, v in enumerate(values)]}
    data = {
        "kind": "curve", "chain": {"n_nodes": n, "homogeneous_offset": offset}, "field": field,
        "source": source, "target": n, "tau_step": step, "window": window,
        "output": {"path": None, "format": fmt},
    }
    text = ExperimentConfig.from_dict(data).dumps()
    assert ExperimentConfig.loads(text).dumps() == text


def test_loads_rejects_non_object():
    with pytest.raises(ConfigError):
        ExperimentConfig.loads("[1, 2]")
