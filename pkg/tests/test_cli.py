"""End-to-end checks of the batch front end.

Everything goes through cli.run(argv) in-process so exit codes and written
files can be asserted directly.  Grids are kept small (n = 256 or 512): the
point here is the command contract (exit-code discipline, config rejection,
CSV columns, report envelope, byte determinism), not numerical quality,
which the module suites own.
"""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from dunkl import cli
from dunkl.ensembles import DEFAULT_SEED
from dunkl.kernel import dunkl_kernel_record
from dunkl.measure import rank1
from dunkl.thinsets import SetUnion
from dunkl.transform import import_operator


def run_in(tmp_path, *argv):
    return cli.run([*argv, "--out", str(tmp_path), "--no-timestamp"])


def report(tmp_path, command):
    return json.loads((Path(tmp_path) / f"{command}-report.json").read_text())


def write_config(tmp_path, doc):
    path = Path(tmp_path) / "config.json"
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


BAD_CONFIGS = [
    {"version": 1, "bogus": 3},
    {},
    {"version": 99},
    {"version": 1, "root_system": {"d": 2, "multiplicities": [1.0]}},
    {"version": 1, "root_system": {"multiplicities": [-0.5]}},
    {"version": 1, "root_system": {"group": "B2"}},
    {"version": 1, "grid": {"R": -3.0}},
    {"version": 1, "grid": {"n": 4}},
    {"version": 1, "grid": {"R": 12.0, "n": 1024, "refine": 2}},
    {"version": 1, "experiment": 7},
    "{not json",
]


@pytest.mark.parametrize("doc", BAD_CONFIGS, ids=[str(i) for i in range(len(BAD_CONFIGS))])
def test_bad_configs_exit_2(tmp_path, doc):
    path = write_config(tmp_path, doc)
    assert cli.run(["kernel", "--config", path, "--out", str(tmp_path)]) == 2


def test_unknown_experiment_param_exits_2(tmp_path):
    path = write_config(tmp_path, {"version": 1, "experiment": {"sigma": 3}})
    assert cli.run(["transform", "--config", path, "--out", str(tmp_path)]) == 2


def test_rank_one_guard_exits_2(tmp_path):
    assert run_in(tmp_path, "selfcheck", "--k", "1.0,1.0") == 2
    assert run_in(tmp_path, "propagate", "--k", "0.5,0.5") == 2
    assert run_in(tmp_path, "thin", "gen", "--k", "1.0,1.0") == 2


def test_unknown_command_is_an_argparse_error(tmp_path):
    with pytest.raises(SystemExit):
        cli.run(["frobnicate", "--out", str(tmp_path)])


def test_kernel_csv_contract(tmp_path):
    rc = run_in(tmp_path, "kernel", "--x", "0.0,1.3,-2.0", "--y", "0.7,1.1,2.5")
    assert rc == 0
    rows = list(csv.reader((tmp_path / "kernel-table.csv").open()))
    assert rows[0] == ["x", "y", "value_re", "value_im", "regime"]
    assert len(rows) == 4
    cfg = rank1(1.0)
    for row in rows[1:]:
        x, y = float(row[0]), float(row[1])
        rec = dunkl_kernel_record(x, y, cfg, mode="minus_i")
        assert abs(complex(float(row[2]), float(row[3])) - rec.value) < 1e-14
        assert row[4] == rec.regime
    doc = report(tmp_path, "kernel")
    assert doc["result"]["passed"] is True
    assert doc["result"]["max_series_rel_diff"] <= 1e-10


def test_kernel_mode_from_config_block(tmp_path):
    path = write_config(
        tmp_path, {"version": 1, "experiment": {"mode": "plain", "x": [1.0], "y": [2.0]}}
    )
    assert cli.run(["kernel", "--config", path, "--out", str(tmp_path), "--no-timestamp"]) == 0
    assert report(tmp_path, "kernel")["result"]["mode"] == "plain"
    bad = write_config(tmp_path, {"version": 1, "experiment": {"mode": "weird"}})
    assert cli.run(["kernel", "--config", bad, "--out", str(tmp_path)]) == 2
    uneven = write_config(tmp_path, {"version": 1, "experiment": {"x": [1.0], "y": [1.0, 2.0]}})
    assert cli.run(["kernel", "--config", uneven, "--out", str(tmp_path)]) == 2


def test_report_bytes_depend_only_on_inputs(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert run_in(a, "kernel") == 0
    assert run_in(b, "kernel") == 0
    ra = (a / "kernel-report.json").read_bytes()
    rb = (b / "kernel-report.json").read_bytes()
    assert ra == rb
    assert b"generated_at" not in ra
    assert cli.run(["kernel", "--out", str(c)]) == 0
    assert "generated_at" in json.loads((c / "kernel-report.json").read_text())


def test_flags_override_config_in_resolved_report(tmp_path):
    path = write_config(tmp_path, {"version": 1, "grid": {"n": 64}, "seed": 5})
    rc = cli.run(
        ["kernel", "--config", path, "--grid-n", "128", "--out", str(tmp_path), "--no-timestamp"]
    )
    assert rc == 0
    doc = report(tmp_path, "kernel")
    assert doc["config"]["grid"]["n"] == 128
    assert doc["config"]["seed"] == 5
    assert "out" not in doc["config"]


def test_default_seed_is_recorded(tmp_path):
    assert run_in(tmp_path, "kernel") == 0
    assert report(tmp_path, "kernel")["config"]["seed"] == DEFAULT_SEED


def test_transform_coarse_grid_fails_gate_but_reports(tmp_path):
    rc = run_in(tmp_path, "transform", "--grid-n", "256", "--dump-operator", "op.npz")
    assert rc == 1
    doc = report(tmp_path, "transform")
    assert doc["result"]["passed"] is False
    assert doc["result"]["plancherel_defect"] > 1e-5
    assert doc["result"]["round_trip"] <= 1e-7
    mat, header = import_operator(str(tmp_path / "op.npz"))
    assert header["shape"] == [256, 256]
    assert mat.shape == (256, 256)


def test_propagate_csv_contract(tmp_path):
    rc = run_in(tmp_path, "propagate", "--grid-n", "512", "--t", "0.5,1.0")
    assert rc == 0
    doc = report(tmp_path, "propagate")
    assert doc["result"]["times"] == [0.5, 1.0]
    assert max(doc["result"]["conservation_defects"]) <= 1e-5
    for name in ("propagate-t0.5.csv", "propagate-t1.csv"):
        rows = list(csv.reader((tmp_path / name).open()))
        assert rows[0] == ["x", "re_u", "im_u", "abs2"]
        assert len(rows) == 513
        data = np.array([[float(v) for v in row] for row in rows[1:]])
        assert np.max(np.abs(data[:, 1] ** 2 + data[:, 2] ** 2 - data[:, 3])) < 1e-12


def test_propagate_explicit_aliasing_exits_2(tmp_path):
    rc = run_in(tmp_path, "propagate", "--grid-n", "256", "--t", "0.05", "--method", "explicit")
    assert rc == 2
    assert not (tmp_path / "propagate-report.json").exists()


def test_thin_gen_check_round_trip(tmp_path):
    rc = run_in(tmp_path, "thin", "gen", "--eps-target", "0.1")
    assert rc == 0
    gen = report(tmp_path, "thin-gen")
    assert gen["result"]["eps_hat"] <= 0.1
    set_path = tmp_path / "thin-set.json"
    S = SetUnion.from_json(set_path.read_text())
    assert len(S.pieces) == gen["result"]["pieces"]

    rc = run_in(tmp_path, "thin", "check", "--set", str(set_path))
    assert rc == 0
    chk = report(tmp_path, "thin-check")
    assert chk["result"]["eps_hat"] == gen["result"]["eps_hat"]
    assert chk["result"]["n_samples"] > 0


def test_thin_check_input_errors(tmp_path):
    assert run_in(tmp_path, "thin", "check") == 2
    assert run_in(tmp_path, "thin", "check", "--set", str(tmp_path / "missing.json")) == 2
    garbage = tmp_path / "garbage.json"
    garbage.write_text('{"pieces": "nope"}')
    assert run_in(tmp_path, "thin", "check", "--set", str(garbage)) == 2


def test_pair_norm_payload(tmp_path):
    rc = run_in(tmp_path, "pair", "norm", "--grid-n", "512")
    assert rc == 0
    res = report(tmp_path, "pair-norm")["result"]
    h = res["norm_H"]
    assert 0.0 < h < 1.0
    assert res["D"] == pytest.approx(1.0 / (1.0 - h), rel=1e-12)
    assert res["C"] == pytest.approx(1.0 + 1.0 / (1.0 - h), rel=1e-12)
    assert res["pass"] is True
    for name in ("S", "Sigma"):
        assert res["sets"][name]["pieces"]


def test_two_time_invalid_times_exit_2(tmp_path):
    assert run_in(tmp_path, "two-time", "--grid-n", "256", "--s-time", "1.0", "--t-time", "1.0") == 2
    assert run_in(tmp_path, "two-time", "--grid-n", "256", "--s-time", "-0.5", "--t-time", "1.0") == 2


def test_lp_bounds_csv_contract(tmp_path):
    rc = run_in(
        tmp_path, "lp", "bounds", "--grid-n", "256", "--N", "2", "--n-max", "2",
        "--eps-list", "0.1",
    )
    assert rc == 0
    rows = list(csv.reader((tmp_path / "lp-bounds.csv").open()))
    assert rows[0] == ["bound_id", "N", "eps_hat", "value", "ratio"]
    ids = [row[0] for row in rows[1:]]
    assert ids == ["bound_i", "bound_ii", "bound_iii", "bound_iv", "bound_v", "bound_vi"]
    for row in rows[1:5]:
        assert row[4] == ""  # unconditional bounds carry no thinness ratio
    for row in rows[5:]:
        assert float(row[4]) > 0.0
    doc = report(tmp_path, "lp-bounds")
    assert len(doc["result"]["suites"]) == 1
    assert doc["result"]["passed"] is True


def test_cutoff_decay_csv_contract(tmp_path):
    rc = run_in(
        tmp_path, "cutoff-decay", "--grid-n", "256", "--ell", "0", "--t", "0.5,1.0",
        "--x-list", "0.5,1.0,2.0,4.0",
    )
    assert rc == 0
    rows = list(csv.reader((tmp_path / "cutoff-decay.csv").open()))
    assert rows[0] == ["ell", "t", "C_hat"]
    assert len(rows) == 3
    assert all(float(row[2]) > 0.0 for row in rows[1:])
    res = report(tmp_path, "cutoff-decay")["result"]
    assert set(res["constants"]) == {"ell=0,t=0.5", "ell=0,t=1"}
    assert res["spread"] >= 1.0
